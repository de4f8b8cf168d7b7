#pragma once

#include <cmath>
#include <string>

#include "famnet/errors.hpp"

namespace famnet {

enum class ActKind { Sfm, Sigmoid, Sin };

// Softened Fourier Mapping: 0.5*sin(x) + 0.5*cos(x).
inline double sfm_activation(double x) { return 0.5 * std::sin(x) + 0.5 * std::cos(x); }

// Value and first three derivatives, needed to push second-order jets through
// a layer and then differentiate that computation once more in reverse.
struct ActDerivs {
  double f, d1, d2, d3;
};

namespace act_detail {
inline void sincos_both(double x, double& s, double& c) {
#if defined(__GNUC__)
  ::sincos(x, &s, &c);
#else
  s = std::sin(x);
  c = std::cos(x);
#endif
}
}  // namespace act_detail

inline ActDerivs act_derivs(ActKind k, double x) {
  switch (k) {
    case ActKind::Sfm: {
      double s, c;
      act_detail::sincos_both(x, s, c);
      const double f = 0.5 * s + 0.5 * c;
      const double d1 = 0.5 * c - 0.5 * s;
      return {f, d1, -f, -d1};
    }
    case ActKind::Sigmoid: {
      const double f = 1.0 / (1.0 + std::exp(-x));
      const double d1 = f * (1.0 - f);
      const double d2 = d1 * (1.0 - 2.0 * f);
      const double d3 = d1 * (1.0 - 6.0 * f + 6.0 * f * f);
      return {f, d1, d2, d3};
    }
    case ActKind::Sin: {
      double s, c;
      act_detail::sincos_both(x, s, c);
      return {s, c, -s, -c};
    }
  }
  throw InternalError("act_derivs: bad activation kind");
}

inline std::string act_name(ActKind k) {
  switch (k) {
    case ActKind::Sfm: return "sfm";
    case ActKind::Sigmoid: return "sigmoid";
    case ActKind::Sin: return "sin";
  }
  return "?";
}

inline ActKind act_from_name(const std::string& s) {
  if (s == "sfm") return ActKind::Sfm;
  if (s == "sigmoid") return ActKind::Sigmoid;
  if (s == "sin") return ActKind::Sin;
  throw ConfigError("unknown activation: " + s);
}

}  // namespace famnet
