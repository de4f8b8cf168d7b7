#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "famnet/errors.hpp"
#include "famnet/jet.hpp"
#include "famnet/spectral.hpp"

namespace famnet {

// Semi-classical Gaussian wave packet used as the initial state:
//   psi0(x) = (pi*eps)^(-1/4) * exp(-(x-1)^2/(2 eps) + i 2 (x-1)/eps).
inline std::complex<double> schrodinger_initial(double x, double eps) {
  const double amp = std::pow(std::numbers::pi * eps, -0.25);
  const std::complex<double> g(-(x - 1.0) * (x - 1.0) / (2.0 * eps), 2.0 * (x - 1.0) / eps);
  return amp * std::exp(g);
}

// Value and first/second x-derivatives of psi0 (analytic, via the log form).
inline void schrodinger_initial_jets(double x, double eps, Jet2& re, Jet2& im) {
  const std::complex<double> p = schrodinger_initial(x, eps);
  const std::complex<double> g1(-(x - 1.0) / eps, 2.0 / eps);
  const std::complex<double> g2(-1.0 / eps, 0.0);
  const std::complex<double> p1 = g1 * p;
  const std::complex<double> p2 = (g2 + g1 * g1) * p;
  re = Jet2{p.real(), p1.real(), p2.real(), 0};
  im = Jet2{p.imag(), p1.imag(), p2.imag(), 0};
}

// Strang-splitting spectral integrator for
//   psi_t = (i eps / 2) psi_xx - (i/eps) V(x) psi,  V(x) = x^2/2,
// on x in [0, pi) with periodic boundary, used as the in-repo reference
// solution. Half potential step, full kinetic step in Fourier space, half
// potential step; second order in dt.
class SchrodingerReference {
 public:
  SchrodingerReference(double eps, long nx = 2048, double dt_target = 1e-4)
      : eps_(eps), nx_(nx), dt_target_(dt_target) {
    if (nx < 8) throw ConfigError("schrodinger reference: nx too small");
    psi_.resize(nx_);
    const double L = std::numbers::pi;
    for (long i = 0; i < nx_; ++i) {
      const double x = static_cast<double>(i) * L / static_cast<double>(nx_);
      psi_[i] = schrodinger_initial(x, eps_);
    }
    time_ = 0.0;
  }

  double time() const { return time_; }
  double eps() const { return eps_; }

  // Advances to time t (t >= current time) with steps of at most dt_target,
  // chosen so the interval divides evenly.
  void advance_to(double t) {
    const double span = t - time_;
    if (span <= 0.0) return;
    const long steps = std::max<long>(1, static_cast<long>(std::ceil(span / dt_target_)));
    const double dt = span / static_cast<double>(steps);
    for (long s = 0; s < steps; ++s) strang_step(dt);
    time_ = t;
  }

  // psi at arbitrary positions via trigonometric interpolation of the
  // current state.
  std::vector<std::complex<double>> evaluate(const std::vector<double>& xs) const {
    std::vector<std::complex<double>> spec = psi_;
    std::vector<long> counts{nx_};
    spectral_detail::transform_axis(spec, counts, 0, false);
    const double norm = 1.0 / static_cast<double>(nx_);
    std::vector<std::complex<double>> out(xs.size());
    const double L = std::numbers::pi;
    for (size_t q = 0; q < xs.size(); ++q) {
      std::complex<double> s(0.0, 0.0);
      for (long m = 0; m < nx_; ++m) {
        const double k =
            2.0 * std::numbers::pi * static_cast<double>(spectral_detail::signed_index(m, nx_)) / L;
        s += spec[m] * std::exp(std::complex<double>(0.0, k * xs[q]));
      }
      out[q] = s * norm;
    }
    return out;
  }

  const std::vector<std::complex<double>>& state() const { return psi_; }

 private:
  void strang_step(double dt) {
    potential_half(dt);
    kinetic_full(dt);
    potential_half(dt);
  }

  void potential_half(double dt) {
    const double L = std::numbers::pi;
    for (long i = 0; i < nx_; ++i) {
      const double x = static_cast<double>(i) * L / static_cast<double>(nx_);
      const double v = 0.5 * x * x;
      psi_[i] *= std::exp(std::complex<double>(0.0, -v * dt / (2.0 * eps_)));
    }
  }

  void kinetic_full(double dt) {
    std::vector<long> counts{nx_};
    spectral_detail::transform_axis(psi_, counts, 0, false);
    const double L = std::numbers::pi;
    for (long m = 0; m < nx_; ++m) {
      const double k =
          2.0 * std::numbers::pi * static_cast<double>(spectral_detail::signed_index(m, nx_)) / L;
      psi_[m] *= std::exp(std::complex<double>(0.0, -eps_ * k * k * dt / 2.0));
    }
    spectral_detail::transform_axis(psi_, counts, 0, true);
    const double norm = 1.0 / static_cast<double>(nx_);
    for (auto& v : psi_) v *= norm;
  }

  double eps_;
  long nx_;
  double dt_target_;
  double time_ = 0.0;
  std::vector<std::complex<double>> psi_;
};

}  // namespace famnet
