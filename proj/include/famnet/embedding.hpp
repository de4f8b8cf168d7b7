#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "famnet/errors.hpp"
#include "famnet/matrix.hpp"

namespace famnet {

enum class EmbeddingKind { DownScale, Fourier, Hybrid, Identity };

inline std::string embedding_name(EmbeddingKind k) {
  switch (k) {
    case EmbeddingKind::DownScale: return "downscale";
    case EmbeddingKind::Fourier: return "fourier";
    case EmbeddingKind::Hybrid: return "hybrid";
    case EmbeddingKind::Identity: return "identity";
  }
  return "?";
}

inline EmbeddingKind embedding_from_name(const std::string& s) {
  if (s == "downscale") return EmbeddingKind::DownScale;
  if (s == "fourier") return EmbeddingKind::Fourier;
  if (s == "hybrid") return EmbeddingKind::Hybrid;
  if (s == "identity") return EmbeddingKind::Identity;
  throw ConfigError("unknown embedding: " + s);
}

// Input feature map of one sub-network. Per angular-frequency vector k the
// features are: DownScale [k.x], Fourier [sin(k.x), cos(k.x)], Hybrid
// [k.x, cos(k.x), sin(k.x)]. Identity passes the raw coordinates through.
struct Embedding {
  EmbeddingKind kind = EmbeddingKind::Identity;
  std::vector<std::vector<double>> freqs;

  int per_freq_width() const {
    switch (kind) {
      case EmbeddingKind::DownScale: return 1;
      case EmbeddingKind::Fourier: return 2;
      case EmbeddingKind::Hybrid: return 3;
      case EmbeddingKind::Identity: return 0;
    }
    return 0;
  }

  long width(int input_dim) const {
    if (kind == EmbeddingKind::Identity) return input_dim;
    return static_cast<long>(freqs.size()) * per_freq_width();
  }

  void validate(int input_dim) const {
    if (kind == EmbeddingKind::Identity) return;
    if (freqs.empty()) throw ConfigError("embedding: needs at least one frequency vector");
    for (const auto& k : freqs)
      if (static_cast<int>(k.size()) != input_dim)
        throw ShapeError("embedding: frequency dimension mismatch");
  }

  // Feature values at a batch of points (N x d) -> (N x width).
  DenseMatrix features(const DenseMatrix& pts) const {
    validate(static_cast<int>(pts.cols));
    const long n = pts.rows, d = pts.cols;
    DenseMatrix out(n, width(static_cast<int>(d)));
    if (kind == EmbeddingKind::Identity) {
      out.a = pts.a;
      return out;
    }
    for (long i = 0; i < n; ++i) {
      long c = 0;
      for (const auto& k : freqs) {
        double phi = 0.0;
        for (long a = 0; a < d; ++a) phi += k[a] * pts(i, a);
        switch (kind) {
          case EmbeddingKind::DownScale:
            out(i, c++) = phi;
            break;
          case EmbeddingKind::Fourier:
            out(i, c++) = std::sin(phi);
            out(i, c++) = std::cos(phi);
            break;
          case EmbeddingKind::Hybrid:
            out(i, c++) = phi;
            out(i, c++) = std::cos(phi);
            out(i, c++) = std::sin(phi);
            break;
          default:
            break;
        }
      }
    }
    return out;
  }

  // Stacked value/d1/d2 features with respect to input coordinate `coord`
  // -> (3N x width). Frequencies are constants, so these carry no trainable
  // dependence.
  DenseMatrix feature_jets(const DenseMatrix& pts, int coord) const {
    validate(static_cast<int>(pts.cols));
    if (coord < 0 || coord >= pts.cols) throw ShapeError("feature_jets: bad coordinate");
    const long n = pts.rows, d = pts.cols;
    const long w = width(static_cast<int>(d));
    DenseMatrix out(3 * n, w);
    if (kind == EmbeddingKind::Identity) {
      for (long i = 0; i < n; ++i)
        for (long a = 0; a < d; ++a) {
          out(i, a) = pts(i, a);
          out(n + i, a) = (a == coord) ? 1.0 : 0.0;
          out(2 * n + i, a) = 0.0;
        }
      return out;
    }
    for (long i = 0; i < n; ++i) {
      long c = 0;
      for (const auto& k : freqs) {
        double phi = 0.0;
        for (long a = 0; a < d; ++a) phi += k[a] * pts(i, a);
        const double kc = k[coord];
        const double s = std::sin(phi), cs = std::cos(phi);
        switch (kind) {
          case EmbeddingKind::DownScale:
            out(i, c) = phi;
            out(n + i, c) = kc;
            out(2 * n + i, c) = 0.0;
            ++c;
            break;
          case EmbeddingKind::Fourier:
            out(i, c) = s;
            out(n + i, c) = kc * cs;
            out(2 * n + i, c) = -kc * kc * s;
            ++c;
            out(i, c) = cs;
            out(n + i, c) = -kc * s;
            out(2 * n + i, c) = -kc * kc * cs;
            ++c;
            break;
          case EmbeddingKind::Hybrid:
            out(i, c) = phi;
            out(n + i, c) = kc;
            out(2 * n + i, c) = 0.0;
            ++c;
            out(i, c) = cs;
            out(n + i, c) = -kc * s;
            out(2 * n + i, c) = -kc * kc * cs;
            ++c;
            out(i, c) = s;
            out(n + i, c) = kc * cs;
            out(2 * n + i, c) = -kc * kc * s;
            ++c;
            break;
          default:
            break;
        }
      }
    }
    return out;
  }
};

// Single-point feature map (the spec-level embed operation).
inline std::vector<double> embed(const Embedding& e, const std::vector<double>& x) {
  DenseMatrix pts(1, static_cast<long>(x.size()));
  pts.a = x;
  DenseMatrix f = e.features(pts);
  return f.a;
}

}  // namespace famnet
