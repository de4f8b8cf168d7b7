#pragma once

// Independent oracles used by the test suites. Everything here is written
// against the definitions directly (naive transforms, textbook update rules,
// finite differences) and must stay independent of the library's
// implementation paths.

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <vector>

#include "famnet/matrix.hpp"
#include "famnet/spectral.hpp"

namespace oracles {

// Plain triple-loop matrix product, accumulation over k ascending.
inline famnet::DenseMatrix naive_matmul(const famnet::DenseMatrix& a,
                                        const famnet::DenseMatrix& b) {
  famnet::DenseMatrix c(a.rows, b.cols);
  for (long i = 0; i < a.rows; ++i)
    for (long j = 0; j < b.cols; ++j) {
      double s = 0.0;
      for (long l = 0; l < a.cols; ++l) s += a(i, l) * b(l, j);
      c(i, j) = s;
    }
  return c;
}

// Direct O(N^2) multi-dimensional DFT with the same normalization and
// frequency bookkeeping as the fast transform.
inline std::vector<std::complex<double>> naive_dft(const famnet::GridField& f) {
  const int d = f.dim();
  const long total = f.total();
  std::vector<std::complex<double>> out(total);
  std::vector<long> kidx(d, 0), xidx(d, 0);
  for (long r = 0; r < total; ++r) {
    std::complex<double> s(0.0, 0.0);
    std::fill(xidx.begin(), xidx.end(), 0);
    for (long q = 0; q < total; ++q) {
      double phase = 0.0;
      for (int a = 0; a < d; ++a)
        phase += static_cast<double>(kidx[a]) * static_cast<double>(xidx[a]) /
                 static_cast<double>(f.counts[a]);
      s += f.values[q] * std::exp(std::complex<double>(0.0, -2.0 * std::numbers::pi * phase));
      for (int a = d - 1; a >= 0; --a) {
        if (++xidx[a] < f.counts[a]) break;
        xidx[a] = 0;
      }
    }
    out[r] = s / static_cast<double>(total);
    for (int a = d - 1; a >= 0; --a) {
      if (++kidx[a] < f.counts[a]) break;
      kidx[a] = 0;
    }
  }
  return out;
}

// Textbook Adam (bias-corrected), written separately from the library's.
struct RefAdam {
  std::vector<double> m, v;
  long t = 0;

  explicit RefAdam(size_t n) : m(n, 0.0), v(n, 0.0) {}

  void step(std::vector<double>& params, const std::vector<double>& g, double lr) {
    const double b1 = 0.9, b2 = 0.999, eps = 1e-8;
    ++t;
    for (size_t i = 0; i < params.size(); ++i) {
      m[i] = b1 * m[i] + (1 - b1) * g[i];
      v[i] = b2 * v[i] + (1 - b2) * g[i] * g[i];
      const double mh = m[i] / (1 - std::pow(b1, t));
      const double vh = v[i] / (1 - std::pow(b2, t));
      params[i] -= lr * mh / (std::sqrt(vh) + eps);
    }
  }
};

// Central finite differences of a scalar function of a parameter vector.
inline std::vector<double> fd_gradient(const std::function<double()>& eval,
                                       std::vector<double>& params, double h_rel = 1e-5) {
  std::vector<double> g(params.size());
  for (size_t i = 0; i < params.size(); ++i) {
    const double save = params[i];
    const double h = h_rel * std::max(1.0, std::abs(save));
    params[i] = save + h;
    const double up = eval();
    params[i] = save - h;
    const double dn = eval();
    params[i] = save;
    g[i] = (up - dn) / (2.0 * h);
  }
  return g;
}

inline double rel_vec_error(const std::vector<double>& got, const std::vector<double>& want) {
  double num = 0.0, den = 0.0;
  for (size_t i = 0; i < got.size(); ++i) {
    num += (got[i] - want[i]) * (got[i] - want[i]);
    den += want[i] * want[i];
  }
  return std::sqrt(num / std::max(den, 1e-300));
}

// Dense Gaussian elimination with partial pivoting, for the small
// least-squares systems the constructed-network tests assemble.
inline std::vector<double> solve_linear(std::vector<std::vector<double>> a,
                                        std::vector<double> b) {
  const size_t n = b.size();
  for (size_t col = 0; col < n; ++col) {
    size_t piv = col;
    for (size_t r = col + 1; r < n; ++r)
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    std::swap(a[col], a[piv]);
    std::swap(b[col], b[piv]);
    for (size_t r = col + 1; r < n; ++r) {
      const double f = a[r][col] / a[col][col];
      for (size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  std::vector<double> x(n);
  for (size_t ri = n; ri-- > 0;) {
    double s = b[ri];
    for (size_t c = ri + 1; c < n; ++c) s -= a[ri][c] * x[c];
    x[ri] = s / a[ri][ri];
  }
  return x;
}

// Least squares min ||A x - y||_2 via normal equations.
inline std::vector<double> least_squares(const std::vector<std::vector<double>>& rows,
                                         const std::vector<double>& y) {
  const size_t n = rows[0].size();
  std::vector<std::vector<double>> ata(n, std::vector<double>(n, 0.0));
  std::vector<double> aty(n, 0.0);
  for (size_t r = 0; r < rows.size(); ++r) {
    for (size_t i = 0; i < n; ++i) {
      aty[i] += rows[r][i] * y[r];
      for (size_t j = 0; j < n; ++j) ata[i][j] += rows[r][i] * rows[r][j];
    }
  }
  return solve_linear(std::move(ata), std::move(aty));
}

}  // namespace oracles
