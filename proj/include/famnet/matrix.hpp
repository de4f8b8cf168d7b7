#pragma once

#include <cmath>
#include <cstring>
#include <string>
#include <vector>

#include "famnet/errors.hpp"
#include "famnet/thread_pool.hpp"

namespace famnet {

// Dense row-major matrix of 64-bit floats.
struct DenseMatrix {
  long rows = 0;
  long cols = 0;
  std::vector<double> a;

  DenseMatrix() = default;
  DenseMatrix(long r, long c) : rows(r), cols(c), a(static_cast<size_t>(r) * c, 0.0) {}

  double& operator()(long i, long j) { return a[i * cols + j]; }
  double operator()(long i, long j) const { return a[i * cols + j]; }

  long size() const { return rows * cols; }
  double* data() { return a.data(); }
  const double* data() const { return a.data(); }

  void resize(long r, long c) {
    rows = r;
    cols = c;
    a.assign(static_cast<size_t>(r) * c, 0.0);
  }

  void zero() { std::memset(a.data(), 0, a.size() * sizeof(double)); }

  bool same_shape(const DenseMatrix& o) const { return rows == o.rows && cols == o.cols; }

  bool all_finite() const {
    for (double v : a)
      if (!std::isfinite(v)) return false;
    return true;
  }
};

inline void require_shape(bool ok, const std::string& what) {
  if (!ok) throw ShapeError(what);
}

// C = A * B. Accumulation over k is strictly ascending for every output
// element, so the result is independent of the worker count.
inline void matmul_into(DenseMatrix& c, const DenseMatrix& a, const DenseMatrix& b,
                        ThreadPool* pool = nullptr) {
  require_shape(a.cols == b.rows, "matmul: inner dimensions disagree");
  require_shape(c.rows == a.rows && c.cols == b.cols, "matmul: bad output shape");
  const long n = a.rows, k = a.cols, m = b.cols;
  parallel_for(pool, n, [&](long r0, long r1) {
    for (long i = r0; i < r1; ++i) {
      double* ci = c.data() + i * m;
      std::memset(ci, 0, m * sizeof(double));
      const double* ai = a.data() + i * k;
      for (long l = 0; l < k; ++l) {
        const double av = ai[l];
        const double* bl = b.data() + l * m;
        for (long j = 0; j < m; ++j) ci[j] += av * bl[j];
      }
    }
  });
}

inline DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b, ThreadPool* pool = nullptr) {
  DenseMatrix c(a.rows, b.cols);
  matmul_into(c, a, b, pool);
  return c;
}

// C += A^T * B, accumulating into c. Parallel over rows of C (columns of A);
// the reduction over the batch index runs sequentially per output element.
inline void matmul_at_b_accum(DenseMatrix& c, const DenseMatrix& a, const DenseMatrix& b,
                              ThreadPool* pool = nullptr) {
  require_shape(a.rows == b.rows, "matmul_at_b: batch dimensions disagree");
  require_shape(c.rows == a.cols && c.cols == b.cols, "matmul_at_b: bad output shape");
  const long n = a.rows, k = a.cols, m = b.cols;
  parallel_for(pool, k, [&](long r0, long r1) {
    for (long i = r0; i < r1; ++i) {
      double* ci = c.data() + i * m;
      for (long l = 0; l < n; ++l) {
        const double av = a(l, i);
        const double* bl = b.data() + l * m;
        for (long j = 0; j < m; ++j) ci[j] += av * bl[j];
      }
    }
  });
}

// C += A * B^T. B is transposed into scratch so the inner loop runs over
// contiguous rows (same vectorizable form as matmul_into).
inline void matmul_a_bt_accum(DenseMatrix& c, const DenseMatrix& a, const DenseMatrix& b,
                              ThreadPool* pool = nullptr) {
  require_shape(a.cols == b.cols, "matmul_a_bt: inner dimensions disagree");
  require_shape(c.rows == a.rows && c.cols == b.rows, "matmul_a_bt: bad output shape");
  const long n = a.rows, k = a.cols, m = b.rows;
  DenseMatrix bt(k, m);
  for (long j = 0; j < m; ++j)
    for (long l = 0; l < k; ++l) bt(l, j) = b(j, l);
  parallel_for(pool, n, [&](long r0, long r1) {
    for (long i = r0; i < r1; ++i) {
      double* ci = c.data() + i * m;
      const double* ai = a.data() + i * k;
      for (long l = 0; l < k; ++l) {
        const double av = ai[l];
        const double* bl = bt.data() + l * m;
        for (long j = 0; j < m; ++j) ci[j] += av * bl[j];
      }
    }
  });
}

inline DenseMatrix add(const DenseMatrix& a, const DenseMatrix& b) {
  require_shape(a.same_shape(b), "add: shapes disagree");
  DenseMatrix c(a.rows, a.cols);
  for (long i = 0; i < a.size(); ++i) c.a[i] = a.a[i] + b.a[i];
  return c;
}

template <typename F>
DenseMatrix elementwise_apply(const DenseMatrix& a, F&& f) {
  DenseMatrix c(a.rows, a.cols);
  for (long i = 0; i < a.size(); ++i) c.a[i] = f(a.a[i]);
  return c;
}

}  // namespace famnet
