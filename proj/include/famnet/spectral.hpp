#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <numbers>
#include <set>
#include <string>
#include <vector>

#include "famnet/errors.hpp"
#include "famnet/matrix.hpp"

namespace famnet {

struct Axis {
  double lo = 0.0;
  double hi = 1.0;
  double length() const { return hi - lo; }
};

// Real field sampled on an endpoint-exclusive uniform grid: along each axis
// the nodes are lo + i*(hi-lo)/n for i = 0..n-1 (periodic convention, so the
// DFT is exact for band-limited periodic signals). Values are row-major with
// the last axis fastest.
struct GridField {
  std::vector<Axis> box;
  std::vector<long> counts;
  std::vector<double> values;
  std::vector<bool> mirrored;  // axes produced by even_extend

  int dim() const { return static_cast<int>(box.size()); }

  long total() const {
    long t = 1;
    for (long c : counts) t *= c;
    return t;
  }

  double node(int axis, long i) const {
    return box[axis].lo + static_cast<double>(i) * box[axis].length() / counts[axis];
  }
};

// One spectral line: physical angular frequency (radians per unit length,
// k = 2*pi*index/axis_length) and its complex Fourier coefficient. The signed
// grid index is kept so that set comparisons stay exact.
struct FreqEntry {
  std::vector<double> k;
  std::vector<long> index;
  std::complex<double> coeff;

  double modulus() const { return std::abs(coeff); }

  double l1() const {
    double s = 0.0;
    for (double v : k) s += std::abs(v);
    return s;
  }
};

// Ordered collection of frequencies: |k|_1 ascending, ties by lexicographic k.
struct FrequencySet {
  std::vector<FreqEntry> entries;
  std::vector<long> grid_counts;   // grid the coefficients came from
  std::vector<bool> mirrored_axes;

  size_t size() const { return entries.size(); }
  bool empty() const { return entries.empty(); }

  void sort_canonical() {
    std::sort(entries.begin(), entries.end(), [](const FreqEntry& a, const FreqEntry& b) {
      const double la = a.l1(), lb = b.l1();
      if (la != lb) return la < lb;
      return a.k < b.k;
    });
  }
};

struct SelectionParams {
  double lambda = 0.01;  // relative modulus threshold, in (0,1)
  double delta = 0.05;   // coverage slack for the diagnostic check, in [0,1)
};

namespace spectral_detail {

// Mixed-radix Cooley-Tukey on one strided line; prime lengths fall back to a
// direct transform within the combine stage.
inline void fft_line(std::complex<double>* x, long n, long stride,
                     std::complex<double>* scratch,
                     const std::vector<std::complex<double>>& twiddle, long tw_stride) {
  if (n == 1) return;
  long p = 2;
  while (p * p <= n && n % p != 0) ++p;
  if (n % p != 0) p = n;
  const long m = n / p;

  if (m > 1)
    for (long r = 0; r < p; ++r)
      fft_line(x + r * stride, m, stride * p, scratch, twiddle, tw_stride * p);

  for (long k = 0; k < m; ++k) {
    for (long q = 0; q < p; ++q) {
      std::complex<double> s(0.0, 0.0);
      const long j = k + q * m;
      for (long r = 0; r < p; ++r)
        s += twiddle[(j * r % n) * tw_stride] * x[(r + k * p) * stride];
      scratch[j] = s;
    }
  }
  for (long j = 0; j < n; ++j) x[j * stride] = scratch[j];
}

inline void transform_axis(std::vector<std::complex<double>>& data,
                           const std::vector<long>& counts, int ax, bool inverse) {
  const int d = static_cast<int>(counts.size());
  const long n = counts[ax];
  long stride = 1;
  for (int a = ax + 1; a < d; ++a) stride *= counts[a];
  const long block = stride * n;
  long total = 1;
  for (long c : counts) total *= c;

  std::vector<std::complex<double>> twiddle(n);
  const double sign = inverse ? 1.0 : -1.0;
  for (long i = 0; i < n; ++i) {
    const double ang = sign * 2.0 * std::numbers::pi * static_cast<double>(i) / n;
    twiddle[i] = {std::cos(ang), std::sin(ang)};
  }
  std::vector<std::complex<double>> scratch(n);
  for (long base = 0; base < total; base += block)
    for (long off = 0; off < stride; ++off)
      fft_line(data.data() + base + off, n, stride, scratch.data(), twiddle, 1);
}

inline long signed_index(long i, long n) { return i <= n / 2 ? i : i - n; }

inline long wrap_index(long s, long n) { return s >= 0 ? s : s + n; }

// Canonical representative of a conjugate orbit. Mirrored axes additionally
// identify +/- of that component, matching the symmetry an even extension
// imposes on the modulus spectrum.
inline std::vector<long> canon_index(std::vector<long> idx, const std::vector<long>& counts,
                                     const std::vector<bool>& mirrored) {
  int fnz = -1;
  for (size_t a = 0; a < idx.size(); ++a)
    if (idx[a] != 0) {
      fnz = static_cast<int>(a);
      break;
    }
  if (fnz >= 0 && idx[fnz] < 0) {
    for (size_t a = 0; a < idx.size(); ++a) {
      idx[a] = -idx[a];
      if (idx[a] == -counts[a] / 2 && counts[a] % 2 == 0) idx[a] = counts[a] / 2;
    }
  }
  for (size_t a = 0; a < idx.size(); ++a)
    if (!mirrored.empty() && mirrored[a] && idx[a] < 0) idx[a] = -idx[a];
  return idx;
}

}  // namespace spectral_detail

// Evaluates `fn` (mapping an N x d point matrix to N field values) on every
// uniform node of the box.
inline GridField sample_grid(const std::function<std::vector<double>(const DenseMatrix&)>& fn,
                             const std::vector<Axis>& box, const std::vector<long>& counts) {
  if (box.size() != counts.size()) throw ShapeError("sample_grid: box/counts rank mismatch");
  for (long c : counts)
    if (c < 2) throw ConfigError("sample_grid: need at least 2 nodes per axis");
  GridField f;
  f.box = box;
  f.counts = counts;
  f.mirrored.assign(box.size(), false);
  const int d = f.dim();
  const long total = f.total();
  DenseMatrix pts(total, d);
  std::vector<long> idx(d, 0);
  for (long r = 0; r < total; ++r) {
    for (int a = 0; a < d; ++a) pts(r, a) = f.node(a, idx[a]);
    for (int a = d - 1; a >= 0; --a) {
      if (++idx[a] < counts[a]) break;
      idx[a] = 0;
    }
  }
  f.values = fn(pts);
  if (static_cast<long>(f.values.size()) != total)
    throw ShapeError("sample_grid: evaluator returned wrong count");
  for (double v : f.values)
    if (!std::isfinite(v)) throw NumericalError("sample_grid: non-finite sample");
  return f;
}

// Mirrors the field along one axis without repeating boundary samples:
// [a,b,c,d] on [0,1) becomes [a,b,c,d,d,c,b,a] on [-1,1). The extended signal
// is even (up to a half-sample shift that leaves the modulus spectrum exact)
// and periodic over the doubled length.
inline GridField even_extend(const GridField& f, int axis) {
  if (axis < 0 || axis >= f.dim()) throw ShapeError("even_extend: bad axis");
  GridField g;
  g.box = f.box;
  g.counts = f.counts;
  g.mirrored = f.mirrored;
  const long n = f.counts[axis];
  g.counts[axis] = 2 * n;
  g.box[axis].lo = f.box[axis].lo - f.box[axis].length();
  g.mirrored[axis] = true;
  g.values.resize(f.total() * 2);

  const int d = f.dim();
  long stride = 1;
  for (int a = axis + 1; a < d; ++a) stride *= f.counts[a];
  const long in_block = stride * n;
  const long out_block = stride * 2 * n;
  const long nblocks = f.total() / in_block;
  for (long b = 0; b < nblocks; ++b) {
    const double* src = f.values.data() + b * in_block;
    double* dst = g.values.data() + b * out_block;
    for (long i = 0; i < 2 * n; ++i) {
      const long j = i < n ? i : 2 * n - 1 - i;
      for (long off = 0; off < stride; ++off) dst[i * stride + off] = src[j * stride + off];
    }
  }
  return g;
}

// Full-spectrum DFT with coefficients
//   u_hat_k = (1/prod n) sum_x f(x) exp(-i 2 pi k_idx . x_norm),
// reported at physical angular frequencies 2 pi * k_idx / axis_length.
// Parseval: sum |u_hat|^2 == mean |f|^2.
inline FrequencySet dft(const GridField& f) {
  const int d = f.dim();
  const long total = f.total();
  std::vector<std::complex<double>> data(f.values.begin(), f.values.end());
  for (int ax = 0; ax < d; ++ax) spectral_detail::transform_axis(data, f.counts, ax, false);

  FrequencySet out;
  out.grid_counts = f.counts;
  out.mirrored_axes = f.mirrored;
  out.entries.resize(total);
  const double norm = 1.0 / static_cast<double>(total);
  std::vector<long> idx(d, 0);
  for (long r = 0; r < total; ++r) {
    FreqEntry& e = out.entries[r];
    e.index.resize(d);
    e.k.resize(d);
    for (int a = 0; a < d; ++a) {
      const long s = spectral_detail::signed_index(idx[a], f.counts[a]);
      e.index[a] = s;
      e.k[a] = 2.0 * std::numbers::pi * static_cast<double>(s) / f.box[a].length();
    }
    e.coeff = data[r] * norm;
    for (int a = d - 1; a >= 0; --a) {
      if (++idx[a] < f.counts[a]) break;
      idx[a] = 0;
    }
  }
  out.sort_canonical();
  return out;
}

// Inverse of dft(): rebuilds the field values from a full spectrum.
inline GridField idft(const FrequencySet& spec, const std::vector<Axis>& box) {
  const std::vector<long>& counts = spec.grid_counts;
  const int d = static_cast<int>(counts.size());
  long total = 1;
  for (long c : counts) total *= c;
  if (static_cast<long>(spec.size()) != total)
    throw ShapeError("idft: spectrum is not a full grid spectrum");
  std::vector<std::complex<double>> data(total, {0.0, 0.0});
  std::vector<long> strides(d, 1);
  for (int a = d - 2; a >= 0; --a) strides[a] = strides[a + 1] * counts[a + 1];
  for (const FreqEntry& e : spec.entries) {
    long pos = 0;
    for (int a = 0; a < d; ++a)
      pos += spectral_detail::wrap_index(e.index[a], counts[a]) * strides[a];
    data[pos] = e.coeff;
  }
  for (int ax = 0; ax < d; ++ax) spectral_detail::transform_axis(data, counts, ax, true);
  GridField f;
  f.box = box;
  f.counts = counts;
  f.mirrored.assign(d, false);
  f.values.resize(total);
  for (long i = 0; i < total; ++i) f.values[i] = data[i].real();
  return f;
}

// Retains frequencies with |u_hat| > lambda * max |u_hat|, folds conjugate
// orbits to the representative whose first nonzero component is positive
// (mirrored axes fold componentwise), and orders the result canonically.
inline FrequencySet select_frequencies(const FrequencySet& spec, const SelectionParams& p) {
  if (spec.empty()) throw AdaptError("select_frequencies: empty spectrum");
  if (!(p.lambda > 0.0 && p.lambda < 1.0))
    throw ConfigError("select_frequencies: lambda must lie in (0,1)");
  double zeta = 0.0;
  for (const FreqEntry& e : spec.entries) zeta = std::max(zeta, e.modulus());
  const double threshold = p.lambda * zeta;

  std::set<std::vector<long>> keep;
  for (const FreqEntry& e : spec.entries)
    if (e.modulus() > threshold)
      keep.insert(spectral_detail::canon_index(e.index, spec.grid_counts, spec.mirrored_axes));
  if (keep.empty()) throw AdaptError("select_frequencies: nothing above threshold");

  FrequencySet out;
  out.grid_counts = spec.grid_counts;
  out.mirrored_axes = spec.mirrored_axes;
  for (const FreqEntry& e : spec.entries)
    if (keep.count(e.index)) out.entries.push_back(e);
  if (out.entries.size() != keep.size())
    throw InternalError("select_frequencies: canonical representative missing");
  out.sort_canonical();
  return out;
}

struct CoverageResult {
  bool ok = false;
  double ratio = 0.0;
};

// True iff the selected orbits carry at least (1-delta) of the field energy.
inline CoverageResult coverage_check(const FrequencySet& selected, const FrequencySet& full,
                                     double delta) {
  std::set<std::vector<long>> sel;
  for (const FreqEntry& e : selected.entries) sel.insert(e.index);
  double covered = 0.0, total = 0.0;
  for (const FreqEntry& e : full.entries) {
    const double en = e.modulus() * e.modulus();
    total += en;
    if (sel.count(
            spectral_detail::canon_index(e.index, full.grid_counts, full.mirrored_axes)))
      covered += en;
  }
  CoverageResult r;
  r.ratio = total > 0.0 ? covered / total : 0.0;
  r.ok = covered >= (1.0 - delta) * total && total > 0.0;
  return r;
}

// Exact set comparison on frequency vectors only (coefficients ignored).
// Both sides must be canonically folded; vectors are compared bitwise, which
// is well defined because grid frequencies are exact rationals of 2*pi/L.
inline bool compare_sets(const FrequencySet& a, const FrequencySet& b) {
  if (a.size() != b.size()) return false;
  std::set<std::vector<double>> ka, kb;
  for (const FreqEntry& e : a.entries) ka.insert(e.k);
  for (const FreqEntry& e : b.entries) kb.insert(e.k);
  return ka == kb;
}

inline std::string grid_to_csv(const GridField& f) {
  std::string s;
  const int d = f.dim();
  for (int a = 0; a < d; ++a) s += "x" + std::to_string(a) + ",";
  s += "value\n";
  std::vector<long> idx(d, 0);
  char buf[64];
  for (long r = 0; r < f.total(); ++r) {
    for (int a = 0; a < d; ++a) {
      std::snprintf(buf, sizeof buf, "%.17g,", f.node(a, idx[a]));
      s += buf;
    }
    std::snprintf(buf, sizeof buf, "%.17g\n", f.values[r]);
    s += buf;
    for (int a = d - 1; a >= 0; --a) {
      if (++idx[a] < f.counts[a]) break;
      idx[a] = 0;
    }
  }
  return s;
}

inline std::string spectrum_to_csv(const FrequencySet& spec) {
  std::string s;
  const int d = spec.entries.empty() ? 0 : static_cast<int>(spec.entries[0].k.size());
  for (int a = 0; a < d; ++a) s += "k" + std::to_string(a) + ",";
  for (int a = 0; a < d; ++a) s += "index" + std::to_string(a) + ",";
  s += "modulus,phase\n";
  char buf[64];
  for (const FreqEntry& e : spec.entries) {
    for (int a = 0; a < d; ++a) {
      std::snprintf(buf, sizeof buf, "%.17g,", e.k[a]);
      s += buf;
    }
    for (int a = 0; a < d; ++a) {
      std::snprintf(buf, sizeof buf, "%ld,", e.index[a]);
      s += buf;
    }
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", e.modulus(), std::arg(e.coeff));
    s += buf;
  }
  return s;
}

}  // namespace famnet
