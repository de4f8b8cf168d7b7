#pragma once

#include <span>
#include <string>
#include <vector>

#include "famnet/activation.hpp"
#include "famnet/errors.hpp"
#include "famnet/matrix.hpp"
#include "famnet/thread_pool.hpp"

namespace famnet {

// Reverse-mode tape over matrix-granularity operations.
//
// Second-order input derivatives travel forward as stacked matrices with
// 3*batch rows (value / d1 / d2 blocks); the whole stacked computation is
// recorded, so one reverse sweep yields exact parameter gradients of losses
// that contain second derivatives of the network.
//
// The graph is built once, then replayed: forward() refreshes every node from
// the current parameter vector, backward() accumulates adjoints in reverse
// topological order. Replays are allocation-free and bitwise deterministic.
class Tape {
 public:
  enum class Op {
    Const,      // externally supplied values (inputs, features, targets)
    Param,      // view into the flat trainable-parameter vector
    AffineJet,  // X*W, bias added to the value block
    ActJet,     // activation applied through the jet chain rule
    Lincomb,    // sum of coeff_i * X_i over equally shaped operands
    ScaleByElem,// one element of a parameter vector times a matrix
    CMul,       // elementwise product with a broadcast constant
    AnsatzJet,  // hard-constraint transform u0 (+ t*v0) + t^p * N on jets
    BlockRow,   // extract value/d1/d2 block from a stacked matrix
    ColSlice,   // extract one column
    WMeanSq,    // row-weighted mean of squared entries -> 1x1
    ScalarSum,  // weighted sum of 1x1 operands -> 1x1
  };

  struct Node {
    Op op;
    std::vector<int> in;        // operand node ids
    std::vector<double> coeff;  // Lincomb / ScalarSum weights
    long batch = 0;             // rows per jet block (stacked), or total rows
    bool stacked = false;
    ActKind act = ActKind::Sfm;
    long index = 0;      // ScaleByElem element / ColSlice column / BlockRow block
    long p_offset = 0;   // Param: offset into the flat parameter vector
    bool time_coord = false;  // AnsatzJet: jet coordinate is the time axis
    bool quadratic = false;   // AnsatzJet: t^2 multiplier with velocity term
    int layer_tag = -1;       // for NumericalError diagnostics
    bool needs_grad = false;
    DenseMatrix value;
    DenseMatrix grad;
    DenseMatrix act_cache;  // ActJet: chain-rule factors computed in forward
  };

  void set_pool(ThreadPool* pool) { pool_ = pool; }
  void set_check_finite(bool on) { check_finite_ = on; }

  size_t node_count() const { return nodes_.size(); }
  const DenseMatrix& value(int id) const { return nodes_[id].value; }
  double scalar_value(int id) const { return nodes_[id].value.a[0]; }
  bool needs_grad(int id) const { return nodes_[id].needs_grad; }

  int add_const(DenseMatrix v) {
    Node n;
    n.op = Op::Const;
    n.batch = v.rows;
    n.value = std::move(v);
    return push(std::move(n));
  }

  void update_const(int id, const DenseMatrix& v) {
    Node& n = nodes_[id];
    if (n.op != Op::Const) throw InternalError("update_const: node is not a Const");
    require_shape(n.value.same_shape(v), "update_const: shape changed");
    n.value = v;
  }

  int add_param(long offset, long rows, long cols) {
    Node n;
    n.op = Op::Param;
    n.p_offset = offset;
    n.batch = rows;
    n.value.resize(rows, cols);
    n.needs_grad = true;
    return push(std::move(n));
  }

  // Y = X*W + bias (bias over the value block only). bias may be -1.
  int affine_jet(int x, int w, int bias, long batch, bool stacked, int layer_tag = -1) {
    const Node& xn = nodes_[x];
    const Node& wn = nodes_[w];
    require_shape(xn.value.cols == wn.value.rows, "affine_jet: feature width mismatch");
    if (bias >= 0)
      require_shape(nodes_[bias].value.rows == 1 && nodes_[bias].value.cols == wn.value.cols,
                    "affine_jet: bias shape");
    Node n;
    n.op = Op::AffineJet;
    n.in = {x, w, bias};
    n.batch = batch;
    n.stacked = stacked;
    n.layer_tag = layer_tag;
    n.value.resize(xn.value.rows, wn.value.cols);
    return push(std::move(n));
  }

  int act_jet(int x, ActKind k, long batch, bool stacked, int layer_tag = -1) {
    Node n;
    n.op = Op::ActJet;
    n.in = {x};
    n.batch = batch;
    n.stacked = stacked;
    n.act = k;
    n.layer_tag = layer_tag;
    n.value.resize(nodes_[x].value.rows, nodes_[x].value.cols);
    return push(std::move(n));
  }

  int lincomb(std::vector<int> xs, std::vector<double> cs) {
    if (xs.empty() || xs.size() != cs.size()) throw InternalError("lincomb: bad operand list");
    const DenseMatrix& first = nodes_[xs[0]].value;
    for (int id : xs)
      require_shape(nodes_[id].value.same_shape(first), "lincomb: shapes disagree");
    Node n;
    n.op = Op::Lincomb;
    n.in = std::move(xs);
    n.coeff = std::move(cs);
    n.batch = nodes_[n.in[0]].batch;
    n.stacked = nodes_[n.in[0]].stacked;
    n.value.resize(first.rows, first.cols);
    return push(std::move(n));
  }

  int scale_by_elem(int x, int p, long idx) {
    if (idx < 0 || idx >= nodes_[p].value.size())
      throw InternalError("scale_by_elem: element out of range");
    Node n;
    n.op = Op::ScaleByElem;
    n.in = {x, p};
    n.index = idx;
    n.batch = nodes_[x].batch;
    n.stacked = nodes_[x].stacked;
    n.value.resize(nodes_[x].value.rows, nodes_[x].value.cols);
    return push(std::move(n));
  }

  // Y = X .* C with C of shape (batch x 1) or (batch x cols), tiled across
  // jet blocks and columns as needed.
  int cmul(int x, int c, long batch) {
    const Node& cn = nodes_[c];
    require_shape(cn.value.rows == batch, "cmul: constant batch mismatch");
    require_shape(cn.value.cols == 1 || cn.value.cols == nodes_[x].value.cols,
                  "cmul: constant width mismatch");
    require_shape(nodes_[x].value.rows % batch == 0, "cmul: rows not a block multiple");
    Node n;
    n.op = Op::CMul;
    n.in = {x, c};
    n.batch = batch;
    n.stacked = nodes_[x].stacked;
    n.value.resize(nodes_[x].value.rows, nodes_[x].value.cols);
    return push(std::move(n));
  }

  // Hard-constraint transform on stacked jets. Linear mode: u = u0 + t*N.
  // Quadratic mode: u = u0 + t*v0 + t^2*N. u0 (and v0) enter as stacked
  // constants holding their own jets with respect to the current coordinate.
  int ansatz_jet(int net, int u0, int tvec, int v0, long batch, bool time_coord,
                 bool quadratic) {
    const Node& nn = nodes_[net];
    require_shape(nn.value.rows == 3 * batch, "ansatz_jet: operand not stacked");
    require_shape(nodes_[u0].value.same_shape(nn.value), "ansatz_jet: u0 shape");
    require_shape(nodes_[tvec].value.rows == batch && nodes_[tvec].value.cols == 1,
                  "ansatz_jet: t vector shape");
    if (quadratic)
      require_shape(v0 >= 0 && nodes_[v0].value.same_shape(nn.value), "ansatz_jet: v0 shape");
    Node n;
    n.op = Op::AnsatzJet;
    n.in = {net, u0, tvec, v0};
    n.batch = batch;
    n.stacked = true;
    n.time_coord = time_coord;
    n.quadratic = quadratic;
    n.value.resize(nn.value.rows, nn.value.cols);
    return push(std::move(n));
  }

  int block_row(int x, int which, long batch) {
    require_shape(nodes_[x].value.rows == 3 * batch, "block_row: operand not stacked");
    Node n;
    n.op = Op::BlockRow;
    n.in = {x};
    n.index = which;
    n.batch = batch;
    n.value.resize(batch, nodes_[x].value.cols);
    return push(std::move(n));
  }

  int col_slice(int x, long j) {
    require_shape(j >= 0 && j < nodes_[x].value.cols, "col_slice: column out of range");
    Node n;
    n.op = Op::ColSlice;
    n.in = {x};
    n.index = j;
    n.batch = nodes_[x].batch;
    n.stacked = nodes_[x].stacked;
    n.value.resize(nodes_[x].value.rows, 1);
    return push(std::move(n));
  }

  // s = (1/rows) * sum_i w_i * sum_j x_ij^2, with w = 1 when weight < 0.
  int wmean_sq(int x, int weight = -1) {
    if (weight >= 0)
      require_shape(nodes_[weight].value.rows == nodes_[x].value.rows &&
                        nodes_[weight].value.cols == 1,
                    "wmean_sq: weight shape");
    Node n;
    n.op = Op::WMeanSq;
    n.in = {x, weight};
    n.batch = 1;
    n.value.resize(1, 1);
    return push(std::move(n));
  }

  int scalar_sum(std::vector<int> xs, std::vector<double> cs) {
    if (xs.empty() || xs.size() != cs.size()) throw InternalError("scalar_sum: bad operands");
    for (int id : xs)
      require_shape(nodes_[id].value.size() == 1, "scalar_sum: operand not scalar");
    Node n;
    n.op = Op::ScalarSum;
    n.in = std::move(xs);
    n.coeff = std::move(cs);
    n.batch = 1;
    n.value.resize(1, 1);
    return push(std::move(n));
  }

  // Recomputes every node from the given parameter vector.
  void forward(std::span<const double> params) {
    for (size_t i = 0; i < nodes_.size(); ++i) forward_node(static_cast<int>(i), params);
  }

  // Reverse sweep from `loss` (a 1x1 node); writes d loss / d params into
  // `grad`, which must span the full parameter vector.
  void backward(int loss, std::span<double> grad) {
    require_shape(nodes_[loss].value.size() == 1, "backward: loss is not scalar");
    for (Node& n : nodes_) {
      if (!n.needs_grad) continue;
      if (n.grad.rows != n.value.rows || n.grad.cols != n.value.cols)
        n.grad.resize(n.value.rows, n.value.cols);
      else
        n.grad.zero();
    }
    if (!nodes_[loss].needs_grad)
      return void(std::fill(grad.begin(), grad.end(), 0.0));
    nodes_[loss].grad.a[0] = 1.0;
    for (int i = loss; i >= 0; --i) backward_node(i);
    std::fill(grad.begin(), grad.end(), 0.0);
    for (const Node& n : nodes_) {
      if (n.op != Op::Param) continue;
      for (long i = 0; i < n.grad.size(); ++i) grad[n.p_offset + i] += n.grad.a[i];
    }
  }

 private:
  int push(Node n) {
    if (n.op != Op::Param && n.op != Op::Const) {
      for (int id : n.in)
        if (id >= 0 && nodes_[id].needs_grad) n.needs_grad = true;
    }
    nodes_.push_back(std::move(n));
    return static_cast<int>(nodes_.size() - 1);
  }

  void check_node_finite(const Node& n) {
    if (!check_finite_) return;
    if (!n.value.all_finite())
      throw NumericalError("non-finite value at layer " + std::to_string(n.layer_tag));
  }

  void forward_node(int id, std::span<const double> params) {
    Node& n = nodes_[id];
    switch (n.op) {
      case Op::Const:
        break;
      case Op::Param: {
        const double* src = params.data() + n.p_offset;
        std::copy(src, src + n.value.size(), n.value.a.begin());
        break;
      }
      case Op::AffineJet: {
        const DenseMatrix& x = nodes_[n.in[0]].value;
        const DenseMatrix& w = nodes_[n.in[1]].value;
        matmul_into(n.value, x, w, pool_);
        if (n.in[2] >= 0) {
          const DenseMatrix& b = nodes_[n.in[2]].value;
          const long brows = n.stacked ? n.batch : n.value.rows;
          for (long i = 0; i < brows; ++i) {
            double* yi = n.value.data() + i * n.value.cols;
            for (long j = 0; j < n.value.cols; ++j) yi[j] += b.a[j];
          }
        }
        check_node_finite(n);
        break;
      }
      case Op::ActJet: {
        const DenseMatrix& z = nodes_[n.in[0]].value;
        DenseMatrix& y = n.value;
        const long m = z.cols;
        if (!n.stacked) {
          if (n.act_cache.rows != z.rows) n.act_cache.resize(z.rows, m);
          DenseMatrix& cache = n.act_cache;
          parallel_for(pool_, z.rows, [&](long r0, long r1) {
            for (long i = r0 * m; i < r1 * m; ++i) {
              const ActDerivs d = act_derivs(n.act, z.a[i]);
              y.a[i] = d.f;
              cache.a[i] = d.d1;
            }
          });
        } else {
          const long b = n.batch;
          if (n.act_cache.rows != 3 * b) n.act_cache.resize(3 * b, m);
          DenseMatrix& cache = n.act_cache;
          parallel_for(pool_, b, [&](long r0, long r1) {
            for (long i = r0; i < r1; ++i) {
              const double* z0 = z.data() + i * m;
              const double* z1 = z.data() + (b + i) * m;
              const double* z2 = z.data() + (2 * b + i) * m;
              double* y0 = y.data() + i * m;
              double* y1 = y.data() + (b + i) * m;
              double* y2 = y.data() + (2 * b + i) * m;
              double* c1 = cache.data() + i * m;
              double* c2 = cache.data() + (b + i) * m;
              double* c3 = cache.data() + (2 * b + i) * m;
              for (long j = 0; j < m; ++j) {
                const ActDerivs d = act_derivs(n.act, z0[j]);
                y0[j] = d.f;
                y1[j] = d.d1 * z1[j];
                y2[j] = d.d2 * z1[j] * z1[j] + d.d1 * z2[j];
                c1[j] = d.d1;
                c2[j] = d.d2;
                c3[j] = d.d3;
              }
            }
          });
        }
        check_node_finite(n);
        break;
      }
      case Op::Lincomb: {
        DenseMatrix& y = n.value;
        y.zero();
        for (size_t t = 0; t < n.in.size(); ++t) {
          const DenseMatrix& x = nodes_[n.in[t]].value;
          const double c = n.coeff[t];
          for (long i = 0; i < y.size(); ++i) y.a[i] += c * x.a[i];
        }
        break;
      }
      case Op::ScaleByElem: {
        const DenseMatrix& x = nodes_[n.in[0]].value;
        const double c = nodes_[n.in[1]].value.a[n.index];
        for (long i = 0; i < x.size(); ++i) n.value.a[i] = c * x.a[i];
        break;
      }
      case Op::CMul: {
        const DenseMatrix& x = nodes_[n.in[0]].value;
        const DenseMatrix& c = nodes_[n.in[1]].value;
        const long m = x.cols;
        for (long i = 0; i < x.rows; ++i) {
          const long ci = i % n.batch;
          const double* xr = x.data() + i * m;
          double* yr = n.value.data() + i * m;
          if (c.cols == 1) {
            const double cv = c.a[ci];
            for (long j = 0; j < m; ++j) yr[j] = cv * xr[j];
          } else {
            const double* cr = c.data() + ci * m;
            for (long j = 0; j < m; ++j) yr[j] = cr[j] * xr[j];
          }
        }
        break;
      }
      case Op::AnsatzJet:
        forward_ansatz(n);
        break;
      case Op::BlockRow: {
        const DenseMatrix& x = nodes_[n.in[0]].value;
        const long m = x.cols;
        const double* src = x.data() + n.index * n.batch * m;
        std::copy(src, src + n.batch * m, n.value.a.begin());
        break;
      }
      case Op::ColSlice: {
        const DenseMatrix& x = nodes_[n.in[0]].value;
        for (long i = 0; i < x.rows; ++i) n.value.a[i] = x(i, n.index);
        break;
      }
      case Op::WMeanSq: {
        const DenseMatrix& x = nodes_[n.in[0]].value;
        const double* w = n.in[1] >= 0 ? nodes_[n.in[1]].value.data() : nullptr;
        double s = 0.0;
        for (long i = 0; i < x.rows; ++i) {
          double row = 0.0;
          const double* xr = x.data() + i * x.cols;
          for (long j = 0; j < x.cols; ++j) row += xr[j] * xr[j];
          s += w ? w[i] * row : row;
        }
        n.value.a[0] = s / static_cast<double>(x.rows);
        break;
      }
      case Op::ScalarSum: {
        double s = 0.0;
        for (size_t t = 0; t < n.in.size(); ++t) s += n.coeff[t] * nodes_[n.in[t]].value.a[0];
        n.value.a[0] = s;
        break;
      }
    }
  }

  void forward_ansatz(Node& n) {
    const DenseMatrix& net = nodes_[n.in[0]].value;
    const DenseMatrix& u0 = nodes_[n.in[1]].value;
    const double* t = nodes_[n.in[2]].value.data();
    const DenseMatrix* v0 = n.quadratic ? &nodes_[n.in[3]].value : nullptr;
    DenseMatrix& y = n.value;
    const long b = n.batch, m = net.cols;
    for (long i = 0; i < b; ++i) {
      const double ti = t[i];
      const double tp = n.quadratic ? ti * ti : ti;
      for (long j = 0; j < m; ++j) {
        const long i0 = i * m + j, i1 = (b + i) * m + j, i2 = (2 * b + i) * m + j;
        if (!n.time_coord) {
          // Jets with respect to a spatial coordinate: the multiplier t is a
          // constant, so every block transforms alike.
          y.a[i0] = u0.a[i0] + tp * net.a[i0];
          y.a[i1] = u0.a[i1] + tp * net.a[i1];
          y.a[i2] = u0.a[i2] + tp * net.a[i2];
          if (v0) {
            y.a[i0] += ti * v0->a[i0];
            y.a[i1] += ti * v0->a[i1];
            y.a[i2] += ti * v0->a[i2];
          }
        } else if (!n.quadratic) {
          y.a[i0] = u0.a[i0] + ti * net.a[i0];
          y.a[i1] = net.a[i0] + ti * net.a[i1];
          y.a[i2] = 2.0 * net.a[i1] + ti * net.a[i2];
        } else {
          y.a[i0] = u0.a[i0] + ti * v0->a[i0] + tp * net.a[i0];
          y.a[i1] = v0->a[i0] + 2.0 * ti * net.a[i0] + tp * net.a[i1];
          y.a[i2] = 2.0 * net.a[i0] + 4.0 * ti * net.a[i1] + tp * net.a[i2];
        }
      }
    }
  }

  void backward_node(int id) {
    Node& n = nodes_[id];
    if (!n.needs_grad || n.op == Op::Param || n.op == Op::Const) return;
    const DenseMatrix& g = n.grad;
    switch (n.op) {
      case Op::AffineJet: {
        Node& xn = nodes_[n.in[0]];
        Node& wn = nodes_[n.in[1]];
        if (xn.needs_grad) matmul_a_bt_accum(xn.grad, g, wn.value, pool_);
        if (wn.needs_grad) matmul_at_b_accum(wn.grad, nodes_[n.in[0]].value, g, pool_);
        if (n.in[2] >= 0 && nodes_[n.in[2]].needs_grad) {
          DenseMatrix& bg = nodes_[n.in[2]].grad;
          const long brows = n.stacked ? n.batch : n.value.rows;
          for (long i = 0; i < brows; ++i)
            for (long j = 0; j < g.cols; ++j) bg.a[j] += g(i, j);
        }
        break;
      }
      case Op::ActJet: {
        Node& xn = nodes_[n.in[0]];
        if (!xn.needs_grad) break;
        const DenseMatrix& z = xn.value;
        const DenseMatrix& cache = n.act_cache;
        DenseMatrix& zg = xn.grad;
        const long m = z.cols;
        if (!n.stacked) {
          parallel_for(pool_, z.rows, [&](long r0, long r1) {
            for (long i = r0 * m; i < r1 * m; ++i) zg.a[i] += g.a[i] * cache.a[i];
          });
        } else {
          const long b = n.batch;
          parallel_for(pool_, b, [&](long r0, long r1) {
            for (long i = r0; i < r1; ++i) {
              const double* z1 = z.data() + (b + i) * m;
              const double* z2 = z.data() + (2 * b + i) * m;
              const double* g0 = g.data() + i * m;
              const double* g1 = g.data() + (b + i) * m;
              const double* g2 = g.data() + (2 * b + i) * m;
              const double* c1 = cache.data() + i * m;
              const double* c2 = cache.data() + (b + i) * m;
              const double* c3 = cache.data() + (2 * b + i) * m;
              double* o0 = zg.data() + i * m;
              double* o1 = zg.data() + (b + i) * m;
              double* o2 = zg.data() + (2 * b + i) * m;
              for (long j = 0; j < m; ++j) {
                o0[j] += g0[j] * c1[j] + g1[j] * c2[j] * z1[j] +
                         g2[j] * (c3[j] * z1[j] * z1[j] + c2[j] * z2[j]);
                o1[j] += g1[j] * c1[j] + g2[j] * 2.0 * c2[j] * z1[j];
                o2[j] += g2[j] * c1[j];
              }
            }
          });
        }
        break;
      }
      case Op::Lincomb:
        for (size_t t = 0; t < n.in.size(); ++t) {
          Node& xn = nodes_[n.in[t]];
          if (!xn.needs_grad) continue;
          const double c = n.coeff[t];
          for (long i = 0; i < g.size(); ++i) xn.grad.a[i] += c * g.a[i];
        }
        break;
      case Op::ScaleByElem: {
        Node& xn = nodes_[n.in[0]];
        Node& pn = nodes_[n.in[1]];
        const double c = pn.value.a[n.index];
        if (xn.needs_grad)
          for (long i = 0; i < g.size(); ++i) xn.grad.a[i] += c * g.a[i];
        if (pn.needs_grad) {
          double s = 0.0;
          for (long i = 0; i < g.size(); ++i) s += g.a[i] * xn.value.a[i];
          pn.grad.a[n.index] += s;
        }
        break;
      }
      case Op::CMul: {
        Node& xn = nodes_[n.in[0]];
        if (!xn.needs_grad) break;
        const DenseMatrix& c = nodes_[n.in[1]].value;
        const long m = g.cols;
        for (long i = 0; i < g.rows; ++i) {
          const long ci = i % n.batch;
          const double* gr = g.data() + i * m;
          double* xr = xn.grad.data() + i * m;
          if (c.cols == 1) {
            const double cv = c.a[ci];
            for (long j = 0; j < m; ++j) xr[j] += cv * gr[j];
          } else {
            const double* cr = c.data() + ci * m;
            for (long j = 0; j < m; ++j) xr[j] += cr[j] * gr[j];
          }
        }
        break;
      }
      case Op::AnsatzJet:
        backward_ansatz(n);
        break;
      case Op::BlockRow: {
        Node& xn = nodes_[n.in[0]];
        if (!xn.needs_grad) break;
        double* dst = xn.grad.data() + n.index * n.batch * g.cols;
        for (long i = 0; i < g.size(); ++i) dst[i] += g.a[i];
        break;
      }
      case Op::ColSlice: {
        Node& xn = nodes_[n.in[0]];
        if (!xn.needs_grad) break;
        for (long i = 0; i < g.rows; ++i) xn.grad(i, n.index) += g.a[i];
        break;
      }
      case Op::WMeanSq: {
        Node& xn = nodes_[n.in[0]];
        if (!xn.needs_grad) break;
        const DenseMatrix& x = xn.value;
        const double* w = n.in[1] >= 0 ? nodes_[n.in[1]].value.data() : nullptr;
        const double scale = 2.0 * g.a[0] / static_cast<double>(x.rows);
        for (long i = 0; i < x.rows; ++i) {
          const double wi = w ? w[i] : 1.0;
          const double* xr = x.data() + i * x.cols;
          double* gr = xn.grad.data() + i * x.cols;
          for (long j = 0; j < x.cols; ++j) gr[j] += scale * wi * xr[j];
        }
        break;
      }
      case Op::ScalarSum:
        for (size_t t = 0; t < n.in.size(); ++t) {
          Node& xn = nodes_[n.in[t]];
          if (xn.needs_grad) xn.grad.a[0] += n.coeff[t] * g.a[0];
        }
        break;
      default:
        throw InternalError("backward: unexpected op");
    }
  }

  void backward_ansatz(Node& n) {
    Node& nn = nodes_[n.in[0]];
    if (!nn.needs_grad) return;
    const double* t = nodes_[n.in[2]].value.data();
    const DenseMatrix& g = n.grad;
    DenseMatrix& d = nn.grad;
    const long b = n.batch, m = g.cols;
    for (long i = 0; i < b; ++i) {
      const double ti = t[i];
      const double tp = n.quadratic ? ti * ti : ti;
      for (long j = 0; j < m; ++j) {
        const long i0 = i * m + j, i1 = (b + i) * m + j, i2 = (2 * b + i) * m + j;
        if (!n.time_coord) {
          d.a[i0] += tp * g.a[i0];
          d.a[i1] += tp * g.a[i1];
          d.a[i2] += tp * g.a[i2];
        } else if (!n.quadratic) {
          d.a[i0] += ti * g.a[i0] + g.a[i1];
          d.a[i1] += ti * g.a[i1] + 2.0 * g.a[i2];
          d.a[i2] += ti * g.a[i2];
        } else {
          d.a[i0] += tp * g.a[i0] + 2.0 * ti * g.a[i1] + 2.0 * g.a[i2];
          d.a[i1] += tp * g.a[i1] + 4.0 * ti * g.a[i2];
          d.a[i2] += tp * g.a[i2];
        }
      }
    }
  }

  std::vector<Node> nodes_;
  ThreadPool* pool_ = nullptr;
  bool check_finite_ = false;
};

// Gradient of a tape-recorded scalar with respect to the full parameter
// vector. The tape must already hold forward values for `params`.
inline std::vector<double> grad_params(Tape& tape, int loss, std::span<const double> params) {
  std::vector<double> g(params.size(), 0.0);
  tape.backward(loss, g);
  return g;
}

}  // namespace famnet
