#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "famnet/activation.hpp"
#include "famnet/embedding.hpp"
#include "famnet/errors.hpp"
#include "famnet/jet.hpp"
#include "famnet/rng.hpp"
#include "famnet/spectral.hpp"
#include "famnet/tape.hpp"

namespace famnet {

enum class HMode { Fixed, Learnable };

enum class AnsatzKind { None, InitialValue, InitialValueAndVelocity, PeriodicX };

inline std::string ansatz_name(AnsatzKind k) {
  switch (k) {
    case AnsatzKind::None: return "none";
    case AnsatzKind::InitialValue: return "initial_value";
    case AnsatzKind::InitialValueAndVelocity: return "initial_value_and_velocity";
    case AnsatzKind::PeriodicX: return "periodic_x";
  }
  return "?";
}

inline AnsatzKind ansatz_from_name(const std::string& s) {
  if (s == "none") return AnsatzKind::None;
  if (s == "initial_value") return AnsatzKind::InitialValue;
  if (s == "initial_value_and_velocity") return AnsatzKind::InitialValueAndVelocity;
  if (s == "periodic_x") return AnsatzKind::PeriodicX;
  throw ConfigError("unknown ansatz: " + s);
}

// Analytic reference function with jets: fills `out` (n_points x n_comp,
// row-major) with value/d1/d2 of each component with respect to spatial
// coordinates only (reference functions do not depend on time).
using RefFn = std::function<Jet2(const std::vector<double>& x_spatial, int comp, int coord)>;

// Hard-constraint transform applied after aggregation. InitialValue maps the
// raw network N to u0(x) + t*N(x,t); InitialValueAndVelocity to
// u0(x) + t*v0(x) + t^2*N(x,t). PeriodicX carries no transform (the periodic
// condition is enforced softly by the loss).
struct Ansatz {
  AnsatzKind kind = AnsatzKind::None;
  RefFn u0;
  RefFn v0;

  bool transforms() const {
    return kind == AnsatzKind::InitialValue || kind == AnsatzKind::InitialValueAndVelocity;
  }
};

// Fully connected block: layer_sizes = [in, hidden..., out], activations on
// all but the last affine layer. Parameters live in the owning ScaleNetwork's
// flat vector at the recorded offsets.
struct SubNetwork {
  std::vector<long> layer_sizes;
  ActKind act = ActKind::Sfm;
  std::vector<long> w_offset;
  std::vector<long> b_offset;

  long layers() const { return static_cast<long>(layer_sizes.size()) - 1; }

  long param_count() const {
    long c = 0;
    for (long l = 0; l < layers(); ++l)
      c += layer_sizes[l] * layer_sizes[l + 1] + layer_sizes[l + 1];
    return c;
  }
};

// The multi-sub-network model: per-sub-network feature embedding, MLP block,
// and aggregation y = sum_j h_j * y_j.
struct ScaleNetwork {
  int input_dim = 1;
  int output_dim = 1;
  std::vector<Embedding> embeddings;
  std::vector<SubNetwork> subnets;
  std::vector<double> h;  // aggregation weights (initial values when learnable)
  HMode h_mode = HMode::Fixed;
  std::vector<double> params;
  long h_offset = -1;  // offset of h inside params when learnable
  uint64_t seed = 0;

  size_t subnet_count() const { return subnets.size(); }

  double h_value(size_t j) const {
    return h_mode == HMode::Learnable ? params[h_offset + j] : h[j];
  }

  // Copies current (possibly trained) h values out of the parameter vector.
  std::vector<double> h_values() const {
    std::vector<double> v(subnet_count());
    for (size_t j = 0; j < v.size(); ++j) v[j] = h_value(j);
    return v;
  }
};

// Lays out parameter offsets (subnet-major, weights then biases per layer,
// learnable h appended last) and sizes the flat vector. Returns the total.
inline long assign_parameter_layout(ScaleNetwork& net) {
  long offset = 0;
  for (SubNetwork& sn : net.subnets) {
    sn.w_offset.clear();
    sn.b_offset.clear();
    for (long l = 0; l < sn.layers(); ++l) {
      sn.w_offset.push_back(offset);
      offset += sn.layer_sizes[l] * sn.layer_sizes[l + 1];
      sn.b_offset.push_back(offset);
      offset += sn.layer_sizes[l + 1];
    }
  }
  if (net.h_mode == HMode::Learnable) {
    net.h_offset = offset;
    offset += static_cast<long>(net.subnets.size());
  } else {
    net.h_offset = -1;
  }
  net.params.assign(offset, 0.0);
  return offset;
}

// Allocates the flat parameter vector and Glorot-initializes every weight
// matrix; biases start at zero. Deterministic per (seed, subnet, layer).
inline ScaleNetwork make_scale_network(int input_dim, int output_dim,
                                       std::vector<Embedding> embeddings,
                                       const std::vector<long>& hidden, ActKind act,
                                       HMode h_mode, std::vector<double> h_init,
                                       uint64_t seed) {
  if (embeddings.empty()) throw ConfigError("network: needs at least one sub-network");
  if (h_init.size() != embeddings.size())
    throw ConfigError("network: h length must match sub-network count");
  ScaleNetwork net;
  net.input_dim = input_dim;
  net.output_dim = output_dim;
  net.h_mode = h_mode;
  net.h = std::move(h_init);
  net.seed = seed;
  net.embeddings = std::move(embeddings);

  for (size_t j = 0; j < net.embeddings.size(); ++j) {
    net.embeddings[j].validate(input_dim);
    SubNetwork sn;
    sn.act = act;
    sn.layer_sizes.push_back(net.embeddings[j].width(input_dim));
    for (long hsz : hidden) sn.layer_sizes.push_back(hsz);
    sn.layer_sizes.push_back(output_dim);
    net.subnets.push_back(std::move(sn));
  }
  assign_parameter_layout(net);
  for (size_t j = 0; j < net.subnets.size(); ++j) {
    const SubNetwork& sn = net.subnets[j];
    for (long l = 0; l < sn.layers(); ++l) {
      DenseMatrix w = glorot_init(sn.layer_sizes[l], sn.layer_sizes[l + 1],
                                  derive_seed(seed, j, static_cast<uint64_t>(l)));
      std::copy(w.a.begin(), w.a.end(), net.params.begin() + sn.w_offset[l]);
    }
  }
  if (h_mode == HMode::Learnable)
    std::copy(net.h.begin(), net.h.end(), net.params.begin() + net.h_offset);
  return net;
}

// Initial multi-scale model: M0 sub-networks whose embedding j down-scales
// every coordinate by 2^j, i.e. frequency vectors {2^j e_a : a < d}.
inline ScaleNetwork make_initial_network(int input_dim, int output_dim, int m0,
                                         const std::vector<long>& hidden, ActKind act,
                                         HMode h_mode, uint64_t seed) {
  if (m0 < 1) throw ConfigError("network: M0 must be positive");
  std::vector<Embedding> embeds;
  for (int j = 0; j < m0; ++j) {
    Embedding e;
    e.kind = EmbeddingKind::DownScale;
    const double scale = std::pow(2.0, j);
    for (int a = 0; a < input_dim; ++a) {
      std::vector<double> k(input_dim, 0.0);
      k[a] = scale;
      e.freqs.push_back(std::move(k));
    }
    embeds.push_back(std::move(e));
  }
  return make_scale_network(input_dim, output_dim, std::move(embeds), hidden, act, h_mode,
                            std::vector<double>(m0, 1.0), seed);
}

// Criterion A rebuild: one sub-network per captured frequency, hybrid
// features, h_j = |u_hat_kj|, fresh parameters.
inline ScaleNetwork rebuild_criterion_A(const FrequencySet& freqs, int input_dim,
                                        int output_dim, const std::vector<long>& hidden,
                                        ActKind act, HMode h_mode, uint64_t seed) {
  if (freqs.empty()) throw AdaptError("rebuild: empty frequency set");
  std::vector<Embedding> embeds;
  std::vector<double> h;
  for (const FreqEntry& e : freqs.entries) {
    Embedding emb;
    emb.kind = EmbeddingKind::Hybrid;
    emb.freqs.push_back(e.k);
    embeds.push_back(std::move(emb));
    h.push_back(e.modulus());
  }
  return make_scale_network(input_dim, output_dim, std::move(embeds), hidden, act, h_mode,
                            std::move(h), seed);
}

// Criterion B rebuild: the |k|_1-ordered frequencies are split into M0
// contiguous chunks (first M0-1 chunks of floor(N0/M0), remainder to the
// last); sub-network j takes the concatenated hybrid features of its chunk
// and h_j is the summed coefficient modulus of the chunk.
inline ScaleNetwork rebuild_criterion_B(const FrequencySet& freqs, int m0, int input_dim,
                                        int output_dim, const std::vector<long>& hidden,
                                        ActKind act, HMode h_mode, uint64_t seed) {
  if (m0 <= 0) throw ConfigError("rebuild: M0 must be positive");
  if (freqs.empty()) throw AdaptError("rebuild: empty frequency set");
  const long n0 = static_cast<long>(freqs.size());
  const long base = n0 / m0;
  std::vector<Embedding> embeds;
  std::vector<double> h;
  long pos = 0;
  for (int j = 0; j < m0; ++j) {
    const long take = (j == m0 - 1) ? n0 - pos : base;
    Embedding emb;
    emb.kind = EmbeddingKind::Hybrid;
    double hj = 0.0;
    for (long t = 0; t < take; ++t, ++pos) {
      emb.freqs.push_back(freqs.entries[pos].k);
      hj += freqs.entries[pos].modulus();
    }
    embeds.push_back(std::move(emb));
    h.push_back(hj);
  }
  return make_scale_network(input_dim, output_dim, std::move(embeds), hidden, act, h_mode,
                            std::move(h), seed);
}

// ---------------------------------------------------------------------------
// Tape graph construction
// ---------------------------------------------------------------------------

// Builds evaluation graphs for one network on one tape, sharing parameter
// nodes across passes so that one backward sweep covers all of them.
class NetGraphBuilder {
 public:
  NetGraphBuilder(Tape& tape, const ScaleNetwork& net) : tape_(tape), net_(net) {}

  // Evaluates u0/v0 jets of the ansatz as stacked constants for `coord`.
  DenseMatrix ref_jets(const RefFn& fn, const DenseMatrix& pts, int coord) const {
    const long n = pts.rows;
    const int d = net_.input_dim;
    const int m = net_.output_dim;
    const bool time_coord = coord == d - 1;
    DenseMatrix out(3 * n, m);
    std::vector<double> xs(d - 1);
    for (long i = 0; i < n; ++i) {
      for (int a = 0; a < d - 1; ++a) xs[a] = pts(i, a);
      for (int c = 0; c < m; ++c) {
        const Jet2 j = fn(xs, c, time_coord ? 0 : coord);
        out(i, c) = j.value;
        out(n + i, c) = time_coord ? 0.0 : j.d1;
        out(2 * n + i, c) = time_coord ? 0.0 : j.d2;
      }
    }
    return out;
  }

  // Stacked jet evaluation (3N x out) of the full model at `pts` with respect
  // to coordinate `coord`, including the ansatz transform.
  int jets(const DenseMatrix& pts, int coord, const Ansatz& ansatz) {
    const long n = pts.rows;
    std::vector<int> ys;
    for (size_t j = 0; j < net_.subnet_count(); ++j) {
      const int feat = tape_.add_const(net_.embeddings[j].feature_jets(pts, coord));
      ys.push_back(subnet_chain(j, feat, n, true));
    }
    int agg = aggregate(ys);
    if (ansatz.transforms()) {
      const bool quad = ansatz.kind == AnsatzKind::InitialValueAndVelocity;
      const int u0 = tape_.add_const(ref_jets(ansatz.u0, pts, coord));
      DenseMatrix tv(n, 1);
      for (long i = 0; i < n; ++i) tv.a[i] = pts(i, net_.input_dim - 1);
      const int tvec = tape_.add_const(std::move(tv));
      const int v0 = quad ? tape_.add_const(ref_jets(ansatz.v0, pts, coord)) : -1;
      agg = tape_.ansatz_jet(agg, u0, tvec, v0, n, coord == net_.input_dim - 1, quad);
    }
    return agg;
  }

  // Value-only evaluation (N x out) including the ansatz transform.
  int values(const DenseMatrix& pts, const Ansatz& ansatz) {
    const long n = pts.rows;
    std::vector<int> ys;
    for (size_t j = 0; j < net_.subnet_count(); ++j) {
      const int feat = tape_.add_const(net_.embeddings[j].features(pts));
      ys.push_back(subnet_chain(j, feat, n, false));
    }
    int agg = aggregate(ys);
    if (ansatz.transforms()) {
      const bool quad = ansatz.kind == AnsatzKind::InitialValueAndVelocity;
      const int m = net_.output_dim;
      DenseMatrix base(n, m);  // u0 (+ t*v0)
      DenseMatrix mult(n, 1);  // t (or t^2)
      std::vector<double> xs(net_.input_dim - 1);
      for (long i = 0; i < n; ++i) {
        const double t = pts(i, net_.input_dim - 1);
        for (int a = 0; a < net_.input_dim - 1; ++a) xs[a] = pts(i, a);
        for (int c = 0; c < m; ++c) {
          base(i, c) = ansatz.u0(xs, c, 0).value;
          if (quad) base(i, c) += t * ansatz.v0(xs, c, 0).value;
        }
        mult.a[i] = quad ? t * t : t;
      }
      const int basec = tape_.add_const(std::move(base));
      const int multc = tape_.add_const(std::move(mult));
      agg = tape_.lincomb({tape_.cmul(agg, multc, n), basec}, {1.0, 1.0});
    }
    return agg;
  }

 private:
  int param_node(long offset, long rows, long cols) {
    auto it = param_nodes_.find(offset);
    if (it != param_nodes_.end()) return it->second;
    const int id = tape_.add_param(offset, rows, cols);
    param_nodes_[offset] = id;
    return id;
  }

  int subnet_chain(size_t j, int feat, long batch, bool stacked) {
    const SubNetwork& sn = net_.subnets[j];
    int x = feat;
    for (long l = 0; l < sn.layers(); ++l) {
      const int w = param_node(sn.w_offset[l], sn.layer_sizes[l], sn.layer_sizes[l + 1]);
      const int b = param_node(sn.b_offset[l], 1, sn.layer_sizes[l + 1]);
      const int tag = static_cast<int>(j) * 100 + static_cast<int>(l);
      x = tape_.affine_jet(x, w, b, batch, stacked, tag);
      if (l + 1 < sn.layers()) x = tape_.act_jet(x, sn.act, batch, stacked, tag);
    }
    return x;
  }

  int aggregate(const std::vector<int>& ys) {
    if (net_.h_mode == HMode::Fixed) {
      return tape_.lincomb(ys, net_.h);
    }
    const int hp = param_node(net_.h_offset, 1, static_cast<long>(net_.subnet_count()));
    std::vector<int> scaled;
    for (size_t j = 0; j < ys.size(); ++j)
      scaled.push_back(tape_.scale_by_elem(ys[j], hp, static_cast<long>(j)));
    return tape_.lincomb(scaled, std::vector<double>(ys.size(), 1.0));
  }

  Tape& tape_;
  const ScaleNetwork& net_;
  std::map<long, int> param_nodes_;
};

// Batched value evaluation (N x out).
inline DenseMatrix evaluate_values(const ScaleNetwork& net, const Ansatz& ansatz,
                                   const DenseMatrix& pts, ThreadPool* pool = nullptr) {
  Tape tape;
  tape.set_pool(pool);
  NetGraphBuilder b(tape, net);
  const int out = b.values(pts, ansatz);
  tape.forward(net.params);
  return tape.value(out);
}

// Single-point forward pass (the spec-level forward operation).
inline std::vector<double> forward(const ScaleNetwork& net, const Ansatz& ansatz,
                                   const std::vector<double>& x) {
  DenseMatrix pts(1, static_cast<long>(x.size()));
  pts.a = x;
  return evaluate_values(net, ansatz, pts).a;
}

// Value and first/second derivative of every output with respect to input
// coordinate `coord`, exact through embeddings, affine layers, activations
// and the ansatz transform.
inline std::vector<Jet2> forward_jet(const ScaleNetwork& net, const Ansatz& ansatz,
                                     const std::vector<double>& x, int coord) {
  if (coord < 0 || coord >= net.input_dim) throw ShapeError("forward_jet: bad coordinate");
  DenseMatrix pts(1, static_cast<long>(x.size()));
  pts.a = x;
  Tape tape;
  NetGraphBuilder b(tape, net);
  const int out = b.jets(pts, coord, ansatz);
  tape.forward(net.params);
  const DenseMatrix& v = tape.value(out);
  std::vector<Jet2> jets(net.output_dim);
  for (int c = 0; c < net.output_dim; ++c)
    jets[c] = Jet2{v(0, c), v(1, c), v(2, c), coord};
  return jets;
}

}  // namespace famnet
