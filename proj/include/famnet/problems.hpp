#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "famnet/network.hpp"
#include "famnet/optim.hpp"
#include "famnet/schrodinger_ref.hpp"
#include "famnet/spectral.hpp"

namespace famnet {

inline constexpr double kPi = std::numbers::pi;

// Time-dependent residual weight omega_r(t) = (1 - tanh(5(t - mu)))/2; mu
// advances by rate*exp(-sensitivity * L_r) per epoch, so the time domain is
// revealed progressively as the residual shrinks.
struct CausalGate {
  double mu = 0.0;
  double steepness = 5.0;
  double rate = 0.002;
  double sensitivity = 10.0;

  double weight(double t) const { return (1.0 - std::tanh(steepness * (t - mu))) / 2.0; }

  void update(double residual_loss) { mu += rate * std::exp(-sensitivity * residual_loss); }
};

inline CausalGate gate_update(const CausalGate& g, double residual_loss) {
  CausalGate out = g;
  out.update(residual_loss);
  return out;
}

struct ExactSolution {
  int components = 1;
  // N x components matrix of reference values at the given points
  std::function<DenseMatrix(const DenseMatrix& pts)> eval;
};

// Benchmark problem: residual operator over network jets, collocation
// construction for the loss, optional exact solution.
struct PdeProblem {
  std::string name;
  int input_dim = 1;
  int output_dim = 1;
  std::vector<Axis> domain;
  Ansatz ansatz;
  bool causal_gate = false;
  bool even_time_extend = false;
  std::optional<ExactSolution> exact;
  std::shared_ptr<CausalGate> gate;

  // Coordinates whose jets the residual consumes.
  std::vector<int> residual_coords;

  // Pointwise residual: jets[coord] holds one Jet2 per output component for
  // the matching entry of residual_coords.
  std::function<std::vector<double>(const std::vector<double>& pt,
                                    const std::vector<std::vector<Jet2>>& jets)>
      residual;

  // Loss graph assembly over the problem's collocation sets. Receives the
  // live problem so ansatz/gate state is read at build time, not captured.
  std::function<void(LossGraph&, NetGraphBuilder&, const PdeProblem&, const TrainConfig&)>
      build;
};

// ---------------------------------------------------------------------------
// Collocation helpers
// ---------------------------------------------------------------------------

// Endpoint-exclusive uniform nodes lo + i*(hi-lo)/n (the DFT grid convention).
inline DenseMatrix colloc_1d(double lo, double hi, long n) {
  DenseMatrix pts(n, 1);
  for (long i = 0; i < n; ++i)
    pts.a[i] = lo + static_cast<double>(i) * (hi - lo) / static_cast<double>(n);
  return pts;
}

// Interior grid for evolution problems: x endpoint-exclusive on [xlo,xhi),
// t on (0,T] at t_j = (j+1) T / nt.
inline DenseMatrix colloc_2d(const Axis& xax, const Axis& tax, long nx, long nt) {
  DenseMatrix pts(nx * nt, 2);
  long r = 0;
  for (long i = 0; i < nx; ++i) {
    const double x = xax.lo + static_cast<double>(i) * xax.length() / static_cast<double>(nx);
    for (long j = 0; j < nt; ++j, ++r) {
      pts(r, 0) = x;
      pts(r, 1) = tax.lo + static_cast<double>(j + 1) * tax.length() / static_cast<double>(nt);
    }
  }
  return pts;
}

// Points on the two spatial walls x = xlo and x = xhi, each crossed with an
// n/2-point time grid on (0,T].
inline DenseMatrix colloc_walls(const Axis& xax, const Axis& tax, long n) {
  const long per_side = std::max<long>(1, n / 2);
  DenseMatrix pts(2 * per_side, 2);
  for (long j = 0; j < per_side; ++j) {
    const double t =
        tax.lo + static_cast<double>(j + 1) * tax.length() / static_cast<double>(per_side);
    pts(j, 0) = xax.lo;
    pts(j, 1) = t;
    pts(per_side + j, 0) = xax.hi;
    pts(per_side + j, 1) = t;
  }
  return pts;
}

// Initial-time points (x_i, 0) with cell-centered x to avoid the walls.
inline DenseMatrix colloc_initial(const Axis& xax, long n) {
  DenseMatrix pts(n, 2);
  for (long i = 0; i < n; ++i) {
    pts(i, 0) = xax.lo + (static_cast<double>(i) + 0.5) * xax.length() / static_cast<double>(n);
    pts(i, 1) = 0.0;
  }
  return pts;
}

inline void split_2d_counts(const TrainConfig& cfg, long& nx, long& nt) {
  nx = cfg.n_rx;
  nt = cfg.n_rt;
  if (nx <= 0 || nt <= 0) {
    nx = std::max<long>(2, static_cast<long>(std::lround(std::sqrt(double(cfg.n_r)))));
    nt = std::max<long>(2, cfg.n_r / nx);
  }
}

// ---------------------------------------------------------------------------
// Problem constructors
// ---------------------------------------------------------------------------

// -u''(x) = f(x) on (0,1), u(0)=u(1)=0, with
// u(x) = sin(2 pi x) + amp * sin(k x). The paper-scale problem uses
// k = 200 pi, amp = 0.1; desk scale swaps in k = 40 pi.
inline PdeProblem poisson_problem(double k_high = 200.0 * kPi, double amp = 0.1) {
  PdeProblem p;
  p.name = "poisson";
  p.input_dim = 1;
  p.output_dim = 1;
  p.domain = {Axis{0.0, 1.0}};
  p.residual_coords = {0};

  const double k = k_high, a = amp;
  auto f = [k, a](double x) {
    return 4.0 * kPi * kPi * std::sin(2.0 * kPi * x) + a * k * k * std::sin(k * x);
  };
  auto u = [k, a](double x) { return std::sin(2.0 * kPi * x) + a * std::sin(k * x); };

  p.exact = ExactSolution{1, [u](const DenseMatrix& pts) {
                            DenseMatrix out(pts.rows, 1);
                            for (long i = 0; i < pts.rows; ++i) out.a[i] = u(pts.a[i]);
                            return out;
                          }};

  p.residual = [f](const std::vector<double>& pt, const std::vector<std::vector<Jet2>>& jets) {
    return std::vector<double>{-jets[0][0].d2 - f(pt[0])};
  };

  p.build = [f](LossGraph& g, NetGraphBuilder& b, const PdeProblem& prob,
                const TrainConfig& cfg) {
    DenseMatrix pts = colloc_1d(0.0, 1.0, cfg.n_r);
    DenseMatrix fv(cfg.n_r, 1);
    for (long i = 0; i < cfg.n_r; ++i) fv.a[i] = f(pts.a[i]);
    const int uj = b.jets(pts, 0, prob.ansatz);
    const int fc = g.tape.add_const(std::move(fv));
    const int r = g.tape.lincomb({g.tape.block_row(uj, 2, cfg.n_r), fc}, {-1.0, -1.0});
    const int lr = g.tape.wmean_sq(r);

    DenseMatrix bp(2, 1);
    bp.a = {0.0, 1.0};
    const int ub = b.values(bp, prob.ansatz);
    const int lb = g.tape.wmean_sq(ub);

    g.component_names = {"residual", "boundary"};
    g.component_nodes = {lr, lb};
    g.total = g.tape.scalar_sum({lr, lb}, {cfg.w_r, cfg.w_b});
  };
  return p;
}

// u_t = u_xx / k^2 on (0,1) x (0,1], u(x,0) = sin(k x), u(0,t)=u(1,t)=0,
// exact solution e^{-t} sin(k x). Initial condition enforced by the ansatz
// u = u0(x) + t N(x,t); the time axis is evenly extended before the DFT.
inline PdeProblem heat_problem(double k = 500.0 * kPi) {
  PdeProblem p;
  p.name = "heat";
  p.input_dim = 2;
  p.output_dim = 1;
  p.domain = {Axis{0.0, 1.0}, Axis{0.0, 1.0}};
  p.even_time_extend = true;
  p.residual_coords = {0, 1};

  const double c = 1.0 / (k * k);
  p.ansatz.kind = AnsatzKind::InitialValue;
  p.ansatz.u0 = [k](const std::vector<double>& x, int, int) {
    return Jet2{std::sin(k * x[0]), k * std::cos(k * x[0]), -k * k * std::sin(k * x[0]), 0};
  };

  p.exact = ExactSolution{1, [k](const DenseMatrix& pts) {
                            DenseMatrix out(pts.rows, 1);
                            for (long i = 0; i < pts.rows; ++i)
                              out.a[i] = std::exp(-pts(i, 1)) * std::sin(k * pts(i, 0));
                            return out;
                          }};

  p.residual = [c](const std::vector<double>&, const std::vector<std::vector<Jet2>>& jets) {
    return std::vector<double>{jets[1][0].d1 - c * jets[0][0].d2};
  };

  p.build = [c](LossGraph& g, NetGraphBuilder& b, const PdeProblem& prob,
                const TrainConfig& cfg) {
    long nx = 0, nt = 0;
    split_2d_counts(cfg, nx, nt);
    DenseMatrix pts = colloc_2d(prob.domain[0], prob.domain[1], nx, nt);
    const long n = pts.rows;
    const int ut = b.jets(pts, 1, prob.ansatz);
    const int ux = b.jets(pts, 0, prob.ansatz);
    const int r = g.tape.lincomb({g.tape.block_row(ut, 1, n), g.tape.block_row(ux, 2, n)},
                                 {1.0, -c});
    const int lr = g.tape.wmean_sq(r);

    DenseMatrix wp = colloc_walls(prob.domain[0], prob.domain[1], cfg.n_b);
    const int ub = b.values(wp, prob.ansatz);
    const int lb = g.tape.wmean_sq(ub);

    g.component_names = {"residual", "boundary"};
    g.component_nodes = {lr, lb};
    g.total = g.tape.scalar_sum({lr, lb}, {cfg.w_r, cfg.w_b});
  };
  return p;
}

// u_tt - 25 u_xx = 0 on (0,1) x (0,1], u(0,t)=u(1,t)=0,
// u(x,0) = sin(2 pi x) + sin(4 pi x), u_t(x,0) = 0; exact solution
// sin(2 pi x) cos(10 pi t) + sin(4 pi x) cos(20 pi t). Initial displacement
// is hard-enforced via u0 + t N; initial velocity and the boundary are soft
// terms, and the residual is weighted by the causal gate.
inline PdeProblem wave_problem(bool causal_gate = true) {
  PdeProblem p;
  p.name = "wave";
  p.input_dim = 2;
  p.output_dim = 1;
  p.domain = {Axis{0.0, 1.0}, Axis{0.0, 1.0}};
  p.causal_gate = causal_gate;
  p.even_time_extend = true;
  p.gate = std::make_shared<CausalGate>();
  p.residual_coords = {0, 1};

  p.ansatz.kind = AnsatzKind::InitialValue;
  p.ansatz.u0 = [](const std::vector<double>& x, int, int) {
    const double s2 = std::sin(2.0 * kPi * x[0]), s4 = std::sin(4.0 * kPi * x[0]);
    const double c2 = std::cos(2.0 * kPi * x[0]), c4 = std::cos(4.0 * kPi * x[0]);
    return Jet2{s2 + s4, 2.0 * kPi * c2 + 4.0 * kPi * c4,
                -4.0 * kPi * kPi * s2 - 16.0 * kPi * kPi * s4, 0};
  };

  p.exact = ExactSolution{1, [](const DenseMatrix& pts) {
                            DenseMatrix out(pts.rows, 1);
                            for (long i = 0; i < pts.rows; ++i) {
                              const double x = pts(i, 0), t = pts(i, 1);
                              out.a[i] = std::sin(2.0 * kPi * x) * std::cos(10.0 * kPi * t) +
                                         std::sin(4.0 * kPi * x) * std::cos(20.0 * kPi * t);
                            }
                            return out;
                          }};

  p.residual = [](const std::vector<double>&, const std::vector<std::vector<Jet2>>& jets) {
    return std::vector<double>{jets[1][0].d2 - 25.0 * jets[0][0].d2};
  };

  p.build = [](LossGraph& g, NetGraphBuilder& b, const PdeProblem& prob,
               const TrainConfig& cfg) {
    long nx = 0, nt = 0;
    split_2d_counts(cfg, nx, nt);
    DenseMatrix pts = colloc_2d(prob.domain[0], prob.domain[1], nx, nt);
    const long n = pts.rows;
    std::vector<double> times(n);
    for (long i = 0; i < n; ++i) times[i] = pts(i, 1);

    const int utt = b.jets(pts, 1, prob.ansatz);
    const int uxx = b.jets(pts, 0, prob.ansatz);
    const int r = g.tape.lincomb({g.tape.block_row(utt, 2, n), g.tape.block_row(uxx, 2, n)},
                                 {1.0, -25.0});
    int lr;
    if (prob.causal_gate) {
      auto gate = prob.gate;
      DenseMatrix gw(n, 1);
      for (long i = 0; i < n; ++i) gw.a[i] = gate->weight(times[i]);
      const int gwc = g.tape.add_const(std::move(gw));
      lr = g.tape.wmean_sq(r, gwc);
      g.pre_epoch = [gate, times, gwc](Tape& tape, long epoch, double prev) {
        if (epoch > 0) gate->update(prev);
        DenseMatrix w(static_cast<long>(times.size()), 1);
        for (size_t i = 0; i < times.size(); ++i) w.a[i] = gate->weight(times[i]);
        tape.update_const(gwc, w);
      };
    } else {
      lr = g.tape.wmean_sq(r);
    }

    DenseMatrix wp = colloc_walls(prob.domain[0], prob.domain[1], cfg.n_u);
    const int lu = g.tape.wmean_sq(b.values(wp, prob.ansatz));

    DenseMatrix ip = colloc_initial(prob.domain[0], cfg.n_ut);
    const int uti = b.jets(ip, 1, prob.ansatz);
    const int lut = g.tape.wmean_sq(g.tape.block_row(uti, 1, ip.rows));

    g.component_names = {"boundary_u", "initial_ut", "residual"};
    g.component_nodes = {lu, lut, lr};
    g.total = g.tape.scalar_sum({lu, lut, lr}, {cfg.w_u, cfg.w_ut, cfg.w_r});
    if (prob.causal_gate) g.gate_component = 2;
  };
  return p;
}

// Schrodinger equation near the semi-classical limit,
//   psi_t = (i eps/2) psi_xx - (i/eps) V(x) psi,  V = x^2/2,
// on (0,pi) x (0,T], split into the coupled real system
//   re_t = -(eps/2) im_xx + (V/eps) im,
//   im_t =  (eps/2) re_xx - (V/eps) re.
// Hard initial ansatz; periodic x handled softly by matching u and u_x at
// x = 0 and x = pi; reference solution from the spectral integrator.
inline PdeProblem schrodinger_problem(double eps = 0.05, double t_final = 0.5,
                                      bool causal_gate = false) {
  PdeProblem p;
  p.name = "schrodinger";
  p.input_dim = 2;
  p.output_dim = 2;
  p.domain = {Axis{0.0, kPi}, Axis{0.0, t_final}};
  p.even_time_extend = true;
  p.causal_gate = causal_gate;
  p.gate = std::make_shared<CausalGate>();
  p.residual_coords = {0, 1};

  p.ansatz.kind = AnsatzKind::InitialValue;
  p.ansatz.u0 = [eps](const std::vector<double>& x, int comp, int) {
    Jet2 re, im;
    schrodinger_initial_jets(x[0], eps, re, im);
    return comp == 0 ? re : im;
  };

  // Reference values are cached per point set (the eval grid is fixed).
  auto cache = std::make_shared<std::pair<std::vector<double>, DenseMatrix>>();
  p.exact = ExactSolution{
      2, [eps, cache](const DenseMatrix& pts) {
        if (cache->first == pts.a) return cache->second;
        std::vector<std::pair<double, long>> order(pts.rows);
        for (long i = 0; i < pts.rows; ++i) order[i] = {pts(i, 1), i};
        std::sort(order.begin(), order.end());
        SchrodingerReference ref(eps);
        DenseMatrix out(pts.rows, 2);
        size_t pos = 0;
        while (pos < order.size()) {
          size_t end = pos;
          while (end < order.size() && order[end].first == order[pos].first) ++end;
          ref.advance_to(order[pos].first);
          std::vector<double> xs;
          for (size_t q = pos; q < end; ++q) xs.push_back(pts(order[q].second, 0));
          const auto vals = ref.evaluate(xs);
          for (size_t q = pos; q < end; ++q) {
            out(order[q].second, 0) = vals[q - pos].real();
            out(order[q].second, 1) = vals[q - pos].imag();
          }
          pos = end;
        }
        cache->first = pts.a;
        cache->second = out;
        return out;
      }};

  p.residual = [eps](const std::vector<double>& pt,
                     const std::vector<std::vector<Jet2>>& jets) {
    const double v_over_eps = 0.5 * pt[0] * pt[0] / eps;
    const double re = jets[0][0].value, im = jets[0][1].value;
    const double re_xx = jets[0][0].d2, im_xx = jets[0][1].d2;
    const double re_t = jets[1][0].d1, im_t = jets[1][1].d1;
    return std::vector<double>{re_t + 0.5 * eps * im_xx - v_over_eps * im,
                               im_t - 0.5 * eps * re_xx + v_over_eps * re};
  };

  p.build = [eps](LossGraph& g, NetGraphBuilder& b, const PdeProblem& prob,
                  const TrainConfig& cfg) {
    long nx = 0, nt = 0;
    split_2d_counts(cfg, nx, nt);
    DenseMatrix pts = colloc_2d(prob.domain[0], prob.domain[1], nx, nt);
    const long n = pts.rows;
    const int ut = b.jets(pts, 1, prob.ansatz);
    const int ux = b.jets(pts, 0, prob.ansatz);
    DenseMatrix vv(n, 1);
    for (long i = 0; i < n; ++i) vv.a[i] = 0.5 * pts(i, 0) * pts(i, 0) / eps;
    const int vc = g.tape.add_const(std::move(vv));

    const int b0 = g.tape.block_row(ux, 0, n);
    const int b1t = g.tape.block_row(ut, 1, n);
    const int b2x = g.tape.block_row(ux, 2, n);
    const int r_re = g.tape.lincomb({g.tape.col_slice(b1t, 0), g.tape.col_slice(b2x, 1),
                                     g.tape.cmul(g.tape.col_slice(b0, 1), vc, n)},
                                    {1.0, 0.5 * eps, -1.0});
    const int r_im = g.tape.lincomb({g.tape.col_slice(b1t, 1), g.tape.col_slice(b2x, 0),
                                     g.tape.cmul(g.tape.col_slice(b0, 0), vc, n)},
                                    {1.0, -0.5 * eps, 1.0});
    int lr;
    if (prob.causal_gate) {
      auto gate = prob.gate;
      std::vector<double> times(n);
      for (long i = 0; i < n; ++i) times[i] = pts(i, 1);
      DenseMatrix gw(n, 1);
      for (long i = 0; i < n; ++i) gw.a[i] = gate->weight(times[i]);
      const int gwc = g.tape.add_const(std::move(gw));
      lr = g.tape.scalar_sum({g.tape.wmean_sq(r_re, gwc), g.tape.wmean_sq(r_im, gwc)},
                             {1.0, 1.0});
      g.pre_epoch = [gate, times, gwc](Tape& tape, long epoch, double prev) {
        if (epoch > 0) gate->update(prev);
        DenseMatrix w(static_cast<long>(times.size()), 1);
        for (size_t i = 0; i < times.size(); ++i) w.a[i] = gate->weight(times[i]);
        tape.update_const(gwc, w);
      };
    } else {
      lr = g.tape.scalar_sum({g.tape.wmean_sq(r_re), g.tape.wmean_sq(r_im)}, {1.0, 1.0});
    }

    // Periodic boundary: match value and x-derivative across the walls.
    const long nb = std::max<long>(1, cfg.n_b / 2);
    DenseMatrix p0(nb, 2), p1(nb, 2);
    for (long j = 0; j < nb; ++j) {
      const double t = prob.domain[1].lo +
                       static_cast<double>(j + 1) * prob.domain[1].length() / static_cast<double>(nb);
      p0(j, 0) = prob.domain[0].lo;
      p0(j, 1) = t;
      p1(j, 0) = prob.domain[0].hi;
      p1(j, 1) = t;
    }
    const int u0j = b.jets(p0, 0, prob.ansatz);
    const int u1j = b.jets(p1, 0, prob.ansatz);
    const int dval = g.tape.lincomb({g.tape.block_row(u0j, 0, nb), g.tape.block_row(u1j, 0, nb)},
                                    {1.0, -1.0});
    const int dder = g.tape.lincomb({g.tape.block_row(u0j, 1, nb), g.tape.block_row(u1j, 1, nb)},
                                    {1.0, -1.0});
    const int lb = g.tape.scalar_sum({g.tape.wmean_sq(dval), g.tape.wmean_sq(dder)}, {1.0, 1.0});

    g.component_names = {"residual", "periodic"};
    g.component_nodes = {lr, lb};
    g.total = g.tape.scalar_sum({lr, lb}, {cfg.w_r, cfg.w_b});
    if (prob.causal_gate) g.gate_component = 0;
  };
  return p;
}

// Pure function fitting (degenerate problem, residual u - f).
inline PdeProblem fit_problem(const std::string& name,
                              std::function<double(double)> target,
                              Axis domain = Axis{0.0, 1.0}) {
  PdeProblem p;
  p.name = name;
  p.input_dim = 1;
  p.output_dim = 1;
  p.domain = {domain};
  p.residual_coords = {0};

  auto f = std::move(target);
  p.exact = ExactSolution{1, [f](const DenseMatrix& pts) {
                            DenseMatrix out(pts.rows, 1);
                            for (long i = 0; i < pts.rows; ++i) out.a[i] = f(pts.a[i]);
                            return out;
                          }};

  p.residual = [f](const std::vector<double>& pt, const std::vector<std::vector<Jet2>>& jets) {
    return std::vector<double>{jets[0][0].value - f(pt[0])};
  };

  p.build = [f, domain](LossGraph& g, NetGraphBuilder& b, const PdeProblem&,
                        const TrainConfig& cfg) {
    DenseMatrix pts = colloc_1d(domain.lo, domain.hi, cfg.n_r);
    DenseMatrix fv(cfg.n_r, 1);
    for (long i = 0; i < cfg.n_r; ++i) fv.a[i] = f(pts.a[i]);
    Ansatz none;
    const int u = b.values(pts, none);
    const int fc = g.tape.add_const(std::move(fv));
    const int r = g.tape.lincomb({u, fc}, {1.0, -1.0});
    const int l = g.tape.wmean_sq(r);
    g.component_names = {"fit"};
    g.component_nodes = {l};
    g.total = g.tape.scalar_sum({l}, {cfg.w_r});
  };
  return p;
}

// ---------------------------------------------------------------------------
// Loss assembly / evaluation
// ---------------------------------------------------------------------------

inline std::unique_ptr<LossGraph> build_loss_graph(const PdeProblem& problem,
                                                   const ScaleNetwork& net,
                                                   const TrainConfig& cfg,
                                                   ThreadPool* pool = nullptr) {
  auto g = std::make_unique<LossGraph>();
  g->tape.set_pool(pool);
  NetGraphBuilder b(g->tape, net);
  problem.build(*g, b, problem, cfg);
  return g;
}

struct LossValue {
  double total = 0.0;
  std::vector<std::string> component_names;
  std::vector<double> components;
};

// One-shot loss evaluation (the gate, if any, contributes its current mu).
inline LossValue loss(const PdeProblem& problem, const ScaleNetwork& net,
                      const TrainConfig& cfg) {
  auto g = build_loss_graph(problem, net, cfg);
  g->tape.forward(net.params);
  LossValue out;
  out.total = g->tape.scalar_value(g->total);
  out.component_names = g->component_names;
  for (int id : g->component_nodes) out.components.push_back(g->tape.scalar_value(id));
  return out;
}

// Relative L2 error ||u - u_net|| / ||u|| over the reference grid.
inline double relative_l2(const PdeProblem& problem, const ScaleNetwork& net,
                          const DenseMatrix& eval_pts, ThreadPool* pool = nullptr) {
  if (!problem.exact) throw ConfigError("relative_l2: problem has no exact solution");
  const DenseMatrix ref = problem.exact->eval(eval_pts);
  const DenseMatrix got = evaluate_values(net, problem.ansatz, eval_pts, pool);
  double num = 0.0, den = 0.0;
  for (long i = 0; i < ref.size(); ++i) {
    const double d = ref.a[i] - got.a[i];
    num += d * d;
    den += ref.a[i] * ref.a[i];
  }
  return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

// Inclusive uniform reference grid used for error reporting.
inline DenseMatrix eval_grid(const std::vector<Axis>& box, const std::vector<long>& counts) {
  const int d = static_cast<int>(box.size());
  long total = 1;
  for (long c : counts) total *= c;
  DenseMatrix pts(total, d);
  std::vector<long> idx(d, 0);
  for (long r = 0; r < total; ++r) {
    for (int a = 0; a < d; ++a)
      pts(r, a) = box[a].lo + static_cast<double>(idx[a]) * box[a].length() /
                                  static_cast<double>(counts[a] - 1);
    for (int a = d - 1; a >= 0; --a) {
      if (++idx[a] < counts[a]) break;
      idx[a] = 0;
    }
  }
  return pts;
}

}  // namespace famnet
