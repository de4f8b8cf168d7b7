#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "famnet/errors.hpp"
#include "famnet/tape.hpp"

namespace famnet {

// Adam with the standard bias correction and default moment constants.
struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  long t = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  explicit AdamState(size_t n) : m(n, 0.0), v(n, 0.0) {}
};

// One update step. Returns false (and leaves everything untouched) when the
// gradient contains non-finite entries; the caller reports and skips.
inline bool adam_step(AdamState& s, std::span<double> params, std::span<const double> grads,
                      double lr) {
  if (params.size() != s.m.size() || grads.size() != s.m.size())
    throw ShapeError("adam_step: state/parameter size mismatch");
  for (double g : grads)
    if (!std::isfinite(g)) return false;
  ++s.t;
  const double bc1 = 1.0 - std::pow(s.beta1, static_cast<double>(s.t));
  const double bc2 = 1.0 - std::pow(s.beta2, static_cast<double>(s.t));
  for (size_t i = 0; i < params.size(); ++i) {
    s.m[i] = s.beta1 * s.m[i] + (1.0 - s.beta1) * grads[i];
    s.v[i] = s.beta2 * s.v[i] + (1.0 - s.beta2) * grads[i] * grads[i];
    const double mhat = s.m[i] / bc1;
    const double vhat = s.v[i] / bc2;
    params[i] -= lr * mhat / (std::sqrt(vhat) + s.eps);
  }
  return true;
}

// Exponential decay: initial * gamma^floor(epoch/interval).
struct LrSchedule {
  double initial = 0.01;
  double gamma = 0.9;
  long interval = 500;
};

inline double lr_at(const LrSchedule& s, long epoch) {
  if (epoch < 0) throw ConfigError("lr_at: negative epoch");
  if (s.interval < 1 || s.gamma <= 0.0 || s.gamma > 1.0)
    throw ConfigError("lr_at: invalid schedule");
  return s.initial * std::pow(s.gamma, static_cast<double>(epoch / s.interval));
}

struct TrainConfig {
  long epochs = 0;
  long n_r = 1000;   // interior collocation points (total)
  long n_rx = 0;     // 2d interior grid split; 0 derives from n_r
  long n_rt = 0;
  long n_b = 200;    // boundary points
  long n_u = 200;    // boundary-value points for the gated loss
  long n_ut = 200;   // initial-velocity points
  double w_r = 1.0;
  double w_b = 1.0;
  double w_u = 1000.0;
  double w_ut = 1000.0;
  std::string sampling = "uniform";
  uint64_t seed = 0;
  LrSchedule lr;
  long resample_every = 0;  // 0 = fixed collocation for the whole phase
  long report_interval = 100;
};

// A loss recorded on a tape: total node, named component nodes, and an
// optional per-epoch hook (the causal gate uses it to refresh its weight
// vector from the previous epoch's residual loss).
struct LossGraph {
  Tape tape;
  int total = -1;
  std::vector<std::string> component_names;
  std::vector<int> component_nodes;
  int gate_component = -1;  // component feeding the gate update, or -1
  std::function<void(Tape&, long epoch, double prev_gate_loss)> pre_epoch;
};

struct EpochRecord {
  long epoch = 0;
  double lr = 0.0;
  double total = 0.0;
  std::vector<double> components;
  std::optional<double> rel_l2;
};

struct TrainResult {
  std::vector<EpochRecord> history;
  bool aborted = false;
  std::string abort_reason;
  long skipped_steps = 0;
  std::optional<double> final_rel_l2;
};

// Full-batch training loop: one Adam step per epoch on the recorded loss,
// loss logged every epoch, relative L2 error (when an evaluator is supplied)
// every report_interval epochs and at the end.
inline TrainResult train(std::vector<double>& params, LossGraph& g, const TrainConfig& cfg,
                         const std::function<double()>& rel_l2 = nullptr) {
  TrainResult res;
  if (cfg.epochs == 0) return res;
  AdamState adam(params.size());
  std::vector<double> grad(params.size(), 0.0);
  double prev_gate_loss = 0.0;
  res.history.reserve(cfg.epochs);
  for (long epoch = 0; epoch < cfg.epochs; ++epoch) {
    if (g.pre_epoch) g.pre_epoch(g.tape, epoch, prev_gate_loss);
    try {
      g.tape.forward(params);
      g.tape.backward(g.total, grad);
    } catch (const NumericalError& e) {
      res.aborted = true;
      res.abort_reason = e.what();
      return res;
    }
    EpochRecord rec;
    rec.epoch = epoch;
    rec.lr = lr_at(cfg.lr, epoch);
    rec.total = g.tape.scalar_value(g.total);
    for (int id : g.component_nodes) rec.components.push_back(g.tape.scalar_value(id));
    if (g.gate_component >= 0) prev_gate_loss = rec.components[g.gate_component];
    if (!std::isfinite(rec.total)) {
      res.aborted = true;
      res.abort_reason = "non-finite loss at epoch " + std::to_string(epoch);
      res.history.push_back(std::move(rec));
      return res;
    }
    if (rel_l2 && (epoch % cfg.report_interval == 0 || epoch == cfg.epochs - 1))
      rec.rel_l2 = rel_l2();
    if (!adam_step(adam, params, grad, rec.lr)) ++res.skipped_steps;
    res.history.push_back(std::move(rec));
  }
  if (rel_l2) res.final_rel_l2 = rel_l2();
  return res;
}

}  // namespace famnet
