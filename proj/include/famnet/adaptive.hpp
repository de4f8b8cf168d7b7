#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "famnet/checkpoint.hpp"
#include "famnet/network.hpp"
#include "famnet/optim.hpp"
#include "famnet/problems.hpp"
#include "famnet/report.hpp"
#include "famnet/spectral.hpp"

namespace famnet {

struct AdaptOptions {
  int max_adapt = 4;  // I, the adaptation budget
  double lambda = 0.01;
  int m0 = 6;
  std::vector<long> hidden = {100, 100, 100};
  ActKind act = ActKind::Sfm;
  HMode h_mode = HMode::Fixed;
  std::vector<long> dft_counts;   // sampling counts per axis; empty derives them
  std::vector<long> eval_counts;  // reference grid for relative L2
  uint64_t seed = 0;
  bool warm_start = false;  // reuse matched sub-network parameters on rebuild
  bool keep_epoch_history = true;
};

struct AdaptiveState {
  int iteration = 0;           // It of the network currently held
  FrequencySet current_set;    // feature set the current network was built from
  ScaleNetwork net;
  std::vector<std::optional<double>> rel_errors;  // per completed phase
  std::vector<FrequencySet> captured;             // B_1, B_2, ...
  std::vector<TrainResult> phase_results;
  int training_phases = 0;
  bool stopped_by_set_equality = false;
  bool aborted = false;
  std::string abort_reason;
  std::map<std::string, std::string> config_echo;
};

// The B_0 feature set of the initial down-scaled model, represented in the
// same vector form the embeddings use ({2^j e_a}).
inline FrequencySet initial_feature_set(int input_dim, int m0) {
  FrequencySet s;
  for (int j = 0; j < m0; ++j)
    for (int a = 0; a < input_dim; ++a) {
      FreqEntry e;
      e.k.assign(input_dim, 0.0);
      e.k[a] = std::pow(2.0, j);
      e.index.assign(input_dim, 0);
      e.coeff = {1.0, 0.0};
      s.entries.push_back(std::move(e));
    }
  s.sort_canonical();
  return s;
}

namespace adaptive_detail {

// Sampling counts per axis: presets normally pin them; the fallback takes
// 4x the largest frequency index present in B_0 union the current set
// (Nyquist with margin), with a floor that keeps the grid usable when the
// current set only holds low frequencies.
inline std::vector<long> derive_dft_counts(const PdeProblem& problem,
                                           const FrequencySet& b0,
                                           const FrequencySet& current) {
  const int d = problem.input_dim;
  std::vector<long> counts(d, 64);
  for (int a = 0; a < d; ++a) {
    const bool mirrored = problem.even_time_extend && a == d - 1;
    const double len = problem.domain[a].length() * (mirrored ? 2.0 : 1.0);
    double max_idx = 1.0;
    for (const FrequencySet* s : {&b0, &current})
      for (const FreqEntry& e : s->entries)
        max_idx = std::max(max_idx, std::abs(e.k[a]) * len / (2.0 * kPi));
    long n = std::max<long>(64, 4 * static_cast<long>(std::ceil(max_idx)));
    n += n % 2;
    counts[a] = mirrored ? n / 2 : n;
  }
  return counts;
}

inline std::string it_dir(const std::string& out_dir, int it) {
  return out_dir + "/it" + std::to_string(it);
}

}  // namespace adaptive_detail

// Samples the trained model on the DFT grid (first output component),
// applies the even time extension when the problem calls for it, and runs
// the threshold selection.
struct CaptureResult {
  GridField field;
  FrequencySet spectrum;
  FrequencySet selected;
};

inline CaptureResult capture_frequencies(const PdeProblem& problem, const ScaleNetwork& net,
                                         const std::vector<long>& counts, double lambda,
                                         ThreadPool* pool = nullptr) {
  CaptureResult out;
  auto eval = [&](const DenseMatrix& pts) {
    const DenseMatrix v = evaluate_values(net, problem.ansatz, pts, pool);
    std::vector<double> comp0(v.rows);
    for (long i = 0; i < v.rows; ++i) comp0[i] = v(i, 0);
    return comp0;
  };
  out.field = sample_grid(eval, problem.domain, counts);
  if (problem.even_time_extend)
    out.field = even_extend(out.field, problem.input_dim - 1);
  out.spectrum = dft(out.field);
  out.selected = select_frequencies(out.spectrum, SelectionParams{lambda, 0.0});
  return out;
}

inline void save_state(const AdaptiveState& st, const PdeProblem& problem,
                       const std::string& path) {
  std::ostringstream out;
  out << "famnet-state 1\n";
  out << "problem " << problem.name << "\n";
  out << "iteration " << st.iteration << "\n";
  out << "phases " << st.training_phases << "\n";
  out << "stable " << (st.stopped_by_set_equality ? 1 : 0) << "\n";
  out << "aborted " << (st.aborted ? 1 : 0) << "\n";
  out << "rel_errors " << st.rel_errors.size() << "\n";
  for (const auto& e : st.rel_errors)
    out << (e ? ckpt_detail::fmt(*e) : std::string("-")) << "\n";
  out << "captured " << st.captured.size() << "\n";
  for (const FrequencySet& s : st.captured) write_freqset(out, s);
  out << "current_set\n";
  write_freqset(out, st.current_set);
  out << "config " << st.config_echo.size() << "\n";
  for (const auto& [k, v] : st.config_echo) out << k << " = " << v << "\n";
  write_network(out, st.net, problem.ansatz.kind);
  out << "end_state\n";
  write_text_file(path, out.str());
}

inline AdaptiveState load_state(const std::string& path) {
  std::istringstream in(read_text_file(path));
  ckpt_detail::Reader r{in};
  r.expect("famnet-state");
  if (r.integer() != 1) throw FormatError("state: unsupported version");
  AdaptiveState st;
  r.expect("problem");
  st.config_echo["problem"] = r.token();
  r.expect("iteration");
  st.iteration = static_cast<int>(r.integer());
  r.expect("phases");
  st.training_phases = static_cast<int>(r.integer());
  r.expect("stable");
  st.stopped_by_set_equality = r.integer() != 0;
  r.expect("aborted");
  st.aborted = r.integer() != 0;
  r.expect("rel_errors");
  const long ne = r.integer();
  for (long i = 0; i < ne; ++i) {
    const std::string t = r.token();
    if (t == "-")
      st.rel_errors.push_back(std::nullopt);
    else
      st.rel_errors.push_back(std::strtod(t.c_str(), nullptr));
  }
  r.expect("captured");
  const long nc = r.integer();
  for (long i = 0; i < nc; ++i) st.captured.push_back(read_freqset(in));
  r.expect("current_set");
  st.current_set = read_freqset(in);
  r.expect("config");
  const long nk = r.integer();
  for (long i = 0; i < nk; ++i) {
    const std::string key = r.token();
    r.expect("=");
    st.config_echo[key] = r.token();
  }
  st.net = read_network(in);
  r.expect("end_state");
  return st;
}

// The adaptive driver: train, sample, transform, select, compare, rebuild,
// until the captured set repeats or the adaptation budget is exhausted.
// A resumed state continues exactly where it stopped (training and rebuild
// randomness derive from (seed, iteration), and collocation is fixed).
inline AdaptiveState run_adaptive(const PdeProblem& problem, const TrainConfig& cfg,
                                  const AdaptOptions& opts, const std::string& out_dir = "",
                                  ThreadPool* pool = nullptr,
                                  const AdaptiveState* resume = nullptr) {
  if (opts.max_adapt < 0) throw ConfigError("run_adaptive: I must be >= 0");
  if (!(opts.lambda > 0.0 && opts.lambda < 1.0))
    throw ConfigError("run_adaptive: lambda must lie in (0,1)");
  if (opts.m0 < 1) throw ConfigError("run_adaptive: M0 must be >= 1");

  AdaptiveState st;
  const FrequencySet b0 = initial_feature_set(problem.input_dim, opts.m0);
  if (resume) {
    st = *resume;
    if (problem.gate) *problem.gate = CausalGate{};  // gates restart per phase
  } else {
    st.net = make_initial_network(problem.input_dim, problem.output_dim, opts.m0, opts.hidden,
                                  opts.act, opts.h_mode, derive_seed(opts.seed, 7000, 0));
    st.current_set = b0;
  }

  DenseMatrix eval_pts;
  if (problem.exact && !opts.eval_counts.empty())
    eval_pts = eval_grid(problem.domain, opts.eval_counts);

  while (!st.aborted) {
    if (st.training_phases == st.iteration) {
      // Train the current network (iteration It).
      if (problem.gate) *problem.gate = CausalGate{};
      auto g = build_loss_graph(problem, st.net, cfg, pool);
      g->tape.set_check_finite(true);
      std::function<double()> rel;
      if (eval_pts.rows > 0)
        rel = [&]() { return relative_l2(problem, st.net, eval_pts, pool); };
      TrainResult tr = train(st.net.params, *g, cfg, rel);
      ++st.training_phases;
      st.rel_errors.push_back(tr.final_rel_l2);
      if (tr.aborted) {
        st.aborted = true;
        st.abort_reason = tr.abort_reason;
      }
      if (!out_dir.empty()) {
        const std::string dir = adaptive_detail::it_dir(out_dir, st.iteration);
        write_text_file(dir + "/history.csv", history_to_csv(tr, g->component_names));
        write_text_file(dir + "/checkpoint.txt",
                        network_to_text(st.net, problem.ansatz.kind));
      }
      if (opts.keep_epoch_history)
        st.phase_results.push_back(std::move(tr));
      else {
        TrainResult summary;
        summary.aborted = tr.aborted;
        summary.abort_reason = tr.abort_reason;
        summary.final_rel_l2 = tr.final_rel_l2;
        st.phase_results.push_back(std::move(summary));
      }
      if (st.aborted) break;

      // Posterior frequency capture on the trained model.
      const std::vector<long> counts = !opts.dft_counts.empty()
                                           ? opts.dft_counts
                                           : adaptive_detail::derive_dft_counts(
                                                 problem, b0, st.current_set);
      CaptureResult cap;
      try {
        cap = capture_frequencies(problem, st.net, counts, opts.lambda, pool);
      } catch (const AdaptError& e) {
        st.aborted = true;
        st.abort_reason = e.what();
        break;
      } catch (const NumericalError& e) {
        st.aborted = true;
        st.abort_reason = e.what();
        break;
      }
      st.captured.push_back(cap.selected);
      if (!out_dir.empty()) {
        const std::string dir = adaptive_detail::it_dir(out_dir, st.iteration);
        write_text_file(dir + "/spectrum.csv", spectrum_to_csv(cap.spectrum));
        write_text_file(dir + "/captured.csv", spectrum_to_csv(cap.selected));
      }
      const bool equal = compare_sets(st.current_set, cap.selected);
      st.current_set = cap.selected;
      if (equal) {
        st.stopped_by_set_equality = true;
        break;
      }
    }

    if (st.iteration >= opts.max_adapt) break;

    // Rebuild for iteration It+1 from the freshly captured set.
    const int n0 = static_cast<int>(st.current_set.size());
    const uint64_t rebuild_seed = derive_seed(opts.seed, 7000, st.iteration + 1);
    st.net = n0 <= opts.m0
                 ? rebuild_criterion_A(st.current_set, problem.input_dim, problem.output_dim,
                                       opts.hidden, opts.act, opts.h_mode, rebuild_seed)
                 : rebuild_criterion_B(st.current_set, opts.m0, problem.input_dim,
                                       problem.output_dim, opts.hidden, opts.act, opts.h_mode,
                                       rebuild_seed);
    ++st.iteration;
    if (!out_dir.empty()) save_state(st, problem, out_dir + "/resume.txt");
  }

  if (!out_dir.empty()) save_state(st, problem, out_dir + "/state.txt");
  return st;
}

// Summary table: one row per completed phase.
inline std::string summary_to_csv(const AdaptiveState& st) {
  std::string s = "iteration,rel_l2,set_size\n";
  for (int it = 0; it < st.training_phases; ++it) {
    s += std::to_string(it) + ",";
    if (st.rel_errors[it]) s += csv_num(*st.rel_errors[it]);
    s += ",";
    if (it < static_cast<int>(st.captured.size()))
      s += std::to_string(st.captured[it].size());
    s += "\n";
  }
  return s;
}

// Writes the report bundle: summary, final pointwise error grid, config echo.
// Per-iteration artifacts were already written during the run.
inline void emit_report(const AdaptiveState& st, const PdeProblem& problem,
                        const AdaptOptions& opts, const std::string& dir,
                        ThreadPool* pool = nullptr) {
  write_text_file(dir + "/summary.csv", summary_to_csv(st));
  std::string cfg;
  for (const auto& [k, v] : st.config_echo) cfg += k + " = " + v + "\n";
  write_text_file(dir + "/config.txt", cfg);
  if (problem.exact && !opts.eval_counts.empty()) {
    const DenseMatrix pts = eval_grid(problem.domain, opts.eval_counts);
    const DenseMatrix ref = problem.exact->eval(pts);
    const DenseMatrix got = evaluate_values(st.net, problem.ansatz, pts, pool);
    std::string s;
    for (int a = 0; a < problem.input_dim; ++a) s += "x" + std::to_string(a) + ",";
    s += "abs_error\n";
    for (long i = 0; i < pts.rows; ++i) {
      double err = 0.0;
      for (int c = 0; c < problem.output_dim; ++c) {
        const double dv = ref(i, c) - got(i, c);
        err += dv * dv;
      }
      for (int a = 0; a < problem.input_dim; ++a) s += csv_num(pts(i, a)) + ",";
      s += csv_num(std::sqrt(err)) + "\n";
    }
    write_text_file(dir + "/error_grid.csv", s);
  }
}

}  // namespace famnet
