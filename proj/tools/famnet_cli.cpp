// Command-line front end: fit / solve / adapt / spectrum.
//
// Configuration resolves in three layers: preset defaults, then a key=value
// config file, then command-line overrides. The fully resolved configuration
// is echoed into the output directory next to the run artifacts.

#include <CLI11.hpp>
#include <cstdio>
#include <cstdlib>
#include <memory>
#include <string>
#include <vector>

#include "famnet/adaptive.hpp"
#include "famnet/checkpoint.hpp"
#include "famnet/config.hpp"
#include "famnet/network.hpp"
#include "famnet/optim.hpp"
#include "famnet/problems.hpp"
#include "famnet/report.hpp"
#include "famnet/spectral.hpp"
#include "famnet/thread_pool.hpp"

namespace {

using namespace famnet;

struct CommonArgs {
  std::string problem;
  std::string scale = "desk";
  long seed = -1;
  std::string config_file;
  std::vector<std::string> sets;
  std::string out_dir;
  int workers = 0;  // 0 = preset value
};

void add_common(CLI::App* cmd, CommonArgs& a, bool need_problem) {
  auto* p = cmd->add_option("--problem", a.problem, "problem preset name");
  if (need_problem) p->required();
  cmd->add_option("--scale", a.scale, "desk or paper")
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  cmd->add_option("--seed", a.seed, "rng seed (required; no wall-clock seeding)")
      ->required()
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  cmd->add_option("--config", a.config_file, "key=value config file");
  cmd->add_option("--set", a.sets, "override: key=value (repeatable)");
  cmd->add_option("--out", a.out_dir, "output directory");
  cmd->add_option("--workers", a.workers, "evaluation worker count")
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
}

KeyValues resolve(const CommonArgs& a, const std::string& command) {
  KeyValues kv = preset_defaults(a.problem, a.scale);
  if (!a.config_file.empty()) {
    const KeyValues file_kv = parse_config_file(read_text_file(a.config_file));
    for (const auto& [k, v] : file_kv) kv[k] = v;
  }
  KeyValues seen;
  for (const std::string& s : a.sets) {
    const size_t eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects key=value, got: " + s);
    const std::string key = s.substr(0, eq), val = s.substr(eq + 1);
    if (seen.count(key))
      std::fprintf(stderr, "warning: --set %s repeated, last value wins\n", key.c_str());
    seen[key] = val;
    kv[key] = val;
  }
  if (a.seed < 0) throw ConfigError("seed is mandatory");
  kv["seed"] = std::to_string(a.seed);
  kv["command"] = command;
  if (a.workers > 0) kv["workers"] = std::to_string(a.workers);
  return kv;
}

std::string default_out_dir(const KeyValues& kv) {
  const char* root = std::getenv("FAMNET_OUT_ROOT");
  const std::string base = root && *root ? root : "famnet_out";
  return base + "/" + kv_get(kv, "command") + "_" + kv_get(kv, "problem") + "_" +
         kv_get(kv, "scale") + "_s" + kv_get(kv, "seed");
}

std::unique_ptr<ThreadPool> make_pool(const KeyValues& kv) {
  const long w = parse_long(kv_get_or(kv, "workers", "1"));
  if (w > 1) return std::make_unique<ThreadPool>(static_cast<int>(w));
  return nullptr;
}

// One training phase without adaptation; shared by `fit` and `solve`.
int run_single_phase(const KeyValues& kv, const std::string& dir, bool fit_net) {
  const PdeProblem problem = make_problem(kv);
  const TrainConfig cfg = make_train_config(kv);
  const AdaptOptions opts = make_adapt_options(kv);
  auto pool = make_pool(kv);

  ScaleNetwork net =
      fit_net ? make_fit_network(kv, problem)
              : make_initial_network(problem.input_dim, problem.output_dim, opts.m0,
                                     opts.hidden, opts.act, opts.h_mode,
                                     derive_seed(opts.seed, 7000, 0));

  DenseMatrix eval_pts;
  if (problem.exact && !opts.eval_counts.empty())
    eval_pts = eval_grid(problem.domain, opts.eval_counts);
  std::function<double()> rel;
  if (eval_pts.rows > 0)
    rel = [&]() { return relative_l2(problem, net, eval_pts, pool.get()); };

  if (problem.gate) *problem.gate = CausalGate{};
  auto g = build_loss_graph(problem, net, cfg, pool.get());
  g->tape.set_check_finite(true);
  TrainResult tr = train(net.params, *g, cfg, rel);

  write_text_file(dir + "/config.txt", config_echo_text(kv));
  write_text_file(dir + "/history.csv", history_to_csv(tr, g->component_names));
  write_text_file(dir + "/checkpoint.txt", network_to_text(net, problem.ansatz.kind));
  std::string summary = "iteration,rel_l2,set_size\n0,";
  if (tr.final_rel_l2) summary += csv_num(*tr.final_rel_l2);
  summary += ",\n";
  write_text_file(dir + "/summary.csv", summary);

  if (tr.aborted) {
    std::fprintf(stderr, "training aborted: %s\n", tr.abort_reason.c_str());
    return 3;
  }
  if (tr.final_rel_l2)
    std::printf("final rel_l2 %.6e\n", *tr.final_rel_l2);
  std::printf("wrote %s\n", dir.c_str());
  return 0;
}

int run_adapt(const KeyValues& kv, const std::string& dir, bool compare_h,
              const std::string& resume_path) {
  const PdeProblem problem = make_problem(kv);
  const TrainConfig cfg = make_train_config(kv);
  AdaptOptions opts = make_adapt_options(kv);
  opts.keep_epoch_history = true;
  auto pool = make_pool(kv);

  auto run_one = [&](HMode mode, const std::string& subdir) {
    AdaptOptions o = opts;
    o.h_mode = mode;
    AdaptiveState st;
    if (!resume_path.empty()) {
      AdaptiveState prev = load_state(resume_path);
      for (const auto& [k, v] : kv) prev.config_echo[k] = v;
      st = run_adaptive(problem, cfg, o, subdir, pool.get(), &prev);
    } else {
      st = run_adaptive(problem, cfg, o, subdir, pool.get(), nullptr);
    }
    st.config_echo.insert(kv.begin(), kv.end());
    emit_report(st, problem, o, subdir, pool.get());
    return st;
  };

  if (!compare_h) {
    const AdaptiveState st = run_one(opts.h_mode, dir);
    for (int it = 0; it < st.training_phases; ++it)
      std::printf("it %d rel_l2 %s set %zu\n", it,
                  st.rel_errors[it] ? csv_num(*st.rel_errors[it]).c_str() : "-",
                  it < static_cast<int>(st.captured.size()) ? st.captured[it].size()
                                                            : size_t{0});
    std::printf("wrote %s\n", dir.c_str());
    return st.aborted ? 3 : 0;
  }

  const AdaptiveState fixed = run_one(HMode::Fixed, dir + "/fixed");
  const AdaptiveState learn = run_one(HMode::Learnable, dir + "/learnable");
  std::string s = "mode,final_rel_l2\n";
  s += "fixed,";
  if (!fixed.rel_errors.empty() && fixed.rel_errors.back()) s += csv_num(*fixed.rel_errors.back());
  s += "\nlearnable,";
  if (!learn.rel_errors.empty() && learn.rel_errors.back()) s += csv_num(*learn.rel_errors.back());
  s += "\n";
  write_text_file(dir + "/h_compare.csv", s);
  std::printf("wrote %s\n", dir.c_str());
  return (fixed.aborted || learn.aborted) ? 3 : 0;
}

int run_spectrum(const KeyValues& kv, const std::string& dir, const std::string& ckpt) {
  const PdeProblem problem = make_problem(kv);
  const AdaptOptions opts = make_adapt_options(kv);
  auto pool = make_pool(kv);
  AnsatzKind tag = AnsatzKind::None;
  const ScaleNetwork net = network_from_text(read_text_file(ckpt), &tag);
  if (tag != problem.ansatz.kind)
    std::fprintf(stderr, "warning: checkpoint ansatz '%s' differs from problem '%s'\n",
                 ansatz_name(tag).c_str(), ansatz_name(problem.ansatz.kind).c_str());
  std::vector<long> counts = opts.dft_counts;
  if (counts.empty())
    counts = adaptive_detail::derive_dft_counts(
        problem, initial_feature_set(problem.input_dim, opts.m0), FrequencySet{});
  const CaptureResult cap =
      capture_frequencies(problem, net, counts, opts.lambda, pool.get());
  const double delta = parse_real(kv_get_or(kv, "delta", "0.05"));
  const CoverageResult cov = coverage_check(cap.selected, cap.spectrum, delta);
  write_text_file(dir + "/config.txt", config_echo_text(kv));
  write_text_file(dir + "/spectrum.csv", spectrum_to_csv(cap.spectrum));
  write_text_file(dir + "/captured.csv", spectrum_to_csv(cap.selected));
  char buf[128];
  std::snprintf(buf, sizeof buf, "selected %zu\ncoverage_ratio %.17g\ncovered %s\n",
                cap.selected.size(), cov.ratio, cov.ok ? "yes" : "no");
  write_text_file(dir + "/coverage.txt", buf);
  std::printf("selected %zu frequencies, coverage %.4f\nwrote %s\n", cap.selected.size(),
              cov.ratio, dir.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"frequency-adaptive multi-scale network solver"};
  app.require_subcommand(1);

  CommonArgs fit_args, solve_args, adapt_args, spec_args;
  bool compare_h = false;
  std::string resume_path, ckpt_path;

  CLI::App* fit = app.add_subcommand("fit", "fit a target function with one sub-network");
  add_common(fit, fit_args, false);

  CLI::App* solve = app.add_subcommand("solve", "train a PDE once, no adaptation");
  add_common(solve, solve_args, true);

  CLI::App* adapt = app.add_subcommand("adapt", "frequency-adaptive training loop");
  add_common(adapt, adapt_args, true);
  adapt->add_flag("--compare-h", compare_h, "run fixed and learnable h side by side");
  adapt->add_option("--resume", resume_path, "resume from a state file");

  CLI::App* spectrum = app.add_subcommand("spectrum", "DFT + selection on a checkpoint");
  add_common(spectrum, spec_args, true);
  spectrum->add_option("--checkpoint", ckpt_path, "network checkpoint file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (fit->parsed()) {
      if (fit_args.problem.empty()) fit_args.problem = "fit";
      if (fit_args.problem != "fit") throw ConfigError("fit command requires the fit problem");
      const KeyValues kv = resolve(fit_args, "fit");
      const std::string dir = fit_args.out_dir.empty() ? default_out_dir(kv) : fit_args.out_dir;
      return run_single_phase(kv, dir, true);
    }
    if (solve->parsed()) {
      const KeyValues kv = resolve(solve_args, "solve");
      const std::string dir =
          solve_args.out_dir.empty() ? default_out_dir(kv) : solve_args.out_dir;
      return run_single_phase(kv, dir, false);
    }
    if (adapt->parsed()) {
      const KeyValues kv = resolve(adapt_args, "adapt");
      const std::string dir =
          adapt_args.out_dir.empty() ? default_out_dir(kv) : adapt_args.out_dir;
      return run_adapt(kv, dir, compare_h, resume_path);
    }
    if (spectrum->parsed()) {
      const KeyValues kv = resolve(spec_args, "spectrum");
      const std::string dir =
          spec_args.out_dir.empty() ? default_out_dir(kv) : spec_args.out_dir;
      return run_spectrum(kv, dir, ckpt_path);
    }
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const FormatError& e) {
    std::fprintf(stderr, "format error: %s\n", e.what());
    return 2;
  } catch (const NumericalError& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return 3;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 2;
}
