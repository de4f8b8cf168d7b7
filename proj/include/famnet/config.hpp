#pragma once

#include <cstdlib>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "famnet/adaptive.hpp"
#include "famnet/errors.hpp"
#include "famnet/network.hpp"
#include "famnet/optim.hpp"
#include "famnet/problems.hpp"

namespace famnet {

using KeyValues = std::map<std::string, std::string>;

// Numbers may carry a "pi" suffix: "40pi" == 40*pi. Frequencies written this
// way stay exact multiples of pi.
inline double parse_real(const std::string& s) {
  std::string t = s;
  double mult = 1.0;
  if (t.size() > 2 && t.substr(t.size() - 2) == "pi") {
    mult = kPi;
    t = t.substr(0, t.size() - 2);
    if (t.empty() || t == "-") t += "1";
  }
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (end == t.c_str() || *end != '\0') throw ConfigError("bad number: " + s);
  return v * mult;
}

inline long parse_long(const std::string& s) {
  char* end = nullptr;
  const long v = std::strtol(s.c_str(), &end, 10);
  if (end == s.c_str() || *end != '\0') throw ConfigError("bad integer: " + s);
  return v;
}

inline bool parse_bool(const std::string& s) {
  if (s == "1" || s == "true" || s == "on") return true;
  if (s == "0" || s == "false" || s == "off") return false;
  throw ConfigError("bad boolean: " + s);
}

inline std::vector<long> parse_long_list(const std::string& s) {
  std::vector<long> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(parse_long(item));
  if (out.empty()) throw ConfigError("empty list: " + s);
  return out;
}

// Flat key=value file, '#' comments, one nesting level via dotted keys
// (e.g. poisson.k = 40pi). Later assignments win.
inline KeyValues parse_config_file(const std::string& text) {
  KeyValues kv;
  std::istringstream in(text);
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    const size_t eq = line.find('=');
    if (eq == std::string::npos) {
      bool blank = true;
      for (char c : line)
        if (!isspace(static_cast<unsigned char>(c))) blank = false;
      if (blank) continue;
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    }
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key.empty() || val.empty())
      throw ConfigError("config line " + std::to_string(lineno) + ": empty key or value");
    kv[key] = val;
  }
  return kv;
}

// ---------------------------------------------------------------------------
// Presets
// ---------------------------------------------------------------------------

inline KeyValues preset_defaults(const std::string& problem, const std::string& scale) {
  const bool paper = scale == "paper";
  if (!paper && scale != "desk") throw ConfigError("unknown scale: " + scale);

  KeyValues kv;
  kv["problem"] = problem;
  kv["scale"] = scale;
  kv["act"] = "sfm";
  kv["h_mode"] = "fixed";
  kv["workers"] = "1";
  kv["resample_every"] = "0";
  kv["report_interval"] = "100";
  kv["wr"] = "1";
  kv["warm_start"] = "0";

  if (problem == "poisson") {
    kv["poisson.k"] = paper ? "200pi" : "40pi";
    kv["poisson.amp"] = "0.1";
    kv["epochs"] = paper ? "100000" : "20000";
    kv["nr"] = paper ? "1000" : "512";
    kv["wb"] = "1000";
    kv["lr0"] = "0.01";
    kv["lr_gamma"] = "0.9";
    kv["lr_interval"] = "500";
    kv["lambda"] = "0.01";
    kv["adapt_max"] = paper ? "4" : "3";
    kv["m0"] = paper ? "6" : "4";
    kv["hidden"] = paper ? "100,100,100" : "40,40";
    kv["dft_counts"] = paper ? "1000" : "256";
    kv["eval_counts"] = "1001";
  } else if (problem == "heat") {
    kv["heat.k"] = paper ? "500pi" : "20pi";
    kv["epochs"] = paper ? "50000" : "4000";
    kv["nrx"] = paper ? "100" : "48";
    kv["nrt"] = paper ? "20" : "24";
    kv["nb"] = paper ? "200" : "128";
    kv["wb"] = "100";
    kv["lr0"] = "0.01";
    kv["lr_gamma"] = "0.9";
    kv["lr_interval"] = "500";
    kv["lambda"] = "0.01";
    kv["adapt_max"] = paper ? "4" : "3";
    kv["m0"] = paper ? "6" : "4";
    kv["hidden"] = paper ? "100,100,100" : "40,40";
    kv["dft_counts"] = paper ? "3000,128" : "64,32";
    kv["eval_counts"] = "50,40";
  } else if (problem == "wave") {
    kv["epochs"] = paper ? "100000" : "3000";
    kv["nrx"] = paper ? "100" : "40";
    kv["nrt"] = paper ? "50" : "25";
    kv["nu"] = "200";
    kv["nut"] = "200";
    kv["wu"] = "1000";
    kv["wut"] = "1000";
    kv["wave.causal_gate"] = "1";
    kv["lr0"] = "0.001";
    kv["lr_gamma"] = "0.8";
    kv["lr_interval"] = "5000";
    kv["lambda"] = "0.01";
    kv["adapt_max"] = paper ? "4" : "3";
    kv["m0"] = paper ? "6" : "4";
    kv["hidden"] = paper ? "100,100,100" : "40,40";
    kv["dft_counts"] = paper ? "256,128" : "64,64";
    kv["eval_counts"] = "50,40";
  } else if (problem == "schrodinger") {
    kv["schrodinger.eps"] = paper ? "0.05" : "0.2";
    kv["schrodinger.t_final"] = "0.5";
    kv["schrodinger.causal_gate"] = "0";
    kv["epochs"] = paper ? "100000" : "2000";
    kv["nrx"] = paper ? "128" : "48";
    kv["nrt"] = paper ? "32" : "24";
    kv["nb"] = paper ? "128" : "64";
    kv["wb"] = "100";
    kv["lr0"] = "0.001";
    kv["lr_gamma"] = "0.9";
    kv["lr_interval"] = "1000";
    kv["lambda"] = "0.1";
    kv["adapt_max"] = "4";
    kv["m0"] = paper ? "6" : "4";
    kv["hidden"] = paper ? "200,200,200" : "40,40";
    kv["dft_counts"] = paper ? "256,64" : "64,32";
    kv["eval_counts"] = "64,32";
  } else if (problem == "fit") {
    kv["fit.k"] = "40pi";
    kv["fit.k2"] = "0";
    kv["fit.amp2"] = "0";
    kv["fit.embedding"] = "hybrid";
    kv["epochs"] = paper ? "100000" : "5000";
    kv["nr"] = paper ? "1000" : "600";
    kv["lr0"] = "0.01";
    kv["lr_gamma"] = "0.9";
    kv["lr_interval"] = paper ? "1000" : "500";
    kv["lambda"] = "0.05";
    kv["adapt_max"] = "3";
    kv["m0"] = paper ? "6" : "4";
    kv["hidden"] = paper ? "100,100,100" : "40,40";
    kv["dft_counts"] = paper ? "1000" : "256";
    kv["eval_counts"] = "1001";
  } else {
    throw ConfigError("unknown problem preset: " + problem);
  }
  return kv;
}

inline std::string kv_get(const KeyValues& kv, const std::string& key) {
  auto it = kv.find(key);
  if (it == kv.end()) throw ConfigError("missing config key: " + key);
  return it->second;
}

inline std::string kv_get_or(const KeyValues& kv, const std::string& key,
                             const std::string& fallback) {
  auto it = kv.find(key);
  return it == kv.end() ? fallback : it->second;
}

inline PdeProblem make_problem(const KeyValues& kv) {
  const std::string name = kv_get(kv, "problem");
  if (name == "poisson")
    return poisson_problem(parse_real(kv_get(kv, "poisson.k")),
                           parse_real(kv_get(kv, "poisson.amp")));
  if (name == "heat") return heat_problem(parse_real(kv_get(kv, "heat.k")));
  if (name == "wave")
    return wave_problem(parse_bool(kv_get_or(kv, "wave.causal_gate", "1")));
  if (name == "schrodinger")
    return schrodinger_problem(parse_real(kv_get(kv, "schrodinger.eps")),
                               parse_real(kv_get(kv, "schrodinger.t_final")),
                               parse_bool(kv_get_or(kv, "schrodinger.causal_gate", "0")));
  if (name == "fit") {
    const double k = parse_real(kv_get(kv, "fit.k"));
    const double k2 = parse_real(kv_get_or(kv, "fit.k2", "0"));
    const double a2 = parse_real(kv_get_or(kv, "fit.amp2", "0"));
    return fit_problem("fit", [k, k2, a2](double x) {
      return std::sin(k * x) + (k2 != 0.0 ? a2 * std::sin(k2 * x) : 0.0);
    });
  }
  throw ConfigError("unknown problem: " + name);
}

inline TrainConfig make_train_config(const KeyValues& kv) {
  TrainConfig cfg;
  cfg.epochs = parse_long(kv_get(kv, "epochs"));
  cfg.n_r = parse_long(kv_get_or(kv, "nr", "1000"));
  cfg.n_rx = parse_long(kv_get_or(kv, "nrx", "0"));
  cfg.n_rt = parse_long(kv_get_or(kv, "nrt", "0"));
  cfg.n_b = parse_long(kv_get_or(kv, "nb", "200"));
  cfg.n_u = parse_long(kv_get_or(kv, "nu", "200"));
  cfg.n_ut = parse_long(kv_get_or(kv, "nut", "200"));
  cfg.w_r = parse_real(kv_get_or(kv, "wr", "1"));
  cfg.w_b = parse_real(kv_get_or(kv, "wb", "1"));
  cfg.w_u = parse_real(kv_get_or(kv, "wu", "1000"));
  cfg.w_ut = parse_real(kv_get_or(kv, "wut", "1000"));
  cfg.seed = static_cast<uint64_t>(parse_long(kv_get(kv, "seed")));
  cfg.lr.initial = parse_real(kv_get(kv, "lr0"));
  cfg.lr.gamma = parse_real(kv_get(kv, "lr_gamma"));
  cfg.lr.interval = parse_long(kv_get(kv, "lr_interval"));
  cfg.resample_every = parse_long(kv_get_or(kv, "resample_every", "0"));
  cfg.report_interval = parse_long(kv_get_or(kv, "report_interval", "100"));
  if (cfg.epochs < 0 || cfg.n_r < 1 || cfg.n_b < 1 || cfg.n_u < 1 || cfg.n_ut < 1)
    throw ConfigError("collocation counts and epochs must be positive");
  if (cfg.w_r < 0 || cfg.w_b < 0 || cfg.w_u < 0 || cfg.w_ut < 0)
    throw ConfigError("loss weights must be nonnegative");
  return cfg;
}

inline AdaptOptions make_adapt_options(const KeyValues& kv) {
  AdaptOptions o;
  o.max_adapt = static_cast<int>(parse_long(kv_get(kv, "adapt_max")));
  o.lambda = parse_real(kv_get(kv, "lambda"));
  o.m0 = static_cast<int>(parse_long(kv_get(kv, "m0")));
  o.hidden = parse_long_list(kv_get(kv, "hidden"));
  o.act = act_from_name(kv_get(kv, "act"));
  o.h_mode = kv_get(kv, "h_mode") == "learnable" ? HMode::Learnable : HMode::Fixed;
  if (kv.count("dft_counts")) o.dft_counts = parse_long_list(kv_get(kv, "dft_counts"));
  if (kv.count("eval_counts")) o.eval_counts = parse_long_list(kv_get(kv, "eval_counts"));
  o.seed = static_cast<uint64_t>(parse_long(kv_get(kv, "seed")));
  o.warm_start = parse_bool(kv_get_or(kv, "warm_start", "0"));
  return o;
}

// Single sub-network model for the `fit` command, with the embedding chosen
// by fit.embedding at frequency fit.k (identity gives a plain MLP baseline).
inline ScaleNetwork make_fit_network(const KeyValues& kv, const PdeProblem& problem) {
  const EmbeddingKind kind = embedding_from_name(kv_get(kv, "fit.embedding"));
  Embedding e;
  e.kind = kind;
  if (kind != EmbeddingKind::Identity)
    e.freqs.push_back({parse_real(kv_get(kv, "fit.k"))});
  const AdaptOptions o = make_adapt_options(kv);
  return make_scale_network(problem.input_dim, problem.output_dim, {e}, o.hidden, o.act,
                            o.h_mode, {1.0}, derive_seed(o.seed, 7000, 0));
}

inline std::string config_echo_text(const KeyValues& kv) {
  std::string s;
  for (const auto& [k, v] : kv) s += k + " = " + v + "\n";
  return s;
}

}  // namespace famnet
