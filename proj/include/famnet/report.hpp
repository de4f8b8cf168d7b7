#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "famnet/errors.hpp"
#include "famnet/optim.hpp"

namespace famnet {

inline void write_text_file(const std::string& path, const std::string& content) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error("cannot open for writing: " + path);
  out << content;
  if (!out) throw Error("write failed: " + path);
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open for reading: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string csv_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// epoch, lr, total loss, per-component losses, relative L2 (blank when
// unavailable).
inline std::string history_to_csv(const TrainResult& tr,
                                  const std::vector<std::string>& component_names) {
  std::string s = "epoch,lr,total";
  for (const auto& n : component_names) s += "," + n;
  s += ",rel_l2\n";
  for (const EpochRecord& r : tr.history) {
    s += std::to_string(r.epoch) + "," + csv_num(r.lr) + "," + csv_num(r.total);
    for (double c : r.components) s += "," + csv_num(c);
    s += ",";
    if (r.rel_l2) s += csv_num(*r.rel_l2);
    s += "\n";
  }
  return s;
}

}  // namespace famnet
