#pragma once

#include <cstdio>
#include <cstdlib>
#include <istream>
#include <sstream>
#include <string>

#include "famnet/errors.hpp"
#include "famnet/network.hpp"
#include "famnet/spectral.hpp"

namespace famnet {

namespace ckpt_detail {

inline std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Whitespace-token reader with typed accessors; any mismatch is a
// FormatError so corrupted files fail loudly.
struct Reader {
  std::istream& in;

  std::string token() {
    std::string t;
    if (!(in >> t)) throw FormatError("checkpoint: unexpected end of file");
    return t;
  }

  void expect(const std::string& want) {
    const std::string got = token();
    if (got != want)
      throw FormatError("checkpoint: expected '" + want + "', got '" + got + "'");
  }

  long integer() {
    const std::string t = token();
    char* end = nullptr;
    const long v = std::strtol(t.c_str(), &end, 10);
    if (end == t.c_str() || *end != '\0') throw FormatError("checkpoint: bad integer " + t);
    return v;
  }

  double real() {
    const std::string t = token();
    char* end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (end == t.c_str() || *end != '\0') throw FormatError("checkpoint: bad number " + t);
    return v;
  }
};

}  // namespace ckpt_detail

// Network block: layer sizes, embedding descriptors with frequency vectors at
// full decimal precision, flattened parameters, h list, ansatz tag, rng seed.
inline void write_network(std::ostream& out, const ScaleNetwork& net, AnsatzKind ansatz) {
  using ckpt_detail::fmt;
  out << "network\n";
  out << "input_dim " << net.input_dim << "\n";
  out << "output_dim " << net.output_dim << "\n";
  out << "h_mode " << (net.h_mode == HMode::Fixed ? "fixed" : "learnable") << "\n";
  out << "ansatz " << ansatz_name(ansatz) << "\n";
  out << "seed " << net.seed << "\n";
  out << "subnets " << net.subnets.size() << "\n";
  for (size_t j = 0; j < net.subnets.size(); ++j) {
    const SubNetwork& sn = net.subnets[j];
    const Embedding& e = net.embeddings[j];
    out << "subnet " << j << "\n";
    out << "embedding " << embedding_name(e.kind) << " " << e.freqs.size() << "\n";
    for (const auto& k : e.freqs) {
      out << "k";
      for (double v : k) out << " " << fmt(v);
      out << "\n";
    }
    out << "activation " << act_name(sn.act) << "\n";
    out << "sizes " << sn.layer_sizes.size();
    for (long s : sn.layer_sizes) out << " " << s;
    out << "\n";
  }
  out << "h " << net.subnets.size();
  for (size_t j = 0; j < net.subnets.size(); ++j) out << " " << fmt(net.h_value(j));
  out << "\n";
  out << "params " << net.params.size() << "\n";
  for (size_t i = 0; i < net.params.size(); ++i)
    out << fmt(net.params[i]) << ((i + 1) % 6 == 0 ? "\n" : " ");
  out << "\nend_network\n";
}

inline ScaleNetwork read_network(std::istream& in, AnsatzKind* ansatz_out = nullptr) {
  ckpt_detail::Reader r{in};
  r.expect("network");
  ScaleNetwork net;
  r.expect("input_dim");
  net.input_dim = static_cast<int>(r.integer());
  r.expect("output_dim");
  net.output_dim = static_cast<int>(r.integer());
  r.expect("h_mode");
  net.h_mode = r.token() == "learnable" ? HMode::Learnable : HMode::Fixed;
  r.expect("ansatz");
  const AnsatzKind ak = ansatz_from_name(r.token());
  if (ansatz_out) *ansatz_out = ak;
  r.expect("seed");
  net.seed = static_cast<uint64_t>(r.integer());
  r.expect("subnets");
  const long nsub = r.integer();
  for (long j = 0; j < nsub; ++j) {
    r.expect("subnet");
    if (r.integer() != j) throw FormatError("checkpoint: subnet index out of order");
    r.expect("embedding");
    Embedding e;
    e.kind = embedding_from_name(r.token());
    const long nfreq = r.integer();
    for (long q = 0; q < nfreq; ++q) {
      r.expect("k");
      std::vector<double> k(net.input_dim);
      for (int a = 0; a < net.input_dim; ++a) k[a] = r.real();
      e.freqs.push_back(std::move(k));
    }
    r.expect("activation");
    SubNetwork sn;
    sn.act = act_from_name(r.token());
    r.expect("sizes");
    const long nsz = r.integer();
    for (long q = 0; q < nsz; ++q) sn.layer_sizes.push_back(r.integer());
    if (sn.layer_sizes.empty() ||
        sn.layer_sizes.front() != e.width(net.input_dim) ||
        sn.layer_sizes.back() != net.output_dim)
      throw FormatError("checkpoint: inconsistent layer sizes");
    net.embeddings.push_back(std::move(e));
    net.subnets.push_back(std::move(sn));
  }
  r.expect("h");
  if (r.integer() != nsub) throw FormatError("checkpoint: h length mismatch");
  net.h.resize(nsub);
  for (long j = 0; j < nsub; ++j) net.h[j] = r.real();
  const long total = assign_parameter_layout(net);
  r.expect("params");
  if (r.integer() != total) throw FormatError("checkpoint: parameter count mismatch");
  for (long i = 0; i < total; ++i) net.params[i] = r.real();
  if (net.h_mode == HMode::Learnable)
    std::copy(net.h.begin(), net.h.end(), net.params.begin() + net.h_offset);
  r.expect("end_network");
  return net;
}

inline void write_freqset(std::ostream& out, const FrequencySet& s) {
  using ckpt_detail::fmt;
  out << "freqset " << s.entries.size() << " " << s.grid_counts.size() << "\n";
  out << "grid";
  for (long c : s.grid_counts) out << " " << c;
  out << "\nmirrored";
  for (bool m : s.mirrored_axes) out << " " << (m ? 1 : 0);
  out << "\n";
  for (const FreqEntry& e : s.entries) {
    out << "f";
    for (double v : e.k) out << " " << fmt(v);
    for (long i : e.index) out << " " << i;
    out << " " << fmt(e.coeff.real()) << " " << fmt(e.coeff.imag()) << "\n";
  }
}

inline FrequencySet read_freqset(std::istream& in) {
  ckpt_detail::Reader r{in};
  r.expect("freqset");
  const long n = r.integer();
  const long d = r.integer();
  FrequencySet s;
  r.expect("grid");
  for (long a = 0; a < d; ++a) s.grid_counts.push_back(r.integer());
  r.expect("mirrored");
  for (long a = 0; a < d; ++a) s.mirrored_axes.push_back(r.integer() != 0);
  for (long i = 0; i < n; ++i) {
    r.expect("f");
    FreqEntry e;
    e.k.resize(d);
    e.index.resize(d);
    for (long a = 0; a < d; ++a) e.k[a] = r.real();
    for (long a = 0; a < d; ++a) e.index[a] = r.integer();
    const double re = r.real(), im = r.real();
    e.coeff = {re, im};
    s.entries.push_back(std::move(e));
  }
  return s;
}

inline std::string network_to_text(const ScaleNetwork& net, AnsatzKind ansatz) {
  std::ostringstream out;
  out << "famnet-checkpoint 1\n";
  write_network(out, net, ansatz);
  return out.str();
}

inline ScaleNetwork network_from_text(const std::string& text, AnsatzKind* ansatz = nullptr) {
  std::istringstream in(text);
  ckpt_detail::Reader r{in};
  r.expect("famnet-checkpoint");
  if (r.integer() != 1) throw FormatError("checkpoint: unsupported version");
  return read_network(in, ansatz);
}

}  // namespace famnet
