#include <catch2/catch_amalgamated.hpp>
#include <sstream>

#include "famnet/checkpoint.hpp"
#include "famnet/network.hpp"

using namespace famnet;

TEST_CASE("embed variants: hand-checked values") {
  Embedding hy;
  hy.kind = EmbeddingKind::Hybrid;
  hy.freqs = {{2.0 * std::numbers::pi}};
  const auto h = embed(hy, {0.25});
  REQUIRE(h.size() == 3);
  REQUIRE(h[0] == Catch::Approx(std::numbers::pi / 2));
  REQUIRE(h[1] == Catch::Approx(0.0).margin(1e-15));
  REQUIRE(h[2] == Catch::Approx(1.0));

  Embedding ds;
  ds.kind = EmbeddingKind::DownScale;
  ds.freqs = {{1.0}};
  REQUIRE(embed(ds, {0.37})[0] == Catch::Approx(0.37));

  Embedding fo;
  fo.kind = EmbeddingKind::Fourier;
  fo.freqs = {{2.0 * std::numbers::pi, 10.0 * std::numbers::pi}};
  const auto f = embed(fo, {0.5, 0.1});
  REQUIRE(f.size() == 2);
  REQUIRE(f[0] == Catch::Approx(0.0).margin(1e-12));  // sin(2 pi)
  REQUIRE(f[1] == Catch::Approx(1.0));                // cos(2 pi)
}

TEST_CASE("embed output widths per variant") {
  SplitMix64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const int d = 1 + static_cast<int>(rng.next() % 3);
    const size_t nk = 1 + rng.next() % 5;
    std::vector<std::vector<double>> freqs(nk, std::vector<double>(d));
    for (auto& k : freqs)
      for (double& v : k) v = rng.normal();
    std::vector<double> x(d, 0.1);
    for (auto [kind, per] : {std::pair{EmbeddingKind::DownScale, 1},
                             std::pair{EmbeddingKind::Fourier, 2},
                             std::pair{EmbeddingKind::Hybrid, 3}}) {
      Embedding e;
      e.kind = kind;
      e.freqs = freqs;
      REQUIRE(embed(e, x).size() == nk * per);
    }
  }
}

TEST_CASE("sfm activation values and jet rule") {
  REQUIRE(sfm_activation(0.0) == Catch::Approx(0.5));
  REQUIRE(sfm_activation(std::numbers::pi / 2) == Catch::Approx(0.5));
  REQUIRE(sfm_activation(std::numbers::pi / 4) == Catch::Approx(std::sqrt(2.0) / 2));
  const ActDerivs d = act_derivs(ActKind::Sfm, 0.8);
  REQUIRE(d.d1 == Catch::Approx(0.5 * std::cos(0.8) - 0.5 * std::sin(0.8)));
  REQUIRE(d.d2 == Catch::Approx(-d.f));
}

TEST_CASE("forward: identity embedding equals a plain MLP; aggregation is linear") {
  Embedding e;
  e.kind = EmbeddingKind::Identity;
  ScaleNetwork one = make_scale_network(1, 1, {e}, {12, 12}, ActKind::Sfm, HMode::Fixed,
                                        {1.0}, 77);
  // Two identical sub-networks with h = [0.5, 0.5] equal the single one.
  ScaleNetwork two = make_scale_network(1, 1, {e, e}, {12, 12}, ActKind::Sfm, HMode::Fixed,
                                        {0.5, 0.5}, 0);
  const long half = static_cast<long>(two.params.size() / 2);
  for (long i = 0; i < half; ++i) {
    two.params[i] = one.params[i];
    two.params[half + i] = one.params[i];
  }
  const Ansatz none;
  for (double x : {0.05, 0.3, 0.77}) {
    REQUIRE(forward(two, none, {x})[0] == Catch::Approx(forward(one, none, {x})[0]));
  }
  // Scaling every h_j by c scales the output by c (fixed-h mode).
  ScaleNetwork scaled = two;
  scaled.h = {1.5, 1.5};
  for (double x : {0.1, 0.9})
    REQUIRE(forward(scaled, none, {x})[0] == Catch::Approx(3.0 * forward(one, none, {x})[0]));
}

TEST_CASE("initial network uses doubling down-scale embeddings") {
  ScaleNetwork net =
      make_initial_network(1, 1, 6, {10}, ActKind::Sfm, HMode::Fixed, 9);
  REQUIRE(net.subnet_count() == 6);
  for (int j = 0; j < 6; ++j) {
    REQUIRE(net.embeddings[j].kind == EmbeddingKind::DownScale);
    REQUIRE(net.embeddings[j].freqs.size() == 1);
    REQUIRE(net.embeddings[j].freqs[0][0] == Catch::Approx(std::pow(2.0, j)));
    REQUIRE(net.h[j] == 1.0);
  }
  // 2-d version: per-axis scaled copies
  ScaleNetwork net2 = make_initial_network(2, 1, 3, {10}, ActKind::Sfm, HMode::Fixed, 9);
  REQUIRE(net2.embeddings[2].freqs.size() == 2);
  REQUIRE(net2.embeddings[2].freqs[0] == std::vector<double>{4.0, 0.0});
  REQUIRE(net2.embeddings[2].freqs[1] == std::vector<double>{0.0, 4.0});
}

TEST_CASE("parameter count matches the closed form; biases start at zero") {
  Embedding e;
  e.kind = EmbeddingKind::Hybrid;
  e.freqs = {{1.0}, {2.0}};  // width 6
  ScaleNetwork net = make_scale_network(1, 2, {e}, {7, 5}, ActKind::Sfm, HMode::Fixed,
                                        {1.0}, 4);
  const long expect = 6 * 7 + 7 + 7 * 5 + 5 + 5 * 2 + 2;
  REQUIRE(static_cast<long>(net.params.size()) == expect);
  REQUIRE(net.subnets[0].param_count() == expect);
  for (long l = 0; l < net.subnets[0].layers(); ++l) {
    const long off = net.subnets[0].b_offset[l];
    for (long i = 0; i < net.subnets[0].layer_sizes[l + 1]; ++i)
      REQUIRE(net.params[off + i] == 0.0);
  }
}

TEST_CASE("hybrid embedding reproduces sin(kx) through a constructed linear map") {
  const double k = 17.0;
  Embedding e;
  e.kind = EmbeddingKind::Hybrid;
  e.freqs = {{k}};
  ScaleNetwork net = make_scale_network(1, 1, {e}, {}, ActKind::Sfm, HMode::Fixed, {1.0}, 0);
  net.params = {0.0, 0.0, 1.0, 0.0};  // weights [kx, cos, sin] -> sin, bias 0
  const Ansatz none;
  SplitMix64 rng(31);
  for (int i = 0; i < 50; ++i) {
    const double x = rng.uniform();
    REQUIRE(forward(net, none, {x})[0] == Catch::Approx(std::sin(k * x)).margin(1e-14));
  }
}

TEST_CASE("initial-value ansatz pins t=0 exactly") {
  Ansatz a;
  a.kind = AnsatzKind::InitialValue;
  a.u0 = [](const std::vector<double>& x, int, int) {
    return Jet2{std::sin(3.0 * x[0]), 3.0 * std::cos(3.0 * x[0]), -9.0 * std::sin(3.0 * x[0]),
                0};
  };
  ScaleNetwork net = make_initial_network(2, 1, 2, {8}, ActKind::Sfm, HMode::Fixed, 12);
  SplitMix64 rng(1);
  for (int i = 0; i < 1000; ++i) {
    const double x = rng.uniform();
    const double u = forward(net, a, {x, 0.0})[0];
    REQUIRE(std::abs(u - std::sin(3.0 * x)) < 1e-12);
  }
}

TEST_CASE("rebuild criterion A: one hybrid sub-network per frequency, h = |coeff|") {
  FrequencySet fs;
  fs.grid_counts = {64};
  fs.mirrored_axes = {false};
  FreqEntry a;
  a.k = {2 * std::numbers::pi};
  a.index = {1};
  a.coeff = {0.3, 0.4};  // modulus 0.5
  FreqEntry b;
  b.k = {40 * std::numbers::pi};
  b.index = {20};
  b.coeff = {0.0, 0.05};
  fs.entries = {a, b};
  const ScaleNetwork net =
      rebuild_criterion_A(fs, 1, 1, {10, 10}, ActKind::Sfm, HMode::Fixed, 5);
  REQUIRE(net.subnet_count() == 2);
  REQUIRE(net.embeddings[0].kind == EmbeddingKind::Hybrid);
  REQUIRE(net.embeddings[0].freqs[0][0] == a.k[0]);
  REQUIRE(net.embeddings[1].freqs[0][0] == b.k[0]);
  REQUIRE(net.h[0] == Catch::Approx(0.5));
  REQUIRE(net.h[1] == Catch::Approx(0.05));

  FrequencySet empty;
  REQUIRE_THROWS_AS(rebuild_criterion_A(empty, 1, 1, {10}, ActKind::Sfm, HMode::Fixed, 5),
                    AdaptError);
  // single frequency -> one sub-network
  FrequencySet single;
  single.entries = {a};
  const ScaleNetwork n1 =
      rebuild_criterion_A(single, 1, 1, {10}, ActKind::Sfm, HMode::Fixed, 5);
  REQUIRE(n1.subnet_count() == 1);
  REQUIRE(n1.h[0] == Catch::Approx(0.5));
}

TEST_CASE("rebuild criterion B: contiguous chunks in |k|_1 order, remainder last") {
  auto mk = [](double k, double mod) {
    FreqEntry e;
    e.k = {k};
    e.index = {static_cast<long>(k)};
    e.coeff = {mod, 0.0};
    return e;
  };
  FrequencySet six;
  for (int i = 1; i <= 6; ++i) six.entries.push_back(mk(i, 0.1 * i));
  const ScaleNetwork n6 = rebuild_criterion_B(six, 3, 1, 1, {8}, ActKind::Sfm,
                                              HMode::Fixed, 2);
  REQUIRE(n6.subnet_count() == 3);
  for (int j = 0; j < 3; ++j) REQUIRE(n6.embeddings[j].freqs.size() == 2);

  FrequencySet seven;
  for (int i = 1; i <= 7; ++i) seven.entries.push_back(mk(i, 1.0));
  const ScaleNetwork n7 = rebuild_criterion_B(seven, 3, 1, 1, {8}, ActKind::Sfm,
                                              HMode::Fixed, 2);
  REQUIRE(n7.embeddings[0].freqs.size() == 2);
  REQUIRE(n7.embeddings[1].freqs.size() == 2);
  REQUIRE(n7.embeddings[2].freqs.size() == 3);
  REQUIRE(n7.embeddings[2].freqs[0][0] == 5.0);  // order preserved

  // h_j sums the chunk coefficient moduli: synthetic hand computation
  FrequencySet three;
  three.entries = {mk(1, 0.5), mk(2, 0.25), mk(3, 0.125)};
  const ScaleNetwork n3 = rebuild_criterion_B(three, 2, 1, 1, {8}, ActKind::Sfm,
                                              HMode::Fixed, 2);
  REQUIRE(n3.h[0] == Catch::Approx(0.5));            // chunk {1}
  REQUIRE(n3.h[1] == Catch::Approx(0.25 + 0.125));   // chunk {2,3}

  REQUIRE_THROWS_AS(rebuild_criterion_B(three, 0, 1, 1, {8}, ActKind::Sfm, HMode::Fixed, 2),
                    ConfigError);
}

TEST_CASE("checkpoint round-trips networks bitwise") {
  Embedding e;
  e.kind = EmbeddingKind::Hybrid;
  e.freqs = {{2 * std::numbers::pi}, {40 * std::numbers::pi}};
  ScaleNetwork net =
      make_scale_network(1, 1, {e}, {9, 5}, ActKind::Sigmoid, HMode::Learnable, {0.25}, 123);
  // Perturb params to arbitrary trained-looking values.
  SplitMix64 rng(55);
  for (double& p : net.params) p += 0.01 * rng.normal();

  const std::string text = network_to_text(net, AnsatzKind::InitialValue);
  AnsatzKind tag = AnsatzKind::None;
  const ScaleNetwork back = network_from_text(text, &tag);
  REQUIRE(tag == AnsatzKind::InitialValue);
  REQUIRE(back.params == net.params);  // 0 ulp
  REQUIRE(back.embeddings[0].freqs == net.embeddings[0].freqs);
  REQUIRE(back.h_mode == HMode::Learnable);

  const Ansatz none;
  SplitMix64 prng(77);
  for (int i = 0; i < 100; ++i) {
    const double x = prng.uniform();
    REQUIRE(forward(back, none, {x})[0] == forward(net, none, {x})[0]);
  }
}

TEST_CASE("corrupted checkpoints raise FormatError") {
  Embedding e;
  e.kind = EmbeddingKind::Identity;
  ScaleNetwork net = make_scale_network(1, 1, {e}, {4}, ActKind::Sfm, HMode::Fixed, {1.0}, 1);
  std::string text = network_to_text(net, AnsatzKind::None);
  REQUIRE_THROWS_AS(network_from_text("famnet-checkpoint 999\n"), FormatError);
  REQUIRE_THROWS_AS(network_from_text(text.substr(0, text.size() / 2)), FormatError);
  std::string mangled = text;
  mangled.replace(mangled.find("params"), 6, "parmas");
  REQUIRE_THROWS_AS(network_from_text(mangled), FormatError);
}
