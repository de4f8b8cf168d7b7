#pragma once

// Constructed-parameter networks that reproduce benchmark exact solutions
// through the real embedding/sub-network machinery (no training involved).

#include <array>
#include <cmath>
#include <vector>

#include "famnet/network.hpp"
#include "famnet/problems.hpp"
#include "support/oracles.hpp"

namespace constructions {

using namespace famnet;

// sum_i amp_i * sin(kx_i x + kt_i t) via one Fourier sub-network with a
// single affine selection layer.
inline ScaleNetwork tone_net_2d(const std::vector<std::array<double, 3>>& tones) {
  Embedding e;
  e.kind = EmbeddingKind::Fourier;
  for (const auto& t : tones) e.freqs.push_back({t[0], t[1]});
  ScaleNetwork net = make_scale_network(2, 1, {e}, {}, ActKind::Sfm, HMode::Fixed, {1.0}, 0);
  std::fill(net.params.begin(), net.params.end(), 0.0);
  for (size_t i = 0; i < tones.size(); ++i) net.params[2 * i] = tones[i][2];
  return net;
}

// u(x) = sin(2 pi x) + amp * sin(k x): two hybrid sub-networks whose affine
// layers select the sin feature, h = [1, amp].
inline ScaleNetwork poisson_exact_net(double k, double amp) {
  Embedding e1, e2;
  e1.kind = EmbeddingKind::Hybrid;
  e1.freqs = {{2 * kPi}};
  e2.kind = EmbeddingKind::Hybrid;
  e2.freqs = {{k}};
  ScaleNetwork net =
      make_scale_network(1, 1, {e1, e2}, {}, ActKind::Sfm, HMode::Fixed, {1.0, amp}, 0);
  net.params = {0, 0, 1, 0, 0, 0, 1, 0};
  return net;
}

// u(x,t) = sin(2 pi x) cos(10 pi t) + sin(4 pi x) cos(20 pi t) as four
// traveling tones.
inline ScaleNetwork wave_exact_net() {
  return tone_net_2d({{2 * kPi, 10 * kPi, 0.5},
                      {2 * kPi, -10 * kPi, 0.5},
                      {4 * kPi, 20 * kPi, 0.5},
                      {4 * kPi, -20 * kPi, 0.5}});
}

// u(x,t) ~= e^{-t} sin(k x): the time factor is least-squares fitted on a
// slow trigonometric basis (a Chebyshev system on [0,1], so a handful of
// terms reaches ~1e-8), then each product term becomes a pair of 2-d Fourier
// features: cos(wt)sin(kx) = [sin(kx+wt)+sin(kx-wt)]/2 and
// sin(wt)sin(kx) = [cos(kx-wt)-cos(kx+wt)]/2.
inline ScaleNetwork heat_exact_net(double k, int n_omega = 7) {
  std::vector<double> omegas;
  for (int j = 0; j < n_omega; ++j) omegas.push_back(j * kPi / 2.0);
  std::vector<std::vector<double>> rows;
  std::vector<double> rhs;
  for (int i = 0; i <= 200; ++i) {
    const double t = i / 200.0;
    std::vector<double> rv, rd;
    for (int j = 0; j < n_omega; ++j) {
      rv.push_back(std::cos(omegas[j] * t));
      rd.push_back(-omegas[j] * std::sin(omegas[j] * t));
      if (j > 0) {
        rv.push_back(std::sin(omegas[j] * t));
        rd.push_back(omegas[j] * std::cos(omegas[j] * t));
      }
    }
    rows.push_back(rv);
    rhs.push_back(std::exp(-t));
    rows.push_back(rd);
    rhs.push_back(-std::exp(-t));
  }
  const std::vector<double> coef = oracles::least_squares(rows, rhs);

  Embedding e;
  e.kind = EmbeddingKind::Fourier;
  std::vector<double> weights;
  size_t ci = 0;
  for (int j = 0; j < n_omega; ++j) {
    const double c = coef[ci++];
    const double s = j > 0 ? coef[ci++] : 0.0;
    if (j == 0) {
      e.freqs.push_back({k, 0.0});
      weights.push_back(c);  // sin(kx)
      weights.push_back(0.0);
    } else {
      e.freqs.push_back({k, omegas[j]});
      weights.push_back(c / 2);
      weights.push_back(-s / 2);
      e.freqs.push_back({k, -omegas[j]});
      weights.push_back(c / 2);
      weights.push_back(s / 2);
    }
  }
  ScaleNetwork net = make_scale_network(2, 1, {e}, {}, ActKind::Sfm, HMode::Fixed, {1.0}, 0);
  std::fill(net.params.begin(), net.params.end(), 0.0);
  for (size_t i = 0; i < weights.size(); ++i) net.params[i] = weights[i];
  return net;
}

// Random band-limited two-component field for the split-residual oracle.
inline ScaleNetwork random_smooth_net_2out(uint64_t seed) {
  Embedding e;
  e.kind = EmbeddingKind::Fourier;
  e.freqs = {{2.0, 1.0}, {6.0, 3.0}, {10.0, 0.5}};
  ScaleNetwork net = make_scale_network(2, 2, {e}, {}, ActKind::Sfm, HMode::Fixed, {1.0}, 0);
  SplitMix64 rng(seed);
  for (double& p : net.params) p = rng.normal();
  return net;
}

}  // namespace constructions
