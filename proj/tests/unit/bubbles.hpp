#pragma once

// Synthetic multi-bubble snapshots shared by the profile tests.

#include <cmath>
#include <memory>
#include <random>
#include <vector>

#include "critwave/analysis.hpp"
#include "critwave/dalembert.hpp"
#include "critwave/ground_state.hpp"
#include "critwave/mesh.hpp"

namespace bubbles {

struct Bubble {
  int iota;
  double lambda;
};

// Graded mesh resolving scales from about 1e-7 up to 1e4.
inline critwave::MeshPtr wide_mesh() {
  return std::make_shared<const critwave::RadialMesh>(critwave::RadialMesh::graded(1e-9, 1.02, 2e4));
}

// sum of iota W_lambda plus eps times a few random Gaussians of random width,
// each normalized like a profile (width^{-1/2}) so the noise is scale-free.
inline critwave::FieldState snapshot(const critwave::MeshPtr& mesh, const std::vector<Bubble>& bs, double eps,
                                     std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::pair<double, double>> noise;
  for (int k = 0; k < 5; ++k) {
    const double g = critwave::normal01(rng);
    const double width = std::pow(10.0, -6.0 + 9.0 * critwave::uniform01(rng));
    noise.emplace_back(g, width);
  }
  auto u = [&](double r) {
    double v = 0.0;
    for (const Bubble& b : bs) v += critwave::eval_w(r, {3, b.lambda, b.iota});
    for (auto [g, w] : noise) v += eps * g / std::sqrt(w) * std::exp(-r * r / (w * w));
    return v;
  };
  return critwave::FieldState::from_functions(mesh, u, [](double) { return 0.0; });
}

}  // namespace bubbles
