// SPDX-License-Identifier: Apache-2.0
//
// isac-hbf: hybrid beamforming for integrated sensing and communication
// Copyright (C) 2026 The isac-hbf authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "isac/prior.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

namespace isac {

namespace {

constexpr double kInvSqrt2Pi = 0.39894228040143267794;

double normal_pdf(double x, double mean, double variance) {
  const double d = x - mean;
  return kInvSqrt2Pi / std::sqrt(variance) * std::exp(-0.5 * d * d / variance);
}

// Legendre P_n(x) and P_n'(x) by the three-term recurrence.
std::pair<double, double> legendre_with_deriv(int n, double x) {
  double p0 = 1.0;
  double p1 = x;
  if (n == 0) return {1.0, 0.0};
  for (int k = 2; k <= n; ++k) {
    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  const double dp = n * (x * p1 - p0) / (x * x - 1.0);
  return {p1, dp};
}

}  // namespace

GaussianMixturePrior::GaussianMixturePrior(std::vector<MixtureComponent> components)
    : components_(std::move(components)) {
  if (components_.empty()) {
    throw std::invalid_argument("GaussianMixturePrior: at least one component required");
  }
  double total = 0.0;
  for (const auto& c : components_) {
    if (!(c.weight > 0.0)) throw std::invalid_argument("GaussianMixturePrior: weights must be positive");
    if (!(c.variance > 0.0)) throw std::invalid_argument("GaussianMixturePrior: variances must be positive");
    if (!(c.mean >= -kPi / 2 && c.mean < kPi / 2)) {
      throw std::invalid_argument("GaussianMixturePrior: mean " + std::to_string(c.mean) +
                                  " outside [-pi/2, pi/2)");
    }
    total += c.weight;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw std::invalid_argument("GaussianMixturePrior: weights sum to " + std::to_string(total));
  }
}

QuadratureRule gauss_legendre(double lo, double hi, int panels, int points) {
  if (panels < 1 || points < 1 || !(hi > lo)) {
    throw std::invalid_argument("gauss_legendre: need panels >= 1, points >= 1, hi > lo");
  }
  // Reference nodes on [-1, 1] by Newton iteration from the Chebyshev guess.
  std::vector<double> ref_x(points), ref_w(points);
  for (int i = 0; i < points; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (points + 0.5));
    for (int it = 0; it < 100; ++it) {
      const auto [p, dp] = legendre_with_deriv(points, x);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const auto [p, dp] = legendre_with_deriv(points, x);
    (void)p;
    ref_x[i] = x;
    ref_w[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  // Newton from cos() produces descending nodes.
  std::reverse(ref_x.begin(), ref_x.end());
  std::reverse(ref_w.begin(), ref_w.end());

  QuadratureRule rule;
  rule.lo = lo;
  rule.hi = hi;
  rule.nodes.reserve(static_cast<std::size_t>(panels) * points);
  rule.weights.reserve(rule.nodes.capacity());
  const double width = (hi - lo) / panels;
  for (int k = 0; k < panels; ++k) {
    const double a = lo + k * width;
    const double half = 0.5 * width;
    for (int i = 0; i < points; ++i) {
      rule.nodes.push_back(a + half * (ref_x[i] + 1.0));
      rule.weights.push_back(half * ref_w[i]);
    }
  }
  return rule;
}

QuadratureRule default_quadrature(int panels, int points) {
  return gauss_legendre(-kPi / 2, kPi / 2, panels, points);
}

double pdf(const GaussianMixturePrior& prior, double theta) {
  double acc = 0.0;
  for (const auto& c : prior.components()) acc += c.weight * normal_pdf(theta, c.mean, c.variance);
  return acc;
}

double log_pdf_deriv(const GaussianMixturePrior& prior, double theta) {
  double density = 0.0;
  double slope = 0.0;
  for (const auto& c : prior.components()) {
    const double g = c.weight * normal_pdf(theta, c.mean, c.variance);
    density += g;
    slope += g * (c.mean - theta) / c.variance;
  }
  if (density < 1e-300) {
    throw UnderflowError("log_pdf_deriv: density underflows at theta = " + std::to_string(theta));
  }
  return slope / density;
}

double prior_fisher_info(const GaussianMixturePrior& prior, const QuadratureRule& quad) {
  double acc = 0.0;
  for (std::size_t i = 0; i < quad.size(); ++i) {
    const double theta = quad.nodes[i];
    double density = 0.0;
    double slope = 0.0;
    for (const auto& c : prior.components()) {
      const double g = c.weight * normal_pdf(theta, c.mean, c.variance);
      density += g;
      slope += g * (c.mean - theta) / c.variance;
    }
    // Far tails contribute slope^2 / density -> 0; skip nodes where the
    // ratio cannot be formed.
    if (density < 1e-300) continue;
    acc += quad.weights[i] * slope * slope / density;
  }
  return acc;
}

std::vector<double> sample(const GaussianMixturePrior& prior, std::uint64_t seed, std::size_t n) {
  std::mt19937_64 rng(seed);
  std::vector<double> weights;
  for (const auto& c : prior.components()) weights.push_back(c.weight);
  std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
  std::normal_distribution<double> unit(0.0, 1.0);
  std::vector<double> out(n);
  for (auto& theta : out) {
    const auto& c = prior.components()[pick(rng)];
    theta = c.mean + std::sqrt(c.variance) * unit(rng);
  }
  return out;
}

std::size_t heaviest_component(const GaussianMixturePrior& prior) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < prior.size(); ++k) {
    if (prior.components()[k].weight > prior.components()[best].weight) best = k;
  }
  return best;
}

}  // namespace isac
