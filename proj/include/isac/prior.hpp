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

#pragma once

#include <cstdint>
#include <type_traits>
#include <vector>

#include "isac/types.hpp"

namespace isac {

struct MixtureComponent {
  double weight;    // p_k
  double mean;      // theta_k, radians
  double variance;  // sigma_k^2, radians^2
};

// Gaussian-mixture prior over the target angle. Construction validates the
// weights (positive, summing to one), variances (positive) and means
// (inside [-pi/2, pi/2)).
class GaussianMixturePrior {
 public:
  explicit GaussianMixturePrior(std::vector<MixtureComponent> components);

  const std::vector<MixtureComponent>& components() const { return components_; }
  std::size_t size() const { return components_.size(); }

 private:
  std::vector<MixtureComponent> components_;
};

// Composite quadrature rule on [lo, hi]. Weights integrate with respect to
// d(theta); the prior density is applied separately.
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  double lo = 0.0;
  double hi = 0.0;

  std::size_t size() const { return nodes.size(); }
};

// Composite Gauss-Legendre rule with `panels` equal sub-intervals and
// `points` nodes per panel.
QuadratureRule gauss_legendre(double lo, double hi, int panels, int points);

// Default rule used for every prior integral: [-pi/2, pi/2], 64 x 16 nodes.
QuadratureRule default_quadrature(int panels = 64, int points = 16);

double pdf(const GaussianMixturePrior& prior, double theta);

// d/dtheta ln p(theta) from the closed-form mixture derivative. Throws
// UnderflowError when the density is below 1e-300 at theta.
double log_pdf_deriv(const GaussianMixturePrior& prior, double theta);

// Prior Fisher information: integral of (d ln p / d theta)^2 p(theta).
double prior_fisher_info(const GaussianMixturePrior& prior, const QuadratureRule& quad);

// Sum_i w_i f(theta_i) p(theta_i). Works for any f returning a scalar or an
// Eigen expression with fixed shape.
template <typename F>
auto integrate_weighted(const GaussianMixturePrior& prior, F&& f, const QuadratureRule& quad) {
  using Value = std::decay_t<decltype(f(quad.nodes.front()))>;
  if constexpr (std::is_arithmetic_v<Value> || std::is_same_v<Value, cd>) {
    Value acc{};
    for (std::size_t i = 0; i < quad.size(); ++i) {
      const double w = quad.weights[i] * pdf(prior, quad.nodes[i]);
      acc += w * f(quad.nodes[i]);
    }
    return acc;
  } else {
    using Plain = typename Value::PlainObject;
    Plain acc;
    for (std::size_t i = 0; i < quad.size(); ++i) {
      const double w = quad.weights[i] * pdf(prior, quad.nodes[i]);
      if (i == 0) {
        acc = w * f(quad.nodes[i]);
      } else {
        acc += w * f(quad.nodes[i]);
      }
    }
    return acc;
  }
}

// i.i.d. draws from the mixture; deterministic for a fixed seed.
std::vector<double> sample(const GaussianMixturePrior& prior, std::uint64_t seed, std::size_t n);

// Mode index used by several heuristics: the component with the largest
// weight, lowest index on ties.
std::size_t heaviest_component(const GaussianMixturePrior& prior);

}  // namespace isac
