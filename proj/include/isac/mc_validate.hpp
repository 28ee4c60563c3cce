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
#include <vector>

#include "isac/array_sensing.hpp"
#include "isac/metrics.hpp"
#include "isac/prior.hpp"
#include "isac/scenario.hpp"
#include "isac/types.hpp"

namespace isac {

struct UnknownParams {
  double theta = 0.0;  // radians
  cd alpha{};
};

struct EchoBatch {
  CMatrix y;  // N_R x L
  CMatrix x;  // N_T x L, F_RF F_BB S
  CMatrix s;  // N_S x L, (1/L) S S^H = I
};

// Y = alpha b(theta) a(theta)^H X + N with i.i.d. CN(0, noise) entries.
// S has scaled orthonormal rows drawn from `seed`; N_S is the rank of R_BB
// (one zero stream when R_BB = 0). Throws std::invalid_argument if L < N_S.
EchoBatch simulate_echo(const UnknownParams& truth, const HybridBeamformer& b, int n_rx,
                        int num_symbols, double noise, std::uint64_t seed);

struct MapOptions {
  int grid = 4096;          // uniform over [-pi/2, pi/2], endpoints included
  bool refine = true;       // one parabolic step around the best node
};

// MAP angle with the gain profiled out by least squares per candidate.
// noise = 0 maximizes the likelihood term alone.
double map_estimate(const EchoBatch& batch, const GaussianMixturePrior& prior, double noise,
                    const MapOptions& opts = {});

struct McResult {
  double mse = 0.0;         // radians^2
  double pcrb_exact = 0.0;  // radians^2
  double bias = 0.0;        // mean of (estimate - truth)
  double std_error = 0.0;   // standard error of the mean squared error
  int trials = 0;
};

struct McOptions {
  MapOptions map;
  int workers = 0;  // 0 = hardware concurrency
};

// Angles drawn from the prior, gain fixed to the instance's alpha. Each trial
// uses its own derived seed and the reduction runs in trial order, so the
// result does not depend on `workers`. Requires trials >= 100.
McResult empirical_mse(const Instance& in, const HybridBeamformer& b, int trials,
                       std::uint64_t seed, const McOptions& opts = {});

}  // namespace isac
