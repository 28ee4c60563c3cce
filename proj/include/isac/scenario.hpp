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
#include <string>
#include <vector>

#include "isac/array_sensing.hpp"
#include "isac/channel.hpp"
#include "isac/prior.hpp"
#include "isac/tradeoff.hpp"

namespace isac {

// Physical and algorithmic parameters of one run. Powers are linear watts.
struct Scenario {
  ArrayConfig array{12, 14};
  int n_rf = 3;
  double power_w = 1.0;
  double comm_noise_w = 1e-12;
  double sensing_noise_w = 1e-12;
  double snr_ratio_db = -5.0;      // P |alpha|^2 L / sigma_S^2
  int num_symbols = 64;
  double target_range_m = 40.0;
  double beta0 = 1e-3;
  std::vector<MixtureComponent> prior;
  ChannelParams channel;
  double rate_target = 5.0;        // bits/s/Hz
  int quad_panels = 64;
  int quad_points = 16;
  std::uint64_t seed = 1;

  // Values used for the numerical study: 5-component prior, Rician user
  // channel at 400 m.
  static Scenario defaults();
};

// Everything derived from a Scenario that the solvers consume.
struct Instance {
  GaussianMixturePrior prior;
  ReflectionModel model;
  SensingMatrices sensing;
  CMatrix h;
  double comm_noise = 1e-12;
  ArrayConfig array;
  int num_symbols = 64;
  double sensing_noise = 1e-12;

  TradeoffProblem tradeoff(double rate_target, int n_rf, double power) const;
};

Instance build_instance(const Scenario& s);

}  // namespace isac
