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

#include "isac/array_sensing.hpp"
#include "isac/types.hpp"

namespace isac {

struct ChannelParams {
  int n_user = 8;
  double distance_m = 400.0;
  double beta0 = 1e-3;            // linear
  double pathloss_exponent = 3.5;
  double rician_k = 0.1584893192; // linear (-8 dB)
  double user_angle = 0.36;       // radians
  std::uint64_t seed = 1;

  double average_gain() const;    // beta_C = beta0 / r^exponent
};

// H = sqrt(beta_C / (K + 1)) (sqrt(K) b_U a^H + H_NLoS), N_U x N_T. NLoS
// entries are CN(0, 1): real and imaginary parts independent with variance
// 1/2 each.
CMatrix rician_channel(const ChannelParams& params, const ArrayConfig& cfg);

// The NLoS draw alone, exposed so tests can separate the two components.
CMatrix nlos_component(const ChannelParams& params, const ArrayConfig& cfg);

}  // namespace isac
