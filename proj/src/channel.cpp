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

#include "isac/channel.hpp"

#include <cmath>
#include <random>

namespace isac {

double ChannelParams::average_gain() const {
  return beta0 / std::pow(distance_m, pathloss_exponent);
}

CMatrix nlos_component(const ChannelParams& params, const ArrayConfig& cfg) {
  std::mt19937_64 rng(params.seed);
  std::normal_distribution<double> unit(0.0, std::sqrt(0.5));
  CMatrix h(params.n_user, cfg.n_tx);
  for (int c = 0; c < h.cols(); ++c) {
    for (int r = 0; r < h.rows(); ++r) {
      const double re = unit(rng);
      const double im = unit(rng);
      h(r, c) = cd(re, im);
    }
  }
  return h;
}

CMatrix rician_channel(const ChannelParams& params, const ArrayConfig& cfg) {
  if (!(params.distance_m > 0.0) || !(params.rician_k >= 0.0) || params.n_user < 1) {
    throw std::invalid_argument("rician_channel: need r_U > 0, K_C >= 0, N_U >= 1");
  }
  const double k = params.rician_k;
  const CMatrix los = steering(params.user_angle, params.n_user) *
                      steering(params.user_angle, cfg.n_tx).adjoint();
  const double scale = std::sqrt(params.average_gain() / (k + 1.0));
  return scale * (std::sqrt(k) * los + nlos_component(params, cfg));
}

}  // namespace isac
