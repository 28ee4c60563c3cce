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
#include "isac/scenario.hpp"

namespace isac {

Scenario Scenario::defaults() {
  Scenario s;
  s.prior = {{0.30, -0.81, 1e-3},
             {0.20, -0.72, std::pow(10.0, -2.5)},
             {0.11, -0.18, 1e-3},
             {0.18, 0.75, std::pow(10.0, -2.5)},
             {0.21, 0.93, 1e-3}};
  s.channel.n_user = 8;
  s.channel.distance_m = 400.0;
  s.channel.beta0 = 1e-3;
  s.channel.pathloss_exponent = 3.5;
  s.channel.rician_k = db_to_linear(-8.0);
  s.channel.user_angle = 0.36;
  s.channel.seed = 1;
  return s;
}

Instance build_instance(const Scenario& s) {
  Instance in{GaussianMixturePrior(s.prior), {}, {}, {}, s.comm_noise_w, s.array,
              s.num_symbols, s.sensing_noise_w};
  in.model = ReflectionModel::from_snr_ratio(db_to_linear(s.snr_ratio_db), s.power_w,
                                             s.num_symbols, s.sensing_noise_w, 0.0, s.beta0,
                                             s.target_range_m);
  in.sensing = sensing_matrices(in.prior, s.array, in.model, s.num_symbols, s.sensing_noise_w,
                                default_quadrature(s.quad_panels, s.quad_points));
  in.h = rician_channel(s.channel, s.array);
  return in;
}

TradeoffProblem Instance::tradeoff(double rate_target, int n_rf, double power) const {
  TradeoffProblem p;
  p.sensing = sensing;
  p.h = h;
  p.power = power;
  p.comm_noise = comm_noise;
  p.rate_target = rate_target;
  p.n_rf = n_rf;
  return p;
}

}  // namespace isac
