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

#include "isac/array_sensing.hpp"

#include <cmath>

namespace isac {

ReflectionModel ReflectionModel::from_snr_ratio(double snr_ratio, double power, int num_symbols,
                                                double sensing_noise, double phase_rad, double beta0,
                                                double range_m) {
  if (!(snr_ratio > 0.0) || !(power > 0.0) || num_symbols < 1 || !(sensing_noise > 0.0)) {
    throw std::invalid_argument("ReflectionModel: ratio, power, L and noise must be positive");
  }
  ReflectionModel m;
  const double mag2 = snr_ratio * sensing_noise / (power * num_symbols);
  m.alpha = std::polar(std::sqrt(mag2), phase_rad);
  m.beta0 = beta0;
  m.range_m = range_m;
  m.snr_ratio = snr_ratio;
  return m;
}

CVector steering(double theta, int n) {
  CVector a(n);
  const double s = std::sin(theta);
  for (int p = 1; p <= n; ++p) {
    a(p - 1) = std::polar(1.0, -kPi * (n - 2 * p + 1) * s / 2.0);
  }
  return a;
}

CVector steering_deriv(double theta, int n) {
  CVector d = steering(theta, n);
  const double c = std::cos(theta);
  for (int p = 1; p <= n; ++p) {
    d(p - 1) *= cd(0.0, -kPi * (n - 2 * p + 1) * c / 2.0);
  }
  return d;
}

CMatrix target_response(double theta, const ReflectionModel& model, const ArrayConfig& cfg) {
  return model.alpha * steering(theta, cfg.n_rx) * steering(theta, cfg.n_tx).adjoint();
}

SensingMatrices sensing_matrices(const GaussianMixturePrior& prior, const ArrayConfig& cfg,
                                 const ReflectionModel& model, int num_symbols,
                                 double sensing_noise, const QuadratureRule& quad) {
  constexpr double kSlack = 1e-12;
  if (quad.lo > -kPi / 2 + kSlack || quad.hi < kPi / 2 - kSlack) {
    throw QuadratureDomainError("sensing_matrices: quadrature must cover [-pi/2, pi/2]");
  }
  const int nt = cfg.n_tx;
  const int nr = cfg.n_rx;

  // ||b'(theta)||^2 = (pi^2 cos^2 theta / 4) sum_q (N_R - 2q + 1)^2
  double rx_weight = 0.0;
  for (int q = 1; q <= nr; ++q) rx_weight += double(nr - 2 * q + 1) * double(nr - 2 * q + 1);

  SensingMatrices s;
  s.a1 = CMatrix::Zero(nt, nt);
  s.a2 = CMatrix::Zero(nt, nt);
  s.a3 = CMatrix::Zero(nt, nt);
  s.a4 = CMatrix::Zero(nt, nt);
  for (std::size_t i = 0; i < quad.size(); ++i) {
    const double theta = quad.nodes[i];
    const double w = quad.weights[i] * pdf(prior, theta);
    if (w == 0.0) continue;
    const CVector a = steering(theta, nt);
    const CVector da = steering_deriv(theta, nt);
    const double c = std::cos(theta);
    const double db_norm2 = kPi * kPi * c * c / 4.0 * rx_weight;
    s.a1.noalias() += (w * db_norm2) * a * a.adjoint();
    s.a2.noalias() += (w * nr) * da * da.adjoint();
    s.a3.noalias() += (w * nr) * da * a.adjoint();
    s.a4.noalias() += (w * nr) * a * a.adjoint();
  }
  s.prior_fisher = prior_fisher_info(prior, quad);
  s.noise_scale = sensing_noise / (2.0 * std::norm(model.alpha) * num_symbols);
  return s;
}

}  // namespace isac
