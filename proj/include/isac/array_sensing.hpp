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

#include "isac/prior.hpp"
#include "isac/types.hpp"

namespace isac {

// Half-wavelength uniform linear arrays at the base station.
struct ArrayConfig {
  int n_tx = 12;
  int n_rx = 14;
};

// Point-target reflection. Only alpha and the ratio P |alpha|^2 L / sigma_S^2
// enter any formula; the range and reference gain are kept for the radiated
// power pattern.
struct ReflectionModel {
  cd alpha{1.0, 0.0};
  double beta0 = 1e-3;      // reference channel power at 1 m, linear
  double range_m = 40.0;    // BS-target distance
  double snr_ratio = 1.0;   // P |alpha|^2 L / sigma_S^2, linear

  // Builds the model from the configured SNR ratio: |alpha|^2 is derived so
  // that P |alpha|^2 L / sigma_S^2 equals `snr_ratio` exactly.
  static ReflectionModel from_snr_ratio(double snr_ratio, double power, int num_symbols,
                                        double sensing_noise, double phase_rad = 0.0,
                                        double beta0 = 1e-3, double range_m = 40.0);
};

// Everything the PCRB needs besides the transmit covariance.
struct SensingMatrices {
  CMatrix a1;  // Hermitian PSD
  CMatrix a2;  // Hermitian PSD
  CMatrix a3;  // general; stored as integrated
  CMatrix a4;  // Hermitian PSD
  double prior_fisher = 0.0;
  double noise_scale = 0.0;  // sigma_S^2 / (2 |alpha|^2 L)
};

// a_p(theta) = exp(-j pi (N - 2p + 1) sin(theta) / 2), p = 1..N.
CVector steering(double theta, int n);

// Element-wise derivative of steering() with respect to theta.
CVector steering_deriv(double theta, int n);

// G(theta) = alpha b(theta) a(theta)^H, N_R x N_T.
CMatrix target_response(double theta, const ReflectionModel& model, const ArrayConfig& cfg);

// Assembles A1..A4 by quadrature over the prior. The rule must cover
// [-pi/2, pi/2]; otherwise QuadratureDomainError.
SensingMatrices sensing_matrices(const GaussianMixturePrior& prior, const ArrayConfig& cfg,
                                 const ReflectionModel& model, int num_symbols,
                                 double sensing_noise, const QuadratureRule& quad);

}  // namespace isac
