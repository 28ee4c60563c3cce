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

#include <optional>
#include <vector>

#include "isac/array_sensing.hpp"
#include "isac/types.hpp"

namespace isac {

// F_RF (N_T x N_RF, unit modulus) with digital covariance R_BB = F_BB F_BB^H.
// F_BB is optional: optimizers work with R_BB and factor it on demand.
struct HybridBeamformer {
  CMatrix f_rf;
  std::optional<CMatrix> f_bb;
  CMatrix r_bb;

  int n_tx() const { return static_cast<int>(f_rf.rows()); }
  int n_rf() const { return static_cast<int>(f_rf.cols()); }

  static HybridBeamformer from_digital_factor(CMatrix f_rf, CMatrix f_bb);
};

// Throws std::invalid_argument when a HybridBeamformer invariant fails:
// unit modulus (1e-9), R_BB = F_BB F_BB^H (1e-10), N_S <= N_RF, and the power
// budget (1e-8 relative) when `power` is given. Analog-free references
// (F_RF = I) skip the modulus check via `require_unit_modulus = false`.
void check_beamformer(const HybridBeamformer& b, std::optional<double> power = std::nullopt,
                      bool require_unit_modulus = true);

// R_X = F_RF R_BB F_RF^H.
CMatrix transmit_covariance(const HybridBeamformer& b);

// tr(A B) without forming the product.
cd trace_product(const CMatrix& a, const CMatrix& b);

struct PcrbTerms {
  double t1 = 0.0;   // tr(A1 R)
  double t2 = 0.0;   // tr(A2 R)
  cd t3{};           // tr(A3 R)
  double t4 = 0.0;   // tr(A4 R)
};

PcrbTerms pcrb_terms(const SensingMatrices& s, const CMatrix& r_x);

// Exact PCRB. At R_X = 0 the ratio term is 0 and the result is
// 1 / prior_fisher. Throws DegenerateDenominator when
// tr(A4 R) <= 1e-14 tr(R) for nonzero R.
double pcrb_exact(const SensingMatrices& s, const CMatrix& r_x);

struct GuardedPcrb {
  double value = 0.0;
  bool ratio_dropped = false;
};

// Same as pcrb_exact but drops the ratio term (and flags it) instead of
// throwing when tr(A4 R) < 1e-14 max(1, tr R).
GuardedPcrb pcrb_exact_guarded(const SensingMatrices& s, const CMatrix& r_x);

// noise_scale / (noise_scale prior_fisher + tr(A1 R_X)).
double pcrb_upper(const SensingMatrices& s, const CMatrix& r_x);

// log2 |I + H R_X H^H / sigma_C^2|, via Cholesky.
double achievable_rate(const CMatrix& h, const HybridBeamformer& b, double comm_noise);
double achievable_rate(const CMatrix& h, const CMatrix& r_x, double comm_noise);

// (beta0 / r^2) a^H(theta) R_X a(theta) at each angle.
std::vector<double> power_pattern(const CMatrix& r_x, const std::vector<double>& angles,
                                  double beta0, double range_m);

}  // namespace isac
