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
#include "isac/conic.hpp"
#include "isac/metrics.hpp"
#include "isac/types.hpp"

namespace isac {

// Sensing-only design: minimize the exact PCRB over the transmit covariance.

// J(R) = tr((A1 + A2) R) - |tr(A3 R)|^2 / tr(A4 R), the part of the PCRB
// denominator that depends on R.
double sensing_objective(const SensingMatrices& s, const CMatrix& r_x);

struct DigitalOptimum {
  CMatrix r_x;        // rank one after polishing, tr = P
  double pcrb = 0.0;
  double objective = 0.0;       // J(r_x)
  double sdp_objective = 0.0;   // certified SDP value before polishing
  conic::SolveReport report;
};

// max J(R) s.t. R PSD, tr R <= P, via the epigraph SDP on the 2x2 Schur
// block. The SDP solution is then polished to a rank-one point on the
// power sphere; the polished point is kept only if it does not lower J.
DigitalOptimum digital_pcrb_optimal(const SensingMatrices& s, double power,
                                    const conic::SolveOptions& opts = {});

struct RankOneExtraction {
  CVector f;               // ||f||^2 = tr R
  double eig_ratio = 0.0;  // lambda_2 / lambda_1
  bool diagnostic = false; // eig_ratio above 1e-6
};

// Top eigenpair of R. When R is not numerically rank one the extraction is
// validated on J and RankTooHigh is thrown if J drops by more than 1e-6
// relative.
RankOneExtraction rank_one_extract(const CMatrix& r, const SensingMatrices& s);

// Exact hybrid factorization F_RF F_BB = F_D with 2 RF chains per stream.
// Throws InsufficientRFChains when N_RF < 2 N_S.
HybridBeamformer hybrid_from_digital(const CMatrix& f_d, int n_rf, double power);

// Coordinate m of the single-RF design with the other entries fixed.
// g_i(f) = alpha_i f + conj(alpha_i) conj(f) + rho_i for i = 1, 2, 4 and
// g_3(f) = alpha_3 f + beta_3 conj(f) + rho_3, with the diagonal of each A_i
// counted as tr(A_i).
struct CoordinateCoefficients {
  cd alpha1, alpha2, alpha3, alpha4;
  cd beta3;
  cd rho1, rho2, rho3, rho4;
  int m = 0;

  // Throws DegenerateDenominator unless g_4 > 0 on the closed unit disk.
  void validate() const;
  double objective(cd f) const;
};

CoordinateCoefficients coordinate_coefficients(const SensingMatrices& s, const CVector& f, int m);

// Maximizes the (concave) coordinate objective over |f| <= 1. Returns `previous`
// when no candidate improves on it.
cd solve_coordinate_subproblem(const CoordinateCoefficients& c, cd previous = cd(1.0, 0.0));

// Relaxed objective J~(f): J evaluated with every |f_n|^2 on the diagonal
// replaced by 1. Equals J(f f^H) for unit-modulus f.
double relaxed_objective(const SensingMatrices& s, const CVector& f);

struct CoordinateAscentOptions {
  double tol = 1e-9;     // relative improvement per sweep
  int max_sweeps = 200;
};

struct SingleRfResult {
  HybridBeamformer beamformer;
  std::vector<double> trace;    // (P / N_T) J~ after every inner step, first entry = start
  double relaxed_before_projection = 0.0;
  double relaxed_after_projection = 0.0;
  double pcrb = 0.0;
  int sweeps = 0;
};

SingleRfResult single_rf_coordinate_ascent(const SensingMatrices& s, double power,
                                           const CVector& init,
                                           const CoordinateAscentOptions& opts = {});

// Matched-phase start at the heaviest prior mean plus `restarts` random
// unit-modulus starts; the lowest PCRB is returned.
SingleRfResult single_rf_design(const SensingMatrices& s, const GaussianMixturePrior& prior,
                                double power, std::uint64_t seed, int restarts = 4,
                                const CoordinateAscentOptions& opts = {});

}  // namespace isac
