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
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "isac/array_sensing.hpp"
#include "isac/metrics.hpp"
#include "isac/prior.hpp"
#include "isac/types.hpp"

namespace isac {

// Data shared by every trade-off solver: sensing matrices, user channel and
// the power and rate budgets. Rates are in bits/s/Hz.
struct TradeoffProblem {
  SensingMatrices sensing;
  CMatrix h;                 // N_U x N_T
  double power = 1.0;
  double comm_noise = 1e-12;
  double rate_target = 0.0;
  int n_rf = 3;

  int n_tx() const { return static_cast<int>(h.cols()); }
};

struct DigitalStepResult {
  CMatrix r_bb;
  double objective = 0.0;    // tr(F R F^H A1)
  double capacity = 0.0;     // water-filling rate of H F, bits
  double duality_gap = 0.0;
  int newton_steps = 0;
};

// Digital covariance step: max tr(F R F^H A1) subject to the rate target,
// tr(F R F^H) <= P and R PSD. Throws InfeasibleRate above the capacity of
// H F at power P.
DigitalStepResult solve_digital_covariance(const CMatrix& f_rf, const CMatrix& a1, const CMatrix& h,
                                     double power, double rate_target, double comm_noise);

// F_BB with F_BB F_BB^H = R_BB, one column per eigenvalue above
// 1e-8 lambda_max.
CMatrix digital_factor(const CMatrix& r_bb);

// WMMSE auxiliaries at the MMSE decoder and the matching weight. The
// surrogate is kept in nats internally; see surrogate_rate.
struct WmmseState {
  CMatrix q;     // N_U x N_S
  CMatrix w;     // N_S x N_S
  CMatrix e;     // N_S x N_S
  double eta = 0.0;
  CMatrix b1;    // N_T x N_T
  CMatrix b2;    // N_RF x N_T
  CVector c;     // vec(B2^T)
  CMatrix j;     // N_U x N_U
};

WmmseState wmmse_update(const CMatrix& h, const CMatrix& f_rf, const CMatrix& f_bb,
                        double comm_noise);

// MSE matrix of the linear decoder Q^H at (F_RF, F_BB).
CMatrix mse_matrix(const CMatrix& h, const CMatrix& f_rf, const CMatrix& f_bb, const CMatrix& q,
                   double comm_noise);

// eta - tr(F_BB^H F^H B1 F F_BB) + 2 Re tr(B2 F), in bits.
double surrogate_rate(const WmmseState& state, const CMatrix& f_rf, const CMatrix& f_bb);

// ln|W| - tr(W E) + N_S, in bits.
double surrogate_rate_mse_form(const CMatrix& w, const CMatrix& e);

// The penalty grows geometrically from penalty_start to penalty across the
// inner iterations; penalty_start = penalty gives a fixed penalty.
struct FppScaOptions {
  double penalty = 1e3;
  double penalty_start = 10.0;
  double penalty_growth = 1.5;
  double slack_tol = 1e-6;
  double obj_tol = 1e-6;
  int max_iters = 50;
  bool throw_on_stall = false;
};

struct FppScaResult {
  CMatrix f_rf;                  // renormalized to unit modulus
  std::vector<double> objective; // v^H (R^T kron A1) v per iteration
  double slack_sum = 0.0;        // r + |p|_1 + |w|_1 at the last iterate
  double max_modulus_error = 0.0;
  int iterations = 0;
  int newton_steps = 0;
  bool converged = false;
  bool stalled = false;          // a later convex solve failed; last iterate kept
};

// Analog step by feasible point pursuit SCA. `rate_target` may be -inf to
// drop the rate constraint. When `refresh` is given, the rate surrogate is
// rebuilt at every inner iterate from refresh(F); otherwise `state` is used
// throughout.
FppScaResult fpp_sca_analog(const CMatrix& r_bb, const CMatrix& a1, const WmmseState& state,
                            double power, double rate_target, const CMatrix& z0,
                            const FppScaOptions& opts = {},
                            const std::function<WmmseState(const CMatrix&)>& refresh = {});

struct TradeoffSolution {
  HybridBeamformer beamformer;
  double rate = 0.0;                // bits/s/Hz
  double pcrb_upper = 0.0;
  double pcrb_exact = 0.0;
  double objective = 0.0;           // tr(F R F^H A1)
  std::vector<double> trace;        // objective per outer iteration
  std::vector<double> wmmse_gap;    // |xi - rate| per outer iteration, bits
  int n_out = 0;
  int n_in = 0;
  int n_ld = 0;
  int restarts = 0;
  bool converged = false;
  bool rate_feasible = true;
  std::string stop_reason;
};

struct TradeoffOptions {
  std::uint64_t seed = 1;
  double rel_tol = 1e-6;
  int max_outer = 30;
  int max_restarts = 5;
  FppScaOptions fpp;
  bool refresh_wmmse = true;   // rebuild Q, W at every analog inner iterate
  std::optional<CMatrix> initial_f_rf;
};

TradeoffSolution solve_tradeoff(const TradeoffProblem& problem, const TradeoffOptions& opts = {});

// Unit-modulus analog matrix from the phases of the n_rf leading
// eigenvectors of a transmit covariance.
CMatrix analog_from_covariance(const CMatrix& r_x, int n_rf);

// Fully-digital reference: the digital covariance step over all N_T antennas.
TradeoffSolution fully_digital_reference(const TradeoffProblem& problem);

// Analog matrix of the first benchmark: a(theta_U) then the means of the
// heaviest prior components, lower index first on ties.
CMatrix benchmark_heuristic_analog(const GaussianMixturePrior& prior, double user_angle, int n_tx,
                                   int n_rf);
TradeoffSolution benchmark_heuristic(const TradeoffProblem& problem,
                                     const GaussianMixturePrior& prior, double user_angle);

// Prior density argmax over a uniform grid on [-pi/2, pi/2).
double prior_peak_angle(const GaussianMixturePrior& prior, int grid = 100000);
// Every RF column steers to the density peak with all-ones R_BB. Ignores the
// rate target; rate_feasible reports whether it is met.
TradeoffSolution benchmark_peak_angle(const TradeoffProblem& problem,
                                      const GaussianMixturePrior& prior);

}  // namespace isac
