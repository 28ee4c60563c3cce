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

#include "isac/metrics.hpp"

#include <cmath>
#include <string>

namespace isac {

HybridBeamformer HybridBeamformer::from_digital_factor(CMatrix f_rf, CMatrix f_bb) {
  HybridBeamformer b;
  b.r_bb = f_bb * f_bb.adjoint();
  b.f_bb = std::move(f_bb);
  b.f_rf = std::move(f_rf);
  return b;
}

void check_beamformer(const HybridBeamformer& b, std::optional<double> power,
                      bool require_unit_modulus) {
  if (b.r_bb.rows() != b.n_rf() || b.r_bb.cols() != b.n_rf()) {
    throw std::invalid_argument("beamformer: R_BB must be N_RF x N_RF");
  }
  if (b.n_rf() > b.n_tx()) throw std::invalid_argument("beamformer: N_RF exceeds N_T");
  if (require_unit_modulus) {
    for (Eigen::Index i = 0; i < b.f_rf.size(); ++i) {
      if (std::abs(std::abs(b.f_rf(i)) - 1.0) > 1e-9) {
        throw std::invalid_argument("beamformer: F_RF entry " + std::to_string(i) +
                                    " is not unit modulus");
      }
    }
  }
  if (b.f_bb) {
    if (b.f_bb->rows() != b.n_rf() || b.f_bb->cols() > b.n_rf()) {
      throw std::invalid_argument("beamformer: F_BB must be N_RF x N_S with N_S <= N_RF");
    }
    const double err = (*b.f_bb * b.f_bb->adjoint() - b.r_bb).norm();
    if (err > 1e-10 * std::max(1.0, b.r_bb.norm())) {
      throw std::invalid_argument("beamformer: R_BB != F_BB F_BB^H");
    }
  }
  if (power) {
    const double used = transmit_covariance(b).trace().real();
    if (used > *power * (1.0 + 1e-8)) {
      throw std::invalid_argument("beamformer: power " + std::to_string(used) +
                                  " exceeds budget " + std::to_string(*power));
    }
  }
}

CMatrix transmit_covariance(const HybridBeamformer& b) {
  CMatrix r = b.f_rf * b.r_bb * b.f_rf.adjoint();
  return 0.5 * (r + r.adjoint());
}

cd trace_product(const CMatrix& a, const CMatrix& b) {
  return (a.array() * b.transpose().array()).sum();
}

PcrbTerms pcrb_terms(const SensingMatrices& s, const CMatrix& r_x) {
  PcrbTerms t;
  t.t1 = trace_product(s.a1, r_x).real();
  t.t2 = trace_product(s.a2, r_x).real();
  t.t3 = trace_product(s.a3, r_x);
  t.t4 = trace_product(s.a4, r_x).real();
  return t;
}

namespace {

double pcrb_from_terms(const SensingMatrices& s, const PcrbTerms& t, bool with_ratio) {
  double denom = s.noise_scale * s.prior_fisher + t.t1 + t.t2;
  if (with_ratio) denom -= std::norm(t.t3) / t.t4;
  return s.noise_scale / denom;
}

}  // namespace

double pcrb_exact(const SensingMatrices& s, const CMatrix& r_x) {
  const double tr = r_x.trace().real();
  if (r_x.norm() == 0.0) return 1.0 / s.prior_fisher;
  const PcrbTerms t = pcrb_terms(s, r_x);
  if (t.t4 <= 1e-14 * tr) {
    throw DegenerateDenominator("pcrb_exact: tr(A4 R) vanishes for nonzero R");
  }
  return pcrb_from_terms(s, t, true);
}

GuardedPcrb pcrb_exact_guarded(const SensingMatrices& s, const CMatrix& r_x) {
  if (r_x.norm() == 0.0) return {1.0 / s.prior_fisher, false};
  const PcrbTerms t = pcrb_terms(s, r_x);
  const double tr = r_x.trace().real();
  if (t.t4 < 1e-14 * std::max(1.0, tr)) return {pcrb_from_terms(s, t, false), true};
  return {pcrb_from_terms(s, t, true), false};
}

double pcrb_upper(const SensingMatrices& s, const CMatrix& r_x) {
  const double t1 = trace_product(s.a1, r_x).real();
  return s.noise_scale / (s.noise_scale * s.prior_fisher + t1);
}

double achievable_rate(const CMatrix& h, const CMatrix& r_x, double comm_noise) {
  CMatrix gram = CMatrix::Identity(h.rows(), h.rows()) + h * r_x * h.adjoint() / comm_noise;
  gram = 0.5 * (gram + gram.adjoint());
  Eigen::LLT<CMatrix> llt(gram);
  if (llt.info() != Eigen::Success) {
    // R_X carries a tiny negative eigenvalue; fall back to eigenvalues.
    Eigen::SelfAdjointEigenSolver<CMatrix> es(gram);
    double acc = 0.0;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
      acc += std::log(std::max(es.eigenvalues()(i), 1e-300));
    }
    return std::max(0.0, acc / std::log(2.0));
  }
  const CMatrix& l = llt.matrixLLT();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < l.rows(); ++i) acc += std::log(l(i, i).real());
  return std::max(0.0, 2.0 * acc / std::log(2.0));
}

double achievable_rate(const CMatrix& h, const HybridBeamformer& b, double comm_noise) {
  return achievable_rate(h, transmit_covariance(b), comm_noise);
}

std::vector<double> power_pattern(const CMatrix& r_x, const std::vector<double>& angles,
                                  double beta0, double range_m) {
  const double scale = beta0 / (range_m * range_m);
  std::vector<double> out;
  out.reserve(angles.size());
  for (double theta : angles) {
    const CVector a = steering(theta, static_cast<int>(r_x.rows()));
    out.push_back(std::max(0.0, scale * (a.adjoint() * r_x * a)(0, 0).real()));
  }
  return out;
}

}  // namespace isac
