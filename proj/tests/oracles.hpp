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

// Independent reference solutions for the convex subproblems. They share no
// code with the interior-point kernel.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "isac/types.hpp"

namespace isac::testing {

// Golden-section minimization of a unimodal function on [lo, hi].
inline double golden_min(const std::function<double(double)>& f, double lo, double hi,
                         int iters = 200) {
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = f(c), fd = f(d);
  for (int i = 0; i < iters && b - a > 1e-15 * (1.0 + std::abs(a)); ++i) {
    if (fc < fd) {
      b = d; d = c; fd = fc; c = b - g * (b - a); fc = f(c);
    } else {
      a = c; c = d; fc = fd; d = a + g * (b - a); fd = f(d);
    }
  }
  return f(0.5 * (a + b));
}

// max tr(C X) s.t. tr X <= 1, tr(D X) <= 1, X PSD, by its two-variable
// dual: min_{y2 >= 0} y2 + max(0, lambda_max(C - y2 D)).
inline double two_trace_sdp_oracle(const CMatrix& c, const CMatrix& d) {
  auto lmax = [](const CMatrix& m) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(m, Eigen::EigenvaluesOnly);
    return es.eigenvalues().maxCoeff();
  };
  Eigen::SelfAdjointEigenSolver<CMatrix> ed(d, Eigen::EigenvaluesOnly);
  const double hi = std::max(lmax(c), 0.0) / ed.eigenvalues().minCoeff() + 1e-12;
  return golden_min([&](double y2) { return y2 + std::max(0.0, lmax(c - y2 * d)); }, 0.0, hi);
}

// Hermitian square root and inverse square root of a positive definite matrix.
inline std::pair<CMatrix, CMatrix> herm_sqrt_pair(const CMatrix& m) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (m + m.adjoint()));
  const RVector s = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  const CMatrix v = es.eigenvectors();
  return {v * s.asDiagonal() * v.adjoint(), v * s.cwiseInverse().asDiagonal() * v.adjoint()};
}

inline double ln_det_plus(const CMatrix& k, const CMatrix& r) {
  const CMatrix g = CMatrix::Identity(k.rows(), k.rows()) + k * r * k.adjoint();
  Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (g + g.adjoint()), Eigen::EigenvaluesOnly);
  return es.eigenvalues().array().log().sum();
}

struct WaterfillResult {
  double objective = 0.0;
  CMatrix r;
  bool rate_active = false;
};

// max tr(C R) s.t. ln|I + K R K^H| >= b, tr(D R) <= p, R PSD, with D
// positive definite, through its Lagrangian. For multipliers (lambda, mu)
// the maximizer in R_t = M^{1/2} R M^{1/2}, M = mu D - C, is a water-filling
// over the eigenmodes of M^{-1/2} K^H K M^{-1/2}. lambda is set by bisection
// on the rate and mu by bisection on the power.
inline WaterfillResult waterfill_oracle(const CMatrix& c, const CMatrix& d, const CMatrix& k,
                                        double b, double p) {
  const Eigen::Index n = c.rows();
  const auto [d_half, d_ihalf] = herm_sqrt_pair(d);
  // Rate-inactive candidate: top generalized eigenvector scaled to power p.
  Eigen::SelfAdjointEigenSolver<CMatrix> eg(d_ihalf * c * d_ihalf);
  const CVector u = d_ihalf * eg.eigenvectors().col(n - 1);
  const double mu_min = eg.eigenvalues()(n - 1);
  WaterfillResult out;
  {
    const CMatrix r = p * u * u.adjoint() / (u.adjoint() * d * u)(0, 0).real();
    if (ln_det_plus(k, r) >= b) {
      out.r = r;
      out.objective = (c * r).trace().real();
      return out;
    }
  }
  out.rate_active = true;
  auto solve_r = [&](double mu, double lambda) {
    const CMatrix m = mu * d - c;
    const auto [mh, mih] = herm_sqrt_pair(m);
    const CMatrix kt = k * mih;
    Eigen::SelfAdjointEigenSolver<CMatrix> es(kt.adjoint() * kt);
    RVector pw(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double s = es.eigenvalues()(i);
      pw(i) = s > 1e-300 ? std::max(0.0, lambda - 1.0 / s) : 0.0;
    }
    const CMatrix rt = es.eigenvectors() * pw.asDiagonal() * es.eigenvectors().adjoint();
    return CMatrix(mih * rt * mih);
  };
  auto r_for_mu = [&](double mu) {
    double lo = 0.0, hi = 1.0;
    while (ln_det_plus(k, solve_r(mu, hi)) < b) hi *= 2.0;
    for (int i = 0; i < 200; ++i) {
      const double mid = 0.5 * (lo + hi);
      (ln_det_plus(k, solve_r(mu, mid)) < b ? lo : hi) = mid;
    }
    return solve_r(mu, hi);
  };
  // Power decreases in mu; bisect on log(mu - mu_min).
  const double scale = std::max(std::abs(mu_min), 1.0);
  double lo = -60.0, hi = 0.0;
  while ((d * r_for_mu(mu_min + scale * std::exp(hi))).trace().real() > p) hi += 2.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double used = (d * r_for_mu(mu_min + scale * std::exp(mid))).trace().real();
    (used > p ? lo : hi) = mid;
  }
  out.r = r_for_mu(mu_min + scale * std::exp(hi));
  out.objective = (c * out.r).trace().real();
  return out;
}

}  // namespace isac::testing

namespace isac::testing {

// Dense-grid maximization over the closed unit disk followed by zooming
// local grids; points outside the disk are projected onto the circle.
template <typename F>
std::pair<cd, double> disk_grid_max(const F& h, int n = 2001) {
  cd best = 0.0;
  double best_val = -std::numeric_limits<double>::infinity();
  auto consider = [&](cd z) {
    if (std::abs(z) > 1.0) z /= std::abs(z);
    const double v = h(z);
    if (v > best_val) {
      best_val = v;
      best = z;
    }
  };
  const double step = 2.0 / (n - 1);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) {
      const cd z(-1.0 + i * step, -1.0 + k * step);
      if (std::abs(z) <= 1.0) consider(z);
    }
  for (int k = 0; k < 4 * n; ++k) consider(std::polar(1.0, 2.0 * kPi * k / (4 * n)));
  double radius = 2.0 * step;
  for (int round = 0; round < 30; ++round) {
    const cd center = best;
    for (int i = -20; i <= 20; ++i)
      for (int k = -20; k <= 20; ++k) consider(center + cd(i, k) * (radius / 20.0));
    radius *= 0.3;
  }
  return {best, best_val};
}

}  // namespace isac::testing
