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

#include "isac/sensing_only.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "isac/linalg.hpp"

namespace isac {

double sensing_objective(const SensingMatrices& s, const CMatrix& r_x) {
  const PcrbTerms t = pcrb_terms(s, r_x);
  double j = t.t1 + t.t2;
  if (t.t4 > 0.0) j -= std::norm(t.t3) / t.t4;
  return j;
}

namespace {

// J on the rank-one point f f^H and its ascent direction (gradient with
// respect to conj(f)).
double rank_one_objective(const SensingMatrices& s, const CMatrix& b, const CVector& f,
                          CVector* grad) {
  const CVector bf = b * f;
  const CVector a3f = s.a3 * f;
  const CVector a4f = s.a4 * f;
  const double bb = f.dot(bf).real();
  const cd c = f.dot(a3f);
  const double d = f.dot(a4f).real();
  if (grad) {
    const CVector a3hf = s.a3.adjoint() * f;
    *grad = bf - (std::conj(c) * a3f + c * a3hf) / d + (std::norm(c) / (d * d)) * a4f;
  }
  return bb - std::norm(c) / d;
}

// Riemannian gradient ascent of J(f f^H) on ||f||^2 = power.
CVector polish_rank_one(const SensingMatrices& s, CVector f, double power) {
  const CMatrix b = s.a1 + s.a2;
  f *= std::sqrt(power) / f.norm();
  CVector g;
  double val = rank_one_objective(s, b, f, &g);
  double step = 1.0 / std::max(b.norm(), 1e-300);
  for (int it = 0; it < 20000; ++it) {
    const cd proj = f.dot(g) / power;
    const CVector tangent = g - f * proj.real();
    if (tangent.norm() <= 1e-15 * g.norm()) break;
    bool improved = false;
    for (int ls = 0; ls < 60; ++ls) {
      CVector cand = f + step * tangent;
      cand *= std::sqrt(power) / cand.norm();
      CVector gc;
      const double vc = rank_one_objective(s, b, cand, &gc);
      if (vc > val) {
        improved = vc - val > 1e-16 * std::abs(val);
        f = cand;
        g = gc;
        val = vc;
        step *= 2.0;
        break;
      }
      step *= 0.5;
    }
    if (!improved) break;
  }
  return f;
}

}  // namespace

DigitalOptimum digital_pcrb_optimal(const SensingMatrices& s, double power,
                                    const conic::SolveOptions& opts) {
  if (!(power > 0.0)) throw std::invalid_argument("digital_pcrb_optimal: power must be positive");
  const int n = static_cast<int>(s.a1.rows());
  conic::ConicProblem p;
  const auto r = p.add_hermitian(n);
  const int t = p.add_variables(1);

  const CVector c12 = r.trace_coefficients(s.a1 + s.a2);
  const CVector c3 = r.trace_coefficients(s.a3);
  const CVector c4 = r.trace_coefficients(s.a4);
  conic::HermitianAffine block;
  block.constant = CMatrix::Zero(2, 2);
  for (int i = 0; i < r.num_params(); ++i) {
    const int var = r.offset + i;
    block.add(var, 0, 0, c12(i).real());
    block.add(var, 1, 0, c3(i));
    block.add(var, 0, 1, std::conj(c3(i)));
    block.add(var, 1, 1, c4(i).real());
  }
  block.add(t, 0, 0, -1.0);
  p.add_hermitian_lmi(block);
  p.add_psd(r);
  std::vector<std::pair<int, double>> trace;
  const CVector ci = r.trace_coefficients(CMatrix::Identity(n, n));
  for (int i = 0; i < r.num_params(); ++i) {
    if (ci(i).real() != 0.0) trace.emplace_back(r.offset + i, ci(i).real());
  }
  p.add_linear_leq(trace, power);

  RVector obj = RVector::Zero(p.num_vars());
  obj(t) = 1.0;
  p.set_objective(obj, conic::Sense::Maximize);

  // Strictly feasible start: scaled identity, epigraph variable below J.
  RVector x0 = RVector::Zero(p.num_vars());
  const CMatrix r0 = CMatrix::Identity(n, n) * (power / (2.0 * n));
  r.assign(x0, r0);
  const double j0 = sensing_objective(s, r0);
  x0(t) = j0 - 0.5 * std::abs(j0) - 1.0;
  p.set_initial_point(x0);

  const auto sol = conic::solve_sdp(p, opts);
  if (sol.report.status != conic::SolveStatus::Optimal) {
    throw SolverFailure("digital_pcrb_optimal: " + conic::to_string(sol.report.status) + " (" +
                        sol.report.message + ")");
  }
  DigitalOptimum out;
  out.report = sol.report;
  out.sdp_objective = sol.report.objective;
  CMatrix r_sdp = hermitian_part(r.value(sol.x));
  out.r_x = r_sdp;
  out.objective = sensing_objective(s, r_sdp);

  Eigen::SelfAdjointEigenSolver<CMatrix> es(r_sdp);
  const CVector f = polish_rank_one(s, es.eigenvectors().col(n - 1), power);
  const CMatrix r1 = f * f.adjoint();
  const double j1 = sensing_objective(s, r1);
  if (j1 >= out.objective) {
    out.r_x = r1;
    out.objective = j1;
  }
  out.pcrb = pcrb_exact(s, out.r_x);
  return out;
}

RankOneExtraction rank_one_extract(const CMatrix& r, const SensingMatrices& s) {
  const CMatrix h = hermitian_part(r);
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
  const Eigen::Index n = h.rows();
  const double l1 = es.eigenvalues()(n - 1);
  if (!(l1 > 0.0)) throw RankTooHigh("rank_one_extract: covariance has no positive eigenvalue");
  RankOneExtraction out;
  out.eig_ratio = n > 1 ? std::max(0.0, es.eigenvalues()(n - 2)) / l1 : 0.0;
  out.f = es.eigenvectors().col(n - 1) * std::sqrt(std::max(h.trace().real(), 0.0));
  if (out.eig_ratio > 1e-6) {
    out.diagnostic = true;
    const double j_full = sensing_objective(s, h);
    const double j_one = sensing_objective(s, out.f * out.f.adjoint());
    if (j_one < j_full - 1e-6 * std::abs(j_full)) {
      throw RankTooHigh("rank_one_extract: eigenvalue ratio " + std::to_string(out.eig_ratio) +
                        " and objective drop " + std::to_string((j_full - j_one) / std::abs(j_full)));
    }
  }
  return out;
}

HybridBeamformer hybrid_from_digital(const CMatrix& f_d, int n_rf, double power) {
  const auto nt = f_d.rows();
  const auto ns = f_d.cols();
  if (n_rf < 2 * ns) {
    throw InsufficientRFChains("hybrid_from_digital: need N_RF >= 2 N_S, got N_RF=" +
                               std::to_string(n_rf) + ", N_S=" + std::to_string(ns));
  }
  CMatrix f_rf = CMatrix::Ones(nt, n_rf);
  CMatrix f_bb = CMatrix::Zero(n_rf, ns);
  for (Eigen::Index s = 0; s < ns; ++s) {
    const CVector d = f_d.col(s);
    double c = d.cwiseAbs().maxCoeff() / 2.0;
    if (c == 0.0) c = std::sqrt(power / static_cast<double>(nt)) / 2.0;
    for (Eigen::Index i = 0; i < nt; ++i) {
      const double mag = std::abs(d(i));
      const double phase = mag > 0.0 ? std::arg(d(i)) : 0.0;
      const double delta = std::acos(std::clamp(mag / (2.0 * c), 0.0, 1.0));
      f_rf(i, 2 * s) = std::polar(1.0, phase + delta);
      f_rf(i, 2 * s + 1) = std::polar(1.0, phase - delta);
    }
    f_bb(2 * s, s) = c;
    f_bb(2 * s + 1, s) = c;
  }
  return HybridBeamformer::from_digital_factor(std::move(f_rf), std::move(f_bb));
}

// ---------------------------------------------------------------------------
// Single RF chain

void CoordinateCoefficients::validate() const {
  const double lo = rho4.real() - 2.0 * std::abs(alpha4);
  if (!(lo > 1e-12 * std::max(1.0, std::abs(rho4)))) {
    throw DegenerateDenominator("coordinate step: g4 is not positive on the unit disk (min " +
                                std::to_string(lo) + ")");
  }
}

double CoordinateCoefficients::objective(cd f) const {
  const cd fc = std::conj(f);
  const double g1 = (alpha1 * f + std::conj(alpha1) * fc + rho1).real();
  const double g2 = (alpha2 * f + std::conj(alpha2) * fc + rho2).real();
  const cd g3 = alpha3 * f + beta3 * fc + rho3;
  const double g4 = (alpha4 * f + std::conj(alpha4) * fc + rho4).real();
  return g1 + g2 - std::norm(g3) / g4;
}

namespace {

struct Coef {
  cd alpha, beta, rho;
};

Coef coordinate_coefficients(const CMatrix& a, const CVector& f, int m) {
  CVector fo = f;
  fo(m) = 0.0;
  Coef c;
  c.alpha = (fo.adjoint() * a.col(m))(0, 0);
  c.beta = (a.row(m) * fo)(0, 0);
  cd quad = (fo.adjoint() * a * fo)(0, 0);
  for (Eigen::Index n = 0; n < f.size(); ++n) quad -= std::norm(fo(n)) * a(n, n);
  c.rho = quad + a.trace();
  return c;
}

}  // namespace

CoordinateCoefficients coordinate_coefficients(const SensingMatrices& s, const CVector& f, int m) {
  CoordinateCoefficients c;
  c.m = m;
  const Coef k1 = coordinate_coefficients(s.a1, f, m);
  const Coef k2 = coordinate_coefficients(s.a2, f, m);
  const Coef k3 = coordinate_coefficients(s.a3, f, m);
  const Coef k4 = coordinate_coefficients(s.a4, f, m);
  c.alpha1 = k1.alpha;
  c.alpha2 = k2.alpha;
  c.alpha3 = k3.alpha;
  c.alpha4 = k4.alpha;
  c.beta3 = k3.beta;
  c.rho1 = k1.rho;
  c.rho2 = k2.rho;
  c.rho3 = k3.rho;
  c.rho4 = k4.rho;
  return c;
}

namespace {

// Maximizer over the open disk by damped Newton in (Re f, Im f). The
// objective is concave wherever g4 > 0. Returns nullopt when the iterates
// approach the boundary, where boundary_maximizer takes over.
std::optional<cd> interior_maximizer(const CoordinateCoefficients& c, cd start) {
  const cd d1x = 2.0 * (c.alpha1 + c.alpha2);
  // Gradient of g1 + g2: (2 Re(a), -2 Im(a)) with a = alpha1 + alpha2.
  const Eigen::Vector2d du(d1x.real(), -d1x.imag());
  const Eigen::Vector2d d4(2.0 * c.alpha4.real(), -2.0 * c.alpha4.imag());
  const cd d3[2] = {c.alpha3 + c.beta3, kJ * (c.alpha3 - c.beta3)};
  Eigen::Matrix2d q2;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) q2(a, b) = 2.0 * (std::conj(d3[a]) * d3[b]).real();

  cd f = start;
  for (int it = 0; it < 200; ++it) {
    const cd g3 = c.alpha3 * f + c.beta3 * std::conj(f) + c.rho3;
    const double g4 = (c.alpha4 * f + std::conj(c.alpha4) * std::conj(f) + c.rho4).real();
    if (!(g4 > 0.0)) return std::nullopt;
    const double q = std::norm(g3);
    Eigen::Vector2d dq;
    for (int a = 0; a < 2; ++a) dq(a) = 2.0 * (std::conj(g3) * d3[a]).real();
    const Eigen::Vector2d dr = dq / g4 - q * d4 / (g4 * g4);
    const Eigen::Matrix2d hr = q2 / g4 - (dq * d4.transpose() + d4 * dq.transpose()) / (g4 * g4) +
                               2.0 * q * d4 * d4.transpose() / (g4 * g4 * g4);
    const Eigen::Vector2d grad = du - dr;
    if (grad.norm() < 1e-14) return f;
    // hr is PSD; a small shift keeps the system solvable when it is singular.
    const double shift = 1e-10 * (1.0 + hr.trace()) + 1e-3 * grad.norm();
    const Eigen::Vector2d step = (hr + shift * Eigen::Matrix2d::Identity()).llt().solve(grad);
    const double h0 = c.objective(f);
    double t = 1.0;
    cd next = f + cd(step(0), step(1));
    while (t > 1e-12 && (std::abs(next) >= 1.0 || !(c.objective(next) >= h0))) {
      t *= 0.5;
      next = f + t * cd(step(0), step(1));
    }
    if (t <= 1e-12) return std::abs(f) > 1.0 - 1e-9 ? std::nullopt : std::optional<cd>(f);
    const bool done = std::abs(next - f) < 1e-15;
    f = next;
    if (done) return f;
  }
  return f;
}

cd boundary_maximizer(const CoordinateCoefficients& c) {
  constexpr int kSamples = 720;
  int best = 0;
  double best_val = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < kSamples; ++k) {
    const double v = c.objective(std::polar(1.0, 2.0 * kPi * k / kSamples));
    if (v > best_val) {
      best_val = v;
      best = k;
    }
  }
  // Bisection on the angular derivative around the best sample.
  auto slope = [&](double phi) {
    const cd f = std::polar(1.0, phi);
    const cd df = kJ * f;
    const double dg12 = 2.0 * ((c.alpha1 + c.alpha2) * df).real();
    const cd g3 = c.alpha3 * f + c.beta3 * std::conj(f) + c.rho3;
    const cd dg3 = c.alpha3 * df + c.beta3 * std::conj(df);
    const double g4 = (c.alpha4 * f + std::conj(c.alpha4) * std::conj(f) + c.rho4).real();
    const double dg4 = 2.0 * (c.alpha4 * df).real();
    return dg12 - (2.0 * (std::conj(g3) * dg3).real() * g4 - std::norm(g3) * dg4) / (g4 * g4);
  };
  const double h = 2.0 * kPi / kSamples;
  const double phi0 = 2.0 * kPi * best / kSamples;
  double lo = phi0 - h, hi = phi0 + h;
  const cd sample = std::polar(1.0, phi0);
  if (!(slope(lo) >= 0.0 && slope(hi) <= 0.0)) return sample;
  for (int it = 0; it < 100 && hi - lo > 1e-16; ++it) {
    const double mid = 0.5 * (lo + hi);
    (slope(mid) >= 0.0 ? lo : hi) = mid;
  }
  const cd refined = std::polar(1.0, 0.5 * (lo + hi));
  return c.objective(refined) >= best_val ? refined : sample;
}

}  // namespace

cd solve_coordinate_subproblem(const CoordinateCoefficients& c, cd previous) {
  c.validate();
  const double prev_val = c.objective(previous);
  cd best = boundary_maximizer(c);
  double best_val = c.objective(best);
  const cd start = std::abs(previous) < 1.0 ? previous : 0.5 * previous / std::abs(previous);
  if (const auto inner = interior_maximizer(c, start)) {
    const double v = c.objective(*inner);
    if (v > best_val) {
      best = *inner;
      best_val = v;
    }
  }
  return best_val > prev_val ? best : previous;
}

double relaxed_objective(const SensingMatrices& s, const CVector& f) {
  auto g = [&](const CMatrix& a) {
    cd v = (f.adjoint() * a * f)(0, 0);
    for (Eigen::Index n = 0; n < f.size(); ++n) v += (1.0 - std::norm(f(n))) * a(n, n);
    return v;
  };
  const double g4 = g(s.a4).real();
  return g(s.a1).real() + g(s.a2).real() - std::norm(g(s.a3)) / g4;
}

SingleRfResult single_rf_coordinate_ascent(const SensingMatrices& s, double power,
                                           const CVector& init,
                                           const CoordinateAscentOptions& opts) {
  const int nt = static_cast<int>(s.a1.rows());
  if (init.size() != nt) throw std::invalid_argument("single_rf: init has wrong length");
  for (int m = 0; m < nt; ++m) {
    if (std::abs(std::abs(init(m)) - 1.0) > 1e-9) {
      throw std::invalid_argument("single_rf: init must be unit modulus");
    }
  }
  const double scale = power / nt;
  SingleRfResult out;
  CVector f = init;
  CVector previous = init;
  double current = relaxed_objective(s, f);
  out.trace.push_back(scale * current);
  for (int sweep = 0; sweep < opts.max_sweeps; ++sweep) {
    const double start = current;
    for (int m = 0; m < nt; ++m) {
      const auto c = coordinate_coefficients(s, f, m);
      const cd next = solve_coordinate_subproblem(c, f(m));
      if (next != f(m)) {
        previous(m) = f(m);
        f(m) = next;
      }
      current = relaxed_objective(s, f);
      out.trace.push_back(scale * current);
    }
    out.sweeps = sweep + 1;
    if (current - start < opts.tol * std::abs(start)) break;
  }
  out.relaxed_before_projection = scale * current;

  // Project to the unit circle; a zero entry keeps its previous phase.
  for (int m = 0; m < nt; ++m) {
    const double mag = std::abs(f(m));
    if (mag > 1e-12) {
      f(m) /= mag;
    } else {
      const double pm = std::abs(previous(m));
      f(m) = pm > 1e-12 ? previous(m) / pm : cd(1.0, 0.0);
    }
  }
  out.relaxed_after_projection = scale * relaxed_objective(s, f);
  out.beamformer = HybridBeamformer::from_digital_factor(f, CMatrix::Constant(1, 1, std::sqrt(scale)));
  out.pcrb = pcrb_exact(s, transmit_covariance(out.beamformer));
  return out;
}

SingleRfResult single_rf_design(const SensingMatrices& s, const GaussianMixturePrior& prior,
                                double power, std::uint64_t seed, int restarts,
                                const CoordinateAscentOptions& opts) {
  const int nt = static_cast<int>(s.a1.rows());
  const double mode = prior.components()[heaviest_component(prior)].mean;
  SingleRfResult best = single_rf_coordinate_ascent(s, power, steering(mode, nt), opts);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> phase(-kPi, kPi);
  for (int r = 0; r < restarts; ++r) {
    CVector init(nt);
    for (int m = 0; m < nt; ++m) init(m) = std::polar(1.0, phase(rng));
    SingleRfResult cand = single_rf_coordinate_ascent(s, power, init, opts);
    if (cand.pcrb < best.pcrb) best = std::move(cand);
  }
  return best;
}

}  // namespace isac
