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
#include "isac/tradeoff.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "isac/conic.hpp"
#include "isac/linalg.hpp"

namespace isac {

namespace {

constexpr double kLn2 = 0.69314718055994530942;

RVector real_coefficients(const CVector& c) { return c.real(); }

std::vector<std::pair<int, double>> dense_row(const RVector& a) {
  std::vector<std::pair<int, double>> out;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a(i) != 0.0) out.emplace_back(static_cast<int>(i), a(i));
  }
  return out;
}

double ln_det_rate(const CMatrix& k, const CMatrix& r) {
  CMatrix g = CMatrix::Identity(k.rows(), k.rows()) + k * r * k.adjoint();
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(g), Eigen::EigenvaluesOnly);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    acc += std::log(std::max(es.eigenvalues()(i), 1e-300));
  }
  return acc;
}

// Top generalized eigenvector of (C, D), D positive definite, scaled so that
// tr(D u u^H) = power.
CMatrix generalized_top(const CMatrix& c, const CMatrix& d, double power) {
  const CMatrix d_is = herm_inv_sqrt(d);
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(d_is * c * d_is));
  const CVector u = d_is * es.eigenvectors().col(c.rows() - 1);
  const double norm = (u.adjoint() * d * u)(0, 0).real();
  return power * u * u.adjoint() / norm;
}

}  // namespace

DigitalStepResult solve_digital_covariance(const CMatrix& f_rf, const CMatrix& a1, const CMatrix& h,
                                     double power, double rate_target, double comm_noise) {
  if (!(power > 0.0) || !(comm_noise > 0.0)) {
    throw std::invalid_argument("digital step: power and noise must be positive");
  }
  const int n = static_cast<int>(f_rf.cols());
  const CMatrix c = hermitian_part(f_rf.adjoint() * a1 * f_rf);
  const CMatrix d = hermitian_part(f_rf.adjoint() * f_rf);
  const CMatrix heff = h * f_rf;
  const WaterFilling wf = water_filling(heff, d, power, comm_noise);
  const double target_nats = rate_target * kLn2;

  DigitalStepResult out;
  out.capacity = wf.rate_nats / kLn2;
  if (target_nats > wf.rate_nats * (1.0 + 1e-10) + 1e-12) {
    throw InfeasibleRate("rate target " + std::to_string(rate_target) +
                         " exceeds capacity " + std::to_string(out.capacity));
  }
  // Drop eigenvalues below 1e-8 lambda_max so that R_BB = F_BB F_BB^H holds
  // exactly for the factor used by the WMMSE step.
  auto finish = [&](const CMatrix& r) {
    const CMatrix fbb = digital_factor(r);
    out.r_bb = fbb.cols() > 0 ? hermitian_part(fbb * fbb.adjoint()) : CMatrix::Zero(n, n);
    out.objective = trace_product(c, out.r_bb).real();
    return out;
  };
  if (target_nats >= wf.rate_nats * (1.0 - 1e-10)) return finish(wf.covariance);

  const CMatrix k = heff / std::sqrt(comm_noise);
  const CMatrix eig = generalized_top(c, d, power);
  if (target_nats <= 0.0 || ln_det_rate(k, eig) >= target_nats) return finish(eig);

  // Normalized program over X = R / power with objective C / ||C||.
  const double cscale = std::max(c.norm(), 1e-300);
  conic::ConicProblem prob;
  const auto x = prob.add_hermitian(n);
  prob.set_objective(real_coefficients(x.trace_coefficients(c / cscale)), conic::Sense::Maximize);
  prob.add_linear_leq(dense_row(real_coefficients(x.trace_coefficients(d))), 1.0);
  prob.add_psd(x);
  const CMatrix ks = k * std::sqrt(power);
  prob.add_logdet_geq(x.affine(), ks, target_nats);

  // Strictly feasible start between the water-filling point and the
  // isotropic point, when one exists.
  const CMatrix iso = CMatrix::Identity(n, n) / d.trace().real();
  for (double lam : {0.5, 0.9, 0.99, 0.999}) {
    const CMatrix r0 = 0.999 * (lam * wf.covariance / power + (1.0 - lam) * iso);
    if (ln_det_rate(ks, r0) > target_nats) {
      RVector x0 = RVector::Zero(prob.num_vars());
      x.assign(x0, r0);
      prob.set_initial_point(x0);
      break;
    }
  }
  const auto sol = conic::solve_logdet_program(prob);
  if (sol.report.status != conic::SolveStatus::Optimal) {
    throw SolverFailure("digital step: " + sol.report.message);
  }
  out.newton_steps = sol.report.iterations;
  out.duality_gap = std::abs(sol.report.dual_bound - sol.report.objective) * cscale * power;
  return finish(power * x.value(sol.x));
}

CMatrix digital_factor(const CMatrix& r_bb) { return psd_factor(r_bb, 1e-8); }

CMatrix mse_matrix(const CMatrix& h, const CMatrix& f_rf, const CMatrix& f_bb, const CMatrix& q,
                   double comm_noise) {
  const Eigen::Index ns = f_bb.cols();
  const CMatrix d = q.adjoint() * h * f_rf * f_bb - CMatrix::Identity(ns, ns);
  return hermitian_part(d * d.adjoint() + comm_noise * q.adjoint() * q);
}

WmmseState wmmse_update(const CMatrix& h, const CMatrix& f_rf, const CMatrix& f_bb,
                        double comm_noise) {
  const Eigen::Index nu = h.rows();
  const Eigen::Index ns = f_bb.cols();
  const CMatrix g = h * f_rf * f_bb;
  WmmseState st;
  st.j = hermitian_part(comm_noise * CMatrix::Identity(nu, nu) + g * g.adjoint());
  st.q = st.j.llt().solve(g);
  st.e = mse_matrix(h, f_rf, f_bb, st.q, comm_noise);
  Eigen::SelfAdjointEigenSolver<CMatrix> es(st.e);
  const double lo = es.eigenvalues()(0);
  const double hi = es.eigenvalues()(ns - 1);
  if (!(lo > 0.0) || hi / lo > 1e12) throw SingularMse("wmmse: ill-conditioned MSE matrix");
  st.w = hermitian_part(es.eigenvectors() * es.eigenvalues().cwiseInverse().asDiagonal() *
                        es.eigenvectors().adjoint());
  double ln_det_w = 0.0;
  for (Eigen::Index i = 0; i < ns; ++i) ln_det_w -= std::log(es.eigenvalues()(i));
  st.eta = ln_det_w + static_cast<double>(ns) - st.w.trace().real() -
           comm_noise * (st.w * st.q.adjoint() * st.q).trace().real();
  st.b1 = hermitian_part(h.adjoint() * st.q * st.w * st.q.adjoint() * h);
  st.b2 = f_bb * st.w * st.q.adjoint() * h;
  st.c = vec(st.b2.transpose());
  return st;
}

double surrogate_rate(const WmmseState& state, const CMatrix& f_rf, const CMatrix& f_bb) {
  const CMatrix g = f_rf * f_bb;
  const double quad = (g.adjoint() * state.b1 * g).trace().real();
  const double lin = 2.0 * (state.b2 * f_rf).trace().real();
  return (state.eta - quad + lin) / kLn2;
}

double surrogate_rate_mse_form(const CMatrix& w, const CMatrix& e) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(w), Eigen::EigenvaluesOnly);
  double ln_det_w = 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    ln_det_w += std::log(es.eigenvalues()(i));
  }
  return (ln_det_w - (w * e).trace().real() + static_cast<double>(w.rows())) / kLn2;
}

FppScaResult fpp_sca_analog(const CMatrix& r_bb, const CMatrix& a1, const WmmseState& state,
                            double power, double rate_target, const CMatrix& z0,
                            const FppScaOptions& opts,
                            const std::function<WmmseState(const CMatrix&)>& refresh) {
  const Eigen::Index nt = z0.rows();
  const Eigen::Index nrf = z0.cols();
  const int n = static_cast<int>(nt * nrf);
  for (Eigen::Index i = 0; i < z0.size(); ++i) {
    if (std::abs(std::abs(z0.data()[i]) - 1.0) > 1e-9) {
      throw std::invalid_argument("fpp_sca: z0 must be unit modulus");
    }
  }
  const CMatrix rt = r_bb.transpose();
  const CMatrix k_obj = kron(rt, a1);
  const CMatrix k_pow = kron(rt, CMatrix::Identity(nt, nt));
  const bool with_rate = std::isfinite(rate_target);
  const RMatrix q_pow = real_quadratic(k_pow) / power;
  RMatrix q_rate;
  RVector l_rate;
  double rate_rhs = 0.0;
  auto set_rate = [&](const WmmseState& st) {
    if (!with_rate) return;
    q_rate = real_quadratic(kron(rt, st.b1));
    l_rate = -2.0 * real_linear(st.c);
    rate_rhs = st.eta - rate_target * kLn2;
  };
  set_rate(state);

  CVector z = vec(z0);
  // Objective in units of unit transmit power.
  const double obj_scale = power;
  const int it_var = 2 * n, ir = 2 * n + 1, ip = 2 * n + 2, iw = 3 * n + 2;
  const int nvar = 4 * n + 2;
  std::vector<int> all(2 * n);
  std::iota(all.begin(), all.end(), 0);

  FppScaResult out;
  double prev_obj = std::numeric_limits<double>::quiet_NaN();
  double eps = std::min(opts.penalty_start, opts.penalty);
  for (int iter = 0; iter < opts.max_iters; ++iter) {
    if (iter > 0) eps = std::min(eps * opts.penalty_growth, opts.penalty);
    if (iter > 0 && refresh) set_rate(refresh(unvec(z, nt, nrf)));
    conic::ConicProblem prob;
    prob.add_variables(nvar);
    RVector c = RVector::Zero(nvar);
    c(it_var) = 1.0;
    c(ir) = -eps;
    c.segment(ip, n).setConstant(-eps);
    c.segment(iw, n).setConstant(-eps);
    prob.set_objective(c, conic::Sense::Maximize);

    // Linearized sensing epigraph: t - r <= 2 Re(z^H K v) - z^H K z.
    const CVector kz = k_obj * z / obj_scale;
    const double zkz = z.dot(kz).real();
    const RVector grad = 2.0 * real_linear(kz.conjugate());
    std::vector<std::pair<int, double>> row = dense_row(-grad);
    row.emplace_back(it_var, 1.0);
    row.emplace_back(ir, -1.0);
    prob.add_linear_leq(row, -zkz);

    prob.add_quadratic_leq(all, q_pow, RVector::Zero(2 * n), -1.0);
    if (with_rate) prob.add_quadratic_leq(all, q_rate, l_rate, -rate_rhs);
    RMatrix q3 = RMatrix::Zero(3, 3);
    q3(0, 0) = q3(1, 1) = 1.0;
    RVector l3 = RVector::Zero(3);
    l3(2) = -1.0;
    for (int m = 0; m < n; ++m) {
      prob.add_quadratic_leq({m, n + m, ip + m}, q3, l3, -1.0);
      const cd zm = z(m);
      prob.add_linear_geq({{m, 2.0 * zm.real()}, {n + m, 2.0 * zm.imag()}, {iw + m, 1.0}},
                          1.0 + std::norm(zm));
      prob.add_nonnegative(ip + m);
      prob.add_nonnegative(iw + m);
    }
    prob.add_nonnegative(ir);

    // Start at z shrunk slightly with generous slacks.
    RVector x0 = RVector::Zero(nvar);
    const CVector vs = 0.999 * z;
    x0.head(2 * n) = to_real(vs);
    x0(ir) = 1.0;
    x0(it_var) = 2.0 * vs.dot(kz).real() - zkz - 1.0 + x0(ir);
    for (int m = 0; m < n; ++m) {
      x0(ip + m) = std::max(std::norm(vs(m)) - 1.0, 0.0) + 1.0;
      x0(iw + m) = std::max(1.0 + std::norm(z(m)) - 2.0 * (std::conj(z(m)) * vs(m)).real(), 0.0) + 1.0;
    }
    prob.set_initial_point(x0);

    const auto sol = conic::solve_socp(prob);
    out.newton_steps += sol.report.iterations;
    if (sol.report.status != conic::SolveStatus::Optimal) {
      if (iter == 0) throw SolverFailure("fpp_sca: " + sol.report.message);
      // Keep the last solved iterate.
      out.stalled = true;
      break;
    }
    z = to_complex(sol.x.head(2 * n));
    out.iterations = iter + 1;
    out.slack_sum = std::max(sol.x(ir), 0.0) + sol.x.segment(ip, n).cwiseMax(0.0).sum() +
                    sol.x.segment(iw, n).cwiseMax(0.0).sum();
    const double obj = z.dot(k_obj * z).real();
    out.objective.push_back(obj);
    const bool small_change =
        !std::isnan(prev_obj) && std::abs(obj - prev_obj) <= opts.obj_tol * std::abs(prev_obj);
    prev_obj = obj;
    if (eps >= opts.penalty && out.slack_sum < opts.slack_tol && small_change) {
      out.converged = true;
      break;
    }
  }
  if (!out.converged && opts.throw_on_stall && out.slack_sum >= opts.slack_tol) {
    throw SlackStall("fpp_sca: slacks at " + std::to_string(out.slack_sum));
  }
  out.max_modulus_error = 0.0;
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    const double mag = std::abs(z(i));
    out.max_modulus_error = std::max(out.max_modulus_error, std::abs(mag - 1.0));
    z(i) = mag > 0.0 ? z(i) / mag : cd(1.0, 0.0);
  }
  out.f_rf = unvec(z, nt, nrf);
  return out;
}

namespace {

TradeoffSolution summarize(const TradeoffProblem& pr, const CMatrix& f_rf, const CMatrix& r_bb) {
  TradeoffSolution s;
  s.beamformer.f_rf = f_rf;
  s.beamformer.r_bb = r_bb;
  const CMatrix fbb = digital_factor(r_bb);
  if (fbb.cols() > 0) s.beamformer.f_bb = fbb;
  const CMatrix rx = hermitian_part(f_rf * r_bb * f_rf.adjoint());
  s.rate = achievable_rate(pr.h, rx, pr.comm_noise);
  s.objective = trace_product(pr.sensing.a1, rx).real();
  s.pcrb_upper = pcrb_upper(pr.sensing, rx);
  s.pcrb_exact = pcrb_exact_guarded(pr.sensing, rx).value;
  s.rate_feasible = s.rate >= pr.rate_target - 1e-6;
  return s;
}

CMatrix random_analog(int nt, int nrf, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> phase(-kPi, kPi);
  CMatrix f(nt, nrf);
  for (int j = 0; j < nrf; ++j)
    for (int i = 0; i < nt; ++i) f(i, j) = std::polar(1.0, phase(rng));
  return f;
}

// Phases of the leading right singular vectors of H, perturbed by `spread`
// times a uniform phase.
CMatrix matched_analog(const CMatrix& h, int nrf, double spread, std::mt19937_64& rng) {
  Eigen::JacobiSVD<CMatrix> svd(h, Eigen::ComputeFullV);
  std::uniform_real_distribution<double> phase(-kPi, kPi);
  const Eigen::Index nt = h.cols();
  CMatrix f(nt, nrf);
  for (int j = 0; j < nrf; ++j) {
    const CVector v = svd.matrixV().col(j % svd.matrixV().cols());
    for (Eigen::Index i = 0; i < nt; ++i) {
      f(i, j) = std::polar(1.0, std::arg(v(i)) + spread * phase(rng));
    }
  }
  return f;
}

}  // namespace

TradeoffSolution solve_tradeoff(const TradeoffProblem& problem, const TradeoffOptions& opts) {
  const int nt = problem.n_tx();
  const CMatrix& a1 = problem.sensing.a1;
  std::mt19937_64 rng(opts.seed);

  CMatrix f = opts.initial_f_rf ? *opts.initial_f_rf : random_analog(nt, problem.n_rf, rng);
  DigitalStepResult ds;
  int restarts = 0;
  for (;;) {
    try {
      ds = solve_digital_covariance(f, a1, problem.h, problem.power, problem.rate_target,
                                       problem.comm_noise);
      break;
    } catch (const InfeasibleRate&) {
      if (restarts >= opts.max_restarts) throw;
      ++restarts;
      f = matched_analog(problem.h, problem.n_rf, std::ldexp(1.0, -restarts), rng);
    }
  }

  int n_in = 0, n_ld = ds.newton_steps, n_out = 0;
  std::vector<double> trace{ds.objective}, gaps;
  bool converged = false;
  std::string reason = "outer iteration limit";
  for (int outer = 0; outer < opts.max_outer; ++outer) {
    n_out = outer + 1;
    const CMatrix fbb = digital_factor(ds.r_bb);
    const WmmseState st = wmmse_update(problem.h, f, fbb, problem.comm_noise);
    const double true_rate =
        achievable_rate(problem.h, hermitian_part(f * ds.r_bb * f.adjoint()), problem.comm_noise);
    gaps.push_back(std::abs(surrogate_rate(st, f, fbb) - true_rate));

    FppScaResult fpp;
    try {
      auto refresh = [&](const CMatrix& fz) {
        return wmmse_update(problem.h, fz, fbb, problem.comm_noise);
      };
      fpp = opts.refresh_wmmse
                ? fpp_sca_analog(ds.r_bb, a1, st, problem.power, problem.rate_target, f, opts.fpp,
                                 refresh)
                : fpp_sca_analog(ds.r_bb, a1, st, problem.power, problem.rate_target, f, opts.fpp);
    } catch (const SolverFailure& e) {
      reason = e.what();
      break;
    }
    n_in += fpp.iterations;
    DigitalStepResult next;
    try {
      next = solve_digital_covariance(fpp.f_rf, a1, problem.h, problem.power,
                                         problem.rate_target, problem.comm_noise);
    } catch (const InfeasibleRate&) {
      reason = "analog update lost rate feasibility; previous iterate kept";
      converged = true;
      break;
    }
    n_ld += next.newton_steps;
    // Regression guard: keep the previous analog matrix.
    if (next.objective < ds.objective) {
      reason = "analog update would decrease the objective; previous iterate kept";
      converged = true;
      break;
    }
    const double rel = (next.objective - ds.objective) / std::abs(ds.objective);
    f = fpp.f_rf;
    ds = std::move(next);
    trace.push_back(ds.objective);
    if (rel < opts.rel_tol) {
      reason = "relative improvement below tolerance";
      converged = true;
      break;
    }
  }

  TradeoffSolution out = summarize(problem, f, ds.r_bb);
  out.trace = std::move(trace);
  out.wmmse_gap = std::move(gaps);
  out.n_out = n_out;
  out.n_in = n_in;
  out.n_ld = n_ld;
  out.restarts = restarts;
  out.converged = converged;
  out.stop_reason = reason;
  return out;
}

CMatrix analog_from_covariance(const CMatrix& r_x, int n_rf) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(r_x));
  const CMatrix u = es.eigenvectors().rightCols(n_rf);
  return u.unaryExpr([](cd z) { return z == cd(0.0) ? cd(1.0) : std::polar(1.0, std::arg(z)); });
}

TradeoffSolution fully_digital_reference(const TradeoffProblem& problem) {
  const int nt = problem.n_tx();
  const CMatrix eye = CMatrix::Identity(nt, nt);
  const DigitalStepResult ds = solve_digital_covariance(eye, problem.sensing.a1, problem.h,
                                                  problem.power, problem.rate_target,
                                                  problem.comm_noise);
  TradeoffSolution out = summarize(problem, eye, ds.r_bb);
  out.trace = {ds.objective};
  out.n_ld = ds.newton_steps;
  out.converged = true;
  return out;
}

CMatrix benchmark_heuristic_analog(const GaussianMixturePrior& prior, double user_angle, int n_tx,
                                   int n_rf) {
  const auto& comps = prior.components();
  if (static_cast<int>(comps.size()) < n_rf - 1) {
    throw std::invalid_argument("benchmark_heuristic: fewer prior components than RF chains - 1");
  }
  std::vector<std::size_t> order(comps.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return comps[a].weight > comps[b].weight; });
  CMatrix f(n_tx, n_rf);
  f.col(0) = steering(user_angle, n_tx);
  for (int i = 1; i < n_rf; ++i) f.col(i) = steering(comps[order[i - 1]].mean, n_tx);
  return f;
}

TradeoffSolution benchmark_heuristic(const TradeoffProblem& problem,
                                     const GaussianMixturePrior& prior, double user_angle) {
  const CMatrix f = benchmark_heuristic_analog(prior, user_angle, problem.n_tx(), problem.n_rf);
  const DigitalStepResult ds = solve_digital_covariance(f, problem.sensing.a1, problem.h, problem.power,
                                                  problem.rate_target, problem.comm_noise);
  TradeoffSolution out = summarize(problem, f, ds.r_bb);
  out.trace = {ds.objective};
  out.n_ld = ds.newton_steps;
  out.converged = true;
  return out;
}

double prior_peak_angle(const GaussianMixturePrior& prior, int grid) {
  double best = -kPi / 2, best_val = -1.0;
  for (int i = 0; i < grid; ++i) {
    const double th = -kPi / 2 + kPi * i / grid;
    const double v = pdf(prior, th);
    if (v > best_val) {
      best_val = v;
      best = th;
    }
  }
  return best;
}

TradeoffSolution benchmark_peak_angle(const TradeoffProblem& problem,
                                      const GaussianMixturePrior& prior) {
  const int nt = problem.n_tx();
  const int nrf = problem.n_rf;
  const CVector a = steering(prior_peak_angle(prior), nt);
  const CMatrix f = a.replicate(1, nrf);
  const CMatrix r = problem.power / (double(nt) * nrf * nrf) * CMatrix::Ones(nrf, nrf);
  TradeoffSolution out = summarize(problem, f, r);
  out.trace = {out.objective};
  out.converged = true;
  return out;
}

}  // namespace isac
