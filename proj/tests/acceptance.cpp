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
// Acceptance run on the reference configuration. One PASS/FAIL line per
// criterion; the exit status is non-zero if any criterion fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <string>

#include "isac/conic.hpp"
#include "isac/linalg.hpp"
#include "isac/mc_validate.hpp"
#include "isac/runner.hpp"
#include "isac/sensing_only.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace isac;
using namespace isac::testing;

namespace {

// Pinned tolerances.
constexpr double kFactorRel = 1e-9;
constexpr double kFactorSeconds = 10.0;
constexpr double kBoundViolation = 1e-12;
constexpr double kMonotoneAbs = 1e-8;
constexpr double kConvergedRel = 1e-6;
constexpr int kMaxOuter = 30;
constexpr double kRunSeconds = 300.0;
constexpr double kSweepRel = 1e-9;
constexpr double kDigitalFactor = 1.10;
constexpr double kPeakRad = 0.05;
constexpr double kWmmseBits = 1e-8;
constexpr double kQuadRel = 1e-8;
constexpr double kKronRel = 1e-10;
constexpr double kCoordAbs = 1e-6;
constexpr double kConicRel = 1e-5;
constexpr int kMcTrials = 2000;
constexpr double kMcSeconds = 120.0;
constexpr int kRandomBeams = 10000;

int failures = 0;

void report(int id, bool ok, const std::string& what) {
  std::printf("%s [%d] %s\n", ok ? "PASS" : "FAIL", id, what.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

bool monotone(const std::vector<double>& trace, double& worst) {
  worst = 0.0;
  for (std::size_t i = 1; i < trace.size(); ++i) worst = std::max(worst, trace[i - 1] - trace[i]);
  return worst <= kMonotoneAbs;
}

CoordinateCoefficients random_coefficients(std::mt19937_64& rng) {
  std::normal_distribution<double> n01;
  std::uniform_real_distribution<double> u(0.1, 2.0);
  auto c = [&] { return cd(n01(rng), n01(rng)); };
  CoordinateCoefficients k;
  k.alpha1 = c();
  k.alpha2 = c();
  k.alpha3 = c();
  k.alpha4 = c();
  k.beta3 = c();
  k.rho1 = n01(rng);
  k.rho2 = n01(rng);
  k.rho3 = c();
  k.rho4 = 2.0 * std::abs(k.alpha4) + u(rng);
  return k;
}

std::vector<std::pair<int, double>> sparse(const RVector& v) {
  std::vector<std::pair<int, double>> out;
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (v(i) != 0.0) out.emplace_back(static_cast<int>(i), v(i));
  return out;
}

void criterion1(const Instance& in) {
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  for (int nrf : {2, 3}) {
    const PcrbMinResult r = pcrb_min(in, nrf, 1.0, 1);
    worst = std::max(worst, std::abs(r.pcrb_hybrid - r.pcrb_digital) / r.pcrb_digital);
  }
  const double t = seconds_since(t0);
  report(1, worst <= kFactorRel && t < kFactorSeconds,
         fmt("hybrid vs digital PCRB, N_RF in {2,3}: max rel gap %.2e (tol %.0e), %.2f s (limit %.0f s)",
             worst, kFactorRel, t, kFactorSeconds));
}

void criterion2(const Instance& in) {
  std::mt19937_64 rng(2);
  double worst = -1e300;
  SensingMatrices bare = in.sensing;
  bare.a2.setZero();
  bare.a3.setZero();
  bare.a4.setZero();
  double worst_eq = 0.0;
  for (int i = 0; i < 500; ++i) {
    HybridBeamformer b;
    b.f_rf = random_unit_modulus(rng, 12, 3);
    const CMatrix r = random_psd(rng, 3, 1 + i % 3);
    b.r_bb = r / (b.f_rf * r * b.f_rf.adjoint()).trace().real();
    check_beamformer(b, 1.0);
    const CMatrix rx = transmit_covariance(b);
    worst = std::max(worst, pcrb_exact(in.sensing, rx) - pcrb_upper(in.sensing, rx));
    const double u = pcrb_upper(bare, rx);
    worst_eq = std::max(worst_eq, std::abs(pcrb_exact_guarded(bare, rx).value - u) / u);
  }
  report(2, worst <= kBoundViolation && worst_eq <= kBoundViolation,
         fmt("500 random beamformers: max(exact - upper) %.2e (tol %.0e); zeroed-term rel gap %.2e",
             worst, kBoundViolation, worst_eq));
}

std::vector<TradeoffSolution> criterion3(const Instance& in) {
  std::vector<TradeoffSolution> runs;
  bool ok = true;
  std::string detail;
  for (int nrf : {2, 3}) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto sol = solve_tradeoff(in.tradeoff(5.0, nrf, 1.0));
    const double t = seconds_since(t0);
    double drop = 0.0;
    const bool mono = monotone(sol.trace, drop);
    const std::size_t n = sol.trace.size();
    const double last = n > 1 ? (sol.trace[n - 1] - sol.trace[n - 2]) / sol.trace[n - 2] : 0.0;
    const bool conv = sol.converged && sol.stop_reason == "relative improvement below tolerance" &&
                      sol.n_out <= kMaxOuter;
    ok = ok && mono && conv && t < kRunSeconds;
    detail += fmt("N_RF=%.0f: %.0f outer, last rel change %.2e, max drop %.1e, ", nrf, sol.n_out,
                  last, drop) +
              fmt("%.1f s", t) + " (" + sol.stop_reason + "); ";
    runs.push_back(sol);
  }
  report(3, ok, "monotone convergence at rate 5: " + detail +
                    fmt("tol rel %.0e within %.0f outer, %.0f s", kConvergedRel, kMaxOuter, kRunSeconds));
  return runs;
}

void criteria45(const Instance& in) {
  RunConfig cfg;
  const auto rows = sweep_rate(in, cfg);
  bool mono = true, dom = true;
  std::string detail;
  double prev_p = 0.0, prev_d = 0.0;
  double worst_factor = 0.0;
  int feasible = 0;
  for (const auto& r : rows) {
    detail += fmt("R=%.0f %.4e/%.4e; ", r.rate_target, r.pcrb_upper_proposed, r.pcrb_digital);
    if (r.status != "ok") continue;
    ++feasible;
    if (r.pcrb_upper_proposed < prev_p * (1.0 - kSweepRel)) mono = false;
    if (r.pcrb_digital < prev_d * (1.0 - kSweepRel)) mono = false;
    prev_p = r.pcrb_upper_proposed;
    prev_d = r.pcrb_digital;
    if (r.bench1_feasible && r.pcrb_upper_proposed > r.pcrb_bench1) dom = false;
    if (r.bench2_feasible && r.pcrb_upper_proposed > r.pcrb_bench2) dom = false;
    worst_factor = std::max(worst_factor, r.pcrb_upper_proposed / r.pcrb_digital);
  }
  mono = mono && feasible == static_cast<int>(rows.size());
  report(4, mono, "sweep R=1..8 proposed/digital PCRB non-decreasing: " + detail);
  std::string bench;
  for (const auto& r : rows) {
    bench += fmt("R=%.0f b1 %.4e b2 %.4e", r.rate_target, r.pcrb_bench1, r.pcrb_bench2) +
             (r.bench2_feasible ? "" : "(rate unmet)") + "; ";
  }
  report(5, dom && worst_factor <= kDigitalFactor,
         fmt("benchmark dominance at feasible points, worst proposed/digital %.4f (limit %.2f): ",
             worst_factor, kDigitalFactor) +
             bench);
}

void criterion6(const Instance& in, const TradeoffSolution& sol) {
  const int n = 20001;
  std::vector<double> grid(n);
  for (int i = 0; i < n; ++i) grid[i] = -kPi / 2 + kPi * i / (n - 1);
  const auto pat = power_pattern(transmit_covariance(sol.beamformer), grid, in.model.beta0,
                                 in.model.range_m);
  const double top = *std::max_element(pat.begin(), pat.end());
  std::vector<double> anchors;
  for (const auto& c : in.prior.components()) anchors.push_back(c.mean);
  anchors.push_back(Scenario::defaults().channel.user_angle);
  bool ok = true;
  std::string peaks;
  for (int i = 0; i < n; ++i) {
    const bool left = i == 0 || pat[i] > pat[i - 1];
    const bool right = i == n - 1 || pat[i] >= pat[i + 1];
    if (!(left && right) || pat[i] < 0.5 * top) continue;
    double dist = 1e9;
    for (double a : anchors) dist = std::min(dist, std::abs(grid[i] - a));
    ok = ok && dist <= kPeakRad;
    peaks += fmt("%.3f(d=%.3f) ", grid[i], dist);
  }
  report(6, ok, "pattern peaks above half maximum at N_RF=3, rate 5: " + peaks +
                    fmt("(limit %.2f rad)", kPeakRad));
}

void criterion7(const std::vector<TradeoffSolution>& runs) {
  double worst = 0.0;
  std::size_t count = 0;
  for (const auto& s : runs) {
    for (double g : s.wmmse_gap) worst = std::max(worst, g);
    count += s.wmmse_gap.size();
  }
  report(7, worst <= kWmmseBits && count > 0,
         fmt("WMMSE surrogate vs rate over %.0f outer iterations: max gap %.2e bits (tol %.0e)",
             double(count), worst, kWmmseBits));
}

void criterion8(const Instance& in) {
  const Scenario sc = Scenario::defaults();
  const auto fine = sensing_matrices(in.prior, sc.array, in.model, sc.num_symbols,
                                     sc.sensing_noise_w, default_quadrature(128, 24));
  double qa = 0.0;
  for (auto [x, y] : {std::pair{&in.sensing.a1, &fine.a1}, {&in.sensing.a2, &fine.a2},
                      {&in.sensing.a3, &fine.a3}, {&in.sensing.a4, &fine.a4}}) {
    qa = std::max(qa, (*x - *y).norm() / y->norm());
  }

  std::mt19937_64 rng(8);
  double kr = 0.0;
  for (int i = 0; i < 100; ++i) {
    const int nt = 3 + i % 4, nrf = 1 + i % 3;
    const CMatrix f = random_complex(rng, nt, nrf);
    const CMatrix fbb = random_complex(rng, nrf, nrf);
    const CMatrix r = fbb * fbb.adjoint();
    const CMatrix a = random_psd(rng, nt, nt);
    const auto st = wmmse_update(random_complex(rng, 2, nt), f, fbb, 0.3);
    const CVector v = vec(f);
    auto rel = [](cd x, cd y) { return std::abs(x - y) / std::max(1.0, std::abs(y)); };
    kr = std::max({kr, rel(v.dot(kron(r.transpose(), a) * v), (f * r * f.adjoint() * a).trace()),
                   rel(v.dot(kron(r.transpose(), CMatrix::Identity(nt, nt)) * v),
                       (f * r * f.adjoint()).trace()),
                   rel(v.dot(kron(r.transpose(), st.b1) * v),
                       (fbb.adjoint() * f.adjoint() * st.b1 * f * fbb).trace()),
                   rel(st.c.transpose() * v, (st.b2 * f).trace())});
  }

  double coord = -1e300;
  for (int i = 0; i < 100; ++i) {
    const auto c = random_coefficients(rng);
    const cd f = solve_coordinate_subproblem(c, cd(1.0, 0.0));
    const auto ref = disk_grid_max([&](cd z) { return c.objective(z); }, 401);
    coord = std::max(coord, ref.second - c.objective(f));
  }

  double cn = 0.0;
  bool solved = true;
  for (int i = 0; i < 25; ++i) {
    const CMatrix c = random_hermitian(rng, 4);
    const CMatrix d = random_psd(rng, 4, 4) + 0.1 * CMatrix::Identity(4, 4);
    conic::ConicProblem p;
    const auto x = p.add_hermitian(4);
    RVector obj = RVector::Zero(p.num_vars());
    obj.segment(x.offset, x.num_params()) = x.trace_coefficients(c).real();
    p.set_objective(obj, conic::Sense::Maximize);
    p.add_linear_leq(sparse(x.trace_coefficients(CMatrix::Identity(4, 4)).real()), 1.0);
    p.add_linear_leq(sparse(x.trace_coefficients(d).real()), 1.0);
    p.add_psd(x);
    const auto sol = conic::solve_sdp(p);
    solved = solved && sol.report.status == conic::SolveStatus::Optimal;
    const double ref = two_trace_sdp_oracle(c, d);
    cn = std::max(cn, std::abs(sol.report.objective - ref) / std::max(1.0, std::abs(ref)));
  }
  for (int i = 0; i < 25; ++i) {
    const int n = 2 + i % 3;
    const CMatrix c = random_psd(rng, n, n);
    const CMatrix d = random_psd(rng, n, n) + 0.2 * CMatrix::Identity(n, n);
    const CMatrix k = 2.0 * random_complex(rng, 2 + i % 2, n);
    const double b = (0.4 + 0.1 * (i % 5)) * ln_det_plus(k, d.inverse() / double(n));
    conic::ConicProblem p;
    const auto r = p.add_hermitian(n);
    p.set_objective(r.trace_coefficients(c).real(), conic::Sense::Maximize);
    p.add_linear_leq(sparse(r.trace_coefficients(d).real()), 1.0);
    p.add_psd(r);
    p.add_logdet_geq(r.affine(), k, b);
    const auto sol = conic::solve_logdet_program(p);
    solved = solved && sol.report.status == conic::SolveStatus::Optimal;
    const auto ref = waterfill_oracle(c, d, k, b, 1.0);
    cn = std::max(cn, std::abs(sol.report.objective - ref.objective) / std::abs(ref.objective));
  }

  report(8, qa <= kQuadRel && kr <= kKronRel && coord <= kCoordAbs && cn <= kConicRel && solved,
         fmt("oracles: (a) quadrature %.2e (tol %.0e) (b) kronecker %.2e (tol %.0e) ", qa, kQuadRel,
             kr, kKronRel) +
             fmt("(c) coordinate subproblem shortfall %.2e (tol %.0e) (d) conic %.2e (tol %.0e)", coord, kCoordAbs, cn,
                 kConicRel));
}

void criterion9(const Instance& in) {
  const auto t0 = std::chrono::steady_clock::now();
  const PcrbMinResult design = pcrb_min(in, 2, 1.0, 1);
  const McResult mc = empirical_mse(in, design.hybrid, kMcTrials, 1);
  const double t = seconds_since(t0);
  const double floor = mc.pcrb_exact * (1.0 - 3.0 / std::sqrt(double(kMcTrials)));
  report(9, mc.mse >= floor && t < kMcSeconds,
         fmt("Monte-Carlo with %.0f trials: mse %.4e >= %.4e (pcrb %.4e), ", kMcTrials, mc.mse,
             floor, mc.pcrb_exact) +
             fmt("%.1f s (limit %.0f s)", t, kMcSeconds));
}

void criterion10(const Instance& in) {
  const SingleRfResult r = single_rf_design(in.sensing, in.prior, 1.0, 1);
  std::mt19937_64 rng(10);
  double best = 1e300;
  for (int i = 0; i < kRandomBeams; ++i) {
    const CVector f = random_unit_modulus(rng, 12, 1);
    best = std::min(best, pcrb_exact(in.sensing, CMatrix(f * f.adjoint() / 12.0)));
  }
  double drop = 0.0;
  for (std::size_t i = 1; i < r.trace.size(); ++i) {
    drop = std::max(drop, (r.trace[i - 1] - r.trace[i]) / std::abs(r.trace[i - 1]));
  }
  report(10, r.pcrb <= best && drop <= 1e-12,
         fmt("single RF chain: pcrb %.4e vs best random %.4e; max relative trace drop %.1e", r.pcrb,
             best, drop));
}

}  // namespace

int main() {
  const Instance in = build_instance(Scenario::defaults());
  criterion1(in);
  criterion2(in);
  const auto runs = criterion3(in);
  criteria45(in);
  criterion6(in, runs.back());
  criterion7(runs);
  criterion8(in);
  criterion9(in);
  criterion10(in);
  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
