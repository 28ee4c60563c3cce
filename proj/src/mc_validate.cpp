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
#include "isac/mc_validate.hpp"

#include <algorithm>
#include <random>
#include <thread>

#include "isac/linalg.hpp"

namespace isac {

namespace {

CMatrix complex_gaussian(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols,
                         double variance) {
  std::normal_distribution<double> n(0.0, std::sqrt(variance / 2.0));
  CMatrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = cd(n(rng), n(rng));
  }
  return m;
}

CMatrix baseband_factor(const HybridBeamformer& b) {
  if (b.f_bb) return *b.f_bb;
  CMatrix f = psd_factor(b.r_bb);
  if (f.cols() == 0) f = CMatrix::Zero(b.n_rf(), 1);
  return f;
}

std::uint64_t trial_seed(std::uint64_t seed, int trial) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(trial), 0x6d63u};
  std::uint32_t out[2];
  seq.generate(out, out + 2);
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

}  // namespace

EchoBatch simulate_echo(const UnknownParams& truth, const HybridBeamformer& b, int n_rx,
                        int num_symbols, double noise, std::uint64_t seed) {
  const CMatrix f_bb = baseband_factor(b);
  const Eigen::Index ns = f_bb.cols();
  if (num_symbols < ns) throw std::invalid_argument("simulate_echo: L must be at least N_S");
  if (noise < 0.0) throw std::invalid_argument("simulate_echo: negative noise");
  std::mt19937_64 rng(seed);

  EchoBatch out;
  const CMatrix raw = complex_gaussian(rng, num_symbols, ns, 1.0);
  Eigen::HouseholderQR<CMatrix> qr(raw);
  const CMatrix q = qr.householderQ() * CMatrix::Identity(num_symbols, ns);
  out.s = std::sqrt(static_cast<double>(num_symbols)) * q.adjoint();
  out.x = b.f_rf * f_bb * out.s;

  const CVector a = steering(truth.theta, b.n_tx());
  const CVector r = steering(truth.theta, n_rx);
  out.y = truth.alpha * r * (a.adjoint() * out.x);
  if (noise > 0.0) out.y += complex_gaussian(rng, n_rx, num_symbols, noise);
  return out;
}

double map_estimate(const EchoBatch& batch, const GaussianMixturePrior& prior, double noise,
                    const MapOptions& opts) {
  if (opts.grid < 3) throw std::invalid_argument("map_estimate: grid needs at least 3 nodes");
  const int nr = static_cast<int>(batch.y.rows());
  const int nt = static_cast<int>(batch.x.rows());
  const CMatrix z = batch.y * batch.x.adjoint();
  const CMatrix p = batch.x * batch.x.adjoint();

  // ||Y||^2 is common to every candidate, so only the explained energy and
  // the prior term enter the score. Without noise the prior only breaks ties.
  struct Score {
    double main, tie;
    bool operator>(const Score& o) const { return main > o.main || (main == o.main && tie > o.tie); }
  };
  auto score = [&](double th) {
    const CVector a = steering(th, nt);
    const CVector r = steering(th, nr);
    const double den = r.squaredNorm() * a.dot(p * a).real();
    const double fit = den > 0.0 ? std::norm(r.dot(z * a)) / den : 0.0;
    const double lp = pdf(prior, th);
    const double log_prior = lp > 0.0 ? std::log(lp) : -1e300;
    if (noise > 0.0) return Score{fit / noise + log_prior, 0.0};
    return Score{fit, log_prior};
  };

  const int n = opts.grid;
  const double lo = -kPi / 2, step = kPi / (n - 1);
  std::vector<Score> vals(n);
  int best = 0;
  for (int i = 0; i < n; ++i) {
    vals[i] = score(lo + step * i);
    if (vals[i] > vals[best]) best = i;
  }
  double theta = lo + step * best;
  if (opts.refine && best > 0 && best < n - 1) {
    const double fm = vals[best - 1].main, f0 = vals[best].main, fp = vals[best + 1].main;
    const double curv = fm - 2.0 * f0 + fp;
    if (curv < 0.0) {
      const double shift = 0.5 * (fm - fp) / curv;
      theta += step * std::clamp(shift, -0.5, 0.5);
    }
  }
  return theta;
}

McResult empirical_mse(const Instance& in, const HybridBeamformer& b, int trials,
                       std::uint64_t seed, const McOptions& opts) {
  if (trials < 100) throw std::invalid_argument("empirical_mse: at least 100 trials");
  const std::vector<double> angles = sample(in.prior, seed, static_cast<std::size_t>(trials));
  std::vector<double> err(trials);

  auto run = [&](int t) {
    const UnknownParams truth{angles[t], in.model.alpha};
    const EchoBatch batch = simulate_echo(truth, b, in.array.n_rx, in.num_symbols,
                                          in.sensing_noise, trial_seed(seed, t));
    err[t] = map_estimate(batch, in.prior, in.sensing_noise, opts.map) - truth.theta;
  };

  int workers = opts.workers > 0 ? opts.workers
                                 : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  workers = std::min(workers, trials);
  if (workers == 1) {
    for (int t = 0; t < trials; ++t) run(t);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (int t = w; t < trials; t += workers) run(t);
      });
    }
    for (auto& th : pool) th.join();
  }

  McResult out;
  out.trials = trials;
  double sum = 0.0, sum_sq = 0.0, sum_e = 0.0;
  for (double e : err) {
    sum_e += e;
    sum += e * e;
    sum_sq += e * e * e * e;
  }
  out.mse = sum / trials;
  out.bias = sum_e / trials;
  const double var = std::max(0.0, sum_sq / trials - out.mse * out.mse);
  out.std_error = std::sqrt(var / trials);
  out.pcrb_exact = pcrb_exact_guarded(in.sensing, transmit_covariance(b)).value;
  return out;
}

}  // namespace isac
