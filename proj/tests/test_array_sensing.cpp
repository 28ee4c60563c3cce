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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "isac/array_sensing.hpp"
#include "test_support.hpp"

using namespace isac;
using isac::testing::reference_prior;

namespace {

double max_abs(const CMatrix& m) { return m.cwiseAbs().maxCoeff(); }

SensingMatrices reference_matrices(const QuadratureRule& q) {
  const auto model = ReflectionModel::from_snr_ratio(db_to_linear(-5.0), 1.0, 64, 1e-12);
  return sensing_matrices(reference_prior(), ArrayConfig{}, model, 64, 1e-12, q);
}

}  // namespace

TEST_CASE("steering vectors") {
  CHECK(max_abs(steering(0.0, 4) - CVector::Ones(4)) < 1e-15);
  CHECK(steering(0.7, 12).squaredNorm() == doctest::Approx(12.0));
  const CVector a = steering(kPi / 6, 2);
  CHECK(std::abs(a(0) - std::polar(1.0, -kPi / 4)) < 1e-15);
  CHECK(std::abs(a(1) - std::polar(1.0, kPi / 4)) < 1e-15);
  for (int i = 0; i < 12; ++i) CHECK(std::abs(std::abs(steering(-1.1, 12)(i)) - 1.0) < 1e-15);
}

TEST_CASE("steering derivative") {
  const CVector d = steering_deriv(0.0, 3);
  CHECK(std::abs(d(0) - cd(0, -kPi)) < 1e-14);
  CHECK(std::abs(d(1)) < 1e-14);
  CHECK(std::abs(d(2) - cd(0, kPi)) < 1e-14);
  CHECK(steering_deriv(kPi / 2, 5).norm() < 1e-14);

  const double h = 1e-6;
  const CVector fd = (steering(0.3 + h, 12) - steering(0.3 - h, 12)) / (2 * h);
  const CVector an = steering_deriv(0.3, 12);
  CHECK((fd - an).norm() < 1e-5 * an.norm());
  for (int n : {3, 8, 12, 14}) CHECK(std::abs(steering(0.0, n).dot(steering_deriv(0.0, n))) < 1e-12);
}

TEST_CASE("target response") {
  ReflectionModel m;
  m.alpha = 1.0;
  CHECK(max_abs(target_response(0.0, m, {12, 14}) - CMatrix::Ones(14, 12)) < 1e-14);
  m.alpha = cd(0.5, 0.5);
  const CMatrix g = target_response(0.4, m, {12, 14});
  CHECK(g.squaredNorm() == doctest::Approx(84.0).epsilon(1e-13));
  Eigen::JacobiSVD<CMatrix> svd(g);
  CHECK(svd.singularValues()(1) < 1e-12 * svd.singularValues()(0));
}

TEST_CASE("reflection model from the SNR ratio") {
  const auto m = ReflectionModel::from_snr_ratio(db_to_linear(-5.0), 1.0, 64, 1e-12, 0.4);
  CHECK(1.0 * std::norm(m.alpha) * 64 / 1e-12 == doctest::Approx(db_to_linear(-5.0)).epsilon(1e-12));
  CHECK(std::arg(m.alpha) == doctest::Approx(0.4));
}

TEST_CASE("sensing matrix invariants") {
  const auto s = reference_matrices(default_quadrature());
  for (const CMatrix* a : {&s.a1, &s.a2, &s.a4}) {
    CHECK(max_abs(*a - a->adjoint()) < 1e-12 * max_abs(*a));
    Eigen::SelfAdjointEigenSolver<CMatrix> es(*a);
    CHECK(es.eigenvalues()(0) > -1e-10 * es.eigenvalues().maxCoeff());
  }
  CHECK(s.a4.trace().real() == doctest::Approx(14.0 * 12.0).epsilon(1e-8));
  CHECK(s.noise_scale == doctest::Approx(1.0 / (2.0 * db_to_linear(-5.0))).epsilon(1e-12));

  std::mt19937_64 rng(3);
  for (int i = 0; i < 200; ++i) {
    const CMatrix r = isac::testing::random_psd(rng, 12, 1 + i % 12);
    const double t2 = (s.a2 * r).trace().real();
    const double t4 = (s.a4 * r).trace().real();
    const double t3 = std::norm((s.a3 * r).trace());
    CHECK(t2 * t4 - t3 >= -1e-9 * t2 * t4);
  }
}

TEST_CASE("trace of A1 against a scalar integral") {
  const auto s = reference_matrices(default_quadrature());
  // Composite Simpson on a uniform grid, independent of the Gauss rule.
  const auto prior = reference_prior();
  const int m = 200000;
  const double h = kPi / m;
  double acc = 0.0;
  for (int i = 0; i <= m; ++i) {
    const double th = -kPi / 2 + i * h;
    const double w = (i == 0 || i == m) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    acc += w * kPi * kPi * std::cos(th) * std::cos(th) / 4.0 * 910.0 * pdf(prior, th);
  }
  acc *= h / 3.0;
  CHECK(s.a1.trace().real() == doctest::Approx(12.0 * acc).epsilon(1e-9));
}

TEST_CASE("point-mass prior collapses A4") {
  const double th0 = 0.25;
  GaussianMixturePrior point({{1.0, th0, 1e-10}});
  QuadratureRule q;
  for (auto part : {gauss_legendre(-kPi / 2, th0 - 1e-3, 16, 16), gauss_legendre(th0 - 1e-3, th0 + 1e-3, 64, 16),
                    gauss_legendre(th0 + 1e-3, kPi / 2, 16, 16)}) {
    q.nodes.insert(q.nodes.end(), part.nodes.begin(), part.nodes.end());
    q.weights.insert(q.weights.end(), part.weights.begin(), part.weights.end());
  }
  q.lo = -kPi / 2;
  q.hi = kPi / 2;
  ReflectionModel m;
  const auto s = sensing_matrices(point, {12, 14}, m, 64, 1.0, q);
  const CVector a = steering(th0, 12);
  CHECK(max_abs(s.a4 - 14.0 * a * a.adjoint()) < 1e-6);
}

TEST_CASE("assembly is converged in the quadrature resolution") {
  const auto s1 = reference_matrices(default_quadrature(64, 16));
  const auto s2 = reference_matrices(default_quadrature(128, 16));
  CHECK((s1.a1 - s2.a1).norm() < 1e-8 * s2.a1.norm());
  CHECK((s1.a2 - s2.a2).norm() < 1e-8 * s2.a2.norm());
  CHECK((s1.a3 - s2.a3).norm() < 1e-8 * s2.a3.norm());
  CHECK((s1.a4 - s2.a4).norm() < 1e-8 * s2.a4.norm());
}

TEST_CASE("quadrature must cover the angle domain") {
  ReflectionModel m;
  CHECK_THROWS_AS(sensing_matrices(reference_prior(), {}, m, 64, 1.0, gauss_legendre(-1.0, 1.0, 8, 8)),
                  QuadratureDomainError);
}
