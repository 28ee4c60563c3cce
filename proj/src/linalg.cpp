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

#include "isac/linalg.hpp"

#include <algorithm>

#include <unsupported/Eigen/KroneckerProduct>

namespace isac {

CVector vec(const CMatrix& m) { return Eigen::Map<const CVector>(m.data(), m.size()); }

CMatrix unvec(const CVector& v, Eigen::Index rows, Eigen::Index cols) {
  if (v.size() != rows * cols) throw std::invalid_argument("unvec: size mismatch");
  return Eigen::Map<const CMatrix>(v.data(), rows, cols);
}

CMatrix kron(const CMatrix& a, const CMatrix& b) { return Eigen::kroneckerProduct(a, b).eval(); }

CMatrix hermitian_part(const CMatrix& m) { return 0.5 * (m + m.adjoint()); }

int numerical_rank(const CMatrix& h, double rel_tol) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(h), Eigen::EigenvaluesOnly);
  const double top = es.eigenvalues().cwiseAbs().maxCoeff();
  if (top == 0.0) return 0;
  return static_cast<int>((es.eigenvalues().array() > rel_tol * top).count());
}

CMatrix herm_sqrt(const CMatrix& h) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(h));
  const RVector s = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * s.asDiagonal() * es.eigenvectors().adjoint();
}

CMatrix herm_inv_sqrt(const CMatrix& h) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(h));
  if (!(es.eigenvalues()(0) > 0.0)) throw std::invalid_argument("herm_inv_sqrt: not positive definite");
  const RVector s = es.eigenvalues().cwiseSqrt().cwiseInverse();
  return es.eigenvectors() * s.asDiagonal() * es.eigenvectors().adjoint();
}

CMatrix psd_factor(const CMatrix& r, double rel_tol) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(r));
  const Eigen::Index n = r.rows();
  const double top = std::max(es.eigenvalues()(n - 1), 0.0);
  int k = 0;
  for (Eigen::Index i = n - 1; i >= 0; --i) {
    if (top > 0.0 && es.eigenvalues()(i) > rel_tol * top) ++k;
  }
  CMatrix f(n, k);
  for (int i = 0; i < k; ++i) {
    f.col(i) = es.eigenvectors().col(n - 1 - i) * std::sqrt(es.eigenvalues()(n - 1 - i));
  }
  return f;
}

WaterFilling water_filling(const CMatrix& h, const CMatrix& d, double power, double noise) {
  const CMatrix d_is = herm_inv_sqrt(d);
  const CMatrix hw = h * d_is;
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(hw.adjoint() * hw) / noise);
  const RVector g = es.eigenvalues().cwiseMax(0.0);
  const Eigen::Index n = g.size();

  // Water level over the k strongest modes.
  RVector p = RVector::Zero(n);
  for (Eigen::Index k = n; k >= 1; --k) {
    double inv_sum = 0.0;
    bool usable = true;
    for (Eigen::Index i = n - k; i < n; ++i) {
      if (!(g(i) > 0.0)) { usable = false; break; }
      inv_sum += 1.0 / g(i);
    }
    if (!usable) continue;
    const double level = (power + inv_sum) / static_cast<double>(k);
    if (level - 1.0 / g(n - k) > 0.0) {
      for (Eigen::Index i = n - k; i < n; ++i) p(i) = level - 1.0 / g(i);
      break;
    }
  }
  WaterFilling out;
  const CMatrix v = es.eigenvectors();
  out.covariance = hermitian_part(d_is * v * p.asDiagonal() * v.adjoint() * d_is);
  for (Eigen::Index i = 0; i < n; ++i) out.rate_nats += std::log1p(g(i) * p(i));
  return out;
}

RMatrix real_quadratic(const CMatrix& k) {
  const Eigen::Index n = k.rows();
  const CMatrix h = hermitian_part(k);
  RMatrix q(2 * n, 2 * n);
  q.topLeftCorner(n, n) = h.real();
  q.bottomRightCorner(n, n) = h.real();
  q.topRightCorner(n, n) = -h.imag();
  q.bottomLeftCorner(n, n) = h.imag();
  return q;
}

RVector real_linear(const CVector& c) {
  RVector out(2 * c.size());
  out.head(c.size()) = c.real();
  out.tail(c.size()) = -c.imag();
  return out;
}

RVector to_real(const CVector& v) {
  RVector x(2 * v.size());
  x.head(v.size()) = v.real();
  x.tail(v.size()) = v.imag();
  return x;
}

CVector to_complex(const RVector& x) {
  const Eigen::Index n = x.size() / 2;
  CVector v(n);
  v.real() = x.head(n);
  v.imag() = x.tail(n);
  return v;
}

}  // namespace isac
