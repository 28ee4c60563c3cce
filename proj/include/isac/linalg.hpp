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

#include "isac/types.hpp"

namespace isac {

// Column-major vectorization and its inverse.
CVector vec(const CMatrix& m);
CMatrix unvec(const CVector& v, Eigen::Index rows, Eigen::Index cols);

CMatrix kron(const CMatrix& a, const CMatrix& b);

CMatrix hermitian_part(const CMatrix& m);

// Number of eigenvalues above rel_tol * lambda_max.
int numerical_rank(const CMatrix& h, double rel_tol = 1e-8);

// Square root and inverse square root of a Hermitian positive definite matrix.
CMatrix herm_sqrt(const CMatrix& h);
CMatrix herm_inv_sqrt(const CMatrix& h);

// Factor F with F F^H = R from the eigendecomposition, keeping the columns of
// the numerically nonzero eigenvalues (largest first).
CMatrix psd_factor(const CMatrix& r, double rel_tol = 1e-8);

struct WaterFilling {
  CMatrix covariance;
  double rate_nats = 0.0;
};

// Capacity-achieving covariance of ln|I + H R H^H / noise| subject to
// tr(D R) <= power, D Hermitian positive definite.
WaterFilling water_filling(const CMatrix& h, const CMatrix& d, double power, double noise);

// Real representation of complex vectors x = [Re v; Im v]. For Hermitian K,
// v^H K v = x^T real_quadratic(K) x, and Re(c^T v) = real_linear(c)^T x.
RMatrix real_quadratic(const CMatrix& k);
RVector real_linear(const CVector& c);
RVector to_real(const CVector& v);
CVector to_complex(const RVector& x);

}  // namespace isac
