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

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "isac/types.hpp"

// Small dense interior-point layer for the convex subproblems of the
// beamforming optimizers. Problems are posed over a real vector x; complex
// Hermitian matrix variables are parameterized by n^2 reals and Hermitian
// PSD constraints are handled through the real embedding
//   X = A + jB  ->  [[A, -B], [B, A]].
// The solver is a primal log-barrier method (phase I when no strictly
// feasible start is supplied). After exact centering at barrier weight t the
// duality gap is nu / t, which is what SolveReport::dual_bound reports.
namespace isac::conic {

enum class Sense { Minimize, Maximize };
enum class SolveStatus { Optimal, Infeasible, MaxIters };

std::string to_string(SolveStatus s);

struct RealEntry {
  int row;
  int col;
  double value;
};

struct ComplexEntry {
  int row;
  int col;
  cd value;
};

// S(x) = constant + sum_k x[var_k] S_k, real symmetric. Entries of each S_k
// are listed for the full matrix (both triangles).
struct SymmetricAffine {
  RMatrix constant;
  struct Term {
    int var;
    std::vector<RealEntry> entries;
  };
  std::vector<Term> terms;

  int dim() const { return static_cast<int>(constant.rows()); }
  RMatrix evaluate(const RVector& x) const;
};

// X(x) = constant + sum_k x[var_k] X_k, complex Hermitian.
struct HermitianAffine {
  CMatrix constant;
  struct Term {
    int var;
    std::vector<ComplexEntry> entries;
  };
  std::vector<Term> terms;

  int dim() const { return static_cast<int>(constant.rows()); }
  CMatrix evaluate(const RVector& x) const;
  // Adds coefficient * E to the term of `var` (entry (row, col) only).
  void add(int var, int row, int col, cd coefficient);
};

// Standard real embedding of a Hermitian matrix and its inverse.
RMatrix embed(const CMatrix& h);
CMatrix unembed(const RMatrix& s);
SymmetricAffine embed(const HermitianAffine& h);

// n x n Hermitian matrix variable occupying n^2 consecutive reals starting at
// `offset`: first the n diagonal entries, then (re, im) of each strictly
// upper entry (p, q), p < q, in row-major order.
struct HermitianVar {
  int offset = 0;
  int n = 0;

  int num_params() const { return n * n; }
  HermitianAffine affine() const;
  // coef_i = tr(C E_i), so tr(C X(x)) = sum_i coef_i x_i.
  CVector trace_coefficients(const CMatrix& c) const;
  CMatrix value(const RVector& x) const;
  void assign(RVector& x, const CMatrix& value) const;
};

class ConicProblem {
 public:
  int num_vars() const { return num_vars_; }

  // Appends n free real variables, returning the first index.
  int add_variables(int n);
  HermitianVar add_hermitian(int n);

  void set_objective(RVector c, Sense sense, double constant = 0.0);

  // a^T x <= b (sparse a).
  void add_linear_leq(std::vector<std::pair<int, double>> a, double b);
  void add_linear_geq(std::vector<std::pair<int, double>> a, double b);
  void add_nonnegative(int var);
  void add_equality(std::vector<std::pair<int, double>> a, double b);

  // x_S^T Q x_S + q^T x_S + q0 <= 0 over the listed support; Q PSD.
  void add_quadratic_leq(std::vector<int> support, RMatrix q_mat, RVector q, double q0);

  // || M x_S + m || <= g^T x_S + h.
  void add_soc(std::vector<int> support, RMatrix m_mat, RVector m, RVector g, double h);

  void add_lmi(SymmetricAffine s);
  void add_hermitian_lmi(const HermitianAffine& h) { add_lmi(embed(h)); }
  void add_psd(const HermitianVar& v) { add_hermitian_lmi(v.affine()); }

  // ln det(I + K X(x) K^H) + l^T x >= bound, natural log. K is p x n where n
  // is the dimension of X.
  void add_logdet_geq(HermitianAffine x, CMatrix k, double bound,
                      std::vector<std::pair<int, double>> linear = {});

  void set_initial_point(RVector x0) { initial_ = std::move(x0); }

  // Construct counts, used by the entry points to validate the problem class.
  std::size_t num_lmi() const { return lmis_.size(); }
  std::size_t num_soc() const { return socs_.size() + quads_.size(); }
  std::size_t num_logdet() const { return logdets_.size(); }

  // Internal representation, public for the solver implementation.
  struct Linear {
    std::vector<std::pair<int, double>> a;
    double b;
  };
  struct Quadratic {
    std::vector<int> support;
    RMatrix q_mat;
    RVector q;
    double q0;
  };
  struct Soc {
    std::vector<int> support;
    RMatrix m_mat;
    RVector m;
    RVector g;
    double h;
    RMatrix mtm;
  };
  struct LogDet {
    HermitianAffine x;
    CMatrix k;
    double bound;
    std::vector<std::pair<int, double>> linear;
  };

  int num_vars_ = 0;
  RVector objective_;
  double objective_constant_ = 0.0;
  Sense sense_ = Sense::Minimize;
  std::vector<Linear> linears_;
  std::vector<Linear> equalities_;
  std::vector<Quadratic> quads_;
  std::vector<Soc> socs_;
  std::vector<SymmetricAffine> lmis_;
  std::vector<LogDet> logdets_;
  std::optional<RVector> initial_;
};

struct SolveOptions {
  double gap_rel = 1e-9;
  double gap_abs = 1e-12;
  double barrier_growth = 20.0;
  double centering_tol = 1e-10;  // Newton decrement^2 / 2
  int max_newton = 2000;
};

struct SolveReport {
  SolveStatus status = SolveStatus::MaxIters;
  double objective = 0.0;       // in the caller's sense
  double dual_bound = 0.0;      // >= objective for Maximize, <= for Minimize
  double max_violation = 0.0;
  double kkt_residual = 0.0;
  int iterations = 0;           // Newton steps, phase I included
  std::string message;
};

struct ConicSolution {
  RVector x;
  SolveReport report;
};

// Affine, trace and Hermitian PSD constructs only.
ConicSolution solve_sdp(const ConicProblem& problem, const SolveOptions& opts = {});
// Second-order cone, convex quadratic, affine and nonnegativity constructs.
ConicSolution solve_socp(const ConicProblem& problem, const SolveOptions& opts = {});
// One log-det lower bound plus PSD/affine/trace constructs.
ConicSolution solve_logdet_program(const ConicProblem& problem, const SolveOptions& opts = {});
// Any mix of the above.
ConicSolution solve(const ConicProblem& problem, const SolveOptions& opts = {});

}  // namespace isac::conic
