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

#include "isac/conic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace isac::conic {

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::MaxIters: return "max_iters";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// Affine matrix maps and the real embedding

RMatrix SymmetricAffine::evaluate(const RVector& x) const {
  RMatrix out = constant;
  for (const auto& t : terms) {
    const double xv = x(t.var);
    if (xv == 0.0) continue;
    for (const auto& e : t.entries) out(e.row, e.col) += xv * e.value;
  }
  return out;
}

CMatrix HermitianAffine::evaluate(const RVector& x) const {
  CMatrix out = constant;
  for (const auto& t : terms) {
    const double xv = x(t.var);
    if (xv == 0.0) continue;
    for (const auto& e : t.entries) out(e.row, e.col) += xv * e.value;
  }
  return out;
}

void HermitianAffine::add(int var, int row, int col, cd coefficient) {
  if (coefficient == cd(0.0, 0.0)) return;
  for (auto& t : terms) {
    if (t.var == var) {
      t.entries.push_back({row, col, coefficient});
      return;
    }
  }
  terms.push_back({var, {{row, col, coefficient}}});
}

RMatrix embed(const CMatrix& h) {
  const Eigen::Index n = h.rows();
  RMatrix s(2 * n, 2 * n);
  s.topLeftCorner(n, n) = h.real();
  s.bottomRightCorner(n, n) = h.real();
  s.topRightCorner(n, n) = -h.imag();
  s.bottomLeftCorner(n, n) = h.imag();
  return s;
}

CMatrix unembed(const RMatrix& s) {
  const Eigen::Index n = s.rows() / 2;
  CMatrix h(n, n);
  h.real() = 0.5 * (s.topLeftCorner(n, n) + s.bottomRightCorner(n, n));
  h.imag() = 0.5 * (s.bottomLeftCorner(n, n) - s.topRightCorner(n, n));
  return h;
}

SymmetricAffine embed(const HermitianAffine& h) {
  const int n = h.dim();
  SymmetricAffine s;
  s.constant = embed(h.constant);
  for (const auto& t : h.terms) {
    SymmetricAffine::Term rt{t.var, {}};
    rt.entries.reserve(4 * t.entries.size());
    for (const auto& e : t.entries) {
      const double re = e.value.real();
      const double im = e.value.imag();
      if (re != 0.0) {
        rt.entries.push_back({e.row, e.col, re});
        rt.entries.push_back({e.row + n, e.col + n, re});
      }
      if (im != 0.0) {
        rt.entries.push_back({e.row, e.col + n, -im});
        rt.entries.push_back({e.row + n, e.col, im});
      }
    }
    s.terms.push_back(std::move(rt));
  }
  return s;
}

// ---------------------------------------------------------------------------
// Hermitian variables

HermitianAffine HermitianVar::affine() const {
  HermitianAffine h;
  h.constant = CMatrix::Zero(n, n);
  for (int p = 0; p < n; ++p) h.terms.push_back({offset + p, {{p, p, cd(1.0, 0.0)}}});
  int k = 0;
  for (int p = 0; p < n; ++p) {
    for (int q = p + 1; q < n; ++q, ++k) {
      h.terms.push_back({offset + n + 2 * k, {{p, q, cd(1.0, 0.0)}, {q, p, cd(1.0, 0.0)}}});
      h.terms.push_back({offset + n + 2 * k + 1, {{p, q, kJ}, {q, p, -kJ}}});
    }
  }
  return h;
}

CVector HermitianVar::trace_coefficients(const CMatrix& c) const {
  CVector coef(num_params());
  for (int p = 0; p < n; ++p) coef(p) = c(p, p);
  int k = 0;
  for (int p = 0; p < n; ++p) {
    for (int q = p + 1; q < n; ++q, ++k) {
      coef(n + 2 * k) = c(q, p) + c(p, q);
      coef(n + 2 * k + 1) = kJ * c(q, p) - kJ * c(p, q);
    }
  }
  return coef;
}

CMatrix HermitianVar::value(const RVector& x) const {
  CMatrix v(n, n);
  for (int p = 0; p < n; ++p) v(p, p) = x(offset + p);
  int k = 0;
  for (int p = 0; p < n; ++p) {
    for (int q = p + 1; q < n; ++q, ++k) {
      const cd z(x(offset + n + 2 * k), x(offset + n + 2 * k + 1));
      v(p, q) = z;
      v(q, p) = std::conj(z);
    }
  }
  return v;
}

void HermitianVar::assign(RVector& x, const CMatrix& value) const {
  for (int p = 0; p < n; ++p) x(offset + p) = value(p, p).real();
  int k = 0;
  for (int p = 0; p < n; ++p) {
    for (int q = p + 1; q < n; ++q, ++k) {
      x(offset + n + 2 * k) = value(p, q).real();
      x(offset + n + 2 * k + 1) = value(p, q).imag();
    }
  }
}

// ---------------------------------------------------------------------------
// Problem builder

int ConicProblem::add_variables(int n) {
  const int first = num_vars_;
  num_vars_ += n;
  objective_.conservativeResize(num_vars_);
  objective_.tail(n).setZero();
  return first;
}

HermitianVar ConicProblem::add_hermitian(int n) {
  HermitianVar v;
  v.n = n;
  v.offset = add_variables(n * n);
  return v;
}

void ConicProblem::set_objective(RVector c, Sense sense, double constant) {
  if (c.size() != num_vars_) throw std::invalid_argument("set_objective: size mismatch");
  objective_ = std::move(c);
  sense_ = sense;
  objective_constant_ = constant;
}

void ConicProblem::add_linear_leq(std::vector<std::pair<int, double>> a, double b) {
  linears_.push_back({std::move(a), b});
}

void ConicProblem::add_linear_geq(std::vector<std::pair<int, double>> a, double b) {
  for (auto& [i, v] : a) v = -v;
  linears_.push_back({std::move(a), -b});
}

void ConicProblem::add_nonnegative(int var) { linears_.push_back({{{var, -1.0}}, 0.0}); }

void ConicProblem::add_equality(std::vector<std::pair<int, double>> a, double b) {
  equalities_.push_back({std::move(a), b});
}

void ConicProblem::add_quadratic_leq(std::vector<int> support, RMatrix q_mat, RVector q,
                                     double q0) {
  const auto k = static_cast<Eigen::Index>(support.size());
  if (q_mat.rows() != k || q_mat.cols() != k || q.size() != k) {
    throw std::invalid_argument("add_quadratic_leq: dimension mismatch");
  }
  quads_.push_back({std::move(support), 0.5 * (q_mat + q_mat.transpose()), std::move(q), q0});
}

void ConicProblem::add_soc(std::vector<int> support, RMatrix m_mat, RVector m, RVector g,
                           double h) {
  const auto k = static_cast<Eigen::Index>(support.size());
  if (m_mat.cols() != k || m.size() != m_mat.rows() || g.size() != k) {
    throw std::invalid_argument("add_soc: dimension mismatch");
  }
  RMatrix mtm = m_mat.transpose() * m_mat;
  socs_.push_back({std::move(support), std::move(m_mat), std::move(m), std::move(g), h,
                   std::move(mtm)});
}

namespace {

// Combines duplicate variables and drops zero coefficients.
template <typename Term>
std::vector<Term> merge_terms(const std::vector<Term>& terms) {
  std::map<int, Term> by_var;
  for (const auto& t : terms) {
    auto [it, inserted] = by_var.try_emplace(t.var, Term{t.var, {}});
    for (const auto& e : t.entries) {
      bool merged = false;
      for (auto& f : it->second.entries) {
        if (f.row == e.row && f.col == e.col) {
          f.value += e.value;
          merged = true;
          break;
        }
      }
      if (!merged) it->second.entries.push_back(e);
    }
  }
  std::vector<Term> out;
  for (auto& [var, t] : by_var) {
    using V = decltype(t.entries.front().value);
    std::erase_if(t.entries, [](const auto& e) { return e.value == V{}; });
    if (!t.entries.empty()) out.push_back(std::move(t));
  }
  return out;
}

}  // namespace

void ConicProblem::add_lmi(SymmetricAffine s) {
  s.terms = merge_terms(s.terms);
  lmis_.push_back(std::move(s));
}

void ConicProblem::add_logdet_geq(HermitianAffine x, CMatrix k, double bound,
                                  std::vector<std::pair<int, double>> linear) {
  if (k.cols() != x.dim()) throw std::invalid_argument("add_logdet_geq: K columns != dim X");
  x.terms = merge_terms(x.terms);
  logdets_.push_back({std::move(x), std::move(k), bound, std::move(linear)});
}

// ---------------------------------------------------------------------------
// Barrier evaluation

namespace {

double sparse_dot(const std::vector<std::pair<int, double>>& a, const RVector& x) {
  double acc = 0.0;
  for (const auto& [i, v] : a) acc += v * x(i);
  return acc;
}

RVector gather(const RVector& x, const std::vector<int>& idx) {
  RVector out(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) out(i) = x(idx[i]);
  return out;
}

class Barrier {
 public:
  explicit Barrier(const ConicProblem& p) : p_(p) {}

  double nu() const {
    double nu = static_cast<double>(p_.linears_.size() + p_.quads_.size() + p_.logdets_.size());
    nu += 2.0 * p_.socs_.size();
    for (const auto& l : p_.lmis_) nu += l.dim();
    return nu;
  }

  // Barrier value; nullopt outside the domain.
  std::optional<double> value(const RVector& x) const {
    double phi = 0.0;
    for (const auto& l : p_.linears_) {
      const double s = l.b - sparse_dot(l.a, x);
      if (!(s > 0.0)) return std::nullopt;
      phi -= std::log(s);
    }
    for (const auto& q : p_.quads_) {
      const RVector xs = gather(x, q.support);
      const double s = -(xs.dot(q.q_mat * xs) + q.q.dot(xs) + q.q0);
      if (!(s > 0.0)) return std::nullopt;
      phi -= std::log(s);
    }
    for (const auto& c : p_.socs_) {
      const RVector xs = gather(x, c.support);
      const double u = c.g.dot(xs) + c.h;
      const double d = u * u - (c.m_mat * xs + c.m).squaredNorm();
      if (!(u > 0.0) || !(d > 0.0)) return std::nullopt;
      phi -= std::log(d);
    }
    for (const auto& l : p_.lmis_) {
      Eigen::LLT<RMatrix> llt(l.evaluate(x));
      if (llt.info() != Eigen::Success) return std::nullopt;
      const auto& m = llt.matrixLLT();
      double ld = 0.0;
      for (Eigen::Index i = 0; i < m.rows(); ++i) {
        if (!(m(i, i) > 0.0)) return std::nullopt;
        ld += std::log(m(i, i));
      }
      phi -= 2.0 * ld;
    }
    for (const auto& d : p_.logdets_) {
      const auto psi = logdet_value(d, x);
      if (!psi || !(*psi > 0.0)) return std::nullopt;
      phi -= std::log(*psi);
    }
    return phi;
  }

  // Gradient and Hessian at a point inside the domain.
  void derivatives(const RVector& x, RVector& g, RMatrix& h) const {
    const Eigen::Index n = x.size();
    g.setZero(n);
    h.setZero(n, n);
    for (const auto& l : p_.linears_) {
      const double s = l.b - sparse_dot(l.a, x);
      for (const auto& [i, vi] : l.a) {
        g(i) += vi / s;
        for (const auto& [j, vj] : l.a) h(i, j) += vi * vj / (s * s);
      }
    }
    for (const auto& q : p_.quads_) {
      const RVector xs = gather(x, q.support);
      const double s = -(xs.dot(q.q_mat * xs) + q.q.dot(xs) + q.q0);
      const RVector df = 2.0 * q.q_mat * xs + q.q;
      const auto k = q.support.size();
      for (std::size_t a = 0; a < k; ++a) {
        g(q.support[a]) += df(a) / s;
        for (std::size_t b = 0; b < k; ++b) {
          h(q.support[a], q.support[b]) += df(a) * df(b) / (s * s) + 2.0 * q.q_mat(a, b) / s;
        }
      }
    }
    for (const auto& c : p_.socs_) {
      const RVector xs = gather(x, c.support);
      const double u = c.g.dot(xs) + c.h;
      const RVector w = c.m_mat * xs + c.m;
      const double d = u * u - w.squaredNorm();
      const RVector dd = 2.0 * u * c.g - 2.0 * c.m_mat.transpose() * w;
      const auto k = c.support.size();
      for (std::size_t a = 0; a < k; ++a) {
        g(c.support[a]) -= dd(a) / d;
        for (std::size_t b = 0; b < k; ++b) {
          const double d2 = 2.0 * c.g(a) * c.g(b) - 2.0 * c.mtm(a, b);
          h(c.support[a], c.support[b]) += dd(a) * dd(b) / (d * d) - d2 / d;
        }
      }
    }
    for (const auto& l : p_.lmis_) lmi_derivatives(l, x, g, h);
    for (const auto& d : p_.logdets_) logdet_derivatives(d, x, g, h);
  }

 private:
  static void lmi_derivatives(const SymmetricAffine& l, const RVector& x, RVector& g,
                              RMatrix& h) {
    const int m = l.dim();
    Eigen::LLT<RMatrix> llt(l.evaluate(x));
    const RMatrix s = llt.solve(RMatrix::Identity(m, m));
    // P_j = S F_j S; then H_ij = tr(S F_i S F_j) = sum_{(a,b,v) in F_i} v P_j(b, a).
    std::vector<RMatrix> proj(l.terms.size());
    for (std::size_t j = 0; j < l.terms.size(); ++j) {
      const auto& t = l.terms[j];
      RMatrix pj = RMatrix::Zero(m, m);
      double gj = 0.0;
      for (const auto& e : t.entries) {
        pj.noalias() += e.value * s.col(e.row) * s.row(e.col);
        gj += e.value * s(e.col, e.row);
      }
      g(t.var) -= gj;
      proj[j] = std::move(pj);
    }
    for (std::size_t i = 0; i < l.terms.size(); ++i) {
      const auto& ti = l.terms[i];
      for (std::size_t j = i; j < l.terms.size(); ++j) {
        double acc = 0.0;
        for (const auto& e : ti.entries) acc += e.value * proj[j](e.col, e.row);
        h(ti.var, l.terms[j].var) += acc;
        if (j != i) h(l.terms[j].var, ti.var) += acc;
      }
    }
  }

  static std::optional<double> logdet_value(const ConicProblem::LogDet& d, const RVector& x) {
    const CMatrix xv = d.x.evaluate(x);
    CMatrix gm = CMatrix::Identity(d.k.rows(), d.k.rows()) + d.k * xv * d.k.adjoint();
    gm = 0.5 * (gm + gm.adjoint());
    Eigen::LLT<CMatrix> llt(gm);
    if (llt.info() != Eigen::Success) return std::nullopt;
    const auto& lm = llt.matrixLLT();
    double ld = 0.0;
    for (Eigen::Index i = 0; i < lm.rows(); ++i) {
      if (!(lm(i, i).real() > 0.0)) return std::nullopt;
      ld += 2.0 * std::log(lm(i, i).real());
    }
    return ld + sparse_dot(d.linear, x) - d.bound;
  }

  static void logdet_derivatives(const ConicProblem::LogDet& d, const RVector& x, RVector& g,
                                 RMatrix& h) {
    const double psi = *logdet_value(d, x);
    const CMatrix xv = d.x.evaluate(x);
    CMatrix gm = CMatrix::Identity(d.k.rows(), d.k.rows()) + d.k * xv * d.k.adjoint();
    gm = 0.5 * (gm + gm.adjoint());
    Eigen::LLT<CMatrix> llt(gm);
    CMatrix gamma = d.k.adjoint() * llt.solve(d.k);
    gamma = 0.5 * (gamma + gamma.adjoint());

    // Gradient of psi over all variables touched (X terms and the linear part).
    std::map<int, double> dpsi;
    std::vector<CMatrix> proj(d.x.terms.size());
    for (std::size_t j = 0; j < d.x.terms.size(); ++j) {
      const auto& t = d.x.terms[j];
      CMatrix pj = CMatrix::Zero(gamma.rows(), gamma.cols());
      cd gj = 0.0;
      for (const auto& e : t.entries) {
        pj.noalias() += e.value * gamma.col(e.row) * gamma.row(e.col);
        gj += e.value * gamma(e.col, e.row);
      }
      dpsi[t.var] += gj.real();
      proj[j] = std::move(pj);
    }
    for (const auto& [i, v] : d.linear) dpsi[i] += v;

    for (const auto& [i, v] : dpsi) g(i) -= v / psi;
    for (const auto& [i, vi] : dpsi) {
      for (const auto& [j, vj] : dpsi) h(i, j) += vi * vj / (psi * psi);
    }
    // -hess(psi) / psi with hess(psi)_ij = -Re tr(Gamma X_i Gamma X_j).
    for (std::size_t i = 0; i < d.x.terms.size(); ++i) {
      const auto& ti = d.x.terms[i];
      for (std::size_t j = i; j < d.x.terms.size(); ++j) {
        cd acc = 0.0;
        for (const auto& e : ti.entries) acc += e.value * proj[j](e.col, e.row);
        const double v = acc.real() / psi;
        h(ti.var, d.x.terms[j].var) += v;
        if (j != i) h(d.x.terms[j].var, ti.var) += v;
      }
    }
  }

  const ConicProblem& p_;
};

// Positive when the constraint is violated at x.
double max_violation(const ConicProblem& p, const RVector& x) {
  double worst = 0.0;
  for (const auto& l : p.linears_) worst = std::max(worst, sparse_dot(l.a, x) - l.b);
  for (const auto& e : p.equalities_) worst = std::max(worst, std::abs(sparse_dot(e.a, x) - e.b));
  for (const auto& q : p.quads_) {
    const RVector xs = gather(x, q.support);
    worst = std::max(worst, xs.dot(q.q_mat * xs) + q.q.dot(xs) + q.q0);
  }
  for (const auto& c : p.socs_) {
    const RVector xs = gather(x, c.support);
    worst = std::max(worst, (c.m_mat * xs + c.m).norm() - (c.g.dot(xs) + c.h));
  }
  for (const auto& l : p.lmis_) {
    Eigen::SelfAdjointEigenSolver<RMatrix> es(l.evaluate(x), Eigen::EigenvaluesOnly);
    worst = std::max(worst, -es.eigenvalues()(0));
  }
  for (const auto& d : p.logdets_) {
    const CMatrix xv = d.x.evaluate(x);
    CMatrix gm = CMatrix::Identity(d.k.rows(), d.k.rows()) + d.k * xv * d.k.adjoint();
    Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (gm + gm.adjoint()), Eigen::EigenvaluesOnly);
    if (es.eigenvalues()(0) <= 0.0) return std::numeric_limits<double>::infinity();
    double ld = 0.0;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) ld += std::log(es.eigenvalues()(i));
    worst = std::max(worst, d.bound - ld - sparse_dot(d.linear, x));
  }
  return worst;
}

// Amount of relaxation s needed for x to be strictly inside every
// constraint relaxed by s (phase I). nullopt if x violates a domain
// condition that s cannot relax (log-det argument not positive definite).
std::optional<double> required_relaxation(const ConicProblem& p, const RVector& x) {
  double need = -std::numeric_limits<double>::infinity();
  for (const auto& l : p.linears_) need = std::max(need, sparse_dot(l.a, x) - l.b);
  for (const auto& q : p.quads_) {
    const RVector xs = gather(x, q.support);
    need = std::max(need, xs.dot(q.q_mat * xs) + q.q.dot(xs) + q.q0);
  }
  for (const auto& c : p.socs_) {
    const RVector xs = gather(x, c.support);
    need = std::max(need, (c.m_mat * xs + c.m).norm() - (c.g.dot(xs) + c.h));
  }
  for (const auto& l : p.lmis_) {
    Eigen::SelfAdjointEigenSolver<RMatrix> es(l.evaluate(x), Eigen::EigenvaluesOnly);
    need = std::max(need, -es.eigenvalues()(0));
  }
  for (const auto& d : p.logdets_) {
    const CMatrix xv = d.x.evaluate(x);
    CMatrix gm = CMatrix::Identity(d.k.rows(), d.k.rows()) + d.k * xv * d.k.adjoint();
    Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (gm + gm.adjoint()), Eigen::EigenvaluesOnly);
    if (es.eigenvalues()(0) <= 0.0) return std::nullopt;
    double ld = 0.0;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) ld += std::log(es.eigenvalues()(i));
    need = std::max(need, d.bound - ld - sparse_dot(d.linear, x));
  }
  return need;
}

// Phase I: minimize s subject to every inequality relaxed by s, s >= floor,
// inside a box around x0 that keeps the barrier bounded below.
ConicProblem make_phase1(const ConicProblem& p, double floor, const RVector& x0) {
  ConicProblem q;
  q.num_vars_ = p.num_vars_ + 1;
  const int s = p.num_vars_;
  q.objective_ = RVector::Zero(q.num_vars_);
  q.objective_(s) = 1.0;
  q.sense_ = Sense::Minimize;
  q.equalities_ = p.equalities_;
  for (auto l : p.linears_) {
    l.a.emplace_back(s, -1.0);
    q.linears_.push_back(std::move(l));
  }
  q.linears_.push_back({{{s, -1.0}}, -floor});
  const double box = 1e4 * std::max(1.0, x0.cwiseAbs().maxCoeff());
  for (int i = 0; i < p.num_vars_; ++i) {
    q.linears_.push_back({{{i, 1.0}}, x0(i) + box});
    q.linears_.push_back({{{i, -1.0}}, -x0(i) + box});
  }
  for (auto c : p.quads_) {
    c.support.push_back(s);
    const auto k = static_cast<Eigen::Index>(c.support.size());
    RMatrix qm = RMatrix::Zero(k, k);
    qm.topLeftCorner(k - 1, k - 1) = c.q_mat;
    c.q_mat = std::move(qm);
    c.q.conservativeResize(k);
    c.q(k - 1) = -1.0;
    q.quads_.push_back(std::move(c));
  }
  for (auto c : p.socs_) {
    c.support.push_back(s);
    const auto k = static_cast<Eigen::Index>(c.support.size());
    c.m_mat.conservativeResize(Eigen::NoChange, k);
    c.m_mat.col(k - 1).setZero();
    c.g.conservativeResize(k);
    c.g(k - 1) = 1.0;
    c.mtm = c.m_mat.transpose() * c.m_mat;
    q.socs_.push_back(std::move(c));
  }
  for (auto l : p.lmis_) {
    SymmetricAffine::Term t{s, {}};
    for (int i = 0; i < l.dim(); ++i) t.entries.push_back({i, i, 1.0});
    l.terms.push_back(std::move(t));
    q.lmis_.push_back(std::move(l));
  }
  for (auto d : p.logdets_) {
    d.linear.emplace_back(s, 1.0);
    q.logdets_.push_back(std::move(d));
  }
  return q;
}

struct AffineSpace {
  RMatrix basis;  // n x d, orthonormal columns; empty when unconstrained
  bool identity = true;
};

struct BarrierResult {
  RVector x;
  SolveStatus status = SolveStatus::MaxIters;
  double gap = 0.0;
  double kkt = 0.0;
  int iterations = 0;
  bool stopped_early = false;
  std::string message;
};

// Minimizes c^T x over the problem's constraints from a strictly feasible
// x0 that satisfies the equalities. Optionally returns as soon as a centered
// point has c^T x < stop_below.
BarrierResult barrier_minimize(const ConicProblem& p, const RVector& c_in, RVector x,
                               const AffineSpace& space, const SolveOptions& opts,
                               std::optional<double> stop_below, int newton_budget) {
  BarrierResult res;
  const Barrier barrier(p);
  const double nu = std::max(1.0, barrier.nu());
  const double cscale = std::max(c_in.cwiseAbs().maxCoeff(), 1e-300);
  const RVector c = c_in / cscale;
  const Eigen::Index n = x.size();

  auto reduce_vec = [&](const RVector& v) -> RVector {
    return space.identity ? v : RVector(space.basis.transpose() * v);
  };
  auto reduce_mat = [&](const RMatrix& m) -> RMatrix {
    return space.identity ? m : RMatrix(space.basis.transpose() * m * space.basis);
  };
  auto lift = [&](const RVector& dz) -> RVector {
    return space.identity ? dz : RVector(space.basis * dz);
  };

  RVector g(n);
  RMatrix h(n, n);
  barrier.derivatives(x, g, h);
  double t = 1.0;
  {
    const RVector cz = reduce_vec(c);
    const RVector gz = reduce_vec(g);
    const double cc = cz.squaredNorm();
    if (cc > 0.0) {
      const double tls = -cz.dot(gz) / cc;
      if (std::isfinite(tls) && tls > 0.0) t = tls;
    }
    t = std::clamp(t, 1e-6, 1e6);
  }

  auto phi = barrier.value(x);
  if (!phi) {
    res.x = x;
    res.status = SolveStatus::MaxIters;
    res.message = "start point outside the barrier domain";
    return res;
  }

  while (true) {
    // Centering by damped Newton.
    bool stalled = false;
    int near_center = 0;
    int no_progress = 0;
    double best_lambda2 = std::numeric_limits<double>::infinity();
    for (;;) {
      if (res.iterations >= newton_budget) {
        res.x = x;
        res.gap = nu / t * cscale;
        res.message = "Newton iteration budget exhausted";
        return res;
      }
      barrier.derivatives(x, g, h);
      const RVector grad = t * c + g;
      const RVector gz = reduce_vec(grad);
      RMatrix hz = reduce_mat(h);
      Eigen::LLT<RMatrix> llt(hz);
      double reg = 0.0;
      const double diag_scale = std::max(hz.diagonal().cwiseAbs().maxCoeff(), 1e-300);
      while (llt.info() != Eigen::Success) {
        reg = reg == 0.0 ? 1e-14 * diag_scale : reg * 100.0;
        if (reg > 1e-2 * diag_scale) break;
        llt.compute(hz + reg * RMatrix::Identity(hz.rows(), hz.cols()));
      }
      if (llt.info() != Eigen::Success) {
        stalled = true;
        break;
      }
      const RVector dz = llt.solve(-gz);
      const double lambda2 = -gz.dot(dz);
      ++res.iterations;
      res.kkt = reduce_vec(c + g / t).norm() * cscale;
      if (!(lambda2 > 2.0 * opts.centering_tol)) break;
      // Roundoff floor: Newton stops converging quadratically.
      if (lambda2 < 1e-6 && ++near_center > 3) break;
      if (lambda2 < 1e-2) {
        if (lambda2 < 0.5 * best_lambda2) {
          best_lambda2 = lambda2;
          no_progress = 0;
        } else if (++no_progress >= 5) {
          break;
        }
      }
      const RVector dx = lift(dz);
      const double slope = gz.dot(dz);
      const double lin = t * c.dot(dx);
      double alpha = 1.0;
      bool moved = false;
      const bool quadratic_region = std::sqrt(lambda2) < 0.2;
      while (alpha > 1e-14) {
        const RVector xn = x + alpha * dx;
        const auto phin = barrier.value(xn);
        if (phin) {
          const double df = alpha * lin + (*phin - *phi);
          if (quadratic_region || df <= 0.25 * alpha * slope + 1e-13 * (std::abs(*phi) + 1.0)) {
            x = xn;
            phi = phin;
            moved = true;
            break;
          }
        }
        alpha *= 0.5;
      }
      if (!moved || alpha < 1e-10) {
        stalled = true;
        break;
      }
      if (stop_below && c.dot(x) * cscale < *stop_below) {
        res.x = x;
        res.gap = nu / t * cscale;
        res.stopped_early = true;
        res.status = SolveStatus::Optimal;
        return res;
      }
    }

    const double obj = c.dot(x) * cscale;
    const double gap = nu / t * cscale;
    res.x = x;
    res.gap = gap;
    if (stop_below && obj < *stop_below) {
      res.stopped_early = true;
      res.status = SolveStatus::Optimal;
      return res;
    }
    if (gap <= std::max(opts.gap_abs, opts.gap_rel * std::abs(obj))) {
      res.status = SolveStatus::Optimal;
      return res;
    }
    if (stalled) {
      // Numerical floor reached: accept if the gap is still small relative
      // to the objective, otherwise report non-convergence.
      if (gap <= std::max(1e3 * opts.gap_abs, 1e3 * opts.gap_rel * std::abs(obj))) {
        res.status = SolveStatus::Optimal;
        res.message = "centering stalled at numerical floor";
      } else {
        res.status = SolveStatus::MaxIters;
        res.message = "centering stalled";
      }
      return res;
    }
    t *= opts.barrier_growth;
  }
}

ConicSolution run(const ConicProblem& p, const SolveOptions& opts) {
  ConicSolution sol;
  const int n = p.num_vars_;
  if (p.objective_.size() != n) throw std::invalid_argument("conic: objective not set");

  // Equality constraints: x = x_p + N z.
  AffineSpace space;
  RVector x0 = p.initial_ ? *p.initial_ : RVector::Zero(n);
  if (x0.size() != n) throw std::invalid_argument("conic: initial point size mismatch");
  if (!p.equalities_.empty()) {
    RMatrix a = RMatrix::Zero(static_cast<Eigen::Index>(p.equalities_.size()), n);
    RVector b(a.rows());
    for (std::size_t r = 0; r < p.equalities_.size(); ++r) {
      for (const auto& [i, v] : p.equalities_[r].a) a(static_cast<Eigen::Index>(r), i) += v;
      b(static_cast<Eigen::Index>(r)) = p.equalities_[r].b;
    }
    Eigen::JacobiSVD<RMatrix> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const double tol = 1e-12 * std::max(1.0, svd.singularValues().size() > 0
                                                 ? svd.singularValues()(0)
                                                 : 1.0);
    svd.setThreshold(tol / std::max(1.0, svd.singularValues()(0)));
    const Eigen::Index rank = svd.rank();
    x0 = x0 - svd.solve(a * x0 - b);
    if ((a * x0 - b).norm() > 1e-9 * std::max(1.0, b.norm())) {
      sol.x = x0;
      sol.report.status = SolveStatus::Infeasible;
      sol.report.message = "inconsistent equality constraints";
      return sol;
    }
    space.identity = false;
    space.basis = svd.matrixV().rightCols(n - rank);
  }

  const double sign = p.sense_ == Sense::Maximize ? -1.0 : 1.0;
  const RVector c = sign * p.objective_;
  int iterations = 0;

  // Phase I when x0 is not strictly feasible.
  const Barrier barrier(p);
  if (!barrier.value(x0)) {
    const auto need = required_relaxation(p, x0);
    if (!need) {
      sol.x = x0;
      sol.report.status = SolveStatus::MaxIters;
      sol.report.message = "initial point outside the log-det domain";
      return sol;
    }
    const double s0 = std::max(*need, 0.0) + 1.0 + 0.1 * std::abs(*need);
    const ConicProblem q = make_phase1(p, -1.0, x0);
    RVector y(n + 1);
    y.head(n) = x0;
    y(n) = s0;
    AffineSpace qspace;
    if (!space.identity) {
      qspace.identity = false;
      qspace.basis = RMatrix::Zero(n + 1, space.basis.cols() + 1);
      qspace.basis.topLeftCorner(n, space.basis.cols()) = space.basis;
      qspace.basis(n, space.basis.cols()) = 1.0;
    }
    SolveOptions popts = opts;
    popts.gap_rel = 0.0;
    popts.gap_abs = 1e-12;
    const BarrierResult ph = barrier_minimize(q, q.objective_, y, qspace, popts, -1e-10,
                                              opts.max_newton);
    iterations += ph.iterations;
    if (!ph.stopped_early) {
      sol.x = ph.x.head(n);
      sol.report.iterations = iterations;
      const double s = ph.x(n);
      sol.report.status = SolveStatus::Infeasible;
      sol.report.message = s - ph.gap > 0.0 ? "phase I certificate: relaxation bounded below zero"
                                            : "no strictly feasible point found";
      sol.report.max_violation = max_violation(p, sol.x);
      return sol;
    }
    x0 = ph.x.head(n);
  }

  const BarrierResult br = barrier_minimize(p, c, x0, space, opts, std::nullopt,
                                            opts.max_newton - iterations);
  iterations += br.iterations;
  sol.x = br.x;
  auto& rep = sol.report;
  rep.status = br.status;
  rep.iterations = iterations;
  rep.message = br.message;
  rep.objective = p.objective_.dot(br.x) + p.objective_constant_;
  rep.dual_bound = rep.objective - sign * br.gap;
  rep.kkt_residual = br.kkt;
  rep.max_violation = max_violation(p, br.x);
  return sol;
}

}  // namespace

ConicSolution solve(const ConicProblem& problem, const SolveOptions& opts) {
  return run(problem, opts);
}

ConicSolution solve_sdp(const ConicProblem& problem, const SolveOptions& opts) {
  if (problem.num_soc() != 0 || problem.num_logdet() != 0) {
    throw std::invalid_argument("solve_sdp: problem contains non-SDP constructs");
  }
  return run(problem, opts);
}

ConicSolution solve_socp(const ConicProblem& problem, const SolveOptions& opts) {
  if (problem.num_lmi() != 0 || problem.num_logdet() != 0) {
    throw std::invalid_argument("solve_socp: problem contains non-SOCP constructs");
  }
  return run(problem, opts);
}

ConicSolution solve_logdet_program(const ConicProblem& problem, const SolveOptions& opts) {
  if (problem.num_logdet() != 1 || problem.num_soc() != 0) {
    throw std::invalid_argument("solve_logdet_program: need exactly one log-det constraint");
  }
  return run(problem, opts);
}

}  // namespace isac::conic
