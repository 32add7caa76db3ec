// Copyright 2026 The threelike Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "threelike/dualsolver.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include <Eigen/Eigenvalues>

#include "threelike/errors.hpp"

namespace threelike {

std::string_view to_string(Family f) {
  switch (f) {
    case Family::alpha: return "alpha";
    case Family::beta: return "beta";
    case Family::tau: return "tau";
  }
  return "unknown";
}

Family family_from_string(std::string_view s) {
  if (s == "alpha") return Family::alpha;
  if (s == "beta") return Family::beta;
  if (s == "tau") return Family::tau;
  throw ParameterError("unknown family '" + std::string(s) + "' (expected alpha, beta or tau)");
}

void SolverOptions::validate() const {
  if (!(grad_tol > 0.0) || !(moment_tol > 0.0) || max_iters <= 0 || !(armijo_c > 0.0) ||
      !(armijo_c < 1.0)) {
    throw ParameterError("solver tolerances and iteration budget must be positive");
  }
  if (!(backtrack_ratio > 0.0 && backtrack_ratio < 1.0)) {
    throw ParameterError("backtrack ratio must lie in (0, 1)");
  }
}

DualVariable::DualVariable(RMatrix theta) : theta_(std::move(theta)) {
  if (theta_.rows() != theta_.cols()) throw StructuralError("dual variable must be square");
  const double asym = (theta_ - theta_.transpose()).norm();
  if (asym > 1e-12 * (1.0 + theta_.norm())) {
    throw ParameterError("dual variable must be symmetric (residue " + std::to_string(asym) + ")");
  }
  theta_ = 0.5 * (theta_ + theta_.transpose());
}

DualVariable DualVariable::zero(int n) { return DualVariable(RMatrix::Zero(n, n)); }

namespace {

constexpr double kMarginFloor = 1e-12;
constexpr double kDualRoundoff = 1e-12;

double frobenius_dot(const RMatrix& a, const RMatrix& b) { return (a.array() * b.array()).sum(); }

std::vector<RMatrix> full_symmetric_basis(int n) {
  std::vector<RMatrix> basis;
  const double r = 1.0 / std::sqrt(2.0);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      RMatrix e = RMatrix::Zero(n, n);
      if (i == j) {
        e(i, i) = 1.0;
      } else {
        e(i, j) = r;
        e(j, i) = r;
      }
      basis.push_back(std::move(e));
    }
  }
  return basis;
}

std::vector<RMatrix> orthonormalize(const std::vector<RMatrix>& raw, int n) {
  std::vector<RMatrix> basis;
  for (std::size_t idx = 0; idx < raw.size(); ++idx) {
    const RMatrix& v = raw[idx];
    if (v.rows() != n || v.cols() != n) {
      throw StructuralError("subspace basis matrix " + std::to_string(idx) + " is not " +
                            std::to_string(n) + "x" + std::to_string(n));
    }
    if ((v - v.transpose()).norm() > 1e-12 * (1.0 + v.norm())) {
      throw ParameterError("subspace basis matrix " + std::to_string(idx) + " is not symmetric");
    }
    RMatrix u = 0.5 * (v + v.transpose());
    const double scale = u.norm();
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& b : basis) u -= frobenius_dot(u, b) * b;
    }
    const double rest = u.norm();
    if (!(rest > 1e-10 * scale)) {
      throw ParameterError("subspace basis matrices are linearly dependent");
    }
    basis.push_back(u / rest);
  }
  return basis;
}

}  // namespace

// Eigendata of M(theta) at every grid point.
struct DualProblem::Eval {
  std::vector<HermitianEigen> eig;
  double margin = std::numeric_limits<double>::infinity();
  int worst = 0;
};

DualProblem::DualProblem(ProblemSpec spec)
    : spec_(std::move(spec)),
      g_(threelike::evaluate(spec_.filter, spec_.grid)),
      w_(threelike::prior_factor(spec_.prior, spec_.grid)),
      psi_(threelike::prior_density(spec_.prior, spec_.grid)) {
  spec_.options.validate();
  const int n = states();
  const int m = channels();
  if (spec_.nu < 1) throw ParameterError("nu must be a positive integer");
  if (spec_.prior.dim() != m) {
    throw StructuralError("prior dimension " + std::to_string(spec_.prior.dim()) +
                          " does not match filter inputs " + std::to_string(m));
  }
  if (spec_.family == Family::alpha && m != 1) {
    throw UnsupportedError("the Alpha family is only defined for scalar processes (m = 1)");
  }
  if (spec_.sigma.sigma.rows() != n || spec_.sigma.sigma.cols() != n) {
    throw StructuralError("covariance estimate is not " + std::to_string(n) + "x" +
                          std::to_string(n));
  }
  {
    Eigen::SelfAdjointEigenSolver<RMatrix> es(spec_.sigma.sigma, Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues()(0);
    if (!(lo > 1e-10 * spec_.sigma.sigma.trace())) {
      throw PreconditionError("covariance estimate is not positive definite (min eigenvalue " +
                              std::to_string(lo) + "); the dual problem needs Sigma > 0");
    }
  }

  const double inv_nu = 1.0 / static_cast<double>(spec_.nu);
  const int nf = spec_.grid.size();
  f_.reserve(nf);
  offset_.reserve(nf);
  weight_.reserve(nf);
  for (int k = 0; k < nf; ++k) {
    switch (spec_.family) {
      case Family::alpha:
        f_.push_back(g_[k]);
        offset_.push_back(CMatrix::Identity(1, 1));
        weight_.push_back(psi_[k](0, 0).real());
        break;
      case Family::beta:
        f_.push_back(g_[k]);
        offset_.push_back(matrix_power(psi_[k], -inv_nu));
        weight_.push_back(1.0);
        break;
      case Family::tau:
        f_.push_back(g_[k] * w_[k]);
        offset_.push_back(CMatrix::Identity(m, m));
        weight_.push_back(1.0);
        break;
    }
  }
  if (spec_.family == Family::tau && spec_.nu == 1) {
    for (int k = 0; k < nf; ++k) {
      log_det_psi_ += hermitian_eigen(psi_[k]).values.array().log().sum();
    }
    log_det_psi_ /= static_cast<double>(nf);
  }

  restricted_ = !spec_.subspace.empty();
  basis_ = restricted_ ? orthonormalize(spec_.subspace, n) : full_symmetric_basis(n);
}

DualProblem::Eval DualProblem::evaluate(const DualVariable& theta) const {
  if (theta.size() != states()) {
    throw StructuralError("dual variable is " + std::to_string(theta.size()) + "x" +
                          std::to_string(theta.size()) + ", expected " +
                          std::to_string(states()));
  }
  const double inv_nu = 1.0 / static_cast<double>(spec_.nu);
  const CMatrix t = theta.matrix().cast<Complex>();
  Eval e;
  const int nf = grid().size();
  e.eig.reserve(nf);
  for (int k = 0; k < nf; ++k) {
    const CMatrix& f = f_[k];
    CMatrix mk = offset_[k] + inv_nu * (f.adjoint() * t * f);
    e.eig.push_back(hermitian_eigen(hermitian_part(mk)));
    const double lo = e.eig.back().values(0);
    if (lo < e.margin) {
      e.margin = lo;
      e.worst = k;
    }
  }
  return e;
}

void DualProblem::require_feasible(const Eval& e) const {
  if (!(e.margin > 0.0)) {
    throw DomainError("dual variable is infeasible: certificate min eigenvalue " +
                          std::to_string(e.margin) + " at theta = " +
                          std::to_string(grid().theta(e.worst)),
                      e.margin);
  }
}

FeasibilityVerdict DualProblem::feasible(const DualVariable& theta) const {
  const Eval e = evaluate(theta);
  return {e.margin > 0.0, e.margin, grid().theta(e.worst)};
}

double DualProblem::dual_value(const DualVariable& theta) const {
  const Eval e = evaluate(theta);
  require_feasible(e);
  const double nu = spec_.nu;
  double acc = 0.0;
  for (std::size_t k = 0; k < e.eig.size(); ++k) {
    const RVector& lam = e.eig[k].values;
    if (spec_.nu == 1) {
      acc -= weight_[k] * lam.array().log().sum();
    } else {
      acc += weight_[k] * lam.array().pow(1.0 - nu).sum();
    }
  }
  acc /= static_cast<double>(e.eig.size());
  if (spec_.nu == 1) {
    acc += log_det_psi_;
  } else {
    acc *= nu / (nu - 1.0);
  }
  return acc + frobenius_dot(spec_.sigma.sigma, theta.matrix());
}

SpectralDensity DualProblem::primal_from_dual(const DualVariable& theta) const {
  const Eval e = evaluate(theta);
  require_feasible(e);
  const double nu = spec_.nu;
  std::vector<CMatrix> samples;
  samples.reserve(e.eig.size());
  for (std::size_t k = 0; k < e.eig.size(); ++k) {
    const HermitianEigen& eig = e.eig[k];
    const RVector h = eig.values.array().pow(-nu);
    CMatrix x = eig.vectors * h.asDiagonal() * eig.vectors.adjoint();
    switch (spec_.family) {
      case Family::alpha:
        x *= weight_[k];
        break;
      case Family::beta:
        break;
      case Family::tau:
        x = w_[k] * hermitian_part(x) * w_[k].adjoint();
        break;
    }
    samples.push_back(hermitian_part(x));
  }
  return SpectralDensity(MatrixFunction(grid(), std::move(samples)));
}

RMatrix DualProblem::moment_gap(const DualVariable& theta) const {
  return spec_.sigma.sigma - output_covariance(g_, primal_from_dual(theta).function());
}

RMatrix DualProblem::project(const RMatrix& x) const {
  if (!restricted_) return 0.5 * (x + x.transpose());
  RMatrix out = RMatrix::Zero(x.rows(), x.cols());
  for (const auto& b : basis_) out += frobenius_dot(x, b) * b;
  return out;
}

RMatrix DualProblem::dual_gradient(const DualVariable& theta) const {
  const RMatrix gap = moment_gap(theta);
  return restricted_ ? project(gap) : gap;
}

RMatrix DualProblem::hessian(const DualVariable& theta) const {
  const Eval e = evaluate(theta);
  require_feasible(e);
  const double nu = spec_.nu;
  const auto p = static_cast<Eigen::Index>(basis_.size());
  const int m = channels();
  std::vector<CMatrix> cb;
  cb.reserve(basis_.size());
  for (const auto& b : basis_) cb.push_back(b.cast<Complex>());

  RMatrix hess = RMatrix::Zero(p, p);
  std::vector<CMatrix> rotated(basis_.size());
  CMatrix gamma(m, m);
  for (std::size_t k = 0; k < e.eig.size(); ++k) {
    const HermitianEigen& eig = e.eig[k];
    const CMatrix& f = f_[k];
    // Divided differences of x^-nu at the eigenvalues of M.
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) {
        const double li = eig.values(i);
        const double lj = eig.values(j);
        if (std::abs(li - lj) <= 1e-10 * std::max(li, lj)) {
          gamma(i, j) = -nu * std::pow(0.5 * (li + lj), -nu - 1.0);
        } else {
          gamma(i, j) = (std::pow(li, -nu) - std::pow(lj, -nu)) / (li - lj);
        }
      }
    }
    for (Eigen::Index a = 0; a < p; ++a) {
      rotated[a] = eig.vectors.adjoint() * (f.adjoint() * cb[a] * f) * eig.vectors;
    }
    const double scale = weight_[k] / nu;
    for (Eigen::Index a = 0; a < p; ++a) {
      for (Eigen::Index b = a; b < p; ++b) {
        // tr(K_a Dh[K_b]) = sum_ij (K_a)_ji gamma_ij (K_b)_ij in the eigenbasis
        const Complex s = (rotated[a].transpose().array() * gamma.array() * rotated[b].array()).sum();
        hess(a, b) -= scale * s.real();
      }
    }
  }
  hess /= static_cast<double>(e.eig.size());
  for (Eigen::Index a = 0; a < p; ++a) {
    for (Eigen::Index b = 0; b < a; ++b) hess(a, b) = hess(b, a);
  }
  return hess;
}

namespace {

// Minimum-norm solution of H x = rhs for symmetric PSD H.
RVector pseudo_solve(const RMatrix& h, const RVector& rhs) {
  Eigen::SelfAdjointEigenSolver<RMatrix> es(h);
  const RVector& lam = es.eigenvalues();
  const double top = lam.cwiseAbs().maxCoeff();
  RVector coeffs = es.eigenvectors().transpose() * rhs;
  for (Eigen::Index i = 0; i < lam.size(); ++i) {
    coeffs(i) = lam(i) > 1e-12 * top ? coeffs(i) / lam(i) : 0.0;
  }
  return es.eigenvectors() * coeffs;
}

}  // namespace

Solution DualProblem::solve() const {
  const SolverOptions& opt = spec_.options;
  const int n = states();
  const double sigma_norm = spec_.sigma.sigma.norm();
  const auto p = static_cast<Eigen::Index>(basis_.size());

  DualVariable theta = DualVariable::zero(n);
  double j = dual_value(theta);
  std::vector<double> history{j};
  RMatrix gap = moment_gap(theta);
  int iterations = 0;
  std::string reason = "max_iters";

  const auto to_coords = [&](const RMatrix& x) {
    RVector c(p);
    for (Eigen::Index a = 0; a < p; ++a) c(a) = frobenius_dot(x, basis_[a]);
    return c;
  };
  const auto from_coords = [&](const RVector& c) {
    RMatrix x = RMatrix::Zero(n, n);
    for (Eigen::Index a = 0; a < p; ++a) x += c(a) * basis_[a];
    return x;
  };
  const auto done = [&](const RMatrix& g) {
    const double gnorm = (restricted_ ? project(g) : g).norm();
    const bool matched = restricted_ || g.norm() <= opt.moment_tol * sigma_norm;
    return gnorm <= opt.grad_tol && matched;
  };

  while (true) {
    if (done(gap)) {
      reason = "converged";
      break;
    }
    if (iterations >= opt.max_iters) break;

    // gap is the gradient of J.
    const RVector grad = to_coords(gap);
    RVector step = -pseudo_solve(hessian(theta), grad);
    double slope = grad.dot(step);
    if (!(slope < 0.0)) {
      step = -grad;
      slope = grad.dot(step);
    }
    if (!(slope < 0.0)) {
      reason = "no_descent_direction";
      break;
    }
    const RMatrix direction = from_coords(step);

    double s = 1.0;
    bool accepted = false;
    // Near the optimum the predicted decrease drops below what J can resolve
    // in double precision; take the full step if it shrinks the gradient.
    if (-slope <= kDualRoundoff * (1.0 + std::abs(j))) {
      DualVariable next(theta.matrix() + direction);
      if (feasible(next).margin >= kMarginFloor) {
        RMatrix next_gap = moment_gap(next);
        const auto norm_of = [&](const RMatrix& x) { return (restricted_ ? project(x) : x).norm(); };
        if (norm_of(next_gap) < norm_of(gap)) {
          theta = std::move(next);
          j = dual_value(theta);
          ++iterations;
          history.push_back(j);
          gap = std::move(next_gap);
          continue;
        }
      }
    }
    for (int trial = 0; trial < 80; ++trial, s *= opt.backtrack_ratio) {
      RMatrix cand = theta.matrix() + s * direction;
      cand = 0.5 * (cand + cand.transpose());
      DualVariable next(cand);
      if (feasible(next).margin < kMarginFloor) continue;
      const double jn = dual_value(next);
      if (jn <= j + opt.armijo_c * s * slope && jn < j) {
        theta = std::move(next);
        j = jn;
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      reason = "line_search_stalled";
      break;
    }
    ++iterations;
    history.push_back(j);
    gap = moment_gap(theta);
  }

  SpectralDensity phi = primal_from_dual(theta);
  const double residual = (output_covariance(g_, phi.function()) - spec_.sigma.sigma).norm() /
                          sigma_norm;
  const double gnorm = (restricted_ ? project(gap) : gap).norm();
  const bool converged = done(gap);
  return Solution{std::move(theta),
                  std::move(phi),
                  j,
                  residual,
                  gnorm,
                  iterations,
                  converged,
                  converged ? "converged" : reason,
                  std::move(history)};
}

double moment_residual(const SpectralDensity& phi, const StateSpaceFilter& g,
                       const RMatrix& sigma) {
  return (output_covariance(g, phi) - sigma).norm() / sigma.norm();
}

}  // namespace threelike
