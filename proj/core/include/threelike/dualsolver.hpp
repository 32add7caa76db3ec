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

// Dual problems of the moment-constrained spectrum approximation
//
//   min_Phi S(Phi || Psi)  s.t.  int G Phi G* = Sigma
//
// for the Alpha, Beta and Tau divergence families with parameter 1 - 1/nu.
// Each family writes the optimum as a function of a symmetric multiplier
// Theta through M(Theta) = C + F* Theta F / nu:
//
//   family  F      C             Phi(Theta)               feasible iff
//   alpha   G      1             Psi M^-nu                M > 0   (m = 1)
//   beta    G      Psi^(-1/nu)   M^-nu                    M > 0
//   tau     G W    I             W M^-nu W*               M > 0
//
// and the dual function is
//
//   J(Theta) = nu/(nu-1) tr int w M^(1-nu) + tr(Sigma Theta)       nu > 1
//   J(Theta) = -tr int w log M + c + tr(Sigma Theta)               nu = 1
//
// with w = Psi for alpha (1 otherwise) and c = int log det Psi for tau, so
// the beta and tau duals coincide at nu = 1. The gradient is always
// Sigma - int G Phi(Theta) G*: stationarity is moment matching.

#ifndef THREELIKE_DUALSOLVER_HPP_
#define THREELIKE_DUALSOLVER_HPP_

#include <string>
#include <string_view>
#include <vector>

#include "threelike/estimation.hpp"
#include "threelike/filterbank.hpp"
#include "threelike/freqgrid.hpp"

namespace threelike {

enum class Family { alpha, beta, tau };

std::string_view to_string(Family f);
Family family_from_string(std::string_view s);

struct SolverOptions {
  double grad_tol = 1e-7;
  double moment_tol = 1e-6;  // relative
  int max_iters = 500;
  double armijo_c = 1e-4;
  double backtrack_ratio = 0.5;

  void validate() const;
};

// Real symmetric n x n multiplier.
class DualVariable {
 public:
  explicit DualVariable(RMatrix theta);
  static DualVariable zero(int n);

  const RMatrix& matrix() const noexcept { return theta_; }
  int size() const noexcept { return static_cast<int>(theta_.rows()); }

 private:
  RMatrix theta_;
};

struct ProblemSpec {
  Family family = Family::tau;
  int nu = 1;
  StateSpaceFilter filter;
  PriorModel prior;
  CovarianceEstimate sigma;
  FrequencyGrid grid;
  // Optional basis of a subspace V of symmetric matrices; Theta is then
  // restricted to V.
  std::vector<RMatrix> subspace;
  SolverOptions options;
};

struct FeasibilityVerdict {
  bool feasible = false;
  // Minimum eigenvalue of the certificate M over the grid.
  double margin = 0.0;
  double worst_theta = 0.0;
};

struct Solution {
  DualVariable theta_hat;
  SpectralDensity phi_star;
  double dual_value = 0.0;
  double moment_residual = 0.0;
  double gradient_norm = 0.0;
  int iterations = 0;
  bool converged = false;
  std::string stop_reason;
  // J at the start and after every accepted step. Strictly decreasing except
  // for final polishing steps, where changes are below 1e-12 (1 + |J|).
  std::vector<double> dual_history;
};

class DualProblem {
 public:
  // Validates the ProblemSpec (Alpha needs m = 1, Sigma must be PD, dimensions must
  // agree) and caches the filter and prior on the grid.
  explicit DualProblem(ProblemSpec spec);

  const ProblemSpec& spec() const noexcept { return spec_; }
  int states() const noexcept { return spec_.filter.states(); }
  int channels() const noexcept { return spec_.filter.inputs(); }
  const FrequencyGrid& grid() const noexcept { return spec_.grid; }
  const MatrixFunction& filter_response() const noexcept { return g_; }
  const MatrixFunction& prior_factor() const noexcept { return w_; }
  const SpectralDensity& prior_density() const noexcept { return psi_; }

  FeasibilityVerdict feasible(const DualVariable& theta) const;
  // Throws DomainError carrying the margin when theta is infeasible.
  double dual_value(const DualVariable& theta) const;
  // Sigma - int G Phi(theta) G*, projected onto V when a subspace is set.
  RMatrix dual_gradient(const DualVariable& theta) const;
  // Sigma - int G Phi(theta) G*, never projected.
  RMatrix moment_gap(const DualVariable& theta) const;
  SpectralDensity primal_from_dual(const DualVariable& theta) const;

  // Orthonormal (trace inner product) basis of the search space.
  const std::vector<RMatrix>& basis() const noexcept { return basis_; }
  RMatrix project(const RMatrix& x) const;
  // Hessian of J in basis coordinates.
  RMatrix hessian(const DualVariable& theta) const;

  // Damped Newton from Theta = 0 with Armijo backtracking; every iterate is
  // feasible with margin >= 1e-12.
  Solution solve() const;

 private:
  struct Eval;
  Eval evaluate(const DualVariable& theta) const;
  void require_feasible(const Eval& e) const;

  ProblemSpec spec_;
  MatrixFunction g_;
  MatrixFunction w_;
  SpectralDensity psi_;
  std::vector<CMatrix> f_;       // F per grid point (n x m)
  std::vector<CMatrix> offset_;  // C per grid point (m x m)
  std::vector<double> weight_;   // w per grid point
  double log_det_psi_ = 0.0;     // int log det Psi (tau, nu = 1)
  std::vector<RMatrix> basis_;
  bool restricted_ = false;
};

// ||int G Phi G* - Sigma||_F / ||Sigma||_F
double moment_residual(const SpectralDensity& phi, const StateSpaceFilter& g,
                       const RMatrix& sigma);

}  // namespace threelike

#endif  // THREELIKE_DUALSOLVER_HPP_
