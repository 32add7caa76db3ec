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

// Readings of the dual solution in terms of the correlogram Omega.
//
// When Sigma = int G Omega G*, every dual function differs from a weighted
// Beta divergence between Omega and the primal family by a constant:
//
//   tau    J(Theta) = B1_{Psi^-1}(Omega || T_Theta) + const
//   alpha  J(Theta) = B2_{Psi^(1/nu)}(Omega || A_Theta) + const
//   beta   J(Theta) = Beta(Omega || B_Theta) + const
//
// all with parameter 1 - 1/nu. For nu = 1 and scalar data the same fact
// reads as a prediction-error criterion on Lambda = Omega / |L|^2, where L is
// the minimum-phase factor of the model.

#ifndef THREELIKE_INTERPRET_HPP_
#define THREELIKE_INTERPRET_HPP_

#include <cstdint>
#include <optional>
#include <vector>

#include "threelike/dualsolver.hpp"
#include "threelike/estimation.hpp"
#include "threelike/freqgrid.hpp"

namespace threelike {

// The family's weighted divergence between omega and primal_from_dual(theta).
double weighted_objective(const DualProblem& problem, const DualVariable& theta,
                          const SpectralDensity& omega);

// J(Theta) - weighted_objective(Theta) in closed form; depends on omega and the
// prior only.
double analytic_gap(const DualProblem& problem, const SpectralDensity& omega);

// tr int nu^2/(1-nu) (W^-1 Omega W^-*)^(1-1/nu), the power part of the tau
// constant. Requires tau and nu > 1.
double tau_power_term(const DualProblem& problem, const SpectralDensity& omega);

struct ProbeRecord {
  RMatrix theta;
  double dual_value = 0.0;
  double divergence = 0.0;
  double difference = 0.0;
};

struct InterpretationReport {
  Family family = Family::tau;
  int nu = 1;
  std::vector<ProbeRecord> probes;
  double constant_spread = 0.0;
  double j_at_zero = 0.0;
  std::optional<double> analytic_constant;
  // max over probes of |difference - analytic_constant|
  std::optional<double> analytic_deviation;
  std::optional<double> displayed_term;
};

// Throws PreconditionError unless the problem's Sigma equals int G Omega G* to
// 1e-8 relative, and ParameterError for fewer than 3 probes.
InterpretationReport dual_constant_check(const DualProblem& problem,
                                         const SpectralDensity& omega,
                                         const std::vector<DualVariable>& probes);

// Theta = 0 followed by count - 1 random unit-norm directions (projected onto
// the search space), halved until the certificate margin is at least 0.1 times
// its value at zero.
std::vector<DualVariable> make_probes(const DualProblem& problem, int count,
                                      std::uint64_t seed);

// Samples of a scalar minimum-phase L with |L|^2 equal to a given density.
struct ScalarFactor {
  FrequencyGrid grid;
  std::vector<Complex> values;

  SpectralDensity density() const;
};

// Cepstral method on the grid; needs m = 1 and a power-of-two grid. Throws
// NumericalError when |L|^2 misses the input by more than 1e-6 relative.
ScalarFactor cepstral_factor(const SpectralDensity& phi);

// Omega / |L|^2
SpectralDensity prediction_error_density(const SpectralDensity& omega, const ScalarFactor& l);

// V(Theta) = IS(Lambda || 1) for tau and beta, IS_Psi(Lambda || 1) for alpha.
// Scalar data and nu = 1 only.
double pem_criterion(const DualProblem& problem, const DualVariable& theta,
                     const SpectralDensity& omega);

// y(t) = sum_k a_k y(t-k) + e(t), var e = innovation_variance.
struct ArModel {
  RVector coefficients;
  double innovation_variance = 0.0;

  SpectralDensity spectrum(const FrequencyGrid& grid) const;
};

// Scalar lags R_0..R_p; DataError when Toeplitz(R) is not positive definite.
ArModel levinson_durbin(const CovarianceSequence& c);

}  // namespace threelike

#endif  // THREELIKE_INTERPRET_HPP_
