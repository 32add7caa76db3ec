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

// Divergence indices between spectral densities sampled on a common grid.
//
//   KL      tr int [Phi (log Phi - log Psi) - Phi + Psi]
//   IS      tr int [log Psi - log Phi + Phi Psi^-1 - I]
//   Alpha   int [Phi^a Psi^(1-a) / (a(a-1)) - Phi / (a-1) + Psi / a]      (m = 1)
//   Beta    tr int [Phi^b / (b(b-1)) - Phi Psi^(b-1) / (b-1) + Psi^b / b]
//   Tau     tr int [(W^-1 Phi W^-*)^t / (t(t-1)) - Phi Psi^-1 / (t-1) + I / t]
//   B1_Q    Beta(W_Q* Phi W_Q || W_Q* Psi W_Q), Q = W_Q W_Q*
//   B2_Q    tr int Q [Beta integrand]
//
// The parametric families are extended by continuity at their endpoints:
//
//   Alpha  a -> 0: KL(Psi || Phi)         a -> 1: KL(Phi || Psi)
//   Beta   b -> 0: IS(Phi || Psi)         b -> 1: KL(Phi || Psi)
//   Tau    t -> 0: IS(Phi || Psi)         t -> 1: KL(W^-1 Phi W^-* || I)
//   B1_Q   b -> 0: IS(Phi || Psi)         b -> 1: KL1_Q(Phi || Psi)
//   B2_Q   b -> 0: IS_Q(Phi || Psi)       b -> 1: KL2_Q(Phi || Psi)
//
// and exactly-0 / exactly-1 parameters dispatch to those limits.

#ifndef THREELIKE_DIVERGENCE_HPP_
#define THREELIKE_DIVERGENCE_HPP_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "threelike/freqgrid.hpp"

namespace threelike {

// Collects human-readable notes about clamped values.
using Warnings = std::vector<std::string>;

double kl(const SpectralDensity& phi, const SpectralDensity& psi, Warnings* warnings = nullptr);
double is_dist(const SpectralDensity& phi, const SpectralDensity& psi,
               Warnings* warnings = nullptr);
// Scalar densities only; UnsupportedError otherwise.
double alpha_div(const SpectralDensity& phi, const SpectralDensity& psi, double alpha,
                 Warnings* warnings = nullptr);
double beta_div(const SpectralDensity& phi, const SpectralDensity& psi, double beta,
                Warnings* warnings = nullptr);
// `psi_factor` is a left spectral factor of psi (psi = W W*), checked to 1e-9.
double tau_div(const SpectralDensity& phi, const SpectralDensity& psi, double tau,
               const MatrixFunction& psi_factor, Warnings* warnings = nullptr);

double b1_weighted(const SpectralDensity& phi, const SpectralDensity& psi, double beta,
                   const MatrixFunction& weight_factor, Warnings* warnings = nullptr);
double b2_weighted(const SpectralDensity& phi, const SpectralDensity& psi, double beta,
                   const SpectralDensity& weight, Warnings* warnings = nullptr);
double kl1_weighted(const SpectralDensity& phi, const SpectralDensity& psi,
                    const MatrixFunction& weight_factor, Warnings* warnings = nullptr);
double kl2_weighted(const SpectralDensity& phi, const SpectralDensity& psi,
                    const SpectralDensity& weight, Warnings* warnings = nullptr);
double is_weighted(const SpectralDensity& phi, const SpectralDensity& psi,
                   const SpectralDensity& weight, Warnings* warnings = nullptr);

enum class DivergenceFamily {
  kl,
  is,
  alpha,
  beta,
  tau,
  b1_weighted,
  b2_weighted,
  kl1_weighted,
  kl2_weighted,
  is_weighted,
};

std::string_view to_string(DivergenceFamily f);
DivergenceFamily divergence_family_from_string(std::string_view s);

struct DivergenceSpec {
  DivergenceFamily family = DivergenceFamily::kl;
  double parameter = 0.0;
  // Q, for the trace-weighted types.
  std::optional<SpectralDensity> weight;
  // W_Q (or W_Psi for Tau), for the congruence-weighted types.
  std::optional<MatrixFunction> weight_factor;
};

// Dispatches on spec.family; missing weights raise ParameterError. For Tau a
// missing factor defaults to the identity (psi must then be I).
double divergence(const DivergenceSpec& spec, const SpectralDensity& phi,
                  const SpectralDensity& psi, Warnings* warnings = nullptr);

// Congruence W* Phi W, re-symmetrized pointwise. The result must be PD.
SpectralDensity congruence(const SpectralDensity& phi, const MatrixFunction& w);
// W^-1 Phi W^-*, re-symmetrized pointwise.
SpectralDensity whiten(const SpectralDensity& phi, const MatrixFunction& w);

}  // namespace threelike

#endif  // THREELIKE_DIVERGENCE_HPP_
