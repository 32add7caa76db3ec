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

// Synthetic data and random instances shared by the unit and acceptance
// tests. Everything is seeded.

#ifndef THREELIKE_TESTS_FIXTURES_HPP_
#define THREELIKE_TESTS_FIXTURES_HPP_

#include <cstdint>
#include <random>
#include <vector>

#include "threelike/estimation.hpp"
#include "threelike/filterbank.hpp"
#include "threelike/freqgrid.hpp"

namespace threelike::testing {

using Rng = std::mt19937_64;

// y(t) = sum_i ar_i y(t-i) + e(t) + sum_j ma_j e(t-j), unit-variance e.
RVector simulate_arma(const std::vector<double>& ar, const std::vector<double>& ma, int n,
                      std::uint64_t seed, int burn = 500);
TimeSeries arma_record(const std::vector<double>& ar, const std::vector<double>& ma, int n,
                       std::uint64_t seed);

// Exact autocovariances R_0..R_max_lag of an AR process with the given
// innovation variance, from the Yule-Walker equations.
std::vector<double> ar_autocovariance(const std::vector<double>& ar, double variance,
                                      int max_lag);
CovarianceSequence scalar_lags(const std::vector<double>& r);

// gain * prod |1 - z e^{-j theta}|^2 / prod |1 - p e^{-j theta}|^2
SpectralDensity scalar_rational(const FrequencyGrid& grid, double gain,
                                const std::vector<Complex>& zeros,
                                const std::vector<Complex>& poles);
SpectralDensity random_scalar_density(const FrequencyGrid& grid, Rng& rng);

// Invertible first-order factor W(theta) = C0 + C1 e^{-j theta}.
MatrixFunction random_factor(const FrequencyGrid& grid, int m, Rng& rng);
SpectralDensity density_of(const MatrixFunction& w);
SpectralDensity random_density(const FrequencyGrid& grid, int m, Rng& rng);

RMatrix random_symmetric(int n, Rng& rng);

// Poles 0.9 and 0.95 e^{+-j pi/4}.
StateSpaceFilter reference_pole_filter();

struct Scenario {
  SpectralDensity omega;
  CovarianceEstimate sigma;
};

// Bartlett correlogram of an ARMA(2,1) record and its covariance estimate.
Scenario arma_scenario(const StateSpaceFilter& g, const FrequencyGrid& grid, std::uint64_t seed,
                       int n = 4096);

double sup_relative_error(const SpectralDensity& a, const SpectralDensity& b);

}  // namespace threelike::testing

#endif  // THREELIKE_TESTS_FIXTURES_HPP_
