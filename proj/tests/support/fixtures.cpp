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

#include "fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace threelike::testing {

RVector simulate_arma(const std::vector<double>& ar, const std::vector<double>& ma, int n,
                      std::uint64_t seed, int burn) {
  Rng rng(seed);
  std::normal_distribution<double> normal;
  const int total = n + burn;
  std::vector<double> e(total), y(total, 0.0);
  for (auto& v : e) v = normal(rng);
  for (int t = 0; t < total; ++t) {
    double acc = e[t];
    for (std::size_t i = 0; i < ar.size(); ++i) {
      if (t > static_cast<int>(i)) acc += ar[i] * y[t - 1 - i];
    }
    for (std::size_t j = 0; j < ma.size(); ++j) {
      if (t > static_cast<int>(j)) acc += ma[j] * e[t - 1 - j];
    }
    y[t] = acc;
  }
  RVector out(n);
  for (int t = 0; t < n; ++t) out(t) = y[burn + t];
  return out;
}

TimeSeries arma_record(const std::vector<double>& ar, const std::vector<double>& ma, int n,
                       std::uint64_t seed) {
  return TimeSeries(simulate_arma(ar, ma, n, seed));
}

std::vector<double> ar_autocovariance(const std::vector<double>& ar, double variance,
                                      int max_lag) {
  const int p = static_cast<int>(ar.size());
  // R_k - sum_i a_i R_|k-i| = variance * delta_k, k = 0..p
  RMatrix lhs = RMatrix::Zero(p + 1, p + 1);
  RVector rhs = RVector::Zero(p + 1);
  rhs(0) = variance;
  for (int k = 0; k <= p; ++k) {
    lhs(k, k) += 1.0;
    for (int i = 1; i <= p; ++i) lhs(k, std::abs(k - i)) -= ar[i - 1];
  }
  const RVector head = lhs.fullPivLu().solve(rhs);
  std::vector<double> r(std::max(max_lag, p) + 1);
  for (int k = 0; k <= p; ++k) r[k] = head(k);
  for (int k = p + 1; k <= max_lag; ++k) {
    double acc = 0.0;
    for (int i = 1; i <= p; ++i) acc += ar[i - 1] * r[k - i];
    r[k] = acc;
  }
  r.resize(max_lag + 1);
  return r;
}

CovarianceSequence scalar_lags(const std::vector<double>& r) {
  std::vector<RMatrix> lags;
  for (double v : r) lags.push_back(RMatrix::Constant(1, 1, v));
  return CovarianceSequence(std::move(lags));
}

SpectralDensity scalar_rational(const FrequencyGrid& grid, double gain,
                                const std::vector<Complex>& zeros,
                                const std::vector<Complex>& poles) {
  return SpectralDensity(MatrixFunction::generate(grid, [&](int, double theta) -> CMatrix {
    const Complex e = std::polar(1.0, -theta);
    double v = gain;
    for (const auto& z : zeros) v *= std::norm(1.0 - z * e);
    for (const auto& p : poles) v /= std::norm(1.0 - p * e);
    return CMatrix::Constant(1, 1, v);
  }));
}

SpectralDensity random_scalar_density(const FrequencyGrid& grid, Rng& rng) {
  std::uniform_real_distribution<double> coef(-0.8, 0.8);
  std::uniform_real_distribution<double> gain(0.5, 2.0);
  return scalar_rational(grid, gain(rng), {coef(rng)}, {coef(rng), coef(rng)});
}

MatrixFunction random_factor(const FrequencyGrid& grid, int m, Rng& rng) {
  std::normal_distribution<double> normal;
  CMatrix c0(m, m), c1(m, m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      c0(i, j) = 0.2 * normal(rng);
      c1(i, j) = 0.2 * normal(rng);
    }
  }
  c0 += 1.5 * CMatrix::Identity(m, m);
  return MatrixFunction::generate(grid, [&](int, double theta) -> CMatrix {
    return c0 + c1 * std::polar(1.0, -theta);
  });
}

SpectralDensity density_of(const MatrixFunction& w) {
  return SpectralDensity(
      w.map([](const CMatrix& x) -> CMatrix { return hermitian_part(x * x.adjoint()); }));
}

SpectralDensity random_density(const FrequencyGrid& grid, int m, Rng& rng) {
  return density_of(random_factor(grid, m, rng));
}

RMatrix random_symmetric(int n, Rng& rng) {
  std::normal_distribution<double> normal;
  RMatrix x(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) x(i, j) = normal(rng);
  }
  return 0.5 * (x + x.transpose());
}

StateSpaceFilter reference_pole_filter() {
  const Complex pair = std::polar(0.95, std::numbers::pi / 4.0);
  const std::vector<Complex> poles{{0.9, 0.0}, pair, std::conj(pair)};
  return pole_filter(poles);
}

Scenario arma_scenario(const StateSpaceFilter& g, const FrequencyGrid& grid, std::uint64_t seed,
                       int n) {
  const TimeSeries y = demean(arma_record({0.75, -0.5}, {0.4}, n, seed));
  const int max_lag = default_max_lag(n);
  const MatrixFunction raw = correlogram(sample_covariances(y, max_lag), Window::bartlett, grid);
  check_positive(raw);
  SpectralDensity omega(raw);
  CovarianceEstimate sigma = sigma_hat(g, omega, Window::bartlett, max_lag);
  return Scenario{std::move(omega), std::move(sigma)};
}

double sup_relative_error(const SpectralDensity& a, const SpectralDensity& b) {
  double worst = 0.0;
  for (int k = 0; k < a.size(); ++k) {
    worst = std::max(worst, (a[k] - b[k]).norm() / b[k].norm());
  }
  return worst;
}

}  // namespace threelike::testing
