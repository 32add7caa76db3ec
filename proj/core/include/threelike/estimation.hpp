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

// From a finite record to the biased correlogram and the filter output
// covariance estimate. The estimate is computed as sigma_hat = int G Omega G*,
// so it is consistent with the correlogram by construction.

#ifndef THREELIKE_ESTIMATION_HPP_
#define THREELIKE_ESTIMATION_HPP_

#include <istream>
#include <string_view>
#include <vector>

#include "threelike/filterbank.hpp"
#include "threelike/freqgrid.hpp"

namespace threelike {

// N x m record, rows are time steps.
class TimeSeries {
 public:
  explicit TimeSeries(RMatrix samples);

  const RMatrix& samples() const noexcept { return samples_; }
  int length() const noexcept { return static_cast<int>(samples_.rows()); }
  int channels() const noexcept { return static_cast<int>(samples_.cols()); }

 private:
  RMatrix samples_;
};

// One row per time step, m numeric columns, optional single non-numeric
// header row. Errors name the offending line.
TimeSeries read_time_series_csv(std::istream& in);

TimeSeries demean(const TimeSeries& y);

class CovarianceSequence {
 public:
  explicit CovarianceSequence(std::vector<RMatrix> lags);

  int max_lag() const noexcept { return static_cast<int>(lags_.size()) - 1; }
  int dim() const noexcept { return static_cast<int>(lags_.front().rows()); }
  const RMatrix& operator[](int k) const { return lags_[k]; }
  const std::vector<RMatrix>& lags() const noexcept { return lags_; }

 private:
  std::vector<RMatrix> lags_;
};

// R_k = (1/N) sum_{t=1}^{N-k} y(t+k) y(t)^T, k = 0..max_lag.
CovarianceSequence sample_covariances(const TimeSeries& y, int max_lag);

enum class Window { rectangular, bartlett };

std::string_view to_string(Window w);
Window window_from_string(std::string_view s);
double window_weight(Window w, int lag, int max_lag);
// floor(sqrt(N))
int default_max_lag(int n);

// Omega(theta) = sum_{|l| <= M} w_l R_{|l|}^{(T if l < 0)} e^{-j l theta}.
// Hermitian but not necessarily positive; see check_positive.
MatrixFunction correlogram(const CovarianceSequence& c, Window window, const FrequencyGrid& grid);

struct CoercivityReport {
  double min_eigenvalue;
  double argmin_theta;
  double max_eigenvalue;
};

// Throws DataError when the minimum eigenvalue over the grid is <= 0.
CoercivityReport check_positive(const MatrixFunction& omega);

struct CovarianceEstimate {
  RMatrix sigma;
  Window window = Window::bartlett;
  int max_lag = 0;
  int grid_points = 0;
  double min_eigenvalue = 0.0;
  bool positive_definite = false;
};

// int G Omega G*, with the PD flag set when min eigenvalue > 1e-10 * trace.
CovarianceEstimate sigma_hat(const StateSpaceFilter& g, const SpectralDensity& omega,
                             Window window = Window::bartlett, int max_lag = 0);

// Wraps an externally supplied matrix (e.g. an override) with the same checks.
CovarianceEstimate make_covariance_estimate(RMatrix sigma, Window window, int max_lag,
                                            int grid_points);

}  // namespace threelike

#endif  // THREELIKE_ESTIMATION_HPP_
