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

#include "threelike/estimation.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <utility>

#include <Eigen/Eigenvalues>

#include "threelike/errors.hpp"

namespace threelike {

TimeSeries::TimeSeries(RMatrix samples) : samples_(std::move(samples)) {
  if (samples_.rows() < 2) throw ParameterError("time series needs at least 2 samples");
  if (samples_.cols() < 1) throw ParameterError("time series needs at least 1 channel");
  if (!samples_.allFinite()) throw ParameterError("time series has non-finite entries");
}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::optional<double> parse_number(std::string_view field) {
  field = trim(field);
  if (field.empty()) return std::nullopt;
  if (field.front() == '+') field.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size()) return std::nullopt;
  return value;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    fields.push_back(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

}  // namespace

TimeSeries read_time_series_csv(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  int line_no = 0;
  std::size_t width = 0;
  bool header_checked = false;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view view = trim(line);
    if (view.empty()) continue;
    const auto fields = split(view);
    std::vector<double> row;
    row.reserve(fields.size());
    bool numeric = true;
    for (const auto& f : fields) {
      const auto v = parse_number(f);
      if (!v) {
        numeric = false;
        break;
      }
      row.push_back(*v);
    }
    if (!header_checked) {
      header_checked = true;
      if (!numeric) {
        width = fields.size();
        continue;
      }
    }
    if (!numeric) {
      throw InputError("CSV line " + std::to_string(line_no) + ": non-numeric field");
    }
    if (width == 0) width = row.size();
    if (row.size() != width) {
      throw InputError("CSV line " + std::to_string(line_no) + ": expected " +
                       std::to_string(width) + " columns, found " + std::to_string(row.size()));
    }
    for (double v : row) {
      if (!std::isfinite(v)) {
        throw InputError("CSV line " + std::to_string(line_no) + ": non-finite value");
      }
    }
    rows.push_back(std::move(row));
  }
  if (rows.size() < 2) throw InputError("CSV holds fewer than 2 data rows");
  RMatrix samples(rows.size(), width);
  for (std::size_t t = 0; t < rows.size(); ++t) {
    for (std::size_t j = 0; j < width; ++j) samples(t, j) = rows[t][j];
  }
  return TimeSeries(std::move(samples));
}

TimeSeries demean(const TimeSeries& y) {
  RMatrix centered = y.samples();
  centered.rowwise() -= centered.colwise().mean();
  return TimeSeries(std::move(centered));
}

CovarianceSequence::CovarianceSequence(std::vector<RMatrix> lags) : lags_(std::move(lags)) {
  if (lags_.empty()) throw ParameterError("covariance sequence needs at least R_0");
  const auto m = lags_.front().rows();
  for (const auto& r : lags_) {
    if (r.rows() != m || r.cols() != m) throw StructuralError("covariance lags differ in shape");
  }
}

CovarianceSequence sample_covariances(const TimeSeries& y, int max_lag) {
  const int n = y.length();
  if (max_lag < 0 || max_lag >= n) {
    throw ParameterError("max lag must satisfy 0 <= M <= N-1 (M = " + std::to_string(max_lag) +
                         ", N = " + std::to_string(n) + ")");
  }
  const RMatrix& s = y.samples();
  std::vector<RMatrix> lags;
  lags.reserve(max_lag + 1);
  for (int k = 0; k <= max_lag; ++k) {
    // sum_t y(t+k) y(t)^T over the overlapping segment
    RMatrix r = s.bottomRows(n - k).transpose() * s.topRows(n - k);
    lags.push_back(r / static_cast<double>(n));
  }
  return CovarianceSequence(std::move(lags));
}

std::string_view to_string(Window w) {
  return w == Window::bartlett ? "bartlett" : "rectangular";
}

Window window_from_string(std::string_view s) {
  if (s == "bartlett") return Window::bartlett;
  if (s == "rectangular") return Window::rectangular;
  throw ParameterError("unknown window '" + std::string(s) + "'");
}

double window_weight(Window w, int lag, int max_lag) {
  if (w == Window::rectangular) return 1.0;
  return 1.0 - static_cast<double>(std::abs(lag)) / static_cast<double>(max_lag + 1);
}

int default_max_lag(int n) {
  return static_cast<int>(std::floor(std::sqrt(static_cast<double>(n))));
}

MatrixFunction correlogram(const CovarianceSequence& c, Window window, const FrequencyGrid& grid) {
  const int max_lag = c.max_lag();
  return MatrixFunction::generate(grid, [&](int, double theta) -> CMatrix {
    CMatrix omega = c[0].cast<Complex>();
    for (int l = 1; l <= max_lag; ++l) {
      const double w = window_weight(window, l, max_lag);
      const Complex e = std::polar(1.0, -static_cast<double>(l) * theta);
      omega += w * (e * c[l].cast<Complex>() + std::conj(e) * c[l].transpose().cast<Complex>());
    }
    return hermitian_part(omega);
  });
}

CoercivityReport check_positive(const MatrixFunction& omega) {
  CoercivityReport report{std::numeric_limits<double>::infinity(), 0.0,
                          -std::numeric_limits<double>::infinity()};
  for (int k = 0; k < omega.size(); ++k) {
    const HermitianEigen eig = hermitian_eigen(hermitian_part(omega[k]));
    if (eig.values(0) < report.min_eigenvalue) {
      report.min_eigenvalue = eig.values(0);
      report.argmin_theta = omega.grid().theta(k);
    }
    report.max_eigenvalue = std::max(report.max_eigenvalue, eig.values(eig.values.size() - 1));
  }
  if (!(report.min_eigenvalue > 0.0)) {
    throw DataError("correlogram is not positive definite (min eigenvalue " +
                    std::to_string(report.min_eigenvalue) + " at theta = " +
                    std::to_string(report.argmin_theta) +
                    "); use the Bartlett window, a longer record or a smaller max lag");
  }
  return report;
}

CovarianceEstimate make_covariance_estimate(RMatrix sigma, Window window, int max_lag,
                                            int grid_points) {
  if (sigma.rows() != sigma.cols()) throw StructuralError("covariance estimate must be square");
  if ((sigma - sigma.transpose()).norm() > 1e-12 * (1.0 + sigma.norm())) {
    throw ParameterError("covariance estimate must be symmetric");
  }
  CovarianceEstimate est;
  est.sigma = 0.5 * (sigma + sigma.transpose());
  est.window = window;
  est.max_lag = max_lag;
  est.grid_points = grid_points;
  Eigen::SelfAdjointEigenSolver<RMatrix> eig(est.sigma, Eigen::EigenvaluesOnly);
  est.min_eigenvalue = eig.eigenvalues()(0);
  const double trace = est.sigma.trace();
  if (est.min_eigenvalue < -1e-10 * std::abs(trace)) {
    throw ParameterError("covariance estimate is not positive semidefinite (min eigenvalue " +
                         std::to_string(est.min_eigenvalue) + ")");
  }
  est.positive_definite = est.min_eigenvalue > 1e-10 * trace;
  return est;
}

CovarianceEstimate sigma_hat(const StateSpaceFilter& g, const SpectralDensity& omega,
                             Window window, int max_lag) {
  return make_covariance_estimate(output_covariance(g, omega), window, max_lag, omega.size());
}

}  // namespace threelike
