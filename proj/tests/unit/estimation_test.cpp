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

#include <cmath>
#include <numbers>
#include <sstream>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "threelike/errors.hpp"

namespace threelike {
namespace {

using std::numbers::pi;

RMatrix column(std::initializer_list<double> v) {
  RMatrix m(v.size(), 1);
  int i = 0;
  for (double x : v) m(i++, 0) = x;
  return m;
}

CovarianceSequence lags_of(std::initializer_list<double> r) {
  return testing::scalar_lags(std::vector<double>(r));
}

TEST(Demean, Examples) {
  EXPECT_LT(demean(TimeSeries(RMatrix::Constant(5, 1, 3.0))).samples().norm(), 1e-15);
  EXPECT_LT((demean(TimeSeries(column({1, 2, 3}))).samples() - column({-1, 0, 1})).norm(), 1e-15);
  RMatrix two = RMatrix::Random(50, 2);
  two.col(1).array() += 7.0;
  const RMatrix centered = demean(TimeSeries(two)).samples();
  EXPECT_LT(std::abs(centered.col(0).sum()), 1e-12);
  EXPECT_LT(std::abs(centered.col(1).sum()), 1e-12);
}

TEST(SampleCovariances, Alternating) {
  const CovarianceSequence c = sample_covariances(TimeSeries(column({1, -1, 1, -1})), 1);
  EXPECT_DOUBLE_EQ(c[0](0, 0), 1.0);
  EXPECT_DOUBLE_EQ(c[1](0, 0), -0.75);
}

TEST(SampleCovariances, Spike) {
  const CovarianceSequence c = sample_covariances(TimeSeries(column({1, 0, 0, 0})), 2);
  EXPECT_DOUBLE_EQ(c[0](0, 0), 0.25);
  EXPECT_DOUBLE_EQ(c[1](0, 0), 0.0);
  EXPECT_DOUBLE_EQ(c[2](0, 0), 0.0);
}

TEST(SampleCovariances, LagZeroIsBiasedVariance) {
  const TimeSeries y = demean(testing::arma_record({}, {}, 200, 9));
  const double var = y.samples().squaredNorm() / y.length();
  EXPECT_NEAR(sample_covariances(y, 0)[0](0, 0), var, 1e-14);
}

TEST(SampleCovariances, RejectsTooManyLags) {
  EXPECT_THROW(sample_covariances(TimeSeries(column({1, 2, 3})), 3), ParameterError);
}

TEST(Correlogram, Examples) {
  const FrequencyGrid grid(8);
  const MatrixFunction white = correlogram(lags_of({1.0, 0.0, 0.0}), Window::rectangular, grid);
  for (int k = 0; k < grid.size(); ++k) EXPECT_NEAR(white[k](0, 0).real(), 1.0, 1e-15);

  const MatrixFunction rect = correlogram(lags_of({1.0, 0.4}), Window::rectangular, grid);
  EXPECT_NEAR(rect[0](0, 0).real(), 1.8, 1e-14);
  EXPECT_NEAR(rect[4](0, 0).real(), 0.2, 1e-14);

  const MatrixFunction bart = correlogram(lags_of({1.0, 0.4}), Window::bartlett, grid);
  EXPECT_NEAR(bart[0](0, 0).real(), 1.4, 1e-14);
  for (int k = 0; k < grid.size(); ++k) {
    EXPECT_NEAR(bart[k](0, 0).real(), 1.0 + 0.4 * std::cos(grid.theta(k)), 1e-14);
  }
}

TEST(CheckPositive, Examples) {
  const FrequencyGrid grid(16);
  EXPECT_DOUBLE_EQ(check_positive(MatrixFunction::constant(grid, CMatrix::Identity(2, 2)))
                       .min_eigenvalue,
                   1.0);
  const MatrixFunction bad = correlogram(lags_of({1.0, 0.6}), Window::rectangular, grid);
  try {
    check_positive(bad);
    FAIL() << "expected a data error";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("Bartlett"), std::string::npos);
  }
}

TEST(CheckPositive, BartlettMatchesAveragedPeriodogram) {
  // Oracle: with M = N-1 the Bartlett correlogram is the periodogram
  // |sum y(t) e^{-j t theta}|^2 / N, which is >= 0 by construction.
  const FrequencyGrid grid(64);
  const TimeSeries y = demean(testing::arma_record({0.5}, {}, 16, 12));
  const MatrixFunction omega =
      correlogram(sample_covariances(y, y.length() - 1), Window::rectangular, grid);
  for (int k = 0; k < grid.size(); ++k) {
    Complex acc = 0.0;
    for (int t = 0; t < y.length(); ++t) {
      acc += y.samples()(t, 0) * std::polar(1.0, -t * grid.theta(k));
    }
    EXPECT_NEAR(omega[k](0, 0).real(), std::norm(acc) / y.length(), 1e-12);
  }
}

TEST(SigmaHat, Examples) {
  const FrequencyGrid grid(64);
  const StateSpaceFilter g3 = bank_of_delays(3);
  EXPECT_LT((sigma_hat(g3, SpectralDensity::identity(grid, 1)).sigma - RMatrix::Identity(3, 3)).norm(),
            1e-14);

  const SpectralDensity omega(correlogram(lags_of({1.0, 0.4}), Window::rectangular, grid));
  RMatrix expect(2, 2);
  expect << 1.0, 0.4, 0.4, 1.0;
  EXPECT_LT((sigma_hat(bank_of_delays(2), omega).sigma - expect).norm(), 1e-14);

  std::vector<double> r = testing::ar_autocovariance({0.5}, 1.0, 10);
  const SpectralDensity ar(correlogram(testing::scalar_lags(r), Window::bartlett, grid));
  const CovarianceEstimate est = sigma_hat(bank_of_delays(2), ar, Window::bartlett, 10);
  EXPECT_NEAR(est.sigma(0, 0), 4.0 / 3.0, 1e-12);
  EXPECT_NEAR(est.sigma(0, 1), (1.0 - 1.0 / 11.0) * 2.0 / 3.0, 1e-12);
  EXPECT_TRUE(est.positive_definite);
  EXPECT_EQ(est.max_lag, 10);
}

TEST(SigmaHat, ToeplitzOfWindowedLags) {
  const int n = 4;
  const int max_lag = 6;
  const TimeSeries y = demean(testing::arma_record({0.6, -0.2}, {0.3}, 300, 17));
  const CovarianceSequence c = sample_covariances(y, max_lag);
  for (Window w : {Window::rectangular, Window::bartlett}) {
    const SpectralDensity omega(correlogram(c, w, FrequencyGrid(256)));
    const RMatrix s = sigma_hat(bank_of_delays(n), omega).sigma;
    for (int i = 0; i < n; ++i) {
      for (int k = 0; k < n; ++k) {
        const int l = std::abs(i - k);
        EXPECT_NEAR(s(i, k), window_weight(w, l, max_lag) * c[l](0, 0), 1e-10);
      }
    }
  }
}

TEST(MakeCovarianceEstimate, RejectsAsymmetricOrIndefinite) {
  RMatrix asym(2, 2);
  asym << 1, 0.5, 0, 1;
  EXPECT_THROW(make_covariance_estimate(asym, Window::bartlett, 1, 8), ParameterError);
  RMatrix indef(2, 2);
  indef << 1, 2, 2, 1;
  EXPECT_THROW(make_covariance_estimate(indef, Window::bartlett, 1, 8), ParameterError);
  RMatrix singular(2, 2);
  singular << 1, 1, 1, 1;
  EXPECT_FALSE(make_covariance_estimate(singular, Window::bartlett, 1, 8).positive_definite);
}

TEST(ReadCsv, HeaderAndBlankLines) {
  std::istringstream in("y1,y2\n1,2\n\n3,4\n5,6\n");
  const TimeSeries y = read_time_series_csv(in);
  EXPECT_EQ(y.length(), 3);
  EXPECT_EQ(y.channels(), 2);
  EXPECT_DOUBLE_EQ(y.samples()(2, 1), 6.0);
}

TEST(ReadCsv, MalformedRowNamesTheLine) {
  std::istringstream in("1.0\n2.0\nabc\n4.0\n");
  try {
    read_time_series_csv(in);
    FAIL() << "expected an input error";
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
  }
  std::istringstream ragged("1,2\n3\n");
  EXPECT_THROW(read_time_series_csv(ragged), InputError);
}

}  // namespace
}  // namespace threelike
