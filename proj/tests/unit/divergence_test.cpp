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


#include "threelike/divergence.hpp"

#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "threelike/errors.hpp"

namespace threelike {
namespace {

using testing::Rng;

const FrequencyGrid kGrid(128);

SpectralDensity scalar(double v) { return SpectralDensity::constant(kGrid, CMatrix::Constant(1, 1, v)); }

MatrixFunction identity_factor(int m) { return MatrixFunction::constant(kGrid, CMatrix::Identity(m, m)); }

// Random pair (Phi, Psi) with the factor W of Psi.
struct Pair {
  SpectralDensity phi;
  SpectralDensity psi;
  MatrixFunction w;
};

Pair random_pair(int m, Rng& rng) {
  MatrixFunction w = testing::random_factor(kGrid, m, rng);
  SpectralDensity psi = testing::density_of(w);
  return {testing::random_density(kGrid, m, rng), std::move(psi), std::move(w)};
}

TEST(Kl, ClosedForms) {
  EXPECT_NEAR(kl(scalar(2.0), scalar(2.0)), 0.0, 1e-15);
  EXPECT_NEAR(kl(scalar(2.0), scalar(1.0)), 2.0 * std::log(2.0) - 1.0, 1e-14);
  EXPECT_NEAR(kl(scalar(1.0), scalar(2.0)), 1.0 - std::log(2.0), 1e-14);
}

TEST(IsDist, ClosedFormAndFactorInvariance) {
  EXPECT_NEAR(is_dist(scalar(2.0), scalar(1.0)), 1.0 - std::log(2.0), 1e-14);
  Rng rng(1);
  for (int trial = 0; trial < 5; ++trial) {
    const Pair p = random_pair(1, rng);
    const double direct = is_dist(p.phi, p.psi);
    const double whitened = is_dist(whiten(p.phi, p.w), SpectralDensity::identity(kGrid, 1));
    EXPECT_NEAR(direct, whitened, 1e-12 * (1.0 + direct));
  }
}

TEST(AlphaDiv, ClosedFormAndScalarOnly) {
  for (double a : {-1.0, 0.5, 2.0}) EXPECT_NEAR(alpha_div(scalar(3.0), scalar(3.0), a), 0.0, 1e-14);
  EXPECT_NEAR(alpha_div(scalar(2.0), scalar(1.0), 0.5), 6.0 - 4.0 * std::sqrt(2.0), 1e-14);
  const auto two = SpectralDensity::identity(kGrid, 2);
  EXPECT_THROW(alpha_div(two, two, 0.5), UnsupportedError);
}

TEST(AlphaDiv, ApproachesKlNearOne) {
  Rng rng(2);
  const Pair p = random_pair(1, rng);
  const double limit = kl(p.phi, p.psi);
  EXPECT_LE(std::abs(alpha_div(p.phi, p.psi, 1.0 - 1e-4) - limit), 1e-3 * (1.0 + limit));
}

TEST(BetaDiv, ClosedFormAndLimit) {
  EXPECT_NEAR(beta_div(scalar(2.0), scalar(1.0), 0.5), 6.0 - 4.0 * std::sqrt(2.0), 1e-14);
  Rng rng(3);
  const Pair p = random_pair(2, rng);
  EXPECT_NEAR(beta_div(p.phi, p.phi, 0.5), 0.0, 1e-12);
  const double limit = is_dist(p.phi, p.psi);
  EXPECT_LE(std::abs(beta_div(p.phi, p.psi, 1e-4) - limit), 1e-3 * (1.0 + limit));
}

TEST(TauDiv, EqualsBetaOfWhitenedDensity) {
  Rng rng(4);
  for (int trial = 0; trial < 5; ++trial) {
    const Pair p = random_pair(1, rng);
    for (double t : {0.3, 0.5, 2.0 / 3.0, -0.5}) {
      const double tau = tau_div(p.phi, p.psi, t, p.w);
      const double beta = beta_div(whiten(p.phi, p.w), SpectralDensity::identity(kGrid, 1), t);
      EXPECT_NEAR(tau, beta, 1e-10);
    }
    EXPECT_NEAR(tau_div(p.psi, p.psi, 0.5, p.w), 0.0, 1e-12);
    const double limit = is_dist(p.phi, p.psi);
    EXPECT_LE(std::abs(tau_div(p.phi, p.psi, 1e-4, p.w) - limit), 1e-3 * (1.0 + limit));
  }
}

TEST(TauDiv, RejectsWrongFactor) {
  Rng rng(5);
  const Pair p = random_pair(1, rng);
  EXPECT_THROW(tau_div(p.phi, p.psi, 0.5, identity_factor(1)), ParameterError);
}

TEST(B1Weighted, Reductions) {
  Rng rng(6);
  for (int m : {1, 2}) {
    const Pair p = random_pair(m, rng);
    const double beta = 0.4;
    EXPECT_NEAR(b1_weighted(p.phi, p.psi, beta, identity_factor(m)), beta_div(p.phi, p.psi, beta),
                1e-10);
    // Q = Psi^-1 with W_Q = W^-*
    const MatrixFunction wq = inverse(p.w).adjoint();
    EXPECT_NEAR(b1_weighted(p.phi, p.psi, beta, wq), tau_div(p.phi, p.psi, beta, p.w), 1e-10);
    EXPECT_NEAR(b1_weighted(p.phi, p.phi, beta, wq), 0.0, 1e-12);
  }
}

TEST(B2Weighted, Reductions) {
  Rng rng(7);
  const Pair p2 = random_pair(2, rng);
  EXPECT_NEAR(b2_weighted(p2.phi, p2.psi, 0.6, SpectralDensity::identity(kGrid, 2)),
              beta_div(p2.phi, p2.psi, 0.6), 1e-10);
  for (int trial = 0; trial < 5; ++trial) {
    const Pair p = random_pair(1, rng);
    for (double beta : {0.3, 0.5, 1.7}) {
      const SpectralDensity q(pointwise_power(p.psi, 1.0 - beta));
      EXPECT_NEAR(b2_weighted(p.phi, p.psi, beta, q), alpha_div(p.phi, p.psi, beta), 1e-10);
    }
    EXPECT_NEAR(b2_weighted(p.psi, p.psi, 0.5, p.phi), 0.0, 1e-12);
  }
}

TEST(WeightedLimits, ReduceAtIdentityWeight) {
  Rng rng(8);
  const Pair p = random_pair(2, rng);
  const auto eye = SpectralDensity::identity(kGrid, 2);
  EXPECT_NEAR(kl1_weighted(p.phi, p.psi, identity_factor(2)), kl(p.phi, p.psi), 1e-12);
  EXPECT_NEAR(kl2_weighted(p.phi, p.psi, eye), kl(p.phi, p.psi), 1e-12);
  EXPECT_NEAR(is_weighted(p.phi, p.psi, eye), is_dist(p.phi, p.psi), 1e-12);
}

TEST(WeightedLimits, ScalarWeightedIsInvariance) {
  Rng rng(9);
  for (int trial = 0; trial < 5; ++trial) {
    const Pair p = random_pair(1, rng);
    const SpectralDensity q = testing::random_scalar_density(kGrid, rng);
    const double direct = is_weighted(p.phi, p.psi, q);
    const double whitened = is_weighted(whiten(p.phi, p.w), SpectralDensity::identity(kGrid, 1), q);
    EXPECT_NEAR(direct, whitened, 1e-10);
  }
}

TEST(Endpoints, DispatchToLimits) {
  Rng rng(10);
  const Pair p = random_pair(2, rng);
  const SpectralDensity q = testing::random_density(kGrid, 2, rng);
  const MatrixFunction wq = testing::random_factor(kGrid, 2, rng);
  EXPECT_EQ(beta_div(p.phi, p.psi, 0.0), is_dist(p.phi, p.psi));
  EXPECT_EQ(beta_div(p.phi, p.psi, 1.0), kl(p.phi, p.psi));
  EXPECT_EQ(tau_div(p.phi, p.psi, 0.0, p.w), is_dist(p.phi, p.psi));
  EXPECT_EQ(b1_weighted(p.phi, p.psi, 1.0, wq), kl1_weighted(p.phi, p.psi, wq));
  EXPECT_EQ(b2_weighted(p.phi, p.psi, 0.0, q), is_weighted(p.phi, p.psi, q));
  EXPECT_EQ(b2_weighted(p.phi, p.psi, 1.0, q), kl2_weighted(p.phi, p.psi, q));
  const Pair s = random_pair(1, rng);
  EXPECT_EQ(alpha_div(s.phi, s.psi, 0.0), kl(s.psi, s.phi));
}

TEST(Endpoints, ContinuityBands) {
  Rng rng(11);
  const Pair p = random_pair(2, rng);
  const SpectralDensity q = testing::random_density(kGrid, 2, rng);
  const MatrixFunction wq = testing::random_factor(kGrid, 2, rng);
  const auto within = [](double value, double limit) {
    return std::abs(value - limit) <= 1e-3 * (1.0 + std::abs(limit));
  };
  for (double eps : {1e-4, -1e-4}) {
    EXPECT_TRUE(within(beta_div(p.phi, p.psi, eps), is_dist(p.phi, p.psi)));
    EXPECT_TRUE(within(beta_div(p.phi, p.psi, 1.0 + eps), kl(p.phi, p.psi)));
    EXPECT_TRUE(within(tau_div(p.phi, p.psi, 1.0 + eps, p.w),
                       kl(whiten(p.phi, p.w), SpectralDensity::identity(kGrid, 2))));
    EXPECT_TRUE(within(b1_weighted(p.phi, p.psi, 1.0 + eps, wq), kl1_weighted(p.phi, p.psi, wq)));
    EXPECT_TRUE(within(b2_weighted(p.phi, p.psi, eps, q), is_weighted(p.phi, p.psi, q)));
    EXPECT_TRUE(within(b2_weighted(p.phi, p.psi, 1.0 + eps, q), kl2_weighted(p.phi, p.psi, q)));
  }
}

TEST(Properties, NonnegativeOnRandomPairs) {
  Rng rng(12);
  for (int trial = 0; trial < 20; ++trial) {
    const int m = 1 + trial % 2;
    const Pair p = random_pair(m, rng);
    const SpectralDensity q = testing::random_density(kGrid, m, rng);
    const MatrixFunction wq = testing::random_factor(kGrid, m, rng);
    EXPECT_GE(kl(p.phi, p.psi), -1e-9);
    EXPECT_GE(is_dist(p.phi, p.psi), -1e-9);
    EXPECT_GE(beta_div(p.phi, p.psi, 0.5), -1e-9);
    EXPECT_GE(beta_div(p.phi, p.psi, -0.7), -1e-9);
    EXPECT_GE(tau_div(p.phi, p.psi, 0.5, p.w), -1e-9);
    EXPECT_GE(b1_weighted(p.phi, p.psi, 1.5, wq), -1e-9);
    EXPECT_GE(b2_weighted(p.phi, p.psi, 0.5, q), -1e-9);
    EXPECT_GE(kl1_weighted(p.phi, p.psi, wq), -1e-9);
    EXPECT_GE(kl2_weighted(p.phi, p.psi, q), -1e-9);
    EXPECT_GE(is_weighted(p.phi, p.psi, q), -1e-9);
    if (m == 1) EXPECT_GE(alpha_div(p.phi, p.psi, 0.5), -1e-9);
  }
}

TEST(Properties, SmallDivergenceMeansCloseDensities) {
  Rng rng(13);
  const SpectralDensity phi = testing::random_density(kGrid, 2, rng);
  const SpectralDensity near(phi.function().map([](const CMatrix& x) -> CMatrix {
    return x * (1.0 + 1e-6);
  }));
  for (const auto* psi : {&phi, &near}) {
    const double v = beta_div(phi, *psi, 0.5);
    if (v < 1e-10) {
      double worst = 0.0;
      for (int k = 0; k < kGrid.size(); ++k) worst = std::max(worst, (phi[k] - (*psi)[k]).norm());
      EXPECT_LT(worst, 1e-4);
    }
  }
}

TEST(Properties, TraceWeightDominatesScaledBeta) {
  Rng rng(14);
  for (int trial = 0; trial < 5; ++trial) {
    const Pair p = random_pair(2, rng);
    const SpectralDensity q = testing::random_density(kGrid, 2, rng);
    const double k = q.lower_bound();
    EXPECT_LE(k * beta_div(p.phi, p.psi, 0.5), b2_weighted(p.phi, p.psi, 0.5, q) + 1e-12);
  }
}

TEST(Clamping, NearEqualInputsNeverGoNegative) {
  Rng rng(15);
  const SpectralDensity a = testing::random_density(kGrid, 2, rng);
  const SpectralDensity b(a.function().map([](const CMatrix& x) -> CMatrix {
    return x * (1.0 + 1e-9);
  }));
  for (double beta : {0.25, 0.5, 2.0}) {
    Warnings warnings;
    EXPECT_GE(beta_div(a, b, beta, &warnings), 0.0);
    for (const auto& w : warnings) EXPECT_NE(w.find("clamped"), std::string::npos);
  }
}

TEST(Dispatcher, RequiresWeightsAndParsesNames) {
  DivergenceSpec spec;
  spec.family = divergence_family_from_string("b2_weighted");
  spec.parameter = 0.5;
  EXPECT_THROW(divergence(spec, scalar(2.0), scalar(1.0)), ParameterError);
  spec.weight = SpectralDensity::identity(kGrid, 1);
  EXPECT_NEAR(divergence(spec, scalar(2.0), scalar(1.0)), 6.0 - 4.0 * std::sqrt(2.0), 1e-14);
  EXPECT_THROW(divergence_family_from_string("hellinger"), ParameterError);
  spec.family = DivergenceFamily::tau;
  EXPECT_NEAR(divergence(spec, scalar(2.0), scalar(1.0)), 6.0 - 4.0 * std::sqrt(2.0), 1e-14);
}

}  // namespace
}  // namespace threelike
