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

#include "threelike/interpret.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <random>
#include <string>

#include <fftw3.h>

#include "threelike/divergence.hpp"
#include "threelike/errors.hpp"

namespace threelike {
namespace {

double beta_of(int nu) { return 1.0 - 1.0 / static_cast<double>(nu); }

MatrixFunction inverse_adjoint(const MatrixFunction& w) { return inverse(w).adjoint(); }

double scalar_mean(int nf, const std::function<double(int)>& fn) {
  double acc = 0.0;
  for (int k = 0; k < nf; ++k) acc += fn(k);
  return acc / static_cast<double>(nf);
}

double re(const SpectralDensity& f, int k) { return f[k](0, 0).real(); }

void require_same_grid(const DualProblem& problem, const SpectralDensity& omega) {
  if (!(omega.grid() == problem.grid()) || omega.dim() != problem.channels()) {
    throw StructuralError("correlogram does not match the problem grid or dimension");
  }
}

}  // namespace

double weighted_objective(const DualProblem& problem, const DualVariable& theta,
                          const SpectralDensity& omega) {
  require_same_grid(problem, omega);
  const int nu = problem.spec().nu;
  const double beta = beta_of(nu);
  const SpectralDensity model = problem.primal_from_dual(theta);
  switch (problem.spec().family) {
    case Family::tau:
      return b1_weighted(omega, model, beta, inverse_adjoint(problem.prior_factor()));
    case Family::alpha: {
      const SpectralDensity q(
          pointwise_power(problem.prior_density(), 1.0 / static_cast<double>(nu)));
      return b2_weighted(omega, model, beta, q);
    }
    case Family::beta:
      return beta_div(omega, model, beta);
  }
  throw ParameterError("unknown family");
}

double tau_power_term(const DualProblem& problem, const SpectralDensity& omega) {
  require_same_grid(problem, omega);
  const int nu = problem.spec().nu;
  if (problem.spec().family != Family::tau || nu < 2) {
    throw ParameterError("the power term is defined for the tau family with nu > 1");
  }
  const double c = static_cast<double>(nu) * nu / (1.0 - nu);
  const SpectralDensity x = whiten(omega, problem.prior_factor());
  return c * trace_integral(pointwise_power(x, beta_of(nu)));
}

double analytic_gap(const DualProblem& problem, const SpectralDensity& omega) {
  require_same_grid(problem, omega);
  const int nu = problem.spec().nu;
  const double dnu = nu;
  const double beta = beta_of(nu);
  const double c = dnu * dnu / (1.0 - dnu);
  const SpectralDensity& psi = problem.prior_density();
  const int nf = omega.size();
  const auto m = static_cast<double>(omega.dim());

  switch (problem.spec().family) {
    case Family::tau:
      if (nu > 1) {
        const SpectralDensity x = whiten(omega, problem.prior_factor());
        return -(tau_power_term(problem, omega) + dnu * trace_integral(x.function()));
      }
      [[fallthrough]];
    case Family::beta:
      if (nu > 1) {
        const MatrixFunction cross = multiply(omega.function(), pointwise_power(psi, -1.0 / dnu));
        return -(c * trace_integral(pointwise_power(omega, beta)) + dnu * trace_integral(cross));
      }
      return trace_integral(pointwise_log(omega)) -
             trace_integral(multiply(omega.function(), inverse(psi.function()))) + m;
    case Family::alpha:
      if (nu > 1) {
        return -scalar_mean(nf, [&](int k) {
          return c * std::pow(re(psi, k), 1.0 / dnu) * std::pow(re(omega, k), beta) +
                 dnu * re(omega, k);
        });
      }
      return -scalar_mean(nf, [&](int k) {
        const double p = re(psi, k);
        const double o = re(omega, k);
        return p * (std::log(p) - std::log(o)) + o - p;
      });
  }
  throw ParameterError("unknown family");
}

InterpretationReport dual_constant_check(const DualProblem& problem,
                                         const SpectralDensity& omega,
                                         const std::vector<DualVariable>& probes) {
  require_same_grid(problem, omega);
  if (probes.size() < 3) throw ParameterError("the constant check needs at least 3 probes");
  const RMatrix& sigma = problem.spec().sigma.sigma;
  const double mismatch =
      (output_covariance(problem.filter_response(), omega.function()) - sigma).norm() /
      sigma.norm();
  if (mismatch > 1e-8) {
    throw PreconditionError(
        "covariance estimate is not int G Omega G* for this correlogram (relative mismatch " +
        std::to_string(mismatch) +
        "); the correlogram condition int G Omega G* = Sigma must hold for the dual "
        "reading");
  }

  InterpretationReport report;
  report.family = problem.spec().family;
  report.nu = problem.spec().nu;
  report.j_at_zero = problem.dual_value(DualVariable::zero(problem.states()));
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& theta : probes) {
    ProbeRecord rec;
    rec.theta = theta.matrix();
    rec.dual_value = problem.dual_value(theta);
    rec.divergence = weighted_objective(problem, theta, omega);
    rec.difference = rec.dual_value - rec.divergence;
    lo = std::min(lo, rec.difference);
    hi = std::max(hi, rec.difference);
    report.probes.push_back(std::move(rec));
  }
  report.constant_spread = hi - lo;

  const double constant = analytic_gap(problem, omega);
  double deviation = 0.0;
  for (const auto& rec : report.probes) {
    deviation = std::max(deviation, std::abs(rec.difference - constant));
  }
  report.analytic_constant = constant;
  report.analytic_deviation = deviation;
  if (report.family == Family::tau && report.nu > 1) {
    report.displayed_term = tau_power_term(problem, omega);
  }
  return report;
}

std::vector<DualVariable> make_probes(const DualProblem& problem, int count,
                                      std::uint64_t seed) {
  if (count < 1) throw ParameterError("probe count must be positive");
  const int n = problem.states();
  std::vector<DualVariable> probes{DualVariable::zero(n)};
  const double target = 0.1 * problem.feasible(probes.front()).margin;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  while (static_cast<int>(probes.size()) < count) {
    RMatrix d(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) d(i, j) = normal(rng);
    }
    d = problem.project(0.5 * (d + d.transpose()));
    const double norm = d.norm();
    if (!(norm > 0.0)) continue;
    d /= norm;
    double scale = 1.0;
    for (int halving = 0; halving < 60; ++halving, scale *= 0.5) {
      DualVariable cand(scale * d);
      if (problem.feasible(cand).margin >= target) {
        probes.push_back(std::move(cand));
        break;
      }
    }
  }
  return probes;
}

namespace {

struct FftwFree {
  void operator()(fftw_complex* p) const { fftw_free(p); }
};
struct PlanFree {
  void operator()(fftw_plan_s* p) const { fftw_destroy_plan(p); }
};
using Buffer = std::unique_ptr<fftw_complex[], FftwFree>;
using Plan = std::unique_ptr<fftw_plan_s, PlanFree>;

// In-place complex DFT of length n in one direction.
class Transform {
 public:
  Transform(int n, int sign)
      : n_(n), buf_(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n))) {
    if (!buf_) throw NumericalError("FFT buffer allocation failed");
    plan_.reset(fftw_plan_dft_1d(n, buf_.get(), buf_.get(), sign, FFTW_ESTIMATE));
    if (!plan_) throw NumericalError("FFT planning failed");
  }

  std::vector<Complex> run(const std::vector<Complex>& in) {
    for (int i = 0; i < n_; ++i) {
      buf_[i][0] = in[i].real();
      buf_[i][1] = in[i].imag();
    }
    fftw_execute(plan_.get());
    std::vector<Complex> out(n_);
    for (int i = 0; i < n_; ++i) out[i] = {buf_[i][0], buf_[i][1]};
    return out;
  }

 private:
  int n_;
  Buffer buf_;
  Plan plan_;
};

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

}  // namespace

SpectralDensity ScalarFactor::density() const {
  return SpectralDensity(MatrixFunction::generate(grid, [&](int k, double) -> CMatrix {
    return CMatrix::Constant(1, 1, std::norm(values[k]));
  }));
}

ScalarFactor cepstral_factor(const SpectralDensity& phi) {
  if (phi.dim() != 1) throw UnsupportedError("cepstral factorization needs a scalar density");
  const int nf = phi.size();
  if (!is_power_of_two(nf)) {
    throw ParameterError("cepstral factorization needs a power-of-two grid, got " +
                         std::to_string(nf));
  }
  std::vector<Complex> log_phi(nf);
  for (int k = 0; k < nf; ++k) log_phi[k] = std::log(re(phi, k));

  // log Phi(theta) = sum_q c_q e^{-j q theta}
  std::vector<Complex> ceps = Transform(nf, FFTW_BACKWARD).run(log_phi);
  const int half = nf / 2;
  std::vector<Complex> causal(nf, 0.0);
  causal[0] = 0.5 * ceps[0].real() / nf;
  for (int q = 1; q < half; ++q) causal[q] = ceps[q].real() / nf;
  causal[half] = 0.5 * ceps[half].real() / nf;

  const std::vector<Complex> log_l = Transform(nf, FFTW_FORWARD).run(causal);
  ScalarFactor out{phi.grid(), std::vector<Complex>(nf)};
  double worst = 0.0;
  for (int k = 0; k < nf; ++k) {
    out.values[k] = std::exp(log_l[k]);
    const double p = re(phi, k);
    worst = std::max(worst, std::abs(std::norm(out.values[k]) - p) / p);
  }
  if (worst > 1e-6) {
    throw NumericalError("cepstral factor misses the density by " + std::to_string(worst) +
                         " relative; refine the grid");
  }
  return out;
}

SpectralDensity prediction_error_density(const SpectralDensity& omega, const ScalarFactor& l) {
  if (omega.dim() != 1 || !(omega.grid() == l.grid)) {
    throw StructuralError("prediction error density needs a scalar density on the factor grid");
  }
  return SpectralDensity(MatrixFunction::generate(omega.grid(), [&](int k, double) -> CMatrix {
    return CMatrix::Constant(1, 1, re(omega, k) / std::norm(l.values[k]));
  }));
}

double pem_criterion(const DualProblem& problem, const DualVariable& theta,
                     const SpectralDensity& omega) {
  require_same_grid(problem, omega);
  if (problem.channels() != 1) {
    throw UnsupportedError("the prediction-error criterion is implemented for scalar data only");
  }
  if (problem.spec().nu != 1) {
    throw ParameterError("the prediction-error criterion needs nu = 1");
  }
  const ScalarFactor l = cepstral_factor(problem.primal_from_dual(theta));
  const SpectralDensity lambda = prediction_error_density(omega, l);
  const SpectralDensity one = SpectralDensity::identity(omega.grid(), 1);
  if (problem.spec().family == Family::alpha) {
    return is_weighted(lambda, one, problem.prior_density());
  }
  return is_dist(lambda, one);
}

SpectralDensity ArModel::spectrum(const FrequencyGrid& grid) const {
  return SpectralDensity(MatrixFunction::generate(grid, [&](int, double theta) -> CMatrix {
    Complex den = 1.0;
    for (Eigen::Index i = 0; i < coefficients.size(); ++i) {
      den -= coefficients(i) * std::polar(1.0, -static_cast<double>(i + 1) * theta);
    }
    return CMatrix::Constant(1, 1, innovation_variance / std::norm(den));
  }));
}

ArModel levinson_durbin(const CovarianceSequence& c) {
  if (c.dim() != 1) throw UnsupportedError("Levinson-Durbin is implemented for scalar lags");
  const int p = c.max_lag();
  const double r0 = c[0](0, 0);
  if (!(r0 > 0.0)) throw DataError("lag-zero covariance must be positive");
  RVector a = RVector::Zero(p);
  double err = r0;
  for (int k = 1; k <= p; ++k) {
    double acc = c[k](0, 0);
    for (int i = 1; i < k; ++i) acc -= a(i - 1) * c[k - i](0, 0);
    const double kappa = acc / err;
    RVector prev = a;
    a(k - 1) = kappa;
    for (int i = 1; i < k; ++i) a(i - 1) = prev(i - 1) - kappa * prev(k - i - 1);
    err *= 1.0 - kappa * kappa;
    if (!(std::abs(kappa) < 1.0) || !(err > 1e-12 * r0)) {
      throw DataError("Toeplitz matrix of the lags is singular or indefinite at order " +
                      std::to_string(k));
    }
  }
  return ArModel{std::move(a), err};
}

}  // namespace threelike
