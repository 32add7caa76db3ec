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
#include <functional>
#include <string>

#include "threelike/errors.hpp"

namespace threelike {
namespace {

constexpr double kClampFloor = -1e-9;

void require_compatible(const SpectralDensity& a, const SpectralDensity& b) {
  if (!(a.grid() == b.grid())) throw StructuralError("densities live on different grids");
  if (a.dim() != b.dim()) throw StructuralError("densities differ in dimension");
}

void require_factor(const SpectralDensity& psi, const MatrixFunction& w) {
  if (!(psi.grid() == w.grid())) throw StructuralError("factor lives on a different grid");
  if (w.rows() != psi.dim() || w.cols() != psi.dim()) {
    throw StructuralError("factor must be square with the density dimension");
  }
  for (int k = 0; k < psi.size(); ++k) {
    const double err = (w[k] * w[k].adjoint() - psi[k]).norm();
    if (err > 1e-9 * (1.0 + psi[k].norm())) {
      throw ParameterError("weight factor does not reproduce its density (residue " +
                           std::to_string(err) + ")");
    }
  }
}

// Pointwise eigendata, reused by the power/log evaluations of one sample.
struct Spectrum {
  explicit Spectrum(const CMatrix& h) : eig(hermitian_eigen(h)) {}

  CMatrix apply(const std::function<double(double)>& fn) const {
    const RVector mapped = eig.values.unaryExpr(fn);
    return eig.vectors * mapped.asDiagonal() * eig.vectors.adjoint();
  }
  CMatrix pow(double p) const {
    return apply([p](double l) { return std::pow(l, p); });
  }
  CMatrix log() const {
    return apply([](double l) { return std::log(l); });
  }
  double trace_pow(double p) const {
    return eig.values.unaryExpr([p](double l) { return std::pow(l, p); }).sum();
  }
  double log_det() const {
    return eig.values.unaryExpr([](double l) { return std::log(l); }).sum();
  }

  HermitianEigen eig;
};

// (1/nf) sum_k Re tr(integrand_k), with the imaginary residue check.
double trace_mean(int nf, const std::function<Complex(int)>& integrand) {
  Complex acc = 0.0;
  for (int k = 0; k < nf; ++k) acc += integrand(k);
  acc /= static_cast<double>(nf);
  if (std::abs(acc.imag()) > 1e-9 * (1.0 + std::abs(acc.real()))) {
    throw NumericalError("divergence integral has imaginary residue " +
                         std::to_string(acc.imag()));
  }
  return acc.real();
}

double finish(double raw, const char* name, Warnings* warnings) {
  if (raw >= 0.0) return raw;
  if (raw >= kClampFloor) {
    if (warnings) {
      warnings->push_back(std::string(name) + ": clamped " + std::to_string(raw) + " to 0");
    }
    return 0.0;
  }
  if (warnings) {
    warnings->push_back(std::string(name) + ": negative value " + std::to_string(raw));
  }
  return raw;
}

CMatrix solve_right(const CMatrix& lhs, const CMatrix& rhs) {
  // lhs * rhs^-1 for Hermitian PD rhs
  return rhs.ldlt().solve(lhs.adjoint()).adjoint();
}

Complex kl_integrand(const CMatrix& phi, const CMatrix& psi) {
  const Spectrum sp(phi);
  const Spectrum sq(psi);
  return (phi * (sp.log() - sq.log())).trace() - phi.trace() + psi.trace();
}

Complex is_integrand(const CMatrix& phi, const CMatrix& psi) {
  const Spectrum sp(phi);
  const Spectrum sq(psi);
  const auto m = static_cast<double>(phi.rows());
  return sq.log_det() - sp.log_det() + solve_right(phi, psi).trace() - m;
}

CMatrix beta_integrand(const CMatrix& phi, const CMatrix& psi, double beta) {
  const Spectrum sp(phi);
  const Spectrum sq(psi);
  return sp.pow(beta) / (beta * (beta - 1.0)) - phi * sq.pow(beta - 1.0) / (beta - 1.0) +
         sq.pow(beta) / beta;
}

CMatrix kl_matrix(const CMatrix& phi, const CMatrix& psi) {
  const Spectrum sp(phi);
  const Spectrum sq(psi);
  return phi * (sp.log() - sq.log()) - phi + psi;
}

CMatrix is_matrix(const CMatrix& phi, const CMatrix& psi) {
  const Spectrum sp(phi);
  const Spectrum sq(psi);
  return sq.log() - sp.log() + solve_right(phi, psi) -
         CMatrix::Identity(phi.rows(), phi.cols());
}

}  // namespace

SpectralDensity congruence(const SpectralDensity& phi, const MatrixFunction& w) {
  if (!(phi.grid() == w.grid()) || w.rows() != phi.dim()) {
    throw StructuralError("congruence factor does not match density");
  }
  return SpectralDensity(MatrixFunction::generate(phi.grid(), [&](int k, double) -> CMatrix {
    return hermitian_part(w[k].adjoint() * phi[k] * w[k]);
  }));
}

SpectralDensity whiten(const SpectralDensity& phi, const MatrixFunction& w) {
  if (!(phi.grid() == w.grid()) || w.rows() != phi.dim() || w.cols() != phi.dim()) {
    throw StructuralError("whitening factor does not match density");
  }
  return SpectralDensity(MatrixFunction::generate(phi.grid(), [&](int k, double) -> CMatrix {
    const auto lu = w[k].partialPivLu();
    const CMatrix left = lu.solve(phi[k]);                 // W^-1 Phi
    const CMatrix out = lu.solve(left.adjoint()).adjoint();  // (W^-1 (W^-1 Phi)^*)^*
    return hermitian_part(out);
  }));
}

double kl(const SpectralDensity& phi, const SpectralDensity& psi, Warnings* warnings) {
  require_compatible(phi, psi);
  const double raw =
      trace_mean(phi.size(), [&](int k) { return kl_integrand(phi[k], psi[k]); });
  return finish(raw, "kl", warnings);
}

double is_dist(const SpectralDensity& phi, const SpectralDensity& psi, Warnings* warnings) {
  require_compatible(phi, psi);
  const double raw =
      trace_mean(phi.size(), [&](int k) { return is_integrand(phi[k], psi[k]); });
  return finish(raw, "is", warnings);
}

double alpha_div(const SpectralDensity& phi, const SpectralDensity& psi, double alpha,
                 Warnings* warnings) {
  require_compatible(phi, psi);
  if (phi.dim() != 1) {
    throw UnsupportedError("the Alpha divergence family is defined for scalar densities only");
  }
  if (alpha == 0.0) return kl(psi, phi, warnings);
  if (alpha == 1.0) return kl(phi, psi, warnings);
  const double raw = trace_mean(phi.size(), [&](int k) -> Complex {
    const double f = phi[k](0, 0).real();
    const double p = psi[k](0, 0).real();
    return std::pow(f, alpha) * std::pow(p, 1.0 - alpha) / (alpha * (alpha - 1.0)) -
           f / (alpha - 1.0) + p / alpha;
  });
  return finish(raw, "alpha", warnings);
}

double beta_div(const SpectralDensity& phi, const SpectralDensity& psi, double beta,
                Warnings* warnings) {
  require_compatible(phi, psi);
  if (beta == 0.0) return is_dist(phi, psi, warnings);
  if (beta == 1.0) return kl(phi, psi, warnings);
  const double raw = trace_mean(phi.size(), [&](int k) -> Complex {
    return beta_integrand(phi[k], psi[k], beta).trace();
  });
  return finish(raw, "beta", warnings);
}

double tau_div(const SpectralDensity& phi, const SpectralDensity& psi, double tau,
               const MatrixFunction& psi_factor, Warnings* warnings) {
  require_compatible(phi, psi);
  require_factor(psi, psi_factor);
  if (tau == 0.0) return is_dist(phi, psi, warnings);
  const SpectralDensity x = whiten(phi, psi_factor);
  if (tau == 1.0) return kl(x, SpectralDensity::identity(phi.grid(), phi.dim()), warnings);
  const auto m = static_cast<double>(phi.dim());
  const double raw = trace_mean(phi.size(), [&](int k) -> Complex {
    const Spectrum sx(x[k]);
    return sx.trace_pow(tau) / (tau * (tau - 1.0)) -
           solve_right(phi[k], psi[k]).trace() / (tau - 1.0) + m / tau;
  });
  return finish(raw, "tau", warnings);
}

double b1_weighted(const SpectralDensity& phi, const SpectralDensity& psi, double beta,
                   const MatrixFunction& weight_factor, Warnings* warnings) {
  require_compatible(phi, psi);
  if (beta == 0.0) return is_dist(phi, psi, warnings);
  if (beta == 1.0) return kl1_weighted(phi, psi, weight_factor, warnings);
  return beta_div(congruence(phi, weight_factor), congruence(psi, weight_factor), beta, warnings);
}

double b2_weighted(const SpectralDensity& phi, const SpectralDensity& psi, double beta,
                   const SpectralDensity& weight, Warnings* warnings) {
  require_compatible(phi, psi);
  require_compatible(phi, weight);
  if (beta == 0.0) return is_weighted(phi, psi, weight, warnings);
  if (beta == 1.0) return kl2_weighted(phi, psi, weight, warnings);
  const double raw = trace_mean(phi.size(), [&](int k) -> Complex {
    return (weight[k] * beta_integrand(phi[k], psi[k], beta)).trace();
  });
  return finish(raw, "b2_weighted", warnings);
}

double kl1_weighted(const SpectralDensity& phi, const SpectralDensity& psi,
                    const MatrixFunction& weight_factor, Warnings* warnings) {
  require_compatible(phi, psi);
  return kl(congruence(phi, weight_factor), congruence(psi, weight_factor), warnings);
}

double kl2_weighted(const SpectralDensity& phi, const SpectralDensity& psi,
                    const SpectralDensity& weight, Warnings* warnings) {
  require_compatible(phi, psi);
  require_compatible(phi, weight);
  const double raw = trace_mean(phi.size(), [&](int k) -> Complex {
    return (weight[k] * kl_matrix(phi[k], psi[k])).trace();
  });
  return finish(raw, "kl2_weighted", warnings);
}

double is_weighted(const SpectralDensity& phi, const SpectralDensity& psi,
                   const SpectralDensity& weight, Warnings* warnings) {
  require_compatible(phi, psi);
  require_compatible(phi, weight);
  const double raw = trace_mean(phi.size(), [&](int k) -> Complex {
    return (weight[k] * is_matrix(phi[k], psi[k])).trace();
  });
  return finish(raw, "is_weighted", warnings);
}

std::string_view to_string(DivergenceFamily f) {
  switch (f) {
    case DivergenceFamily::kl: return "kl";
    case DivergenceFamily::is: return "is";
    case DivergenceFamily::alpha: return "alpha";
    case DivergenceFamily::beta: return "beta";
    case DivergenceFamily::tau: return "tau";
    case DivergenceFamily::b1_weighted: return "b1_weighted";
    case DivergenceFamily::b2_weighted: return "b2_weighted";
    case DivergenceFamily::kl1_weighted: return "kl1_weighted";
    case DivergenceFamily::kl2_weighted: return "kl2_weighted";
    case DivergenceFamily::is_weighted: return "is_weighted";
  }
  return "unknown";
}

DivergenceFamily divergence_family_from_string(std::string_view s) {
  for (auto f : {DivergenceFamily::kl, DivergenceFamily::is, DivergenceFamily::alpha,
                 DivergenceFamily::beta, DivergenceFamily::tau, DivergenceFamily::b1_weighted,
                 DivergenceFamily::b2_weighted, DivergenceFamily::kl1_weighted,
                 DivergenceFamily::kl2_weighted, DivergenceFamily::is_weighted}) {
    if (to_string(f) == s) return f;
  }
  throw ParameterError("unknown divergence family '" + std::string(s) + "'");
}

double divergence(const DivergenceSpec& spec, const SpectralDensity& phi,
                  const SpectralDensity& psi, Warnings* warnings) {
  const auto need_weight = [&]() -> const SpectralDensity& {
    if (!spec.weight) {
      throw ParameterError(std::string(to_string(spec.family)) + " needs a weight density Q");
    }
    return *spec.weight;
  };
  const auto need_factor = [&]() -> const MatrixFunction& {
    if (!spec.weight_factor) {
      throw ParameterError(std::string(to_string(spec.family)) + " needs a weight factor W_Q");
    }
    if (spec.weight) require_factor(*spec.weight, *spec.weight_factor);
    return *spec.weight_factor;
  };
  switch (spec.family) {
    case DivergenceFamily::kl: return kl(phi, psi, warnings);
    case DivergenceFamily::is: return is_dist(phi, psi, warnings);
    case DivergenceFamily::alpha: return alpha_div(phi, psi, spec.parameter, warnings);
    case DivergenceFamily::beta: return beta_div(phi, psi, spec.parameter, warnings);
    case DivergenceFamily::tau: {
      if (spec.weight_factor) {
        return tau_div(phi, psi, spec.parameter, *spec.weight_factor, warnings);
      }
      const auto eye = MatrixFunction::constant(psi.grid(), CMatrix::Identity(psi.dim(), psi.dim()));
      return tau_div(phi, psi, spec.parameter, eye, warnings);
    }
    case DivergenceFamily::b1_weighted:
      return b1_weighted(phi, psi, spec.parameter, need_factor(), warnings);
    case DivergenceFamily::b2_weighted:
      return b2_weighted(phi, psi, spec.parameter, need_weight(), warnings);
    case DivergenceFamily::kl1_weighted: return kl1_weighted(phi, psi, need_factor(), warnings);
    case DivergenceFamily::kl2_weighted: return kl2_weighted(phi, psi, need_weight(), warnings);
    case DivergenceFamily::is_weighted: return is_weighted(phi, psi, need_weight(), warnings);
  }
  throw ParameterError("unknown divergence family");
}

}  // namespace threelike
