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

#include "threelike/filterbank.hpp"

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <unsupported/Eigen/KroneckerProduct>

#include "threelike/errors.hpp"

namespace threelike {

double spectral_radius(const RMatrix& a) {
  if (a.size() == 0) return 0.0;
  Eigen::EigenSolver<RMatrix> solver(a, /*computeEigenvectors=*/false);
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

int reachability_rank(const RMatrix& a, const RMatrix& b) {
  const auto n = a.rows();
  const auto m = b.cols();
  RMatrix reach(n, n * m);
  RMatrix block = b;
  for (Eigen::Index i = 0; i < n; ++i) {
    reach.middleCols(i * m, m) = block;
    block = a * block;
  }
  Eigen::JacobiSVD<RMatrix> svd(reach);
  const RVector& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0;
  int rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s(i) > 1e-10 * s(0)) ++rank;
  }
  return rank;
}

StateSpaceFilter::StateSpaceFilter(RMatrix a, RMatrix b) : a_(std::move(a)), b_(std::move(b)) {
  if (a_.rows() != a_.cols() || a_.rows() == 0) {
    throw StructuralError("filter A must be a non-empty square matrix");
  }
  if (b_.rows() != a_.rows() || b_.cols() == 0) {
    throw StructuralError("filter B must have as many rows as A");
  }
  if (!a_.allFinite() || !b_.allFinite()) throw ParameterError("filter has non-finite entries");
  if (states() <= inputs()) {
    throw ParameterError("filter needs more states than inputs (n = " + std::to_string(states()) +
                         ", m = " + std::to_string(inputs()) + ")");
  }
  const double rho = spectral_radius(a_);
  if (!(rho < 1.0)) {
    throw ParameterError("filter A is not strictly stable (spectral radius " +
                         std::to_string(rho) + ")");
  }
  const int rank = reachability_rank(a_, b_);
  if (rank != states()) {
    throw ParameterError("filter (A, B) is not reachable (rank " + std::to_string(rank) +
                         " < " + std::to_string(states()) + ")");
  }
}

StateSpaceFilter bank_of_delays(int n) {
  if (n < 2) throw ParameterError("bank of delays needs n >= 2");
  RMatrix a = RMatrix::Zero(n, n);
  a.diagonal(-1).setOnes();
  RMatrix b = RMatrix::Zero(n, 1);
  b(0, 0) = 1.0;
  return StateSpaceFilter(std::move(a), std::move(b));
}

namespace {

constexpr double kPoleMatchTol = 1e-12;

struct PoleGroup {
  Complex pole;  // Im >= 0 representative
  int multiplicity = 0;
};

std::vector<PoleGroup> group_poles(std::span<const Complex> poles) {
  std::vector<Complex> pending(poles.begin(), poles.end());
  std::vector<PoleGroup> groups;
  std::vector<bool> used(pending.size(), false);
  for (std::size_t i = 0; i < pending.size(); ++i) {
    if (used[i]) continue;
    const Complex p = pending[i];
    if (!(std::abs(p) < 1.0)) {
      throw ParameterError("pole modulus must be < 1, got " + std::to_string(std::abs(p)));
    }
    used[i] = true;
    if (std::abs(p.imag()) <= kPoleMatchTol) {
      bool merged = false;
      for (auto& g : groups) {
        if (g.pole.imag() == 0.0 && std::abs(g.pole - Complex(p.real(), 0.0)) <= kPoleMatchTol) {
          ++g.multiplicity;
          merged = true;
          break;
        }
      }
      if (!merged) groups.push_back({Complex(p.real(), 0.0), 1});
      continue;
    }
    // Complex pole: consume its conjugate partner.
    std::size_t partner = pending.size();
    for (std::size_t j = i + 1; j < pending.size(); ++j) {
      if (!used[j] && std::abs(pending[j] - std::conj(p)) <= kPoleMatchTol) {
        partner = j;
        break;
      }
    }
    if (partner == pending.size()) {
      throw ParameterError("complex pole without conjugate partner; A would not be real");
    }
    used[partner] = true;
    const Complex rep = p.imag() > 0 ? p : std::conj(p);
    bool merged = false;
    for (auto& g : groups) {
      if (std::abs(g.pole - rep) <= kPoleMatchTol) {
        ++g.multiplicity;
        merged = true;
        break;
      }
    }
    if (!merged) groups.push_back({rep, 1});
  }
  return groups;
}

}  // namespace

StateSpaceFilter pole_filter(std::span<const Complex> poles, int m, PoleRealization realization) {
  if (m < 1) throw ParameterError("pole filter needs m >= 1");
  if (poles.empty()) throw ParameterError("pole filter needs at least one pole");
  const std::vector<PoleGroup> groups = group_poles(poles);

  // Scalar (m = 1) structure first.
  int ns = 0;
  for (const auto& g : groups) ns += (g.pole.imag() == 0.0 ? 1 : 2) * g.multiplicity;
  RMatrix as = RMatrix::Zero(ns, ns);
  RMatrix bs = RMatrix::Zero(ns, 1);
  int offset = 0;
  for (const auto& g : groups) {
    const int width = g.pole.imag() == 0.0 ? 1 : 2;
    RMatrix block(width, width);
    if (width == 1) {
      block(0, 0) = g.pole.real();
    } else {
      const double r = std::abs(g.pole);
      const double phi = std::arg(g.pole);
      block << r * std::cos(phi), r * std::sin(phi), -r * std::sin(phi), r * std::cos(phi);
    }
    for (int copy = 0; copy < g.multiplicity; ++copy) {
      const int at = offset + copy * width;
      as.block(at, at, width, width) = block;
      if (realization == PoleRealization::diagonal || copy == 0) {
        bs(at, 0) = 1.0;
      } else {
        as.block(at, at - width, width, width).setIdentity();
      }
    }
    offset += width * g.multiplicity;
  }

  const RMatrix eye = RMatrix::Identity(m, m);
  RMatrix a = Eigen::kroneckerProduct(as, eye);
  RMatrix b = Eigen::kroneckerProduct(bs, eye);
  if (reachability_rank(a, b) != a.rows()) {
    throw ParameterError("pole filter realization is not reachable");
  }
  return StateSpaceFilter(std::move(a), std::move(b));
}

namespace {

CMatrix resolvent_times(const RMatrix& a, const RMatrix& b, Complex z) {
  const auto n = a.rows();
  CMatrix lhs = z * CMatrix::Identity(n, n) - a.cast<Complex>();
  Eigen::PartialPivLU<CMatrix> lu(lhs);
  const CMatrix inv = lu.inverse();
  const double cond = lhs.cwiseAbs().colwise().sum().maxCoeff() *
                      inv.cwiseAbs().colwise().sum().maxCoeff();
  if (!std::isfinite(cond) || cond > 1e12) {
    throw NumericalError("resolvent is near-singular on the unit circle (condition " +
                         std::to_string(cond) + "); filter is close to instability");
  }
  return inv * b.cast<Complex>();
}

}  // namespace

MatrixFunction evaluate(const StateSpaceFilter& g, const FrequencyGrid& grid) {
  return MatrixFunction::generate(
      grid, [&](int k, double) { return resolvent_times(g.a(), g.b(), grid.unit(k)); });
}

RMatrix output_covariance(const MatrixFunction& g_samples, const MatrixFunction& phi) {
  if (!(g_samples.grid() == phi.grid())) {
    throw StructuralError("filter and density live on different grids");
  }
  if (g_samples.cols() != phi.rows() || phi.rows() != phi.cols()) {
    throw StructuralError("filter inputs do not match density dimension");
  }
  const auto n = g_samples.rows();
  CMatrix acc = CMatrix::Zero(n, n);
  for (int k = 0; k < phi.size(); ++k) {
    acc.noalias() += g_samples[k] * phi[k] * g_samples[k].adjoint();
  }
  acc /= static_cast<double>(phi.size());
  const double scale = 1.0 + acc.norm();
  const double imag = acc.imag().norm();
  const double asym = (acc.real() - acc.real().transpose()).norm();
  if (imag > 1e-9 * scale || asym > 1e-9 * scale) {
    throw NumericalError("output covariance has imaginary/asymmetric residue " +
                         std::to_string(std::max(imag, asym)));
  }
  RMatrix re = acc.real();
  return 0.5 * (re + re.transpose());
}

RMatrix output_covariance(const StateSpaceFilter& g, const SpectralDensity& phi) {
  return output_covariance(evaluate(g, phi.grid()), phi.function());
}

PriorModel PriorModel::identity(int m) {
  if (m < 1) throw ParameterError("prior dimension must be >= 1");
  PriorModel p;
  p.kind_ = Kind::identity;
  p.m_ = m;
  return p;
}

PriorModel PriorModel::shaping_filter(RMatrix a, RMatrix b, RMatrix c, RMatrix d) {
  if (d.rows() != d.cols() || d.rows() == 0) {
    throw StructuralError("shaping filter D must be square and non-empty");
  }
  const auto m = d.rows();
  const auto nw = a.rows();
  if (a.cols() != nw || b.rows() != nw || c.cols() != nw ||
      (nw > 0 && (b.cols() != m || c.rows() != m))) {
    throw StructuralError("shaping filter (A, B, C, D) dimensions are inconsistent");
  }
  if (std::abs(d.determinant()) < 1e-12) {
    throw ParameterError("shaping filter D must be invertible");
  }
  if (nw > 0 && !(spectral_radius(a) < 1.0)) {
    throw ParameterError("shaping filter is not stable");
  }
  PriorModel p;
  p.kind_ = Kind::shaping_filter;
  p.m_ = static_cast<int>(m);
  p.a_ = std::move(a);
  p.b_ = nw > 0 ? std::move(b) : RMatrix::Zero(0, m);
  p.c_ = nw > 0 ? std::move(c) : RMatrix::Zero(m, 0);
  p.d_ = std::move(d);
  return p;
}

MatrixFunction prior_factor(const PriorModel& prior, const FrequencyGrid& grid) {
  const int m = prior.dim();
  if (prior.kind() == PriorModel::Kind::identity) {
    return MatrixFunction::constant(grid, CMatrix::Identity(m, m));
  }
  const bool dynamic = prior.a().rows() > 0;
  return MatrixFunction::generate(grid, [&](int k, double theta) -> CMatrix {
    CMatrix w = prior.d().cast<Complex>();
    if (dynamic) w += prior.c().cast<Complex>() * resolvent_times(prior.a(), prior.b(), grid.unit(k));
    const double det = std::abs(w.determinant());
    if (det < 1e-8) {
      throw DomainError("prior shaping filter is not minimum phase: |det W| = " +
                            std::to_string(det) + " at theta = " + std::to_string(theta),
                        det);
    }
    return w;
  });
}

SpectralDensity prior_density(const PriorModel& prior, const FrequencyGrid& grid) {
  if (prior.kind() == PriorModel::Kind::identity) {
    return SpectralDensity::identity(grid, prior.dim());
  }
  return SpectralDensity(prior_factor(prior, grid).map(
      [](const CMatrix& w) -> CMatrix { return hermitian_part(w * w.adjoint()); }));
}

}  // namespace threelike
