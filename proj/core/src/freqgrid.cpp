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

#include "threelike/freqgrid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <utility>

#include <Eigen/Eigenvalues>

#include "threelike/errors.hpp"

namespace threelike {

FrequencyGrid::FrequencyGrid(int nf) : nf_(nf) {
  if (nf < 4 || nf % 2 != 0) {
    throw ParameterError("frequency grid needs an even number of points >= 4, got " +
                         std::to_string(nf));
  }
}

double FrequencyGrid::theta(int k) const noexcept {
  return 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(nf_);
}

Complex FrequencyGrid::unit(int k) const noexcept { return std::polar(1.0, theta(k)); }

MatrixFunction::MatrixFunction(FrequencyGrid grid, std::vector<CMatrix> samples)
    : grid_(grid), samples_(std::move(samples)) {
  if (static_cast<int>(samples_.size()) != grid_.size()) {
    throw StructuralError("matrix function has " + std::to_string(samples_.size()) +
                          " samples for a grid of " + std::to_string(grid_.size()));
  }
  const auto r = samples_.front().rows();
  const auto c = samples_.front().cols();
  if (r == 0 || c == 0) throw StructuralError("matrix function samples are empty");
  for (const auto& s : samples_) {
    if (s.rows() != r || s.cols() != c) {
      throw StructuralError("matrix function samples differ in shape");
    }
  }
}

MatrixFunction MatrixFunction::constant(FrequencyGrid grid, const CMatrix& value) {
  return MatrixFunction(grid, std::vector<CMatrix>(grid.size(), value));
}

MatrixFunction MatrixFunction::generate(
    FrequencyGrid grid, const std::function<CMatrix(int, double)>& fn) {
  std::vector<CMatrix> samples;
  samples.reserve(grid.size());
  for (int k = 0; k < grid.size(); ++k) samples.push_back(fn(k, grid.theta(k)));
  return MatrixFunction(grid, std::move(samples));
}

MatrixFunction MatrixFunction::adjoint() const {
  return map([](const CMatrix& h) -> CMatrix { return h.adjoint(); });
}

MatrixFunction MatrixFunction::map(
    const std::function<CMatrix(const CMatrix&)>& fn) const {
  std::vector<CMatrix> out;
  out.reserve(samples_.size());
  for (const auto& s : samples_) out.push_back(fn(s));
  return MatrixFunction(grid_, std::move(out));
}

namespace {

double hermitian_residue(const CMatrix& h) {
  return (h - h.adjoint()).norm();
}

}  // namespace

SpectralDensity::SpectralDensity(MatrixFunction f) : f_(std::move(f)) {
  if (f_.rows() != f_.cols()) {
    throw StructuralError("spectral density samples must be square");
  }
  std::vector<CMatrix> samples;
  samples.reserve(f_.size());
  k1_ = std::numeric_limits<double>::infinity();
  k2_ = 0.0;
  for (int k = 0; k < f_.size(); ++k) {
    const CMatrix& h = f_[k];
    const double residue = hermitian_residue(h);
    if (residue > 1e-12 * h.norm()) {
      throw DomainError("spectral density sample " + std::to_string(k) +
                            " is not Hermitian (residue " + std::to_string(residue) + ")",
                        residue);
    }
    CMatrix sym = hermitian_part(h);
    const HermitianEigen eig = hermitian_eigen(sym);
    const double lo = eig.values(0);
    if (!(lo > 0.0)) {
      throw DomainError("spectral density is not positive definite at theta = " +
                            std::to_string(f_.grid().theta(k)) +
                            " (min eigenvalue " + std::to_string(lo) + ")",
                        lo);
    }
    k1_ = std::min(k1_, lo);
    k2_ = std::max(k2_, eig.values(eig.values.size() - 1));
    samples.push_back(std::move(sym));
  }
  f_ = MatrixFunction(f_.grid(), std::move(samples));
}

SpectralDensity SpectralDensity::identity(FrequencyGrid grid, int m) {
  return SpectralDensity(MatrixFunction::constant(grid, CMatrix::Identity(m, m)));
}

SpectralDensity SpectralDensity::constant(FrequencyGrid grid, const CMatrix& value) {
  return SpectralDensity(MatrixFunction::constant(grid, value));
}

CMatrix integrate(const MatrixFunction& f) {
  CMatrix acc = CMatrix::Zero(f.rows(), f.cols());
  for (const auto& s : f.samples()) acc += s;
  return acc / static_cast<double>(f.size());
}

double trace_integral(const MatrixFunction& f) {
  if (f.rows() != f.cols()) {
    throw StructuralError("trace_integral needs square samples");
  }
  const Complex t = integrate(f).trace();
  if (std::abs(t.imag()) > 1e-9 * (1.0 + std::abs(t.real()))) {
    throw NumericalError("trace integral has imaginary residue " + std::to_string(t.imag()));
  }
  return t.real();
}

HermitianEigen hermitian_eigen(const CMatrix& h) {
  if (h.rows() == 1) {
    HermitianEigen out;
    out.values = RVector::Constant(1, h(0, 0).real());
    out.vectors = CMatrix::Identity(1, 1);
    return out;
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(h);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("Hermitian eigendecomposition failed to converge");
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

CMatrix hermitian_part(const CMatrix& h) { return 0.5 * (h + h.adjoint()); }

bool is_hermitian(const CMatrix& h, double rel_tol) {
  return h.rows() == h.cols() && hermitian_residue(h) <= rel_tol * h.norm();
}

CMatrix hermitian_apply(const CMatrix& h, const std::function<double(double)>& fn) {
  const HermitianEigen eig = hermitian_eigen(h);
  RVector mapped = eig.values.unaryExpr(fn);
  return hermitian_part(eig.vectors * mapped.asDiagonal() * eig.vectors.adjoint());
}

namespace {

HermitianEigen pd_eigen(const CMatrix& h, const char* op) {
  if (h.rows() != h.cols()) throw StructuralError(std::string(op) + " needs a square matrix");
  if (!is_hermitian(h, 1e-10)) {
    throw DomainError(std::string(op) + " needs a Hermitian matrix", hermitian_residue(h));
  }
  HermitianEigen eig = hermitian_eigen(hermitian_part(h));
  const double lo = eig.values(0);
  if (!(lo > 0.0)) {
    throw DomainError(std::string(op) + " needs a positive definite matrix (min eigenvalue " +
                          std::to_string(lo) + ")",
                      lo);
  }
  return eig;
}

CMatrix rebuild(const HermitianEigen& eig, const RVector& mapped) {
  return hermitian_part(eig.vectors * mapped.asDiagonal() * eig.vectors.adjoint());
}

}  // namespace

CMatrix matrix_power(const CMatrix& h, double p) {
  const HermitianEigen eig = pd_eigen(h, "matrix_power");
  if (p == 0.0) return CMatrix::Identity(h.rows(), h.cols());
  if (p == 1.0) return hermitian_part(h);
  return rebuild(eig, eig.values.unaryExpr([p](double l) { return std::pow(l, p); }));
}

CMatrix matrix_log(const CMatrix& h) {
  const HermitianEigen eig = pd_eigen(h, "matrix_log");
  return rebuild(eig, eig.values.unaryExpr([](double l) { return std::log(l); }));
}

CMatrix matrix_exp(const CMatrix& h) {
  if (!is_hermitian(h, 1e-10)) {
    throw DomainError("matrix_exp needs a Hermitian matrix", hermitian_residue(h));
  }
  return hermitian_apply(hermitian_part(h), [](double l) { return std::exp(l); });
}

MatrixFunction pointwise_power(const SpectralDensity& phi, double p) {
  return phi.function().map([p](const CMatrix& h) { return matrix_power(h, p); });
}

MatrixFunction pointwise_log(const SpectralDensity& phi) {
  return phi.function().map([](const CMatrix& h) { return matrix_log(h); });
}

namespace {

void require_same_grid(const MatrixFunction& a, const MatrixFunction& b) {
  if (!(a.grid() == b.grid())) throw StructuralError("matrix functions live on different grids");
}

}  // namespace

MatrixFunction multiply(const MatrixFunction& a, const MatrixFunction& b) {
  require_same_grid(a, b);
  if (a.cols() != b.rows()) throw StructuralError("pointwise product shape mismatch");
  std::vector<CMatrix> out;
  out.reserve(a.size());
  for (int k = 0; k < a.size(); ++k) out.push_back(a[k] * b[k]);
  return MatrixFunction(a.grid(), std::move(out));
}

MatrixFunction multiply(const MatrixFunction& a, const MatrixFunction& b,
                        const MatrixFunction& c) {
  return multiply(multiply(a, b), c);
}

MatrixFunction inverse(const MatrixFunction& f) {
  if (f.rows() != f.cols()) throw StructuralError("pointwise inverse needs square samples");
  return f.map([](const CMatrix& h) -> CMatrix {
    Eigen::FullPivLU<CMatrix> lu(h);
    if (!lu.isInvertible()) throw DomainError("pointwise inverse of a singular sample", 0.0);
    return lu.inverse();
  });
}

}  // namespace threelike
