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

// Matrix-valued functions sampled on a uniform grid of the unit circle, and
// the Hermitian matrix calculus (powers, logarithms) the estimators need.
//
// Integration is the normalized rectangle rule (1/nf) * sum_k f(theta_k),
// which is exact for trigonometric polynomials of degree < nf and converges
// geometrically for the smooth rational integrands used here.

#ifndef THREELIKE_FREQGRID_HPP_
#define THREELIKE_FREQGRID_HPP_

#include <complex>
#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace threelike {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

class FrequencyGrid {
 public:
  static constexpr int kDefaultPoints = 2048;

  // nf must be even and >= 4 so that 0 and pi are grid points.
  explicit FrequencyGrid(int nf = kDefaultPoints);

  int size() const noexcept { return nf_; }
  double theta(int k) const noexcept;
  // e^{j theta_k}
  Complex unit(int k) const noexcept;
  // Index of the grid point mirrored through theta = pi.
  int mirror(int k) const noexcept { return k == 0 ? 0 : nf_ - k; }

  friend bool operator==(const FrequencyGrid& a, const FrequencyGrid& b) {
    return a.nf_ == b.nf_;
  }

 private:
  int nf_;
};

class MatrixFunction {
 public:
  // All samples must share the same shape and there must be one per point.
  MatrixFunction(FrequencyGrid grid, std::vector<CMatrix> samples);

  static MatrixFunction constant(FrequencyGrid grid, const CMatrix& value);
  static MatrixFunction generate(
      FrequencyGrid grid, const std::function<CMatrix(int, double)>& fn);

  const FrequencyGrid& grid() const noexcept { return grid_; }
  int size() const noexcept { return grid_.size(); }
  Eigen::Index rows() const noexcept { return samples_.front().rows(); }
  Eigen::Index cols() const noexcept { return samples_.front().cols(); }
  const CMatrix& operator[](int k) const { return samples_[k]; }
  const std::vector<CMatrix>& samples() const noexcept { return samples_; }

  MatrixFunction adjoint() const;
  // Pointwise map preserving the grid.
  MatrixFunction map(const std::function<CMatrix(const CMatrix&)>& fn) const;

 private:
  FrequencyGrid grid_;
  std::vector<CMatrix> samples_;
};

// A MatrixFunction whose samples are Hermitian and positive definite on every
// grid point. Samples are re-symmetrized on construction after a relative
// Hermitian check of 1e-12; no eigenvalue is ever clipped.
class SpectralDensity {
 public:
  explicit SpectralDensity(MatrixFunction f);

  static SpectralDensity identity(FrequencyGrid grid, int m);
  static SpectralDensity constant(FrequencyGrid grid, const CMatrix& value);

  const MatrixFunction& function() const noexcept { return f_; }
  const FrequencyGrid& grid() const noexcept { return f_.grid(); }
  int size() const noexcept { return f_.size(); }
  int dim() const noexcept { return static_cast<int>(f_.rows()); }
  const CMatrix& operator[](int k) const { return f_[k]; }

  // Coercivity and boundedness witnesses k1, k2 measured on the grid.
  double lower_bound() const noexcept { return k1_; }
  double upper_bound() const noexcept { return k2_; }

 private:
  MatrixFunction f_;
  double k1_ = 0.0;
  double k2_ = 0.0;
};

CMatrix integrate(const MatrixFunction& f);

// Real part of trace(integrate(f)); throws NumericalError when the imaginary
// part exceeds 1e-9 * (1 + |real part|).
double trace_integral(const MatrixFunction& f);

// Eigendecomposition of a Hermitian matrix with a closed form for 1x1.
struct HermitianEigen {
  RVector values;  // ascending
  CMatrix vectors;
};
HermitianEigen hermitian_eigen(const CMatrix& h);

CMatrix hermitian_part(const CMatrix& h);
bool is_hermitian(const CMatrix& h, double rel_tol = 1e-12);

// U f(diag(lambda)) U* for Hermitian h.
CMatrix hermitian_apply(const CMatrix& h, const std::function<double(double)>& fn);

// H^p for Hermitian positive definite H. Throws DomainError naming the minimum
// eigenvalue when H is not PD.
CMatrix matrix_power(const CMatrix& h, double p);
CMatrix matrix_log(const CMatrix& h);
CMatrix matrix_exp(const CMatrix& h);

// Pointwise lifts over a density.
MatrixFunction pointwise_power(const SpectralDensity& phi, double p);
MatrixFunction pointwise_log(const SpectralDensity& phi);

// Pointwise products a*b and a*b*c of compatible functions on the same grid.
MatrixFunction multiply(const MatrixFunction& a, const MatrixFunction& b);
MatrixFunction multiply(const MatrixFunction& a, const MatrixFunction& b,
                        const MatrixFunction& c);
// Pointwise inverse of square samples.
MatrixFunction inverse(const MatrixFunction& f);

}  // namespace threelike

#endif  // THREELIKE_FREQGRID_HPP_
