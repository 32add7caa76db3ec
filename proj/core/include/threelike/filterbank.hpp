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

#ifndef THREELIKE_FILTERBANK_HPP_
#define THREELIKE_FILTERBANK_HPP_

#include <span>

#include "threelike/freqgrid.hpp"

namespace threelike {

// Measurement filter G(z) = (zI - A)^{-1} B with A strictly stable, (A, B)
// reachable and more states than inputs.
class StateSpaceFilter {
 public:
  StateSpaceFilter(RMatrix a, RMatrix b);

  const RMatrix& a() const noexcept { return a_; }
  const RMatrix& b() const noexcept { return b_; }
  int states() const noexcept { return static_cast<int>(a_.rows()); }
  int inputs() const noexcept { return static_cast<int>(b_.cols()); }

 private:
  RMatrix a_;
  RMatrix b_;
};

double spectral_radius(const RMatrix& a);
int reachability_rank(const RMatrix& a, const RMatrix& b);

// G(z) = [z^-1, ..., z^-n]^T.
StateSpaceFilter bank_of_delays(int n);

enum class PoleRealization {
  // One Jordan-free block per pole; repeated poles make (A, B) unreachable.
  diagonal,
  // Repeated poles are chained through a shift so each copy adds a new
  // direction to the reachable subspace.
  shift_chain,
};

// Real block-diagonal realization of a conjugate-closed pole set. Real poles
// give 1x1 blocks, conjugate pairs r e^{+-j phi} give
// r [[cos phi, sin phi], [-sin phi, cos phi]]; each channel gets a copy of the
// scalar structure (A = A_s kron I_m, B = b_s kron I_m).
StateSpaceFilter pole_filter(std::span<const Complex> poles, int m = 1,
                             PoleRealization realization = PoleRealization::shift_chain);

// Samples of G(e^{j theta}) (n x m). Throws NumericalError when
// (e^{j theta} I - A) has condition number above 1e12.
MatrixFunction evaluate(const StateSpaceFilter& g, const FrequencyGrid& grid);

// Real symmetric part of integral G Phi G*; the imaginary / antisymmetric
// residue must stay below 1e-9 relative.
RMatrix output_covariance(const StateSpaceFilter& g, const SpectralDensity& phi);
RMatrix output_covariance(const MatrixFunction& g_samples, const MatrixFunction& phi);

// Prior spectral density Psi = W W*, given through its shaping filter
// W(z) = C (zI - A)^{-1} B + D.
class PriorModel {
 public:
  enum class Kind { identity, shaping_filter };

  static PriorModel identity(int m);
  // A may be 0x0 for a static (constant) factor.
  static PriorModel shaping_filter(RMatrix a, RMatrix b, RMatrix c, RMatrix d);

  Kind kind() const noexcept { return kind_; }
  int dim() const noexcept { return m_; }
  const RMatrix& a() const noexcept { return a_; }
  const RMatrix& b() const noexcept { return b_; }
  const RMatrix& c() const noexcept { return c_; }
  const RMatrix& d() const noexcept { return d_; }

 private:
  PriorModel() = default;

  Kind kind_ = Kind::identity;
  int m_ = 1;
  RMatrix a_, b_, c_, d_;
};

// W(e^{j theta}); throws DomainError when |det W| < 1e-8 at a grid point.
MatrixFunction prior_factor(const PriorModel& prior, const FrequencyGrid& grid);
SpectralDensity prior_density(const PriorModel& prior, const FrequencyGrid& grid);

}  // namespace threelike

#endif  // THREELIKE_FILTERBANK_HPP_
