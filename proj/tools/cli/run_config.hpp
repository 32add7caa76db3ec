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

// JSON run configuration. Parsing is strict: unknown keys, wrong types and
// out-of-range values are rejected before any computation starts.
//
//   {
//     "filter": {"type": "delays", "n": 4}
//             | {"type": "poles", "poles": [[re, im], ...], "channels": 1}
//             | {"type": "state_space", "A": [[...]], "B": [[...]]},
//     "prior": {"type": "identity"}
//            | {"type": "shaping_filter", "A": ..., "B": ..., "C": ..., "D": ...},
//     "family": "alpha" | "beta" | "tau",
//     "nu": 1,
//     "window": {"kind": "bartlett", "max_lag": null},
//     "grid_points": 2048,
//     "solver": {"grad_tol": 1e-7, "moment_tol": 1e-6, "max_iters": 500,
//                "armijo_c": 1e-4, "backtrack_ratio": 0.5},
//     "output": "out",
//     "seed": 42,
//     "probes": 5,
//     "subspace": [[[...]], ...],          optional
//     "sigma_hat_override": [[...]]        optional
//   }

#ifndef THREELIKE_CLI_RUN_CONFIG_HPP_
#define THREELIKE_CLI_RUN_CONFIG_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "threelike/dualsolver.hpp"
#include "threelike/estimation.hpp"
#include "threelike/filterbank.hpp"

namespace threelike::cli {

struct FilterConfig {
  enum class Type { delays, poles, state_space };
  Type type = Type::delays;
  int n = 0;
  std::vector<Complex> poles;
  int channels = 1;
  RMatrix a;
  RMatrix b;
};

struct PriorConfig {
  PriorModel::Kind type = PriorModel::Kind::identity;
  RMatrix a, b, c, d;
};

struct WindowConfig {
  Window kind = Window::bartlett;
  std::optional<int> max_lag;
};

struct RunConfig {
  FilterConfig filter;
  PriorConfig prior;
  Family family = Family::tau;
  int nu = 1;
  WindowConfig window;
  int grid_points = FrequencyGrid::kDefaultPoints;
  SolverOptions solver;
  std::string output = "out";
  std::uint64_t seed = 42;
  int probes = 5;
  std::vector<RMatrix> subspace;
  std::optional<RMatrix> sigma_hat_override;
};

// Throws InputError naming the offending key.
RunConfig parse_run_config(const nlohmann::json& j);
RunConfig load_run_config(const std::string& path);

// Fully expanded form (defaults filled in); parses back to an equal config.
nlohmann::json to_json(const RunConfig& c);

StateSpaceFilter build_filter(const FilterConfig& f);
PriorModel build_prior(const PriorConfig& p, int channels);

}  // namespace threelike::cli

#endif  // THREELIKE_CLI_RUN_CONFIG_HPP_
