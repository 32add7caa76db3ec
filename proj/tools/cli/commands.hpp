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

// Subcommands of the threelike tool. Each returns a process exit code:
// 0 success, 1 input or precondition error, 2 "ran but did not pass"
// (solver not converged, or a verification check failed).

#ifndef THREELIKE_CLI_COMMANDS_HPP_
#define THREELIKE_CLI_COMMANDS_HPP_

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>

#include <json.hpp>

#include "threelike/freqgrid.hpp"

namespace threelike::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 1;
inline constexpr int kExitNotPassed = 2;

inline constexpr int kFormatVersion = 1;

struct RunArgs {
  std::string data_path;
  std::optional<std::string> config_path;
  std::optional<std::string> output_dir;
  std::optional<int> grid_points;
  std::optional<std::uint64_t> seed;
  bool timing = false;
};

struct DivergenceArgs {
  std::string first;
  std::string second;
  std::string family;
  double parameter = 0.0;
  std::string key = "phi";
  std::optional<std::string> weight;
  std::optional<std::string> factor;
};

int run_estimate(const RunArgs& args, std::ostream& out, std::ostream& err);
int run_verify(const RunArgs& args, std::ostream& out, std::ostream& err);
int run_correlogram(const RunArgs& args, std::ostream& out, std::ostream& err);
int run_divergence(const DivergenceArgs& args, std::ostream& out, std::ostream& err);

// Rounds to 12 significant digits so that serialized values are stable.
double round12(double x);

// {"grid_points": nf, "dim": m, key: [[re_11, im_11, re_12, ...], ...]}
nlohmann::json samples_json(const MatrixFunction& f);
MatrixFunction read_samples(const nlohmann::json& doc, const std::string& key);

// FNV-1a over the samples quantized to 1e-10 of the largest entry, as hex.
std::string density_hash(const MatrixFunction& f);

}  // namespace threelike::cli

#endif  // THREELIKE_CLI_COMMANDS_HPP_
