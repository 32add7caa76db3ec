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

#include "run_config.hpp"

#include <fstream>
#include <initializer_list>
#include <limits>
#include <string_view>

#include "threelike/errors.hpp"

namespace threelike::cli {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw InputError("config " + where + ": " + what);
}

void require_object(const json& j, const std::string& where) {
  if (!j.is_object()) fail(where, "expected an object");
}

void allow_keys(const json& j, const std::string& where,
                std::initializer_list<std::string_view> keys) {
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (auto k : keys) known = known || key == k;
    if (!known) fail(where, "unknown key '" + key + "'");
  }
}

const json& need(const json& j, const std::string& where, const char* key) {
  if (!j.contains(key)) fail(where, std::string("missing key '") + key + "'");
  return j.at(key);
}

std::string as_string(const json& j, const std::string& where) {
  if (!j.is_string()) fail(where, "expected a string");
  return j.get<std::string>();
}

double as_number(const json& j, const std::string& where) {
  if (!j.is_number()) fail(where, "expected a number");
  return j.get<double>();
}

long long as_integer(const json& j, const std::string& where) {
  if (!j.is_number_integer()) fail(where, "expected an integer");
  return j.get<long long>();
}

int as_int(const json& j, const std::string& where, long long lo) {
  const long long v = as_integer(j, where);
  if (v < lo || v > std::numeric_limits<int>::max()) {
    fail(where, "value " + std::to_string(v) + " out of range");
  }
  return static_cast<int>(v);
}

RMatrix as_matrix(const json& j, const std::string& where) {
  if (!j.is_array()) fail(where, "expected an array of rows");
  if (j.empty()) return RMatrix(0, 0);
  const auto rows = j.size();
  std::size_t cols = 0;
  for (std::size_t r = 0; r < rows; ++r) {
    if (!j[r].is_array()) fail(where, "row " + std::to_string(r) + " is not an array");
    if (r == 0) cols = j[r].size();
    if (j[r].size() != cols) fail(where, "rows differ in length");
  }
  RMatrix out(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      out(r, c) = as_number(j[r][c], where + "[" + std::to_string(r) + "][" + std::to_string(c) + "]");
    }
  }
  return out;
}

json matrix_json(const RMatrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

FilterConfig parse_filter(const json& j) {
  const std::string where = "filter";
  require_object(j, where);
  const std::string type = as_string(need(j, where, "type"), where + ".type");
  FilterConfig f;
  if (type == "delays") {
    allow_keys(j, where, {"type", "n"});
    f.type = FilterConfig::Type::delays;
    f.n = as_int(need(j, where, "n"), where + ".n", 2);
  } else if (type == "poles") {
    allow_keys(j, where, {"type", "poles", "channels"});
    f.type = FilterConfig::Type::poles;
    const json& poles = need(j, where, "poles");
    if (!poles.is_array() || poles.empty()) fail(where + ".poles", "expected a non-empty array");
    for (std::size_t i = 0; i < poles.size(); ++i) {
      const std::string at = where + ".poles[" + std::to_string(i) + "]";
      if (!poles[i].is_array() || poles[i].size() != 2) fail(at, "expected [re, im]");
      f.poles.emplace_back(as_number(poles[i][0], at), as_number(poles[i][1], at));
    }
    if (j.contains("channels")) f.channels = as_int(j.at("channels"), where + ".channels", 1);
  } else if (type == "state_space") {
    allow_keys(j, where, {"type", "A", "B"});
    f.type = FilterConfig::Type::state_space;
    f.a = as_matrix(need(j, where, "A"), where + ".A");
    f.b = as_matrix(need(j, where, "B"), where + ".B");
  } else {
    fail(where + ".type", "unknown filter type '" + type + "'");
  }
  return f;
}

PriorConfig parse_prior(const json& j) {
  const std::string where = "prior";
  require_object(j, where);
  const std::string type = as_string(need(j, where, "type"), where + ".type");
  PriorConfig p;
  if (type == "identity") {
    allow_keys(j, where, {"type"});
  } else if (type == "shaping_filter") {
    allow_keys(j, where, {"type", "A", "B", "C", "D"});
    p.type = PriorModel::Kind::shaping_filter;
    p.a = as_matrix(need(j, where, "A"), where + ".A");
    p.b = as_matrix(need(j, where, "B"), where + ".B");
    p.c = as_matrix(need(j, where, "C"), where + ".C");
    p.d = as_matrix(need(j, where, "D"), where + ".D");
  } else {
    fail(where + ".type", "unknown prior type '" + type + "'");
  }
  return p;
}

WindowConfig parse_window(const json& j) {
  const std::string where = "window";
  require_object(j, where);
  allow_keys(j, where, {"kind", "max_lag"});
  WindowConfig w;
  if (j.contains("kind")) {
    try {
      w.kind = window_from_string(as_string(j.at("kind"), where + ".kind"));
    } catch (const ParameterError& e) {
      fail(where + ".kind", e.what());
    }
  }
  if (j.contains("max_lag") && !j.at("max_lag").is_null()) {
    w.max_lag = as_int(j.at("max_lag"), where + ".max_lag", 0);
  }
  return w;
}

SolverOptions parse_solver(const json& j) {
  const std::string where = "solver";
  require_object(j, where);
  allow_keys(j, where, {"grad_tol", "moment_tol", "max_iters", "armijo_c", "backtrack_ratio"});
  SolverOptions o;
  if (j.contains("grad_tol")) o.grad_tol = as_number(j.at("grad_tol"), where + ".grad_tol");
  if (j.contains("moment_tol")) o.moment_tol = as_number(j.at("moment_tol"), where + ".moment_tol");
  if (j.contains("max_iters")) o.max_iters = as_int(j.at("max_iters"), where + ".max_iters", 1);
  if (j.contains("armijo_c")) o.armijo_c = as_number(j.at("armijo_c"), where + ".armijo_c");
  if (j.contains("backtrack_ratio")) {
    o.backtrack_ratio = as_number(j.at("backtrack_ratio"), where + ".backtrack_ratio");
  }
  try {
    o.validate();
  } catch (const ParameterError& e) {
    fail(where, e.what());
  }
  return o;
}

}  // namespace

RunConfig parse_run_config(const json& j) {
  require_object(j, "root");
  allow_keys(j, "root",
             {"filter", "prior", "family", "nu", "window", "grid_points", "solver", "output",
              "seed", "probes", "subspace", "sigma_hat_override"});
  RunConfig c;
  c.filter = parse_filter(need(j, "root", "filter"));
  if (j.contains("prior")) c.prior = parse_prior(j.at("prior"));
  try {
    c.family = family_from_string(as_string(need(j, "root", "family"), "family"));
  } catch (const ParameterError& e) {
    fail("family", e.what());
  }
  c.nu = as_int(need(j, "root", "nu"), "nu", 1);
  if (j.contains("window")) c.window = parse_window(j.at("window"));
  if (j.contains("grid_points")) c.grid_points = as_int(j.at("grid_points"), "grid_points", 4);
  if (c.grid_points % 2 != 0) fail("grid_points", "must be even");
  if (j.contains("solver")) c.solver = parse_solver(j.at("solver"));
  if (j.contains("output")) c.output = as_string(j.at("output"), "output");
  if (j.contains("seed")) {
    const long long s = as_integer(j.at("seed"), "seed");
    if (s < 0) fail("seed", "must be non-negative");
    c.seed = static_cast<std::uint64_t>(s);
  }
  if (j.contains("probes")) c.probes = as_int(j.at("probes"), "probes", 3);
  if (j.contains("subspace")) {
    const json& s = j.at("subspace");
    if (!s.is_array()) fail("subspace", "expected an array of matrices");
    for (std::size_t i = 0; i < s.size(); ++i) {
      c.subspace.push_back(as_matrix(s[i], "subspace[" + std::to_string(i) + "]"));
    }
  }
  if (j.contains("sigma_hat_override") && !j.at("sigma_hat_override").is_null()) {
    c.sigma_hat_override = as_matrix(j.at("sigma_hat_override"), "sigma_hat_override");
  }
  return c;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError("config '" + path + "' is not valid JSON: " + e.what());
  }
  return parse_run_config(j);
}

json to_json(const RunConfig& c) {
  json j;
  switch (c.filter.type) {
    case FilterConfig::Type::delays:
      j["filter"] = {{"type", "delays"}, {"n", c.filter.n}};
      break;
    case FilterConfig::Type::poles: {
      json poles = json::array();
      for (const auto& p : c.filter.poles) poles.push_back({p.real(), p.imag()});
      j["filter"] = {{"type", "poles"}, {"poles", poles}, {"channels", c.filter.channels}};
      break;
    }
    case FilterConfig::Type::state_space:
      j["filter"] = {{"type", "state_space"}, {"A", matrix_json(c.filter.a)},
                     {"B", matrix_json(c.filter.b)}};
      break;
  }
  if (c.prior.type == PriorModel::Kind::identity) {
    j["prior"] = {{"type", "identity"}};
  } else {
    j["prior"] = {{"type", "shaping_filter"}, {"A", matrix_json(c.prior.a)},
                  {"B", matrix_json(c.prior.b)}, {"C", matrix_json(c.prior.c)},
                  {"D", matrix_json(c.prior.d)}};
  }
  j["family"] = std::string(to_string(c.family));
  j["nu"] = c.nu;
  j["window"] = {{"kind", std::string(to_string(c.window.kind))},
                 {"max_lag", c.window.max_lag ? json(*c.window.max_lag) : json(nullptr)}};
  j["grid_points"] = c.grid_points;
  j["solver"] = {{"grad_tol", c.solver.grad_tol},
                 {"moment_tol", c.solver.moment_tol},
                 {"max_iters", c.solver.max_iters},
                 {"armijo_c", c.solver.armijo_c},
                 {"backtrack_ratio", c.solver.backtrack_ratio}};
  j["output"] = c.output;
  j["seed"] = c.seed;
  j["probes"] = c.probes;
  if (!c.subspace.empty()) {
    json s = json::array();
    for (const auto& m : c.subspace) s.push_back(matrix_json(m));
    j["subspace"] = s;
  }
  if (c.sigma_hat_override) j["sigma_hat_override"] = matrix_json(*c.sigma_hat_override);
  return j;
}

StateSpaceFilter build_filter(const FilterConfig& f) {
  switch (f.type) {
    case FilterConfig::Type::delays:
      return bank_of_delays(f.n);
    case FilterConfig::Type::poles:
      return pole_filter(f.poles, f.channels);
    case FilterConfig::Type::state_space:
      return StateSpaceFilter(f.a, f.b);
  }
  throw InputError("unknown filter type");
}

PriorModel build_prior(const PriorConfig& p, int channels) {
  if (p.type == PriorModel::Kind::identity) return PriorModel::identity(channels);
  return PriorModel::shaping_filter(p.a, p.b, p.c, p.d);
}

}  // namespace threelike::cli
