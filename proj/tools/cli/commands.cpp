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

#include "commands.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <utility>
#include <vector>

#include "run_config.hpp"
#include "threelike/divergence.hpp"
#include "threelike/dualsolver.hpp"
#include "threelike/errors.hpp"
#include "threelike/estimation.hpp"
#include "threelike/interpret.hpp"

namespace threelike::cli {

using nlohmann::json;

namespace {

constexpr double kSpreadTol = 1e-6;
constexpr double kPemTol = 1e-6;
constexpr double kCoincidenceTol = 1e-8;
constexpr double kPerturbation = 1e-2;
constexpr int kPerturbations = 10;

json num(double x) {
  if (!std::isfinite(x)) return nullptr;
  return round12(x);
}

json matrix_json(const RMatrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(num(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

json theta_json(const FrequencyGrid& grid) {
  json t = json::array();
  for (int k = 0; k < grid.size(); ++k) t.push_back(num(grid.theta(k)));
  return t;
}

std::filesystem::path output_dir(const RunArgs& args, const RunConfig& cfg) {
  std::filesystem::path dir = args.output_dir ? *args.output_dir : cfg.output;
  std::filesystem::create_directories(dir);
  return dir;
}

void write_json(const std::filesystem::path& path, const json& doc) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  out << doc.dump(2) << '\n';
}

void write_csv(const std::filesystem::path& path, const MatrixFunction& f) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  out << "theta";
  for (Eigen::Index i = 0; i < f.rows(); ++i) {
    for (Eigen::Index j = 0; j < f.cols(); ++j) {
      out << ",re_" << i + 1 << j + 1 << ",im_" << i + 1 << j + 1;
    }
  }
  out << '\n';
  char buf[64];
  for (int k = 0; k < f.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%.12g", f.grid().theta(k));
    out << buf;
    for (Eigen::Index i = 0; i < f.rows(); ++i) {
      for (Eigen::Index j = 0; j < f.cols(); ++j) {
        std::snprintf(buf, sizeof buf, ",%.12g,%.12g", round12(f[k](i, j).real()),
                      round12(f[k](i, j).imag()));
        out << buf;
      }
    }
    out << '\n';
  }
}

RunConfig load_config(const RunArgs& args) {
  RunConfig cfg;
  if (args.config_path) cfg = load_run_config(*args.config_path);
  if (args.grid_points) {
    if (*args.grid_points < 4 || *args.grid_points % 2 != 0) {
      throw InputError("--grid-points must be even and >= 4");
    }
    cfg.grid_points = *args.grid_points;
  }
  if (args.seed) cfg.seed = *args.seed;
  return cfg;
}

TimeSeries load_data(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open data file '" + path + "'");
  return read_time_series_csv(in);
}

// Record -> correlogram -> covariance estimate.
struct Pipeline {
  int samples = 0;
  int max_lag = 0;
  CoercivityReport coercivity{};
  std::optional<SpectralDensity> omega;
  std::optional<CovarianceEstimate> sigma;
  std::vector<std::string> warnings;
};

MatrixFunction raw_correlogram(const TimeSeries& y, const RunConfig& cfg, int* max_lag) {
  const TimeSeries centered = demean(y);
  *max_lag = cfg.window.max_lag ? *cfg.window.max_lag : default_max_lag(y.length());
  const CovarianceSequence lags = sample_covariances(centered, *max_lag);
  return correlogram(lags, cfg.window.kind, FrequencyGrid(cfg.grid_points));
}

Pipeline run_pipeline(const TimeSeries& y, const RunConfig& cfg, const StateSpaceFilter& g) {
  if (g.inputs() != y.channels()) {
    throw InputError("filter has " + std::to_string(g.inputs()) + " inputs but the data has " +
                     std::to_string(y.channels()) + " channels");
  }
  Pipeline p;
  p.samples = y.length();
  const MatrixFunction raw = raw_correlogram(y, cfg, &p.max_lag);
  p.coercivity = check_positive(raw);
  p.omega.emplace(raw);
  if (p.coercivity.min_eigenvalue < 1e-6 * p.coercivity.max_eigenvalue) {
    p.warnings.push_back("correlogram is nearly singular (eigenvalue ratio " +
                         std::to_string(p.coercivity.min_eigenvalue /
                                        p.coercivity.max_eigenvalue) +
                         ")");
  }
  if (cfg.sigma_hat_override) {
    p.sigma = make_covariance_estimate(*cfg.sigma_hat_override, cfg.window.kind, p.max_lag,
                                       cfg.grid_points);
    p.warnings.push_back("covariance estimate taken from sigma_hat_override");
  } else {
    p.sigma = sigma_hat(g, *p.omega, cfg.window.kind, p.max_lag);
  }
  return p;
}

ProblemSpec problem_spec(const RunConfig& cfg, const StateSpaceFilter& g,
                         const CovarianceEstimate& sigma, Family family, int nu) {
  return ProblemSpec{family,
                     nu,
                     g,
                     build_prior(cfg.prior, g.inputs()),
                     sigma,
                     FrequencyGrid(cfg.grid_points),
                     cfg.subspace,
                     cfg.solver};
}

json correlogram_json(const Pipeline& p, const RunConfig& cfg) {
  return {{"window", std::string(to_string(cfg.window.kind))},
          {"max_lag", p.max_lag},
          {"min_eigenvalue", num(p.coercivity.min_eigenvalue)},
          {"argmin_theta", num(p.coercivity.argmin_theta)},
          {"max_eigenvalue", num(p.coercivity.max_eigenvalue)}};
}

json solution_json(const Solution& s) {
  return {{"dual_value", num(s.dual_value)},
          {"moment_residual", num(s.moment_residual)},
          {"gradient_norm", num(s.gradient_norm)},
          {"iterations", s.iterations},
          {"converged", s.converged},
          {"stop_reason", s.stop_reason}};
}

template <typename Fn>
int guarded(std::ostream& err, Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
  } catch (const json::exception& e) {
    err << "error: malformed JSON input: " << e.what() << '\n';
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
  }
  return kExitInput;
}

double elapsed_seconds(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

RMatrix random_direction(const DualProblem& problem, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  const int n = problem.states();
  while (true) {
    RMatrix d(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) d(i, j) = normal(rng);
    }
    d = problem.project(0.5 * (d + d.transpose()));
    const double norm = d.norm();
    if (norm > 0.0) return d / norm;
  }
}

}  // namespace

double round12(double x) {
  if (!std::isfinite(x) || x == 0.0) return x == 0.0 ? 0.0 : x;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return std::strtod(buf, nullptr);
}

json samples_json(const MatrixFunction& f) {
  json rows = json::array();
  for (int k = 0; k < f.size(); ++k) {
    json row = json::array();
    for (Eigen::Index i = 0; i < f.rows(); ++i) {
      for (Eigen::Index j = 0; j < f.cols(); ++j) {
        row.push_back(num(f[k](i, j).real()));
        row.push_back(num(f[k](i, j).imag()));
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

MatrixFunction read_samples(const json& doc, const std::string& key) {
  if (!doc.is_object() || !doc.contains("grid_points") || !doc.contains("dim") ||
      !doc.contains(key)) {
    throw InputError("spectrum file needs 'grid_points', 'dim' and '" + key + "'");
  }
  const int nf = doc.at("grid_points").get<int>();
  const int m = doc.at("dim").get<int>();
  const json& rows = doc.at(key);
  if (m < 1 || !rows.is_array() || static_cast<int>(rows.size()) != nf) {
    throw InputError("spectrum '" + key + "' does not hold " + std::to_string(nf) + " samples");
  }
  std::vector<CMatrix> samples;
  samples.reserve(nf);
  for (int k = 0; k < nf; ++k) {
    const json& row = rows[k];
    if (!row.is_array() || static_cast<int>(row.size()) != 2 * m * m) {
      throw InputError("spectrum sample " + std::to_string(k) + " has the wrong length");
    }
    CMatrix s(m, m);
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) {
        const int at = 2 * (i * m + j);
        s(i, j) = Complex(row[at].get<double>(), row[at + 1].get<double>());
      }
    }
    samples.push_back(std::move(s));
  }
  return MatrixFunction(FrequencyGrid(nf), std::move(samples));
}

std::string density_hash(const MatrixFunction& f) {
  double scale = 0.0;
  for (int k = 0; k < f.size(); ++k) scale = std::max(scale, f[k].cwiseAbs().maxCoeff());
  const double quantum = scale > 0.0 ? 1e-10 * scale : 1.0;
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char buf[64];
  for (int k = 0; k < f.size(); ++k) {
    for (Eigen::Index i = 0; i < f.rows(); ++i) {
      for (Eigen::Index j = 0; j < f.cols(); ++j) {
        const int len = std::snprintf(buf, sizeof buf, "%lld,%lld;",
                                      std::llround(f[k](i, j).real() / quantum),
                                      std::llround(f[k](i, j).imag() / quantum));
        for (int c = 0; c < len; ++c) {
          h ^= static_cast<unsigned char>(buf[c]);
          h *= 0x100000001b3ULL;
        }
      }
    }
  }
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

int run_estimate(const RunArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (!args.config_path) throw InputError("estimate needs --config");
    const RunConfig cfg = load_config(args);
    const StateSpaceFilter g = build_filter(cfg.filter);
    const TimeSeries y = load_data(args.data_path);
    Pipeline p = run_pipeline(y, cfg, g);

    const auto start = std::chrono::steady_clock::now();
    const DualProblem problem(problem_spec(cfg, g, *p.sigma, cfg.family, cfg.nu));
    const Solution s = problem.solve();
    const double seconds = elapsed_seconds(start);
    if (!s.converged) p.warnings.push_back("solver stopped without converging: " + s.stop_reason);

    const auto dir = output_dir(args, cfg);
    const FrequencyGrid& grid = problem.grid();
    write_csv(dir / "spectrum.csv", s.phi_star.function());

    json spectrum;
    spectrum["format_version"] = kFormatVersion;
    spectrum["grid_points"] = grid.size();
    spectrum["dim"] = s.phi_star.dim();
    spectrum["theta"] = theta_json(grid);
    spectrum["phi"] = samples_json(s.phi_star.function());
    spectrum["omega"] = samples_json(p.omega->function());
    spectrum["theta_hat"] = matrix_json(s.theta_hat.matrix());
    spectrum["diagnostics"] = solution_json(s);
    write_json(dir / "spectrum.json", spectrum);

    json report;
    report["format_version"] = kFormatVersion;
    report["command"] = "estimate";
    report["config"] = to_json(cfg);
    report["data"] = {{"samples", p.samples}, {"channels", y.channels()}};
    report["correlogram"] = correlogram_json(p, cfg);
    report["sigma_hat"] = matrix_json(p.sigma->sigma);
    report["theta_hat"] = matrix_json(s.theta_hat.matrix());
    report["dual_value"] = num(s.dual_value);
    report["moment_residual"] = num(s.moment_residual);
    report["gradient_norm"] = num(s.gradient_norm);
    report["iterations"] = s.iterations;
    report["converged"] = s.converged;
    report["stop_reason"] = s.stop_reason;
    report["warnings"] = p.warnings;
    if (args.timing) report["timing"] = {{"solve_seconds", seconds}};
    write_json(dir / "report.json", report);

    out << (s.converged ? "converged" : "not converged") << " after " << s.iterations
        << " iterations, moment residual " << s.moment_residual << '\n';
    return s.converged ? kExitOk : kExitNotPassed;
  });
}

int run_verify(const RunArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (!args.config_path) throw InputError("verify needs --config");
    const RunConfig cfg = load_config(args);
    const StateSpaceFilter g = build_filter(cfg.filter);
    const TimeSeries y = load_data(args.data_path);
    const Pipeline p = run_pipeline(y, cfg, g);
    const SpectralDensity& omega = *p.omega;

    const DualProblem problem(problem_spec(cfg, g, *p.sigma, cfg.family, cfg.nu));
    const auto probes = make_probes(problem, cfg.probes, cfg.seed);
    const InterpretationReport rep = dual_constant_check(problem, omega, probes);

    json doc;
    doc["format_version"] = kFormatVersion;
    doc["command"] = "verify";
    doc["config"] = to_json(cfg);
    bool passed = true;

    {
      const double spread_tol = kSpreadTol * (1.0 + std::abs(rep.j_at_zero));
      const double constant_tol = kSpreadTol * (1.0 + std::abs(*rep.analytic_constant));
      const bool ok = rep.constant_spread <= spread_tol && *rep.analytic_deviation <= constant_tol;
      json probes_json = json::array();
      for (const auto& r : rep.probes) {
        probes_json.push_back({{"theta", matrix_json(r.theta)},
                               {"dual_value", num(r.dual_value)},
                               {"divergence", num(r.divergence)},
                               {"difference", num(r.difference)}});
      }
      doc["constant_check"] = {{"family", std::string(to_string(rep.family))},
                               {"nu", rep.nu},
                               {"j_at_zero", num(rep.j_at_zero)},
                               {"constant_spread", num(rep.constant_spread)},
                               {"spread_tolerance", num(spread_tol)},
                               {"analytic_constant", num(*rep.analytic_constant)},
                               {"analytic_deviation", num(*rep.analytic_deviation)},
                               {"constant_tolerance", num(constant_tol)},
                               {"probes", probes_json},
                               {"passed", ok}};
      if (rep.displayed_term) doc["constant_check"]["power_term"] = num(*rep.displayed_term);
      passed = passed && ok;
    }

    const Solution s = problem.solve();
    doc["solution"] = solution_json(s);
    passed = passed && s.converged;

    if (problem.channels() == 1 && cfg.nu == 1) {
      const double v = pem_criterion(problem, s.theta_hat, omega);
      const double direct = cfg.family == Family::alpha
                                ? is_weighted(omega, s.phi_star, problem.prior_density())
                                : is_dist(omega, s.phi_star);
      const double identity_residual = std::abs(v - direct);
      std::mt19937_64 rng(cfg.seed);
      double worst_increase = std::numeric_limits<double>::infinity();
      for (int i = 0; i < kPerturbations; ++i) {
        RMatrix d = kPerturbation * random_direction(problem, rng);
        DualVariable cand(s.theta_hat.matrix() + d);
        while (problem.feasible(cand).margin < 1e-12) {
          d *= 0.5;
          cand = DualVariable(s.theta_hat.matrix() + d);
        }
        worst_increase = std::min(worst_increase, pem_criterion(problem, cand, omega) - v);
      }
      const bool ok = identity_residual <= kPemTol && worst_increase >= -1e-10 * (1.0 + v);
      doc["pem"] = {{"applicable", true},
                    {"criterion", num(v)},
                    {"identity_residual", num(identity_residual)},
                    {"tolerance", kPemTol},
                    {"perturbations", kPerturbations},
                    {"min_increase", num(worst_increase)},
                    {"passed", ok}};
      passed = passed && ok;
    } else {
      doc["pem"] = {{"applicable", false}};
    }

    {
      const DualProblem beta(problem_spec(cfg, g, *p.sigma, Family::beta, 1));
      const DualProblem tau(problem_spec(cfg, g, *p.sigma, Family::tau, 1));
      const Solution sb = beta.solve();
      const Solution st = tau.solve();
      double diff = 0.0;
      for (int k = 0; k < sb.phi_star.size(); ++k) {
        diff = std::max(diff, (sb.phi_star[k] - st.phi_star[k]).cwiseAbs().maxCoeff());
      }
      const bool ok = sb.converged && st.converged && diff <= kCoincidenceTol;
      doc["nu1_coincidence"] = {{"beta_hash", density_hash(sb.phi_star.function())},
                                {"tau_hash", density_hash(st.phi_star.function())},
                                {"max_pointwise_difference", num(diff)},
                                {"tolerance", kCoincidenceTol},
                                {"passed", ok}};
      passed = passed && ok;
    }

    doc["passed"] = passed;
    const auto dir = output_dir(args, cfg);
    write_json(dir / "verify.json", doc);
    out << (passed ? "verification passed" : "verification failed") << '\n';
    return passed ? kExitOk : kExitNotPassed;
  });
}

int run_correlogram(const RunArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const RunConfig cfg = load_config(args);
    const TimeSeries y = load_data(args.data_path);
    int max_lag = 0;
    const MatrixFunction omega = raw_correlogram(y, cfg, &max_lag);
    const auto dir = output_dir(args, cfg);
    write_csv(dir / "correlogram.csv", omega);

    json doc;
    doc["format_version"] = kFormatVersion;
    doc["grid_points"] = omega.size();
    doc["dim"] = static_cast<int>(omega.rows());
    doc["window"] = std::string(to_string(cfg.window.kind));
    doc["max_lag"] = max_lag;
    doc["theta"] = theta_json(omega.grid());
    doc["omega"] = samples_json(omega);
    try {
      const CoercivityReport c = check_positive(omega);
      doc["min_eigenvalue"] = num(c.min_eigenvalue);
      doc["positive"] = true;
    } catch (const DataError& e) {
      doc["positive"] = false;
      err << "warning: " << e.what() << '\n';
    }
    write_json(dir / "correlogram.json", doc);
    out << "correlogram written to " << (dir / "correlogram.json").string() << '\n';
    return kExitOk;
  });
}

int run_divergence(const DivergenceArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto load = [&](const std::string& path) {
      std::ifstream in(path);
      if (!in) throw InputError("cannot open '" + path + "'");
      json doc;
      try {
        doc = json::parse(in);
      } catch (const json::parse_error& e) {
        throw InputError("'" + path + "' is not valid JSON: " + e.what());
      }
      return read_samples(doc, args.key);
    };
    const MatrixFunction a = load(args.first);
    const MatrixFunction b = load(args.second);
    if (!(a.grid() == b.grid()) || a.rows() != b.rows()) {
      throw InputError("spectra differ in grid size or dimension");
    }
    DivergenceSpec spec;
    try {
      spec.family = divergence_family_from_string(args.family);
    } catch (const ParameterError& e) {
      throw InputError(e.what());
    }
    spec.parameter = args.parameter;
    if (args.weight) spec.weight.emplace(load(*args.weight));
    if (args.factor) spec.weight_factor = load(*args.factor);
    Warnings warnings;
    const double value =
        divergence(spec, SpectralDensity(a), SpectralDensity(b), &warnings);
    for (const auto& w : warnings) err << "warning: " << w << '\n';
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", value);
    out << buf << '\n';
    return kExitOk;
  });
}

}  // namespace threelike::cli
