#include "lowrank/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <set>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "lowrank/battery.hpp"
#include "lowrank/bicluster.hpp"
#include "lowrank/csv.hpp"
#include "lowrank/errors.hpp"
#include "lowrank/sbm.hpp"
#include "lowrank/spiked.hpp"

namespace lowrank {

namespace {

struct Gate {
  std::string name;
  double observed = 0.0;
  double threshold = 0.0;
  bool pass = false;
};

using Job = std::function<std::vector<Gate>(std::ostream&)>;

int count_value(const Config& c, const std::string& key, long long lo, long long hi) {
  const long long v = c.get_int(key);
  if (v < lo || v > hi)
    throw ConfigError("config key '" + key + "' must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  return static_cast<int>(v);
}

int count_value(const Config& c, const std::string& key, long long lo, long long hi, long long fallback) {
  return c.has(key) ? count_value(c, key, lo, hi) : static_cast<int>(fallback);
}

std::vector<int> count_list(const Config& c, const std::string& key, long long lo) {
  std::vector<int> out;
  for (const long long v : c.get_ints(key)) {
    if (v < lo || v > 1000000) throw ConfigError("config key '" + key + "' has out-of-range entry " + std::to_string(v));
    out.push_back(static_cast<int>(v));
  }
  if (out.empty()) throw ConfigError("config key '" + key + "' is empty");
  return out;
}

Vector vector_value(const Config& c, const std::string& key, Eigen::Index length) {
  const auto values = c.get_doubles(key);
  if (static_cast<Eigen::Index>(values.size()) != length)
    throw ConfigError("config key '" + key + "' needs " + std::to_string(length) + " entries");
  Vector v(length);
  for (Eigen::Index i = 0; i < length; ++i) v(i) = values[static_cast<std::size_t>(i)];
  return v;
}

// Row-major entries.
Matrix matrix_value(const Config& c, const std::string& key, Eigen::Index rows, Eigen::Index cols) {
  const Vector flat = vector_value(c, key, rows * cols);
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = flat(i * cols + j);
  return m;
}

Vector probability_value(const Config& c, const std::string& key, Eigen::Index length) {
  if (!c.has(key)) return Vector::Constant(length, 1.0 / static_cast<double>(length));
  const Vector v = vector_value(c, key, length);
  if ((v.array() <= 0.0).any() || std::abs(v.sum() - 1.0) > 1e-12)
    throw ConfigError("config key '" + key + "' must be positive and sum to 1");
  return v;
}

KmeansOptions kmeans_options(const Config& c) {
  KmeansOptions o;
  o.restarts = count_value(c, "kmeans_restarts", 1, 10000, o.restarts);
  o.max_iterations = count_value(c, "kmeans_max_iterations", 1, 100000, o.max_iterations);
  return o;
}

const std::set<std::string> kMonteCarloGateKeys = {"gate_cov_opnorm", "gate_coverage_min", "gate_coverage_max",
                                                   "gate_mse_p_value", "gate_mse_rel_diff", "gate_recovery_min"};

std::set<std::string> with_keys(std::set<std::string> base, const std::set<std::string>& extra) {
  base.insert(extra.begin(), extra.end());
  return base;
}

std::string cell_name(const MonteCarloSummary& s, bool rectangular) {
  return rectangular ? "m=" + std::to_string(s.m) + ",n=" + std::to_string(s.n) : "n=" + std::to_string(s.n);
}

std::vector<Gate> monte_carlo_gates(const Config& c, const std::vector<MonteCarloSummary>& summaries, bool rectangular) {
  std::vector<Gate> gates;
  for (const auto& s : summaries) {
    if (s.replicates == 0) continue;
    const std::string cell = "[" + cell_name(s, rectangular) + "]";
    if (c.has("gate_cov_opnorm")) {
      const double t = c.get_double("gate_cov_opnorm");
      gates.push_back({"cov_opnorm" + cell, s.cov_opnorm_dev_from_I, t, s.cov_opnorm_dev_from_I <= t});
    }
    for (Eigen::Index j = 0; j < s.coverage.size(); ++j) {
      const std::string name = "coverage_" + std::to_string(j + 1) + cell;
      if (c.has("gate_coverage_min")) {
        const double t = c.get_double("gate_coverage_min");
        gates.push_back({name + ".min", s.coverage(j), t, s.coverage(j) >= t});
      }
      if (c.has("gate_coverage_max")) {
        const double t = c.get_double("gate_coverage_max");
        gates.push_back({name + ".max", s.coverage(j), t, s.coverage(j) <= t});
      }
    }
    if (c.has("gate_mse_p_value")) {
      const double t = c.get_double("gate_mse_p_value");
      gates.push_back({"mse_paired_p_value" + cell, s.paired_p_value, t, s.paired_p_value < t});
    }
    if (c.has("gate_mse_rel_diff")) {
      const double t = c.get_double("gate_mse_rel_diff");
      const double rel = std::abs(s.mean_mse_estimator - s.mean_mse_naive) / s.mean_mse_naive;
      gates.push_back({"mse_rel_diff" + cell, rel, t, rel <= t});
    }
    if (c.has("gate_recovery_min")) {
      const double t = c.get_double("gate_recovery_min");
      const double frac = static_cast<double>(s.included) / s.replicates;
      gates.push_back({"exact_recovery" + cell, frac, t, frac >= t});
    }
  }
  return gates;
}

void write_monte_carlo_summary(std::ostream& out, const MonteCarloSummary& s, bool rectangular,
                               const std::string& estimator_name) {
  if (s.replicates == 0) return;
  std::vector<std::pair<std::string, std::string>> e;
  if (rectangular) e.emplace_back("m", format_number(static_cast<long long>(s.m)));
  e.emplace_back("n", format_number(static_cast<long long>(s.n)));
  e.emplace_back("cov_opnorm_dev_from_I", format_number(s.cov_opnorm_dev_from_I));
  for (Eigen::Index j = 0; j < s.coverage.size(); ++j)
    e.emplace_back("coverage_" + std::to_string(j + 1), format_number(s.coverage(j)));
  e.emplace_back("mean_mse_" + estimator_name, format_number(s.mean_mse_estimator));
  e.emplace_back("mean_mse_naive", format_number(s.mean_mse_naive));
  e.emplace_back("replicates", format_number(static_cast<long long>(s.replicates)));
  e.emplace_back("included", format_number(static_cast<long long>(s.included)));
  e.emplace_back("excluded", format_number(static_cast<long long>(s.excluded)));
  e.emplace_back("failed", format_number(static_cast<long long>(s.failed)));
  e.emplace_back("paired_t", format_number(s.paired_t));
  e.emplace_back("paired_p_value", format_number(s.paired_p_value));
  write_summary_line(out, e);
}

void append_z(std::vector<std::string>& row, const ReplicateRecord& rec, Eigen::Index d) {
  for (Eigen::Index j = 0; j < d; ++j)
    row.push_back(rec.z.size() == d ? format_number(rec.z(j)) : format_number(std::nan("")));
}

Job prepare_check_bounds(const Config& c) {
  c.reject_unknown({"instances", "draws", "seed", "p", "r", "p1", "p2"});
  BatteryConfig b;
  if (c.has("instances") && c.has("draws")) throw ConfigError("set only one of 'instances' and 'draws'");
  b.instances = c.has("draws") ? count_value(c, "draws", 0, 10000000) : count_value(c, "instances", 0, 10000000, 200);
  b.seed = c.get_uint64("seed", 0);
  if (c.has("p")) b.p = count_value(c, "p", 1, 200);
  if (c.has("r")) b.r = count_value(c, "r", 1, 200);
  if (c.has("p1")) b.p1 = count_value(c, "p1", 1, 200);
  if (c.has("p2")) b.p2 = count_value(c, "p2", 1, 200);
  if (b.p.has_value() != b.r.has_value()) throw ConfigError("'p' and 'r' must be given together");
  if (b.p && *b.r > *b.p) throw ConfigError("'r' must not exceed 'p'");
  if (b.p1.has_value() != b.p2.has_value()) throw ConfigError("'p1' and 'p2' must be given together");
  if (b.p1 && !b.r) throw ConfigError("'p1' and 'p2' need 'r'");
  if (b.p1 && *b.r > *b.p2) throw ConfigError("'r' must not exceed 'p2'");
  return [b](std::ostream& out) {
    const BatteryReport report = run_certificate_battery(b);
    write_csv_row(out, {"label", "checked", "passed", "not_applicable", "worst_tightness"});
    std::vector<Gate> gates;
    for (const auto& t : report.tallies) {
      write_csv_row(out, {t.label, format_number(static_cast<long long>(t.checked)),
                          format_number(static_cast<long long>(t.passed)),
                          format_number(static_cast<long long>(t.not_applicable)), format_number(t.worst_tightness)});
      gates.push_back({"certificate[" + t.label + "]", static_cast<double>(t.checked - t.passed), 0.0,
                       t.checked == t.passed});
    }
    write_summary_line(out, {{"instances", format_number(static_cast<long long>(b.instances))},
                             {"all_passed", report.all_passed() ? "1" : "0"}});
    return gates;
  };
}

Job prepare_sbm(const Config& c) {
  c.reject_unknown(with_keys({"K", "sigma0", "r", "pi", "n", "replicates", "seed", "kmeans_restarts",
                              "kmeans_max_iterations"},
                             kMonteCarloGateKeys));
  SbmExperimentConfig cfg;
  const int k = count_value(c, "K", 1, 10);
  cfg.sigma0 = matrix_value(c, "sigma0", k, k);
  cfg.r = count_value(c, "r", 1, k);
  cfg.pi = probability_value(c, "pi", k);
  cfg.n_values = count_list(c, "n", 2);
  cfg.replicates = count_value(c, "replicates", 0, 1000000);
  cfg.seed = c.get_uint64("seed", 0);
  cfg.kmeans = kmeans_options(c);
  for (const int n : cfg.n_values) SbmModel(cfg.sigma0, balanced_assignment(n, cfg.pi), cfg.r, cfg.pi);
  theta_of_sigma(cfg.sigma0, cfg.r);
  const Eigen::Index d = sym_dim(k, cfg.r);
  return [cfg, d, c](std::ostream& out) {
    std::vector<std::string> header = {"replicate", "n", "aligned_hamming", "excluded_flag"};
    for (Eigen::Index j = 0; j < d; ++j) header.push_back("z_" + std::to_string(j + 1));
    header.insert(header.end(), {"mse_onestep", "mse_naive"});
    write_csv_row(out, header);
    if (cfg.replicates == 0) return std::vector<Gate>{};
    const ExperimentResult result = sbm_experiment(cfg);
    for (const auto& rec : result.rows) {
      std::vector<std::string> row = {format_number(static_cast<long long>(rec.replicate)),
                                      format_number(static_cast<long long>(rec.n)),
                                      format_number(static_cast<long long>(rec.aligned_hamming)), rec.excluded ? "1" : "0"};
      append_z(row, rec, d);
      row.push_back(format_number(rec.mse_estimator));
      row.push_back(format_number(rec.mse_naive));
      write_csv_row(out, row);
    }
    for (const auto& s : result.summaries) write_monte_carlo_summary(out, s, false, "onestep");
    return monte_carlo_gates(c, result.summaries, false);
  };
}

NoiseFamily noise_value(const Config& c) {
  const std::string v = c.get_string("noise", "gaussian");
  if (v == "gaussian") return NoiseFamily::Gaussian;
  if (v == "uniform") return NoiseFamily::Uniform;
  if (v == "rademacher") return NoiseFamily::Rademacher;
  throw ConfigError("config key 'noise' must be gaussian, uniform or rademacher");
}

BlockWeighting weighting_value(const Config& c) {
  const std::string v = c.get_string("weighting", "reciprocal");
  if (v == "reciprocal") return BlockWeighting::Reciprocal;
  if (v == "proportional") return BlockWeighting::Proportional;
  throw ConfigError("config key 'weighting' must be reciprocal or proportional");
}

Job prepare_bicluster(const Config& c, std::ostream& err) {
  c.reject_unknown(with_keys({"p1", "p2", "sigma0", "r", "w", "pi", "sigma2", "noise", "weighting", "m", "n",
                              "replicates", "seed", "kmeans_restarts", "kmeans_max_iterations"},
                             kMonteCarloGateKeys));
  BiclusterExperimentConfig cfg;
  const int p1 = count_value(c, "p1", 1, 8);
  const int p2 = count_value(c, "p2", 1, 8);
  cfg.sigma0 = matrix_value(c, "sigma0", p1, p2);
  cfg.r = count_value(c, "r", 1, std::min(p1, p2));
  cfg.w = probability_value(c, "w", p1);
  cfg.pi = probability_value(c, "pi", p2);
  cfg.sigma2 = c.get_double("sigma2", 1.0);
  if (!(cfg.sigma2 > 0.0)) throw ConfigError("config key 'sigma2' must be positive");
  cfg.noise = noise_value(c);
  cfg.weighting = weighting_value(c);
  const auto ms = count_list(c, "m", 2);
  const auto ns = count_list(c, "n", 2);
  if (ms.size() != ns.size()) throw ConfigError("config keys 'm' and 'n' need the same length");
  for (std::size_t i = 0; i < ms.size(); ++i) cfg.sizes.emplace_back(ms[i], ns[i]);
  cfg.replicates = count_value(c, "replicates", 0, 1000000);
  cfg.seed = c.get_uint64("seed", 0);
  cfg.kmeans = kmeans_options(c);
  for (const auto& [m, n] : cfg.sizes) {
    const BiclusterModel model(cfg.sigma0, balanced_assignment(m, cfg.w), balanced_assignment(n, cfg.pi), cfg.sigma2,
                               cfg.w, cfg.pi, cfg.r, cfg.noise);
    for (const auto& w : model.warnings) err << "warning: " << w << '\n';
  }
  theta_of_sigma_rect(cfg.sigma0, cfg.r);
  const Eigen::Index d = rect_dim(p1, p2, cfg.r);
  return [cfg, d, c](std::ostream& out) {
    std::vector<std::string> header = {"replicate", "m", "n", "row_hamming", "col_hamming", "excluded_flag"};
    for (Eigen::Index j = 0; j < d; ++j) header.push_back("z_" + std::to_string(j + 1));
    header.insert(header.end(), {"mse_lse", "mse_naive"});
    write_csv_row(out, header);
    if (cfg.replicates == 0) return std::vector<Gate>{};
    const ExperimentResult result = bicluster_experiment(cfg);
    for (const auto& rec : result.rows) {
      std::vector<std::string> row = {format_number(static_cast<long long>(rec.replicate)),
                                      format_number(static_cast<long long>(rec.m)),
                                      format_number(static_cast<long long>(rec.n)),
                                      format_number(static_cast<long long>(rec.aligned_hamming)),
                                      format_number(static_cast<long long>(rec.aligned_hamming_cols)),
                                      rec.excluded ? "1" : "0"};
      append_z(row, rec, d);
      row.push_back(format_number(rec.mse_estimator));
      row.push_back(format_number(rec.mse_naive));
      write_csv_row(out, row);
    }
    for (const auto& s : result.summaries) write_monte_carlo_summary(out, s, true, "lse");
    return monte_carlo_gates(c, result.summaries, true);
  };
}

double median(std::vector<double> v) {
  if (v.empty()) return std::nan("");
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 == 1 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

Job prepare_spiked(const Config& c) {
  c.reject_unknown({"p", "r", "phi0", "mu0", "support0", "n", "lan_n", "datasets", "draws", "cap", "a", "m_const",
                    "seed", "gamma_seed", "gamma_draws", "gate_weight_sum_tol", "gate_tail_decreasing",
                    "gate_lan_decreasing"});
  const int p = count_value(c, "p", 2, 200);
  const int r = count_value(c, "r", 1, p - 1);
  const int q = p - r;
  const Vector phi0 = vector_value(c, "phi0", static_cast<Eigen::Index>(q) * r);
  const Vector mu0 = vector_value(c, "mu0", static_cast<Eigen::Index>(r) * (r + 1) / 2);
  ThetaSym theta0(Phi(p, r, phi0), mu0);
  std::vector<int> support0;
  if (c.has("support0")) {
    for (const long long j : c.get_ints("support0")) support0.push_back(static_cast<int>(j));
  } else {
    const Matrix a0 = theta0.phi().matrix();
    for (int j = 0; j < q; ++j)
      if ((a0.row(j).array() != 0.0).any()) support0.push_back(j);
  }
  SpikedStudyConfig cfg{theta0, support0, {}, {}, 0, 1000, 0, 1.0, 1.0, 0};
  cfg.tail_n_values = count_list(c, "n", 1);
  if (c.has("lan_n")) cfg.lan_n_values = count_list(c, "lan_n", 1);
  cfg.datasets = count_value(c, "datasets", 0, 1000000);
  cfg.draws = count_value(c, "draws", 1, 100000000, 1000);
  cfg.cap = count_value(c, "cap", static_cast<long long>(support0.size()), q, static_cast<long long>(support0.size()));
  cfg.a = c.get_double("a", 1.0);
  if (!(cfg.a > 0.0)) throw ConfigError("config key 'a' must be positive");
  cfg.m_const = c.get_double("m_const", 1.0);
  if (!(cfg.m_const > 0.0)) throw ConfigError("config key 'm_const' must be positive");
  cfg.seed = c.get_uint64("seed", 0);
  const std::uint64_t gamma_seed = c.get_uint64("gamma_seed", 0x6a33a);
  const int gamma_draws = count_value(c, "gamma_draws", 1, 100000000, 100000);
  for (const int n : cfg.tail_n_values) SpikedModel(theta0, n, support0);
  return [cfg, gamma_seed, gamma_draws, c](std::ostream& out) {
    write_csv_row(out, {"study", "n", "dataset", "components", "weight_sum", "weight_true_support", "tail_fraction",
                        "abs_lan_remainder"});
    const Matrix fisher = fisher_spiked(cfg.theta0);
    const double fisher_min = Eigen::SelfAdjointEigenSolver<Matrix>(fisher).eigenvalues()(0);
    if (cfg.datasets == 0) return std::vector<Gate>{};
    GammaTable gamma(gamma_seed, gamma_draws);
    const SpikedStudyResult result = spiked_study(cfg, gamma);
    for (const auto& t : result.tail)
      write_csv_row(out, {"tail", format_number(static_cast<long long>(t.n)),
                          format_number(static_cast<long long>(t.dataset)),
                          format_number(static_cast<long long>(t.components)), format_number(t.weight_sum),
                          format_number(t.weight_true_support), format_number(t.tail_fraction), ""});
    for (const auto& l : result.lan)
      write_csv_row(out, {"lan", format_number(static_cast<long long>(l.n)),
                          format_number(static_cast<long long>(l.dataset)), "", "", "", "",
                          format_number(l.abs_remainder)});

    write_summary_line(out, {{"fisher_min_eigenvalue", format_number(fisher_min)}});
    std::vector<Gate> gates;
    gates.push_back({"fisher_positive_definite", fisher_min, 0.0, fisher_min > 0.0});
    std::vector<double> tail_means;
    double worst_weight_dev = 0.0;
    for (const int n : cfg.tail_n_values) {
      double sum = 0.0;
      double dev = 0.0;
      int count = 0;
      for (const auto& t : result.tail)
        if (t.n == n) {
          sum += t.tail_fraction;
          dev = std::max(dev, std::abs(t.weight_sum - 1.0));
          ++count;
        }
      tail_means.push_back(sum / count);
      worst_weight_dev = std::max(worst_weight_dev, dev);
      write_summary_line(out, {{"study", "tail"},
                               {"n", format_number(static_cast<long long>(n))},
                               {"mean_tail_fraction", format_number(sum / count)},
                               {"max_weight_sum_dev", format_number(dev)}});
    }
    std::vector<double> lan_medians;
    for (const int n : cfg.lan_n_values) {
      std::vector<double> values;
      for (const auto& l : result.lan)
        if (l.n == n) values.push_back(l.abs_remainder);
      lan_medians.push_back(median(values));
      write_summary_line(out, {{"study", "lan"},
                               {"n", format_number(static_cast<long long>(n))},
                               {"median_abs_lan_remainder", format_number(lan_medians.back())}});
    }
    if (c.has("gate_weight_sum_tol")) {
      const double t = c.get_double("gate_weight_sum_tol");
      gates.push_back({"weight_sum", worst_weight_dev, t, worst_weight_dev <= t});
    }
    const auto decreasing_gates = [&gates](const std::string& name, const std::vector<double>& v) {
      for (std::size_t i = 1; i < v.size(); ++i)
        gates.push_back({name + "[" + std::to_string(i) + "]", v[i] - v[i - 1], 0.0, v[i] < v[i - 1]});
    };
    if (c.get_int("gate_tail_decreasing", 0) != 0) decreasing_gates("tail_fraction_decrease", tail_means);
    if (c.get_int("gate_lan_decreasing", 0) != 0) decreasing_gates("lan_median_decrease", lan_medians);
    return gates;
  };
}

}  // namespace

int run_experiment(const std::string& kind, const Config& config, std::ostream& out, std::ostream& err) {
  Job job;
  try {
    if (kind == "check-bounds") {
      job = prepare_check_bounds(config);
    } else if (kind == "sbm-sim") {
      job = prepare_sbm(config);
    } else if (kind == "bicluster-sim") {
      job = prepare_bicluster(config, err);
    } else if (kind == "spiked-limit-posterior") {
      job = prepare_spiked(config);
    } else {
      throw ConfigError("unknown kind '" + kind + "'");
    }
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const Error& e) {
    err << "config error: " << error_name(e.code()) << ": " << e.what() << '\n';
    return kExitConfigError;
  }

  std::ostringstream buffer;
  std::vector<Gate> gates;
  try {
    gates = job(buffer);
  } catch (const Error& e) {
    out << buffer.str();
    err << "numerical failure: " << error_name(e.code()) << ": " << e.what() << '\n';
    return kExitNumericalFailure;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const std::exception& e) {
    out << buffer.str();
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumericalFailure;
  }
  bool all_pass = true;
  for (const auto& g : gates) {
    write_summary_line(buffer, {{"gate", g.name},
                                {"observed", format_number(g.observed)},
                                {"threshold", format_number(g.threshold)},
                                {"result", g.pass ? "pass" : "fail"}});
    all_pass = all_pass && g.pass;
  }
  out << buffer.str();
  out.flush();
  return all_pass ? kExitOk : kExitGateFailed;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Low-rank representation experiments"};
  std::string kind;
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_path;
  std::vector<std::string> overrides;
  app.add_option("kind", kind, "check-bounds | sbm-sim | bicluster-sim | spiked-limit-posterior")->required();
  app.add_option("--config", config_path, "key=value configuration file")->required();
  app.add_option("--seed", seed, "base seed, overrides the config value");
  app.add_option("--out", out_path, "output CSV path (default stdout)");
  app.add_option("--set", overrides, "key=value override, repeatable");
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfigError;
  }

  Config config;
  try {
    config = Config::parse_file(config_path);
    for (const auto& o : overrides) config.apply_override(o);
    if (seed) config.set("seed", std::to_string(*seed));
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfigError;
  }

  if (out_path.empty()) return run_experiment(kind, config, out, err);
  std::ofstream file(out_path, std::ios::binary | std::ios::trunc);
  if (!file) {
    err << "config error: cannot open output '" << out_path << "'\n";
    return kExitConfigError;
  }
  const int code = run_experiment(kind, config, file, err);
  file.close();
  if (!file) {
    err << "numerical failure: writing '" << out_path << "' failed\n";
    return kExitNumericalFailure;
  }
  return code;
}

}  // namespace lowrank
