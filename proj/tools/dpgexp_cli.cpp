// Command-line front end: single solves, convergence studies and the
// kernel self-checks.
//
// Exit codes: 0 success, 1 usage error, 2 numerical failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "dpgexp/dpgexp.hpp"
#include "dpgexp/self_test.hpp"

namespace {

using namespace dpgexp;

constexpr int kUsageError = 1;
constexpr int kNumericalError = 2;

struct Flags {
  std::string config;
  std::map<std::string, std::string> given;  // long flag name -> value
};

// Registers the run options on a subcommand; values land in flags.given
// only when present on the command line.
void add_run_options(CLI::App* cmd, Flags& flags) {
  cmd->add_option("--config", flags.config, "key = value configuration file");
  const std::pair<const char*, const char*> opts[] = {
      {"problem", "ho | riccati | linear-decay"},
      {"method", "euler-classic | hybrid-euler | dpg2 | dpg3 | linear-dpg-p0"},
      {"grid", "interior points per dimension (ho)"},
      {"t0", "initial time"},
      {"T", "final time"},
      {"steps", "step counts: comma list or doubling range a..b"},
      {"tol", "phi-action relative tolerance"},
      {"backend", "krylov | taylor | dense"},
      {"krylov-dim", "maximum Krylov dimension"},
      {"dense-threshold", "dimension up to which the dense path is used"},
      {"reference", "exact | self"},
      {"out", "output CSV path"},
      {"plot-out", "plot-data path (converge)"},
      {"fields-out", "field CSV path (solve)"},
      {"u0", "initial value (riccati)"},
      {"spectrum", "comma list of negative rates (linear-decay)"},
  };
  for (const auto& [name, help] : opts) {
    cmd->add_option_function<std::string>(
        std::string("--") + name, [&flags, key = std::string(name)](const std::string& v) { flags.given[key] = v; },
        help);
  }
}

std::vector<double> parse_reals(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
  return out;
}

RunConfig build_config(const Flags& flags) {
  std::map<std::string, std::string> kv;
  if (!flags.config.empty()) {
    std::ifstream in(flags.config);
    require(static_cast<bool>(in), "cannot open config file '" + flags.config + "'");
    kv = parse_config(in);
  }
  for (const auto& [k, v] : flags.given) kv[k] = v;

  RunConfig cfg;
  for (const auto& [key, value] : kv) {
    try {
      if (key == "problem") cfg.problem = value;
      else if (key == "method") cfg.method = parse_method(value);
      else if (key == "grid") cfg.params.grid = std::stoul(value);
      else if (key == "t0") cfg.t0 = std::stod(value);
      else if (key == "T") cfg.T = std::stod(value);
      else if (key == "steps") cfg.steps = parse_steps(value);
      else if (key == "tol") cfg.eval.tol = std::stod(value);
      else if (key == "backend") cfg.eval.backend = parse_backend(value);
      else if (key == "krylov-dim") cfg.eval.max_krylov_dim = std::stoul(value);
      else if (key == "dense-threshold") cfg.eval.dense_threshold = std::stoul(value);
      else if (key == "reference") cfg.reference = parse_reference(value);
      else if (key == "out") cfg.out = value;
      else if (key == "plot-out") cfg.plot_out = value;
      else if (key == "fields-out") cfg.fields_out = value;
      else if (key == "u0") cfg.params.riccati_u0 = std::stod(value);
      else if (key == "spectrum") cfg.params.spectrum = parse_reals(value);
      else throw std::invalid_argument("unknown configuration key '" + key + "'");
    } catch (const std::invalid_argument& e) {
      if (std::string(e.what()).rfind("sto", 0) == 0)
        throw std::invalid_argument("invalid value '" + value + "' for " + key);
      throw;
    } catch (const std::out_of_range&) {
      throw std::invalid_argument("value out of range for " + key);
    }
  }
  make_problem(cfg.problem, cfg.params);  // reject unknown names early
  cfg.validate();
  return cfg;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write '" + path + "'");
  return os;
}

std::string plot_path(const RunConfig& cfg) {
  if (!cfg.plot_out.empty()) return cfg.plot_out;
  if (cfg.out.empty()) return {};
  const auto dot = cfg.out.rfind(".csv");
  return (dot == std::string::npos ? cfg.out : cfg.out.substr(0, dot)) + ".plot.csv";
}

int cmd_solve(const Flags& flags) {
  const RunConfig cfg = build_config(flags);
  require(cfg.steps.size() == 1, "solve takes a single step count in --steps");
  const ProblemInstance problem = make_problem(cfg.problem, cfg.params);
  const Trajectory traj = run_solve(problem, cfg, cfg.steps.front());

  if (cfg.out.empty()) {
    write_trajectory_csv(traj, std::cout);
  } else {
    auto os = open_out(cfg.out);
    write_trajectory_csv(traj, os);
  }
  if (!cfg.fields_out.empty()) {
    auto os = open_out(cfg.fields_out);
    write_fields_csv(traj, os);
  }
  if (problem.exact && !cfg.out.empty()) {
    const double err = (traj.final_state() - problem.exact(cfg.T)).lpNorm<Eigen::Infinity>();
    std::printf("%s %s N=%zu: max error vs exact at T=%g: %.6e\n", cfg.problem.c_str(),
                to_string(cfg.method).c_str(), cfg.steps.front(), cfg.T, err);
  }
  return 0;
}

int cmd_converge(const Flags& flags) {
  const RunConfig cfg = build_config(flags);
  const ConvergenceReport report = run_convergence(cfg);

  std::printf("problem %s, method %s, norm %s, reference %s", report.problem.c_str(),
              report.method.c_str(), report.norm.c_str(), to_string(report.reference).c_str());
  if (report.reference_steps) std::printf(" (N_ref = %zu)", report.reference_steps);
  std::printf("\n%8s %14s %14s %14s %8s\n", "N", "h", "error(inf)", "error(rms)", "rate");
  for (std::size_t i = 0; i < report.rows.size(); ++i) {
    const auto& r = report.rows[i];
    std::printf("%8zu %14.6e %14.6e %14.6e", r.N, r.h, r.error, r.rms_error);
    if (i > 0 && !r.excluded && !report.rows[i - 1].excluded)
      std::printf(" %8.3f", std::log(report.rows[i - 1].error / r.error) / std::log(report.rows[i - 1].h / r.h));
    else
      std::printf(" %8s", "-");
    std::printf("%s\n", r.excluded ? "  (below round-off floor, excluded)" : "");
  }
  if (std::isnan(report.fitted_slope))
    std::printf("fitted slope: n/a (fewer than two rows above the round-off floor)\n");
  else
    std::printf("fitted slope: %.4f\n", report.fitted_slope);

  if (!cfg.out.empty()) {
    auto os = open_out(cfg.out);
    write_convergence_csv(report, os);
  }
  if (const auto pp = plot_path(cfg); !pp.empty()) {
    auto os = open_out(pp);
    write_plot_data(report, os);
  }
  return 0;
}

int cmd_order_conditions(std::size_t samples, std::size_t dim, std::size_t count) {
  std::vector<double> z;
  for (std::size_t i = 0; i < samples; ++i)
    z.push_back(samples == 1 ? 0.0 : -5.0 + 10.0 * static_cast<double>(i) / static_cast<double>(samples - 1));
  const OrderConditionTable table = check_order_conditions(z, dim, count);

  std::printf("%-22s", "sample");
  for (const auto& name : order_condition_names) std::printf(" %24.*s", static_cast<int>(name.size()), name.data());
  std::printf("\n");
  for (const auto& row : table.rows) {
    std::printf("%-22s", row.label.c_str());
    for (double r : row.residuals) std::printf(" %24.3e", r);
    std::printf("\n");
  }
  const auto worst = table.max_residuals();
  double max_all = 0.0;
  for (double r : worst) max_all = std::max(max_all, r);
  std::printf("max residual: %.3e (threshold 1e-12)\n", max_all);
  return max_all <= 1e-12 ? 0 : kNumericalError;
}

int cmd_check_phi(const Flags& flags) {
  const RunConfig cfg = build_config(flags);
  bool ok = true;
  for (const auto& r : phi_self_test(cfg.eval)) {
    std::printf("%-28s %12.3e  <= %9.1e  %s\n", r.name.c_str(), r.value, r.threshold, r.pass() ? "ok" : "FAIL");
    ok = ok && r.pass();
  }
  return ok ? 0 : kNumericalError;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exponential DPG time integrators for stiff ODE systems"};
  app.require_subcommand(1);

  Flags solve_flags, converge_flags, phi_flags;
  auto* solve = app.add_subcommand("solve", "integrate one trajectory and write it as CSV");
  add_run_options(solve, solve_flags);
  auto* converge = app.add_subcommand("converge", "final-time convergence study");
  add_run_options(converge, converge_flags);

  std::size_t samples = 20, dim = 6, count = 5;
  auto* order = app.add_subcommand("check-order-conditions", "residuals of the stiff order conditions");
  order->add_option("--samples", samples, "scalar samples evenly spaced in [-5, 5]")->capture_default_str();
  order->add_option("--dim", dim, "random matrix dimension")->capture_default_str();
  order->add_option("--count", count, "number of random matrices")->capture_default_str();

  auto* phi = app.add_subcommand("check-phi", "accuracy self-test of the phi kernel");
  add_run_options(phi, phi_flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsageError;
  }

  try {
    if (*solve) return cmd_solve(solve_flags);
    if (*converge) return cmd_converge(converge_flags);
    if (*order) return cmd_order_conditions(samples, dim, count);
    if (*phi) return cmd_check_phi(phi_flags);
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kUsageError;
  } catch (const numerical_error& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return kNumericalError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kNumericalError;
  }
  return kUsageError;
}
