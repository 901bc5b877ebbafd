#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <future>
#include <limits>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "dpgexp/coefficients.hpp"
#include "dpgexp/integrators.hpp"
#include "dpgexp/problems.hpp"

namespace dpgexp {

enum class ReferenceKind { Exact, SelfConverged };

inline std::string to_string(ReferenceKind r) {
  return r == ReferenceKind::Exact ? "exact" : "self-converged";
}

inline ReferenceKind parse_reference(const std::string& s) {
  if (s == "exact") return ReferenceKind::Exact;
  if (s == "self" || s == "self-converged") return ReferenceKind::SelfConverged;
  throw std::invalid_argument("unknown reference '" + s + "' (available: exact, self)");
}

struct ConvergenceRow {
  std::size_t N = 0;
  double h = 0.0;
  double error = 0.0;     // infinity norm at the final time
  double rms_error = 0.0; // informational
  bool excluded = false;  // below the round-off floor
};

struct OrderEstimate {
  double slope = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> pairwise;  // between consecutive fitted rows
};

/// Least-squares slope of log(error) against log(h) over the rows not
/// flagged as excluded.
inline OrderEstimate estimate_order(std::span<const ConvergenceRow> rows) {
  std::vector<const ConvergenceRow*> used;
  for (const auto& r : rows)
    if (!r.excluded) used.push_back(&r);
  require(used.size() >= 2, "estimate_order: need at least two rows");
  for (const auto* r : used)
    require(r->h > 0.0 && r->error > 0.0, "estimate_order: h and error must be positive");

  const double n = static_cast<double>(used.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto* r : used) {
    const double x = std::log(r->h), y = std::log(r->error);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double denom = n * sxx - sx * sx;
  require(denom > 0.0, "estimate_order: rows must have distinct step sizes");

  OrderEstimate est;
  est.slope = (n * sxy - sx * sy) / denom;
  for (std::size_t i = 0; i + 1 < used.size(); ++i)
    est.pairwise.push_back(std::log(used[i]->error / used[i + 1]->error) /
                           std::log(used[i]->h / used[i + 1]->h));
  return est;
}

struct RunConfig {
  std::string problem = "ho";
  MethodId method = MethodId::DPG3;
  ProblemParams params;
  double t0 = 0.0;
  double T = 1.0;
  std::vector<std::size_t> steps{4, 8, 16, 32, 64, 128};
  PhiEvaluator eval;
  ReferenceKind reference = ReferenceKind::SelfConverged;
  std::string out;
  std::string plot_out;
  std::string fields_out;

  void validate() const {
    require(!steps.empty(), "RunConfig: step list is empty");
    require(steps.front() >= 1, "RunConfig: step counts must be positive");
    for (std::size_t i = 1; i < steps.size(); ++i)
      require(steps[i] > steps[i - 1], "RunConfig: step list must be strictly increasing");
    require(std::isfinite(t0) && std::isfinite(T) && T > t0, "RunConfig: need T > t0");
    eval.validate();
  }
};

struct ConvergenceReport {
  std::string problem;
  std::string method;
  std::string norm = "inf-final";
  ReferenceKind reference = ReferenceKind::SelfConverged;
  std::size_t reference_steps = 0;  // 0 for the exact reference
  std::vector<ConvergenceRow> rows; // decreasing h
  double fitted_slope = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> pairwise;
};

/// Initial state at cfg.t0: the exact solution there when known.
inline Vector initial_state(const ProblemInstance& p, double t0) {
  if (t0 != p.t0 && p.exact) return p.exact(t0);
  return p.u0;
}

inline Trajectory run_solve(const ProblemInstance& p, const RunConfig& cfg, std::size_t N) {
  const TimeGrid grid{cfg.t0, cfg.T, N};
  return integrate(p.system, grid, initial_state(p, cfg.t0), cfg.method, cfg.eval);
}

/// Final-time error study over cfg.steps. The self-converged reference
/// uses the same method with 8x the finest step count.
inline ConvergenceReport run_convergence(const RunConfig& cfg) {
  cfg.validate();
  const ProblemInstance problem = make_problem(cfg.problem, cfg.params);

  auto final_state = [&](std::size_t N) {
    try {
      return Vector(run_solve(problem, cfg, N).final_state());
    } catch (const numerical_error& e) {
      throw numerical_error("N=" + std::to_string(N) + ": " + e.what());
    }
  };

  ConvergenceReport report;
  report.problem = cfg.problem;
  report.method = to_string(cfg.method);
  report.reference = cfg.reference;

  std::vector<std::future<Vector>> runs;
  for (std::size_t N : cfg.steps) runs.push_back(std::async(std::launch::async, final_state, N));

  Vector reference;
  if (cfg.reference == ReferenceKind::Exact) {
    require(static_cast<bool>(problem.exact), "run_convergence: problem has no exact solution");
    reference = problem.exact(cfg.T);
  } else {
    report.reference_steps = 8 * cfg.steps.back();
    reference = final_state(report.reference_steps);
  }

  const double floor = 100.0 * cfg.eval.tol;
  for (std::size_t i = 0; i < cfg.steps.size(); ++i) {
    const Vector diff = runs[i].get() - reference;
    ConvergenceRow row;
    row.N = cfg.steps[i];
    row.h = (cfg.T - cfg.t0) / static_cast<double>(row.N);
    row.error = diff.lpNorm<Eigen::Infinity>();
    row.rms_error = diff.norm() / std::sqrt(static_cast<double>(std::max<Eigen::Index>(diff.size(), 1)));
    row.excluded = row.error < floor;
    report.rows.push_back(row);
  }
  std::sort(report.rows.begin(), report.rows.end(),
            [](const ConvergenceRow& a, const ConvergenceRow& b) { return a.h > b.h; });

  const auto valid = std::count_if(report.rows.begin(), report.rows.end(),
                                   [](const ConvergenceRow& r) { return !r.excluded; });
  if (valid == 0) throw numerical_error("all rows are below the round-off floor");
  if (valid >= 2) {
    const OrderEstimate est = estimate_order(report.rows);
    report.fitted_slope = est.slope;
    report.pairwise = est.pairwise;
  }
  return report;
}

/// Order-condition residuals at scalar samples and random matrices.
struct OrderConditionTable {
  struct Row {
    std::string label;
    std::array<double, 5> residuals{};
  };
  std::vector<Row> rows;

  std::array<double, 5> max_residuals() const {
    std::array<double, 5> m{};
    for (const auto& r : rows)
      for (std::size_t k = 0; k < 5; ++k) m[k] = std::max(m[k], r.residuals[k]);
    return m;
  }
};

/// Random matrix with entries uniform in [-1, 1].
inline DenseMatrix random_matrix(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  DenseMatrix m(n, n);
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = dist(rng);
  return m;
}

inline OrderConditionTable check_order_conditions(std::span<const double> z_samples,
                                                  std::size_t matrix_dim,
                                                  std::size_t matrix_count = 5,
                                                  std::uint64_t seed = 20240101) {
  OrderConditionTable table;
  auto scalar_phi = [](int p, double z) { return phi_dense(p, DenseMatrix::Constant(1, 1, z))(0, 0); };
  char label[64];
  for (double z : z_samples) {
    std::snprintf(label, sizeof label, "z = %g", z);
    table.rows.push_back(
        {label, order_condition_residuals(scalar_phi(1, z), scalar_phi(3, z), scalar_phi(4, z))});
  }
  std::mt19937_64 rng(seed);
  for (std::size_t k = 0; k < matrix_count && matrix_dim > 0; ++k) {
    const DenseMatrix m = random_matrix(matrix_dim, rng);
    const std::string name = "random " + std::to_string(matrix_dim) + "x" + std::to_string(matrix_dim) +
                             " #" + std::to_string(k + 1);
    table.rows.push_back(
        {name, order_condition_residuals(phi_dense(1, m), phi_dense(3, m), phi_dense(4, m))});
  }
  return table;
}

}  // namespace dpgexp
