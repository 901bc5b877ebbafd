#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "dpgexp/csr_matrix.hpp"
#include "dpgexp/system.hpp"

namespace dpgexp {

/// Interior nodes of the unit square, spacing 1/(m+1), numbered
/// lexicographically with x fastest: k = (j-1) m + (i-1).
struct Grid2D {
  std::size_t m = 2;

  double dx() const { return 1.0 / static_cast<double>(m + 1); }
  double coord(std::size_t i) const { return static_cast<double>(i) * dx(); }
  std::size_t size() const { return m * m; }
  std::size_t index(std::size_t i, std::size_t j) const { return (j - 1) * m + (i - 1); }
};

/// 5-point Laplacian with homogeneous Dirichlet conditions on the m x m
/// interior grid.
inline CsrMatrix laplacian_2d(std::size_t m) {
  require(m >= 2, "laplacian_2d: need m >= 2");
  const Grid2D g{m};
  const double s = 1.0 / (g.dx() * g.dx());
  std::vector<CsrMatrix::Triplet> t;
  t.reserve(5 * g.size());
  for (std::size_t j = 1; j <= m; ++j) {
    for (std::size_t i = 1; i <= m; ++i) {
      const std::size_t k = g.index(i, j);
      t.push_back({k, k, -4.0 * s});
      if (i > 1) t.push_back({k, g.index(i - 1, j), s});
      if (i < m) t.push_back({k, g.index(i + 1, j), s});
      if (j > 1) t.push_back({k, g.index(i, j - 1), s});
      if (j < m) t.push_back({k, g.index(i, j + 1), s});
    }
  }
  return CsrMatrix::from_triplets(g.size(), g.size(), std::move(t));
}

/// Nodal data of the manufactured solution u = x(1-x) y(1-y) e^t.
struct ManufacturedSource {
  Vector bubble;      // x(1-x) y(1-y)
  Vector bubble_lap;  // -Lap(bubble) = 2[x(1-x) + y(1-y)]

  Vector exact(double t) const { return bubble * std::exp(t); }

  /// s = u_t - Lap u - 1/(1+u^2) for the exact u.
  Vector source(double t) const {
    const double et = std::exp(t);
    const Vector w = bubble * et;
    return (w + et * bubble_lap).array() - 1.0 / (1.0 + w.array().square());
  }

  Vector source_dt(double t) const {
    const double et = std::exp(t);
    const Vector w = bubble * et;
    const Eigen::ArrayXd w2 = w.array().square();
    return (w + et * bubble_lap).array() + 2.0 * w2 / (1.0 + w2).square();
  }
};

/// Semidiscrete u_t = Lap u + 1/(1+u^2) + s(x,y,t) on the unit square,
/// homogeneous Dirichlet boundary, with the source chosen so that
/// x(1-x) y(1-y) e^t solves the PDE.
struct HOProblem {
  Grid2D grid;
  CsrMatrix laplacian;
  std::shared_ptr<const ManufacturedSource> data;
  NonlinearSystem system;

  Vector exact(double t) const { return data->exact(t); }
  Vector source(double t) const { return data->source(t); }
  Vector source_dt(double t) const { return data->source_dt(t); }
};

inline HOProblem build_ho_problem(std::size_t m) {
  require(m >= 2, "build_ho_problem: need m >= 2");
  HOProblem p;
  p.grid = Grid2D{m};
  p.laplacian = laplacian_2d(m);

  auto data = std::make_shared<ManufacturedSource>();
  data->bubble.resize(static_cast<Eigen::Index>(p.grid.size()));
  data->bubble_lap.resize(data->bubble.size());
  for (std::size_t j = 1; j <= m; ++j) {
    for (std::size_t i = 1; i <= m; ++i) {
      const double x = p.grid.coord(i);
      const double y = p.grid.coord(j);
      const auto k = static_cast<Eigen::Index>(p.grid.index(i, j));
      data->bubble[k] = x * (1.0 - x) * y * (1.0 - y);
      data->bubble_lap[k] = 2.0 * (x * (1.0 - x) + y * (1.0 - y));
    }
  }
  p.data = data;

  const LinearOperator lap = LinearOperator::csr(p.laplacian);
  auto f = [data](double t, const Vector& u) -> Vector {
    return (1.0 / (1.0 + u.array().square())).matrix() + data->source(t);
  };
  NonlinearSystem& sys = p.system;
  sys.dim = p.grid.size();
  sys.autonomous = false;
  sys.rhs = [lap, f](double t, const Vector& u) -> Vector { return lap.apply(u) + f(t, u); };
  sys.time_derivative = [data](double t, const Vector&) { return data->source_dt(t); };
  sys.split = SemilinearSplit{
      lap, f, [](double, const Vector& u) -> Vector {
        return (-2.0 * u.array() / (1.0 + u.array().square()).square()).matrix();
      }};
  return p;
}

/// u' = u^2 with exact solution u0 / (1 - u0 t) for t < 1/u0.
inline NonlinearSystem riccati_problem() {
  NonlinearSystem sys;
  sys.dim = 1;
  sys.rhs = [](double, const Vector& u) -> Vector { return u.array().square(); };
  sys.jac_apply = [](double, const Vector& u, const Vector& v) -> Vector {
    return 2.0 * u.array() * v.array();
  };
  sys.jacobian = [](double, const Vector& u) {
    return LinearOperator::dense(DenseMatrix::Constant(1, 1, 2.0 * u[0]));
  };
  return sys;
}

inline double riccati_exact(double u0, double t) {
  require(u0 * t < 1.0, "riccati_exact: t beyond the blow-up time");
  return u0 / (1.0 - u0 * t);
}

/// u' = diag(spectrum) u with every entry of the spectrum negative.
inline NonlinearSystem linear_decay_system(const std::vector<double>& spectrum) {
  require(!spectrum.empty(), "linear_decay_system: empty spectrum");
  for (double s : spectrum)
    require(std::isfinite(s) && s < 0.0, "linear_decay_system: spectrum entries must be negative");
  const Vector d = Eigen::Map<const Vector>(spectrum.data(), static_cast<Eigen::Index>(spectrum.size()));
  const LinearOperator op = LinearOperator::dense(d.asDiagonal().toDenseMatrix());
  NonlinearSystem sys;
  sys.dim = spectrum.size();
  sys.rhs = [d](double, const Vector& u) -> Vector { return d.cwiseProduct(u); };
  sys.jac_apply = [d](double, const Vector&, const Vector& v) -> Vector { return d.cwiseProduct(v); };
  sys.jacobian = [op](double, const Vector&) { return op; };
  return sys;
}

/// A registered problem: the system, its initial time and state, and an
/// exact solution when one is known.
struct ProblemInstance {
  std::string name;
  NonlinearSystem system;
  double t0 = 0.0;
  Vector u0;
  std::function<Vector(double)> exact;
};

struct ProblemParams {
  std::size_t grid = 32;
  double riccati_u0 = 1.0;
  std::vector<double> spectrum{-1.0, -100.0};
};

inline const std::vector<std::string>& problem_names() {
  static const std::vector<std::string> names{"ho", "riccati", "linear-decay"};
  return names;
}

inline ProblemInstance make_problem(const std::string& name, const ProblemParams& params = {}) {
  ProblemInstance p;
  p.name = name;
  if (name == "ho") {
    const HOProblem ho = build_ho_problem(params.grid);
    p.system = ho.system;
    p.u0 = ho.exact(0.0);
    p.exact = [data = ho.data](double t) -> Vector { return data->exact(t); };
  } else if (name == "riccati") {
    const double u0 = params.riccati_u0;
    p.system = riccati_problem();
    p.u0 = Vector::Constant(1, u0);
    p.exact = [u0](double t) -> Vector { return Vector::Constant(1, riccati_exact(u0, t)); };
  } else if (name == "linear-decay") {
    const Vector d = Eigen::Map<const Vector>(params.spectrum.data(),
                                              static_cast<Eigen::Index>(params.spectrum.size()));
    p.system = linear_decay_system(params.spectrum);
    p.u0 = Vector::Ones(d.size());
    p.exact = [d](double t) -> Vector { return (d * t).array().exp(); };
  } else {
    std::string list;
    for (const auto& n : problem_names()) list += (list.empty() ? "" : ", ") + n;
    throw std::invalid_argument("unknown problem '" + name + "' (available: " + list + ")");
  }
  return p;
}

}  // namespace dpgexp
