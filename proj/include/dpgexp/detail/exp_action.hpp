#pragma once

// Actions w = exp(B) b for operators known only through matrix-vector
// products. Both routines treat `tol` as a relative accuracy target.

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "dpgexp/expm.hpp"
#include "dpgexp/types.hpp"

namespace dpgexp::detail {

// Round to two significant digits (step sizes, as in Expokit).
inline double round_step(double t) {
  if (!(t > 0.0)) return t;
  const double s = std::pow(10.0, std::floor(std::log10(t)) - 1.0);
  return std::ceil(t / s) * s;
}

/// Krylov/Arnoldi action of the exponential with sub-stepping in the time
/// variable and the Hessenberg-corner residual estimate for step control.
/// `apply(x)` must return B x; `norm1` is an upper bound for ||B||_1.
template <class Apply>
Vector krylov_expv(Apply&& apply, Eigen::Index n, const Vector& b, double norm1, double tol,
                   std::size_t max_dim) {
  constexpr double delta = 1.2;
  constexpr double gamma = 0.9;
  constexpr int max_rejects = 60;
  constexpr std::size_t max_substeps = 200000;
  constexpr double eps = std::numeric_limits<double>::epsilon();

  Vector w = b;
  if (n == 0 || b.norm() == 0.0) return Vector::Zero(n);

  const Eigen::Index m = std::min<Eigen::Index>(static_cast<Eigen::Index>(max_dim), n);
  const double anorm = std::max(norm1, eps);
  const double btol = 16.0 * eps * anorm;
  const double t_out = 1.0;

  const double md = static_cast<double>(m);
  const double fact =
      std::pow((md + 1.0) / std::numbers::e, md + 1.0) * std::sqrt(2.0 * std::numbers::pi * (md + 1.0));
  double t_new = std::min(t_out, round_step((1.0 / anorm) * std::pow((fact * tol) / (4.0 * anorm), 1.0 / md)));

  DenseMatrix basis(n, m + 1);
  DenseMatrix hess(m + 2, m + 2);
  double t_now = 0.0;
  std::size_t substeps = 0;

  while (t_now < t_out) {
    if (++substeps > max_substeps)
      throw krylov_convergence_error("Krylov action exceeded the sub-step budget", 0.0);
    double t_step = std::min(t_out - t_now, t_new);
    if (!(t_step > 0.0) || t_now + t_step == t_now)
      throw krylov_convergence_error("Krylov sub-step underflowed", 0.0);
    const double beta = w.norm();
    if (beta == 0.0) break;

    basis.col(0) = w / beta;
    hess.setZero();
    Eigen::Index mb = m;
    int k1 = 2;
    for (Eigen::Index j = 0; j < m; ++j) {
      Vector p = apply(Vector(basis.col(j)));
      for (Eigen::Index i = 0; i <= j; ++i) {
        hess(i, j) = basis.col(i).dot(p);
        p.noalias() -= hess(i, j) * basis.col(i);
      }
      const double s = p.norm();
      if (!std::isfinite(s))
        throw krylov_convergence_error("Krylov basis became non-finite", s);
      if (s <= btol) {
        // Invariant subspace: the projection is exact.
        k1 = 0;
        mb = j + 1;
        t_step = t_out - t_now;
        break;
      }
      hess(j + 1, j) = s;
      basis.col(j + 1) = p / s;
    }

    double avnorm = 0.0;
    if (k1 != 0) {
      hess(m + 1, m) = 1.0;
      avnorm = apply(Vector(basis.col(m))).norm();
    }

    double err_loc = 0.0;
    double xm = 1.0 / md;
    DenseMatrix f;
    for (int rejects = 0;; ++rejects) {
      const Eigen::Index mx = mb + k1;
      f = expm_dense(t_step * hess.topLeftCorner(mx, mx));
      if (k1 == 0) {
        err_loc = btol;
        break;
      }
      const double p1 = std::abs(f(m, 0));
      const double p2 = std::abs(f(m + 1, 0)) * avnorm;
      if (p1 > 10.0 * p2) {
        err_loc = p2;
        xm = 1.0 / md;
      } else if (p1 > p2) {
        err_loc = p1 * p2 / (p1 - p2);
        xm = 1.0 / md;
      } else {
        err_loc = p1;
        xm = 1.0 / std::max(md - 1.0, 1.0);
      }
      if (err_loc <= delta * t_step * tol) break;
      if (rejects == max_rejects)
        throw krylov_convergence_error("Krylov action did not converge within the maximum dimension",
                                       err_loc / t_step);
      t_step = round_step(gamma * t_step * std::pow(t_step * tol / err_loc, xm));
    }

    const Eigen::Index mx = mb + std::max(0, k1 - 1);
    w = beta * (basis.leftCols(mx) * f.col(0).head(mx));
    t_now += t_step;
    // Relative to this step's target: a fixed eps floor shrinks every step
    // once t_step * tol < eps.
    err_loc = std::max(err_loc, eps * t_step * tol);
    t_new = round_step(gamma * t_step * std::pow(t_step * tol / err_loc, xm));
  }
  return w;
}

/// Truncated Taylor action with scaling: the step count and degree are picked
/// from the 1-norm bound, and each Taylor sum stops early once two
/// consecutive terms fall below tol.
template <class Apply>
Vector taylor_expv(Apply&& apply, const Vector& b, double norm1, double tol) {
  // Largest norms for which degree m keeps the backward error below unit
  // roundoff (double precision).
  constexpr std::array<std::pair<int, double>, 11> theta{{{5, 2.4e-3},
                                                          {10, 1.4e-1},
                                                          {15, 6.4e-1},
                                                          {20, 1.4},
                                                          {25, 2.4},
                                                          {30, 3.5},
                                                          {35, 4.7},
                                                          {40, 6.0},
                                                          {45, 7.2},
                                                          {50, 8.5},
                                                          {55, 9.9}}};
  int degree = 55;
  double steps = 1.0;
  if (norm1 > 0.0) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& [m, th] : theta) {
      const double s = std::max(1.0, std::ceil(norm1 / th));
      if (m * s < best) {
        best = m * s;
        degree = m;
        steps = s;
      }
    }
  }

  Vector f = b;
  Vector term = b;
  const auto count = static_cast<long>(steps);
  for (long i = 0; i < count; ++i) {
    double c1 = term.lpNorm<Eigen::Infinity>();
    for (int j = 1; j <= degree; ++j) {
      term = apply(term) / (steps * j);
      const double c2 = term.lpNorm<Eigen::Infinity>();
      f += term;
      if (c1 + c2 <= tol * f.lpNorm<Eigen::Infinity>()) break;
      c1 = c2;
    }
    if (!f.allFinite()) throw numerical_error("Taylor action produced non-finite values");
    term = f;
  }
  return f;
}

}  // namespace dpgexp::detail
