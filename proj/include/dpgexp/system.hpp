#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <optional>

#include "dpgexp/linear_operator.hpp"
#include "dpgexp/types.hpp"

namespace dpgexp {

/// F(u) = A u + f(t, u) with a diagonal derivative of f in u.
struct SemilinearSplit {
  LinearOperator A;
  std::function<Vector(double, const Vector&)> f;
  std::function<Vector(double, const Vector&)> f_prime_diag;
};

/// u' = F(t, u). Autonomous systems ignore the time argument. Only `dim`
/// and `rhs` are mandatory; missing derivatives fall back to the semilinear
/// split when present and to central finite differences otherwise.
struct NonlinearSystem {
  std::size_t dim = 0;
  bool autonomous = true;
  std::function<Vector(double, const Vector&)> rhs;
  /// (t, u, v) -> J(t, u) v
  std::function<Vector(double, const Vector&, const Vector&)> jac_apply;
  /// (t, u) -> materialized Jacobian operator
  std::function<LinearOperator(double, const Vector&)> jacobian;
  /// (t, u) -> dF/dt
  std::function<Vector(double, const Vector&)> time_derivative;
  std::optional<SemilinearSplit> split;

  Vector operator()(double t, const Vector& u) const { return rhs(t, u); }

  /// Whether J v is available without differencing.
  bool has_analytic_jacobian() const {
    return static_cast<bool>(jac_apply) || static_cast<bool>(jacobian) ||
           (split && split->f_prime_diag);
  }
};

namespace detail {

// Step for central differences in direction v at u.
inline double fd_step(const Vector& u, const Vector& v) {
  const double tiny = std::numeric_limits<double>::min();
  const double vn = v.lpNorm<Eigen::Infinity>();
  return std::sqrt(std::numeric_limits<double>::epsilon()) *
         (1.0 + u.lpNorm<Eigen::Infinity>()) / std::max(vn, tiny);
}

inline Vector fd_directional(const NonlinearSystem& sys, double t, const Vector& u, const Vector& v) {
  if (v.isZero(0.0)) return Vector::Zero(u.size());
  const double eps = fd_step(u, v);
  return (sys.rhs(t, u + eps * v) - sys.rhs(t, u - eps * v)) / (2.0 * eps);
}

}  // namespace detail

/// J(t, u) v
inline Vector jacobian_action(const NonlinearSystem& sys, double t, const Vector& u, const Vector& v) {
  if (sys.jac_apply) return sys.jac_apply(t, u, v);
  if (sys.jacobian) return sys.jacobian(t, u).apply(v);
  if (sys.split && sys.split->f_prime_diag) {
    Vector r = sys.split->A.apply(v);
    r.array() += sys.split->f_prime_diag(t, u).array() * v.array();
    return r;
  }
  return detail::fd_directional(sys, t, u, v);
}

/// Jacobian at (t, u) as an operator: the materialized one if the system
/// provides it, A + diag(f') for semilinear systems, otherwise matrix-free.
inline LinearOperator jacobian_operator(const NonlinearSystem& sys, double t, const Vector& u) {
  if (sys.jacobian) return sys.jacobian(t, u);
  if (sys.split && sys.split->f_prime_diag)
    return LinearOperator::diagonal_shifted(sys.split->A, sys.split->f_prime_diag(t, u));
  return LinearOperator::matrix_free(
      sys.dim, [sys, t, u](const Vector& v) { return jacobian_action(sys, t, u, v); });
}

/// dF/dt at (t, u); central difference in t when no derivative is given.
inline Vector time_derivative(const NonlinearSystem& sys, double t, const Vector& u) {
  if (sys.time_derivative) return sys.time_derivative(t, u);
  if (sys.autonomous) return Vector::Zero(u.size());
  const double dt = std::sqrt(std::numeric_limits<double>::epsilon()) * (1.0 + std::abs(t));
  return (sys.rhs(t + dt, u) - sys.rhs(t - dt, u)) / (2.0 * dt);
}

/// Appends time as the leading state component: U = [t; u],
/// F(U) = [1; F(t, u)]. The Jacobian is the augmented operator with a zero
/// first row and dF/dt in the first column.
inline NonlinearSystem autonomize(const NonlinearSystem& sys) {
  require(!sys.autonomous, "autonomize: system is already autonomous");
  require(static_cast<bool>(sys.rhs), "autonomize: system has no right-hand side");
  const auto n = static_cast<Eigen::Index>(sys.dim);

  NonlinearSystem out;
  out.dim = sys.dim + 1;
  out.autonomous = true;
  out.rhs = [sys, n](double, const Vector& U) {
    Vector r(n + 1);
    r[0] = 1.0;
    r.tail(n) = sys.rhs(U[0], U.tail(n));
    return r;
  };
  out.jacobian = [sys, n](double, const Vector& U) {
    const Vector u = U.tail(n);
    return LinearOperator::augmented(time_derivative(sys, U[0], u),
                                     jacobian_operator(sys, U[0], u));
  };
  if (sys.has_analytic_jacobian()) {
    out.jac_apply = [sys, n](double, const Vector& U, const Vector& V) {
      const Vector u = U.tail(n);
      Vector r(n + 1);
      r[0] = 0.0;
      r.tail(n) = jacobian_action(sys, U[0], u, V.tail(n));
      if (V[0] != 0.0) r.tail(n) += V[0] * time_derivative(sys, U[0], u);
      return r;
    };
  }
  return out;
}

}  // namespace dpgexp
