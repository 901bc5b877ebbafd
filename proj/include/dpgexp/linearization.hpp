#pragma once

#include <optional>
#include <utility>

#include "dpgexp/system.hpp"

namespace dpgexp {

/// Rosenbrock splitting of an autonomous system around u_n:
/// F(u) = J_n u + g_n(u) with J_n the Jacobian frozen at u_n.
class Linearization {
 public:
  Linearization(NonlinearSystem sys, Vector u_n) : sys_(std::move(sys)), point_(std::move(u_n)) {
    check();
    jacobian_ = jacobian_operator(sys_, 0.0, point_);
    if (sys_.split && sys_.split->f_prime_diag && !sys_.jacobian && !sys_.jac_apply)
      split_shift_ = sys_.split->f_prime_diag(0.0, point_);
  }

  /// Injects an arbitrary frozen operator in place of the Jacobian at u_n.
  Linearization(NonlinearSystem sys, Vector u_n, LinearOperator frozen)
      : sys_(std::move(sys)), point_(std::move(u_n)), jacobian_(std::move(frozen)) {
    check();
    require(jacobian_->dim() == sys_.dim, "Linearization: operator dimension mismatch");
  }

  const NonlinearSystem& system() const noexcept { return sys_; }
  const LinearOperator& jacobian() const noexcept { return *jacobian_; }
  const Vector& point() const noexcept { return point_; }
  std::size_t dim() const noexcept { return sys_.dim; }

  Vector rhs(const Vector& u) const { return sys_.rhs(0.0, u); }

  /// g_n(u) = F(u) - J_n u
  Vector remainder(const Vector& u) const {
    if (split_shift_) {
      // Semilinear case: the linear part cancels, g_n(u) = f(u) - f'(u_n) u.
      Vector g = sys_.split->f(0.0, u);
      g.array() -= split_shift_->array() * u.array();
      return g;
    }
    return rhs(u) - jacobian_->apply(u);
  }

  /// g_n'(u) v = (J(u) - J_n) v
  Vector remainder_prime_apply(const Vector& u, const Vector& v) const {
    return jacobian_action(sys_, 0.0, u, v) - jacobian_->apply(v);
  }

 private:
  void check() const {
    require(sys_.autonomous, "linearize: system must be autonomous (see autonomize)");
    require(static_cast<bool>(sys_.rhs), "linearize: system has no right-hand side");
    require(static_cast<std::size_t>(point_.size()) == sys_.dim, "linearize: state dimension mismatch");
    require(point_.allFinite(), "linearize: non-finite state");
  }

  NonlinearSystem sys_;
  Vector point_;
  std::optional<LinearOperator> jacobian_;
  std::optional<Vector> split_shift_;
};

inline Linearization linearize(const NonlinearSystem& sys, const Vector& u_n) {
  return Linearization(sys, u_n);
}

/// g_n'(u) v. With an analytic Jacobian this is (J(u) - J_n) v; otherwise
/// the central difference of F along v minus J_n v.
inline Vector remainder_directional(const Linearization& lin, const Vector& u, const Vector& v) {
  require(static_cast<std::size_t>(u.size()) == lin.dim() &&
              static_cast<std::size_t>(v.size()) == lin.dim(),
          "remainder_directional: dimension mismatch");
  require(v.allFinite(), "remainder_directional: non-finite direction");
  if (lin.system().has_analytic_jacobian()) return lin.remainder_prime_apply(u, v);
  return detail::fd_directional(lin.system(), 0.0, u, v) - lin.jacobian().apply(v);
}

}  // namespace dpgexp
