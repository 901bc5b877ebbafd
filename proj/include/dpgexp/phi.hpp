#pragma once

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "dpgexp/detail/exp_action.hpp"
#include "dpgexp/expm.hpp"
#include "dpgexp/linear_operator.hpp"
#include "dpgexp/types.hpp"

namespace dpgexp {

enum class PhiBackend { DensePade, KrylovArnoldi, TaylorAction };

inline std::string to_string(PhiBackend b) {
  switch (b) {
    case PhiBackend::DensePade: return "dense";
    case PhiBackend::KrylovArnoldi: return "krylov";
    case PhiBackend::TaylorAction: return "taylor";
  }
  return "?";
}

inline PhiBackend parse_backend(const std::string& name) {
  if (name == "dense") return PhiBackend::DensePade;
  if (name == "krylov") return PhiBackend::KrylovArnoldi;
  if (name == "taylor") return PhiBackend::TaylorAction;
  throw std::invalid_argument("unknown backend '" + name + "' (available: dense, krylov, taylor)");
}

/// Configuration for evaluating phi-function actions. Operators with
/// dimension at most `dense_threshold` always go through the dense path.
struct PhiEvaluator {
  PhiBackend backend = PhiBackend::KrylovArnoldi;
  double tol = 1e-12;
  std::size_t max_krylov_dim = 64;
  std::size_t dense_threshold = 512;

  void validate() const {
    require(tol > 0.0 && std::isfinite(tol), "PhiEvaluator: tol must be positive");
    require(max_krylov_dim >= 2, "PhiEvaluator: max_krylov_dim must be at least 2");
    require(dense_threshold >= 1, "PhiEvaluator: dense_threshold must be at least 1");
  }
};

/// sum_k h^k phi_k(h A) v_k for k = 0..q.
struct PhiCombination {
  const LinearOperator& op;
  double h;
  std::vector<Vector> vectors;
};

namespace detail {

inline double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

// sum_{k=0}^{q} phi_k(tau A) w_k through exp of the (n+q)-dimensional
// operator [[tau A, W], [0, K]] applied to [w_0; e_q], where the columns of
// W are w_q..w_1 and K is the q x q upper shift.
inline Vector phi_sum_impl(const LinearOperator& op, double tau, std::span<const Vector> ws,
                           const PhiEvaluator& eval, PhiBackend backend) {
  const auto n = static_cast<Eigen::Index>(op.dim());
  std::size_t last = ws.size();
  while (last > 1 && ws[last - 1].isZero(0.0)) --last;
  const auto q = static_cast<Eigen::Index>(last) - 1;

  // Balances the coupling columns against the state block.
  double eta = 0.0;
  for (Eigen::Index k = 1; k <= q; ++k) eta = std::max(eta, ws[k].norm());
  if (eta == 0.0) eta = 1.0;

  Vector start(n + q);
  start.head(n) = ws[0];
  if (q > 0) {
    start.tail(q).setZero();
    start[n + q - 1] = eta;
  }

  if (backend == PhiBackend::DensePade) {
    DenseMatrix big = DenseMatrix::Zero(n + q, n + q);
    big.topLeftCorner(n, n) = tau * op.to_dense();
    for (Eigen::Index j = 0; j < q; ++j) {
      big.block(0, n + j, n, 1) = ws[q - j] / eta;
      if (j + 1 < q) big(n + j, n + j + 1) = 1.0;
    }
    return (expm_dense(big) * start).head(n);
  }

  double colmax = 0.0;
  for (Eigen::Index j = 0; j < q; ++j)
    colmax = std::max(colmax, ws[q - j].lpNorm<1>() / eta + (j > 0 ? 1.0 : 0.0));
  const double norm1 = std::max(std::abs(tau) * op.norm1(), colmax);

  auto apply = [&](const Vector& y) -> Vector {
    Vector out(n + q);
    out.head(n) = tau * op.apply(y.head(n));
    for (Eigen::Index j = 0; j < q; ++j) {
      const double c = y[n + j];
      if (c != 0.0) out.head(n) += (c / eta) * ws[q - j];
      out[n + j] = (j + 1 < q) ? y[n + j + 1] : 0.0;
    }
    return out;
  };

  Vector result = backend == PhiBackend::KrylovArnoldi
                      ? krylov_expv(apply, n + q, start, norm1, eval.tol, eval.max_krylov_dim)
                      : taylor_expv(apply, start, norm1, eval.tol);
  return result.head(n);
}

inline void check_phi_inputs(const LinearOperator& op, std::span<const Vector> ws) {
  require(!ws.empty(), "phi action: at least one vector is required");
  for (const auto& w : ws) {
    require(static_cast<std::size_t>(w.size()) == op.dim(), "phi action: dimension mismatch");
    require(w.allFinite(), "phi action: non-finite input vector");
  }
}

}  // namespace detail

/// sum_k phi_k(tau A) w_k, with tau of either sign. This is the primitive
/// all integrators are written against; one call is one phi-combination
/// solve.
inline Vector phi_sum_action(const LinearOperator& op, double tau, std::span<const Vector> ws,
                             const PhiEvaluator& eval) {
  eval.validate();
  detail::check_phi_inputs(op, ws);
  require(std::isfinite(tau), "phi action: non-finite step");
  const PhiBackend backend =
      op.dim() <= eval.dense_threshold ? PhiBackend::DensePade : eval.backend;
  Vector r = detail::phi_sum_impl(op, tau, ws, eval, backend);
  if (op.has_zero_first_row()) {
    // The first row of phi_k(tau A) is e_0^T / k! exactly.
    double exact = 0.0;
    for (std::size_t k = 0; k < ws.size(); ++k)
      exact += ws[k][0] / detail::factorial(static_cast<int>(k));
    r[0] = exact;
  }
  return r;
}

inline Vector phi_combination_action(const PhiCombination& c, const PhiEvaluator& eval) {
  require(c.h >= 0.0, "phi_combination_action: step must be non-negative");
  std::vector<Vector> ws;
  ws.reserve(c.vectors.size());
  double hk = 1.0;
  for (const auto& v : c.vectors) {
    ws.push_back(hk * v);
    hk *= c.h;
  }
  return phi_sum_action(c.op, c.h, ws, eval);
}

/// phi_p(h A) v through the Krylov path regardless of the dense threshold.
inline Vector krylov_phi_action(const LinearOperator& op, double h, const Vector& v, int p,
                                const PhiEvaluator& eval) {
  eval.validate();
  require(p >= 0, "krylov_phi_action: order must be non-negative");
  std::vector<Vector> ws(static_cast<std::size_t>(p) + 1,
                         Vector::Zero(static_cast<Eigen::Index>(op.dim())));
  ws[static_cast<std::size_t>(p)] = v;
  detail::check_phi_inputs(op, ws);
  if (v.isZero(0.0)) return Vector::Zero(v.size());
  return detail::phi_sum_impl(op, h, ws, eval, PhiBackend::KrylovArnoldi);
}

}  // namespace dpgexp
