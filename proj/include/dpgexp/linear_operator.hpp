#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <utility>
#include <variant>

#include "dpgexp/csr_matrix.hpp"
#include "dpgexp/types.hpp"

namespace dpgexp {

enum class OperatorKind { Dense, SparseCsr, DiagonalShifted, Augmented, MatrixFree };

/// Real square linear map, held by value. Composite kinds share their
/// sub-operators, so copies are cheap and immutable.
class LinearOperator {
 public:
  using Action = std::function<Vector(const Vector&)>;

  static LinearOperator dense(DenseMatrix m) {
    require(m.rows() == m.cols(), "LinearOperator: dense matrix must be square");
    require(m.allFinite(), "LinearOperator: dense matrix has non-finite entries");
    return LinearOperator(DenseRep{std::move(m)});
  }

  static LinearOperator csr(CsrMatrix m) {
    require(m.rows() == m.cols(), "LinearOperator: CSR matrix must be square");
    return LinearOperator(CsrRep{std::make_shared<const CsrMatrix>(std::move(m))});
  }

  /// base + diag(shift)
  static LinearOperator diagonal_shifted(LinearOperator base, Vector shift) {
    require(static_cast<std::size_t>(shift.size()) == base.dim(),
            "LinearOperator: diagonal shift has wrong length");
    require(shift.allFinite(), "LinearOperator: non-finite diagonal shift");
    return LinearOperator(
        ShiftedRep{std::make_shared<const LinearOperator>(std::move(base)), std::move(shift)});
  }

  /// [[0, 0], [time_column, inner]]: the Jacobian of an autonomized system.
  /// The first row is identically zero.
  static LinearOperator augmented(Vector time_column, LinearOperator inner) {
    require(static_cast<std::size_t>(time_column.size()) == inner.dim(),
            "LinearOperator: time column has wrong length");
    return LinearOperator(AugmentedRep{std::make_shared<const LinearOperator>(std::move(inner)),
                                       std::move(time_column)});
  }

  /// Operator known only through its action. `norm1_bound <= 0` means
  /// "unknown"; it is then measured by probing with unit vectors.
  static LinearOperator matrix_free(std::size_t dim, Action action, double norm1_bound = 0.0) {
    require(static_cast<bool>(action), "LinearOperator: empty action");
    return LinearOperator(FreeRep{dim, std::move(action), norm1_bound});
  }

  OperatorKind kind() const noexcept {
    return std::visit(
        [](const auto& r) {
          using R = std::decay_t<decltype(r)>;
          if constexpr (std::is_same_v<R, DenseRep>) return OperatorKind::Dense;
          else if constexpr (std::is_same_v<R, CsrRep>) return OperatorKind::SparseCsr;
          else if constexpr (std::is_same_v<R, ShiftedRep>) return OperatorKind::DiagonalShifted;
          else if constexpr (std::is_same_v<R, AugmentedRep>) return OperatorKind::Augmented;
          else return OperatorKind::MatrixFree;
        },
        rep_);
  }

  std::size_t dim() const noexcept {
    return std::visit(
        [](const auto& r) -> std::size_t {
          using R = std::decay_t<decltype(r)>;
          if constexpr (std::is_same_v<R, DenseRep>) return static_cast<std::size_t>(r.m.rows());
          else if constexpr (std::is_same_v<R, CsrRep>) return r.m->rows();
          else if constexpr (std::is_same_v<R, ShiftedRep>) return r.base->dim();
          else if constexpr (std::is_same_v<R, AugmentedRep>) return r.inner->dim() + 1;
          else return r.dim;
        },
        rep_);
  }

  /// True when the first row is known to be zero (autonomized Jacobians).
  bool has_zero_first_row() const noexcept { return kind() == OperatorKind::Augmented; }

  Vector apply(const Vector& x) const {
    require(static_cast<std::size_t>(x.size()) == dim(), "LinearOperator: dimension mismatch");
    return std::visit(
        [&x](const auto& r) -> Vector {
          using R = std::decay_t<decltype(r)>;
          if constexpr (std::is_same_v<R, DenseRep>) {
            return r.m * x;
          } else if constexpr (std::is_same_v<R, CsrRep>) {
            Vector y(x.size());
            r.m->multiply(x.data(), y.data());
            return y;
          } else if constexpr (std::is_same_v<R, ShiftedRep>) {
            Vector y = r.base->apply(x);
            y.array() += r.shift.array() * x.array();
            return y;
          } else if constexpr (std::is_same_v<R, AugmentedRep>) {
            const Eigen::Index n = r.column.size();
            Vector y(n + 1);
            y[0] = 0.0;
            y.tail(n) = r.inner->apply(x.tail(n)) + x[0] * r.column;
            return y;
          } else {
            Vector y = r.action(x);
            require(y.size() == x.size(), "LinearOperator: action changed dimension");
            return y;
          }
        },
        rep_);
  }

  Vector operator*(const Vector& x) const { return apply(x); }

  DenseMatrix to_dense() const {
    return std::visit(
        [this](const auto& r) -> DenseMatrix {
          using R = std::decay_t<decltype(r)>;
          if constexpr (std::is_same_v<R, DenseRep>) {
            return r.m;
          } else if constexpr (std::is_same_v<R, CsrRep>) {
            return r.m->to_dense();
          } else if constexpr (std::is_same_v<R, ShiftedRep>) {
            DenseMatrix m = r.base->to_dense();
            m.diagonal() += r.shift;
            return m;
          } else if constexpr (std::is_same_v<R, AugmentedRep>) {
            const Eigen::Index n = r.column.size();
            DenseMatrix m = DenseMatrix::Zero(n + 1, n + 1);
            m.block(1, 0, n, 1) = r.column;
            m.block(1, 1, n, n) = r.inner->to_dense();
            return m;
          } else {
            return probe();
          }
        },
        rep_);
  }

  /// Induced 1-norm, or an upper bound on it for composite kinds.
  double norm1() const {
    return std::visit(
        [this](const auto& r) -> double {
          using R = std::decay_t<decltype(r)>;
          if constexpr (std::is_same_v<R, DenseRep>) {
            return r.m.size() == 0 ? 0.0 : r.m.cwiseAbs().colwise().sum().maxCoeff();
          } else if constexpr (std::is_same_v<R, CsrRep>) {
            return r.m->norm1();
          } else if constexpr (std::is_same_v<R, ShiftedRep>) {
            return r.base->norm1() + (r.shift.size() ? r.shift.cwiseAbs().maxCoeff() : 0.0);
          } else if constexpr (std::is_same_v<R, AugmentedRep>) {
            return std::max(r.column.template lpNorm<1>(), r.inner->norm1());
          } else {
            if (r.norm1_bound > 0.0) return r.norm1_bound;
            const DenseMatrix m = probe();
            return m.size() == 0 ? 0.0 : m.cwiseAbs().colwise().sum().maxCoeff();
          }
        },
        rep_);
  }

 private:
  struct DenseRep {
    DenseMatrix m;
  };
  struct CsrRep {
    std::shared_ptr<const CsrMatrix> m;
  };
  struct ShiftedRep {
    std::shared_ptr<const LinearOperator> base;
    Vector shift;
  };
  struct AugmentedRep {
    std::shared_ptr<const LinearOperator> inner;
    Vector column;
  };
  struct FreeRep {
    std::size_t dim;
    Action action;
    double norm1_bound;
  };
  using Rep = std::variant<DenseRep, CsrRep, ShiftedRep, AugmentedRep, FreeRep>;

  explicit LinearOperator(Rep rep) : rep_(std::move(rep)) {}

  DenseMatrix probe() const {
    const auto n = static_cast<Eigen::Index>(dim());
    DenseMatrix m(n, n);
    Vector e = Vector::Zero(n);
    for (Eigen::Index j = 0; j < n; ++j) {
      e[j] = 1.0;
      m.col(j) = apply(e);
      e[j] = 0.0;
    }
    return m;
  }

  Rep rep_;
};

}  // namespace dpgexp
