#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace dpgexp {

using Vector = Eigen::VectorXd;
using DenseMatrix = Eigen::MatrixXd;

/// Base class for failures of a numerical procedure (as opposed to bad input,
/// which is reported through std::invalid_argument).
class numerical_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The Krylov action did not reach the requested accuracy.
class krylov_convergence_error : public numerical_error {
 public:
  krylov_convergence_error(const std::string& what, double achieved)
      : numerical_error(what + " (achieved residual estimate " +
                        std::to_string(achieved) + ")"),
        achieved_residual_(achieved) {}

  double achieved_residual() const noexcept { return achieved_residual_; }

 private:
  double achieved_residual_;
};

/// A time step failed; carries the index of the step that failed.
class step_error : public numerical_error {
 public:
  step_error(std::size_t step, const std::string& what)
      : numerical_error("step " + std::to_string(step) + ": " + what),
        step_(step) {}

  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

inline bool all_finite(const Vector& v) { return v.allFinite(); }

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

}  // namespace dpgexp
