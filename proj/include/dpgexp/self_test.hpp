#pragma once

#include <random>
#include <string>
#include <vector>

#include "dpgexp/convergence.hpp"
#include "dpgexp/phi.hpp"

namespace dpgexp {

struct SelfTestResult {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool pass() const { return value <= threshold; }
};

/// Accuracy checks of the phi kernel: the phi recurrence, values at zero,
/// the exponential semigroup property and Krylov-versus-dense agreement.
inline std::vector<SelfTestResult> phi_self_test(const PhiEvaluator& eval, std::uint64_t seed = 7) {
  eval.validate();
  std::vector<SelfTestResult> out;
  std::mt19937_64 rng(seed);

  {
    // Spectral radius bounded by the 1-norm, kept below 5.
    DenseMatrix m = random_matrix(8, rng);
    m *= 4.0 / detail::norm1(m);
    m.diagonal().array() -= 0.5;
    const DenseMatrix inv = m.inverse();
    const DenseMatrix id = DenseMatrix::Identity(8, 8);
    for (int p = 0; p <= 4; ++p) {
      const DenseMatrix next = phi_dense(p + 1, m);
      const DenseMatrix rec = inv * (phi_dense(p, m) - id / detail::factorial(p));
      out.push_back({"recurrence p=" + std::to_string(p), (next - rec).norm() / next.norm(), 1e-10});
    }
  }
  for (int p = 0; p <= 5; ++p) {
    const DenseMatrix z = phi_dense(p, DenseMatrix::Zero(4, 4));
    const DenseMatrix want = DenseMatrix::Identity(4, 4) / detail::factorial(p);
    out.push_back({"phi_" + std::to_string(p) + "(0) = I/p!", (z - want).cwiseAbs().maxCoeff(), 1e-14});
  }
  {
    const DenseMatrix m = random_matrix(6, rng);
    const DenseMatrix lhs = expm_dense(0.7 * m);
    const DenseMatrix rhs = expm_dense(0.3 * m) * expm_dense(0.4 * m);
    out.push_back({"semigroup e^{(s+t)M}", (lhs - rhs).norm() / lhs.norm(), 1e-10});
  }
  {
    const Eigen::Index n = 16;
    DenseMatrix a = DenseMatrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      a(i, i) = -2.0;
      if (i > 0) a(i, i - 1) = 1.0;
      if (i + 1 < n) a(i, i + 1) = 1.0;
    }
    const LinearOperator op = LinearOperator::dense(a);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Vector v(n);
    for (auto& x : v) x = dist(rng);
    double worst = 0.0;
    for (int p = 0; p <= 3; ++p) {
      const Vector kry = krylov_phi_action(op, 0.5, v, p, eval);
      const Vector dense = phi_dense(p, 0.5 * a) * v;
      worst = std::max(worst, (kry - dense).norm() / dense.norm());
    }
    out.push_back({"krylov vs dense, dim 16", worst, 10.0 * eval.tol});
  }
  return out;
}

}  // namespace dpgexp
