#pragma once

#include <random>

#include "dpgexp/dpgexp.hpp"

namespace testing_support {

using dpgexp::DenseMatrix;
using dpgexp::LinearOperator;
using dpgexp::NonlinearSystem;
using dpgexp::Vector;

inline Vector random_vector(Eigen::Index n, std::mt19937_64& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> dist(-scale, scale);
  Vector v(n);
  for (auto& x : v) x = dist(rng);
  return v;
}

inline DenseMatrix random_dense(Eigen::Index n, std::mt19937_64& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> dist(-scale, scale);
  DenseMatrix m(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i) m(i, j) = dist(rng);
  return m;
}

// Diagonally dominant with negative diagonal, so every eigenvalue has
// negative real part by Gershgorin.
inline DenseMatrix random_stable(Eigen::Index n, std::mt19937_64& rng) {
  DenseMatrix m = random_dense(n, rng);
  m.diagonal().array() -= static_cast<double>(n) + 1.0;
  return m;
}

// F(u) = A u + c*u^2 + s*sin(u) + b, componentwise nonlinearity.
struct RandomSystem {
  DenseMatrix A;
  Vector c, s, b;

  Vector rhs(const Vector& u) const {
    return A * u + (c.array() * u.array().square() + s.array() * u.array().sin()).matrix() + b;
  }
  Vector jac_diag(const Vector& u) const {
    return (2.0 * c.array() * u.array() + s.array() * u.array().cos()).matrix();
  }

  NonlinearSystem system(bool analytic = true) const {
    NonlinearSystem sys;
    sys.dim = static_cast<std::size_t>(A.rows());
    const RandomSystem self = *this;
    sys.rhs = [self](double, const Vector& u) { return self.rhs(u); };
    if (analytic) {
      sys.jac_apply = [self](double, const Vector& u, const Vector& v) -> Vector {
        return self.A * v + self.jac_diag(u).cwiseProduct(v);
      };
      sys.jacobian = [self](double, const Vector& u) {
        DenseMatrix j = self.A;
        j.diagonal() += self.jac_diag(u);
        return LinearOperator::dense(j);
      };
    }
    return sys;
  }
};

inline RandomSystem random_system(Eigen::Index n, std::mt19937_64& rng) {
  RandomSystem r;
  r.A = random_stable(n, rng);
  r.c = random_vector(n, rng, 0.5);
  r.s = random_vector(n, rng, 0.5);
  r.b = random_vector(n, rng);
  return r;
}

// Shifts b so that u_star is an equilibrium.
inline RandomSystem with_equilibrium(RandomSystem r, const Vector& u_star) {
  r.b.setZero();
  r.b = -r.rhs(u_star);
  return r;
}

inline double rel_diff(const Vector& a, const Vector& b) {
  const double scale = std::max(b.lpNorm<Eigen::Infinity>(), 1e-300);
  return (a - b).lpNorm<Eigen::Infinity>() / scale;
}

inline dpgexp::PhiEvaluator dense_eval() {
  dpgexp::PhiEvaluator e;
  e.backend = dpgexp::PhiBackend::DensePade;
  return e;
}

}  // namespace testing_support
