#include <gtest/gtest.h>

#include "support.hpp"

using namespace dpgexp;
using namespace testing_support;

namespace {

constexpr MethodId nonlinear_methods[] = {MethodId::ExpEulerClassic, MethodId::HybridEuler, MethodId::DPG2,
                                          MethodId::DPG3};

NonlinearSystem scalar_decay() {
  NonlinearSystem sys;
  sys.dim = 1;
  sys.rhs = [](double, const Vector& u) -> Vector { return -u; };
  sys.jac_apply = [](double, const Vector&, const Vector& v) -> Vector { return -v; };
  return sys;
}

// u' = A u + b
NonlinearSystem affine_system(const DenseMatrix& a, const Vector& b) {
  NonlinearSystem sys;
  sys.dim = static_cast<std::size_t>(a.rows());
  sys.rhs = [a, b](double, const Vector& u) -> Vector { return a * u + b; };
  sys.jacobian = [a](double, const Vector&) { return LinearOperator::dense(a); };
  return sys;
}

double riccati_slope(MethodId method) {
  const NonlinearSystem sys = riccati_problem();
  std::vector<ConvergenceRow> rows;
  for (std::size_t N : {8, 16, 32, 64}) {
    const Trajectory t = integrate(sys, {0.0, 0.5, N}, Vector::Ones(1), method, PhiEvaluator{});
    rows.push_back({N, 0.5 / static_cast<double>(N), std::abs(t.final_state()[0] - 2.0), 0.0, false});
  }
  return estimate_order(rows).slope;
}

}  // namespace

TEST(Methods, NamesRoundTripAndUnknownListsOptions) {
  for (const auto& [id, name] : method_names) EXPECT_EQ(parse_method(name), id);
  try {
    parse_method("nosuch");
    FAIL();
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("hybrid-euler, dpg2, dpg3"), std::string::npos);
  }
}

TEST(Steps, ScalarDecayIsExact) {
  const Vector u0 = Vector::Ones(1);
  const Linearization lin(scalar_decay(), u0);
  for (MethodId m : nonlinear_methods)
    EXPECT_NEAR(step(m, lin, u0, 0.1, PhiEvaluator{}).trace[0], 0.90483741803595957, 2e-16) << to_string(m);
}

TEST(Steps, HybridEulerFieldAndTraceOnDecay) {
  const Vector u0 = Vector::Ones(1);
  const StepOutput out = step_hybrid_euler(Linearization(scalar_decay(), u0), u0, 0.1, PhiEvaluator{});
  // field = 1 - h phi_2(-h)
  EXPECT_NEAR((*out.field)[0], 1.0 - 0.1 * (std::exp(-0.1) - 1.0 + 0.1) / 0.01, 1e-15);
  EXPECT_FALSE(out.stages);
}

TEST(Steps, EquilibriumPreservation) {
  std::mt19937_64 rng(83);
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::Index n = 2 + trial % 5;
    const Vector u_star = random_vector(n, rng, 2.0);
    const RandomSystem r = with_equilibrium(random_system(n, rng), u_star);
    const Linearization lin(r.system(), u_star);
    for (MethodId m : nonlinear_methods) {
      for (double h : {0.05, 1.0}) {
        const StepOutput out = step(m, lin, u_star, h, PhiEvaluator{});
        EXPECT_LE((out.trace - u_star).lpNorm<Eigen::Infinity>(), 1e-12 * (1 + u_star.norm())) << to_string(m);
        if (out.stages) {
          EXPECT_LE((out.stages->u2 - u_star).lpNorm<Eigen::Infinity>(), 1e-12 * (1 + u_star.norm()));
          if (out.stages->u3) {
            EXPECT_LE((*out.stages->u3 - u_star).lpNorm<Eigen::Infinity>(), 1e-12 * (1 + u_star.norm()));
          }
        }
      }
    }
  }
}

TEST(Steps, HybridTraceEqualsClassicalExponentialEuler) {
  std::mt19937_64 rng(89);
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::Index n = 2 + trial % 6;
    const RandomSystem r = random_system(n, rng);
    const Vector un = random_vector(n, rng);
    const Linearization lin(r.system(), un);
    const double h = 0.01 + 0.5 * trial / 50.0;
    const Vector hyb = step_hybrid_euler(lin, un, h, PhiEvaluator{}).trace;
    const Vector cls = step_exp_euler_classic(lin, un, h, PhiEvaluator{}).trace;
    EXPECT_LE(rel_diff(hyb, cls), 1e-12);
  }
}

TEST(Steps, AffineSystemsAreIntegratedExactly) {
  std::mt19937_64 rng(97);
  for (int trial = 0; trial < 5; ++trial) {
    const DenseMatrix a = random_stable(10, rng);
    const Vector b = random_vector(10, rng);
    const Vector un = random_vector(10, rng);
    const Linearization lin(affine_system(a, b), un);
    for (double h : {0.1, 1.0}) {
      const Vector exact = expm_dense(h * a) * un + h * (phi_dense(1, h * a) * b);
      for (MethodId m : nonlinear_methods)
        EXPECT_LE(rel_diff(step(m, lin, un, h, PhiEvaluator{}).trace, exact), 1e-11) << to_string(m);
    }
  }
}

TEST(Steps, RewrittenFormsMatchRawWeightedForms) {
  std::mt19937_64 rng(101);
  for (int trial = 0; trial < 10; ++trial) {
    const RandomSystem r = random_system(4, rng);
    const Vector un = random_vector(4, rng);
    const Linearization lin(r.system(), un);
    const double h = 0.3;
    const DenseMatrix hj = h * lin.jacobian().to_dense();
    const DenseMatrix p1 = phi_dense(1, hj), p3 = phi_dense(3, hj), p4 = phi_dense(4, hj);
    const DenseMatrix e = expm_dense(hj);

    const StepOutput d2 = step_dpg2(lin, un, h, dense_eval());
    const Vector& u2 = d2.stages->u2;
    const auto w2 = dpg2_weights(p1, p3);
    const Vector raw2 = e * un + h * (w2.b1 * lin.remainder(un)) + h * (w2.b2 * lin.remainder(u2));
    EXPECT_LE(rel_diff(d2.trace, raw2), 1e-12);

    const StepOutput d3 = step_dpg3(lin, un, h, dense_eval());
    const Vector& u3 = *d3.stages->u3;
    const Vector c = -0.25 * remainder_directional(lin, u2, u3 - 2.0 * u2 + un);
    const auto w3 = dpg3_weights(p1, p3, p4);
    const Vector raw3 = e * un + h * (w3.b1 * lin.remainder(un)) + h * (w3.b2 * (lin.remainder(u2) + c)) +
                        h * (w3.b3 * lin.remainder(u3));
    EXPECT_LE(rel_diff(d3.trace, raw3), 1e-12);
    EXPECT_LE(rel_diff(u3, un + h * (lin.jacobian().apply(u2)) + h * lin.remainder(un)), 1e-14);
  }
}

TEST(Steps, NestedStagesAndSolveCounts) {
  std::mt19937_64 rng(103);
  const RandomSystem r = random_system(6, rng);
  const Vector un = random_vector(6, rng);
  const Linearization lin(r.system(), un);
  const StepOutput e = step_exp_euler_classic(lin, un, 0.2, PhiEvaluator{});
  const StepOutput h = step_hybrid_euler(lin, un, 0.2, PhiEvaluator{});
  const StepOutput d2 = step_dpg2(lin, un, 0.2, PhiEvaluator{});
  const StepOutput d3 = step_dpg3(lin, un, 0.2, PhiEvaluator{});
  EXPECT_EQ(e.phi_action_count, 1u);
  EXPECT_EQ(h.phi_action_count, 1u);
  EXPECT_LE(d2.phi_action_count, 2u);
  EXPECT_LE(d3.phi_action_count, 3u);
  EXPECT_FALSE(e.field);
  ASSERT_TRUE(d2.stages && d3.stages);
  EXPECT_EQ(d2.stages->u2, d3.stages->u2);
  EXPECT_EQ(*h.field, d2.stages->u2);
  EXPECT_EQ(*d2.field, d2.stages->u2);
}

TEST(Steps, RejectsNonPositiveStep) {
  const Vector u0 = Vector::Ones(1);
  const Linearization lin(scalar_decay(), u0);
  for (MethodId m : nonlinear_methods) {
    EXPECT_THROW(step(m, lin, u0, 0.0, PhiEvaluator{}), std::invalid_argument);
    EXPECT_THROW(step(m, lin, u0, -0.1, PhiEvaluator{}), std::invalid_argument);
  }
  EXPECT_THROW(step(MethodId::LinearDPGp0, lin, u0, 0.1, PhiEvaluator{}), std::invalid_argument);
}

TEST(LinearDpgP0, ClosedFormCases) {
  const LinearOperator zero = LinearOperator::dense(DenseMatrix::Zero(2, 2));
  const Vector u = (Vector(2) << 0.3, -2.0).finished();
  const StepOutput still = step_linear_dpg_p0(zero, Vector::Zero(2), u, 0.4, PhiEvaluator{});
  EXPECT_LE(rel_diff(still.trace, u), 1e-15);
  EXPECT_LE(rel_diff(*still.field, u), 1e-15);

  const LinearOperator one = LinearOperator::dense(DenseMatrix::Ones(1, 1));
  EXPECT_NEAR(step_linear_dpg_p0(one, Vector::Zero(1), Vector::Ones(1), 0.1, PhiEvaluator{}).trace[0],
              0.90483741803595957, 2e-16);

  // u' + u = 1, u(0) = 0: exact 1 - e^{-t}; the p0 trace is exact for a
  // constant source.
  const Vector f = Vector::Ones(1);
  for (std::size_t N : {4, 8, 16, 32}) {
    Vector v = Vector::Zero(1);
    const double h = 1.0 / static_cast<double>(N);
    for (std::size_t n = 0; n < N; ++n) v = step_linear_dpg_p0(one, f, v, h, PhiEvaluator{}).trace;
    EXPECT_NEAR(v[0], 1.0 - std::exp(-1.0), 1e-14);
  }
  EXPECT_THROW(step_linear_dpg_p0(one, Vector::Zero(2), Vector::Ones(1), 0.1, PhiEvaluator{}),
               std::invalid_argument);
}

TEST(LinearDpgP0, FrozenSourceIsFirstOrderForTimeDependentData) {
  // u' + u = cos t, u(0) = 0: u = (cos t + sin t - e^{-t}) / 2.
  NonlinearSystem sys;
  sys.dim = 1;
  sys.autonomous = false;
  sys.rhs = [](double t, const Vector& u) -> Vector { return Vector::Constant(1, std::cos(t) - u[0]); };
  sys.split = SemilinearSplit{LinearOperator::dense(-DenseMatrix::Ones(1, 1)),
                              [](double t, const Vector&) -> Vector { return Vector::Constant(1, std::cos(t)); },
                              {}};
  const double exact = (std::cos(1.0) + std::sin(1.0) - std::exp(-1.0)) / 2.0;
  std::vector<ConvergenceRow> rows;
  for (std::size_t N : {8, 16, 32, 64}) {
    const Trajectory t = integrate(sys, {0.0, 1.0, N}, Vector::Zero(1), MethodId::LinearDPGp0, PhiEvaluator{});
    rows.push_back({N, 1.0 / static_cast<double>(N), std::abs(t.final_state()[0] - exact), 0.0, false});
    EXPECT_TRUE(t.steps.front().field.has_value());
  }
  EXPECT_NEAR(estimate_order(rows).slope, 1.0, 0.1);
}

TEST(Integrate, SingleStepMatchesStepCall) {
  const NonlinearSystem sys = riccati_problem();
  const Vector u0 = Vector::Constant(1, 0.8);
  for (MethodId m : nonlinear_methods) {
    const Trajectory t = integrate(sys, {0.0, 0.2, 1}, u0, m, PhiEvaluator{});
    ASSERT_EQ(t.steps.size(), 1u);
    EXPECT_EQ(t.final_state(), step(m, linearize(sys, u0), u0, 0.2, PhiEvaluator{}).trace);
    EXPECT_EQ(t.times, (std::vector<double>{0.0, 0.2}));
  }
}

TEST(Integrate, LinearAutonomousSystemMatchesExponential) {
  std::mt19937_64 rng(107);
  DenseMatrix a = random_dense(6, rng);
  a.diagonal().array() -= 1.0;
  const Vector u0 = random_vector(6, rng);
  const Vector exact = expm_dense(1.5 * a) * u0;
  for (MethodId m : nonlinear_methods)
    for (std::size_t N : {1, 3, 10})
      EXPECT_LE(rel_diff(integrate(affine_system(a, Vector::Zero(6)), {0.5, 2.0, N}, u0, m, PhiEvaluator{})
                             .final_state(),
                         exact),
                1e-11);
}

TEST(Integrate, StiffDiagonalStaysStableAtLargeStep) {
  const NonlinearSystem sys = linear_decay_system({-1.0, -100.0});
  for (MethodId m : nonlinear_methods) {
    const Trajectory t = integrate(sys, {0.0, 1.0, 10}, Vector::Ones(2), m, PhiEvaluator{});
    EXPECT_NEAR(t.final_state()[0], std::exp(-1.0), 1e-14);
    EXPECT_NEAR(t.final_state()[1], std::exp(-100.0), 1e-14);
  }
}

TEST(Integrate, RiccatiOrders) {
  EXPECT_NEAR(riccati_slope(MethodId::HybridEuler), 2.0, 0.1);
  EXPECT_NEAR(riccati_slope(MethodId::ExpEulerClassic), 2.0, 0.1);
  EXPECT_NEAR(riccati_slope(MethodId::DPG2), 3.0, 0.15);
  EXPECT_NEAR(riccati_slope(MethodId::DPG3), 4.0, 0.2);
}

TEST(Integrate, NonAutonomousOutputsDropTimeComponent) {
  const HOProblem ho = build_ho_problem(3);
  const Trajectory t = integrate(ho.system, {0.0, 0.5, 4}, ho.exact(0.0), MethodId::DPG3, PhiEvaluator{});
  for (const auto& s : t.steps) {
    EXPECT_EQ(s.trace.size(), 9);
    EXPECT_EQ(s.field->size(), 9);
    EXPECT_EQ(s.stages->u3->size(), 9);
  }
  EXPECT_EQ(t.times.back(), 0.5);
}

TEST(Integrate, FailureCarriesStepIndex) {
  NonlinearSystem sys;
  sys.dim = 1;
  sys.rhs = [](double, const Vector& u) -> Vector {
    return Vector::Constant(1, u[0] > 1.2 ? std::nan("") : 1.0);
  };
  sys.jac_apply = [](double, const Vector&, const Vector& v) -> Vector { return 0.0 * v; };
  try {
    integrate(sys, {0.0, 3.0, 6}, Vector::Zero(1), MethodId::HybridEuler, PhiEvaluator{});
    FAIL();
  } catch (const step_error& e) {
    EXPECT_EQ(e.step(), 3u);
  }
  EXPECT_THROW(integrate(sys, {0.0, 1.0, 2}, Vector::Zero(2), MethodId::DPG2, PhiEvaluator{}),
               std::invalid_argument);
  EXPECT_THROW(integrate(sys, {1.0, 1.0, 2}, Vector::Zero(1), MethodId::DPG2, PhiEvaluator{}),
               std::invalid_argument);
  EXPECT_THROW(integrate(sys, {0.0, 1.0, 2}, Vector::Zero(1), MethodId::LinearDPGp0, PhiEvaluator{}),
               std::invalid_argument);
}

TEST(Integrate, Deterministic) {
  const HOProblem ho = build_ho_problem(6);
  const auto run = [&] {
    return integrate(ho.system, {0.0, 1.0, 8}, ho.exact(0.0), MethodId::DPG2, PhiEvaluator{}).final_state();
  };
  EXPECT_EQ(run(), run());
}
