#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dpgexp/linearization.hpp"
#include "dpgexp/phi.hpp"

namespace dpgexp {

enum class MethodId { ExpEulerClassic, HybridEuler, DPG2, DPG3, LinearDPGp0 };

inline constexpr std::array<std::pair<MethodId, std::string_view>, 5> method_names{{
    {MethodId::ExpEulerClassic, "euler-classic"},
    {MethodId::HybridEuler, "hybrid-euler"},
    {MethodId::DPG2, "dpg2"},
    {MethodId::DPG3, "dpg3"},
    {MethodId::LinearDPGp0, "linear-dpg-p0"},
}};

inline std::string to_string(MethodId m) {
  for (const auto& [id, name] : method_names)
    if (id == m) return std::string(name);
  return "?";
}

inline std::string method_list() {
  std::string s;
  for (const auto& [id, name] : method_names) {
    if (!s.empty()) s += ", ";
    s += name;
  }
  return s;
}

inline MethodId parse_method(std::string_view name) {
  for (const auto& [id, n] : method_names)
    if (n == name) return id;
  throw std::invalid_argument("unknown method '" + std::string(name) +
                              "' (available: " + method_list() + ")");
}

/// Internal stages of the multistage methods.
struct Stages {
  Vector u2;
  std::optional<Vector> u3;
};

/// Result of one step: the trace u_{n+1} at the next node and, for the
/// hybrid schemes, the constant field value on the interval.
struct StepOutput {
  Vector trace;
  std::optional<Vector> field;
  std::optional<Stages> stages;
  std::size_t phi_action_count = 0;
};

/// Uniform partition of [t0, T] into N steps.
struct TimeGrid {
  double t0 = 0.0;
  double T = 1.0;
  std::size_t N = 1;

  double h() const { return (T - t0) / static_cast<double>(N); }
  double time(std::size_t n) const { return n == N ? T : t0 + static_cast<double>(n) * h(); }

  void validate() const {
    require(N >= 1, "TimeGrid: N must be at least 1");
    require(std::isfinite(t0) && std::isfinite(T) && T > t0, "TimeGrid: need T > t0");
  }
};

namespace detail {

inline void check_step(const Linearization& lin, const Vector& u_n, double h) {
  require(h > 0.0 && std::isfinite(h), "step: h must be positive");
  require(static_cast<std::size_t>(u_n.size()) == lin.dim(), "step: state dimension mismatch");
  require(u_n.allFinite(), "step: non-finite state");
}

inline Vector zeros_like(const Vector& v) { return Vector::Zero(v.size()); }

// u_n + h phi_2(h J_n) F(u_n); shared by the hybrid Euler field and the
// first stage of both multistage methods.
inline Vector hybrid_field(const Linearization& lin, const Vector& u_n, const Vector& f_n, double h,
                           const PhiEvaluator& eval) {
  const Vector z = zeros_like(u_n);
  const std::array<Vector, 3> ws{z, z, h * f_n};
  return u_n + phi_sum_action(lin.jacobian(), h, ws, eval);
}

// Post-processed trace u_n + h J_n u~ + h g_n(u_n), no exponential needed.
inline Vector hybrid_trace(const Linearization& lin, const Vector& u_n, const Vector& field,
                           const Vector& g_n, double h) {
  return u_n + h * lin.jacobian().apply(field) + h * g_n;
}

// Linear DPG (p = 0) for u' + sign*B u = f.
inline StepOutput linear_dpg_p0(const LinearOperator& B, double sign, const Vector& f_tn,
                                const Vector& u_n, double h, const PhiEvaluator& eval) {
  require(h > 0.0 && std::isfinite(h), "step_linear_dpg_p0: h must be positive");
  require(static_cast<std::size_t>(u_n.size()) == B.dim() && f_tn.size() == u_n.size(),
          "step_linear_dpg_p0: dimension mismatch");
  const std::array<Vector, 3> ws{zeros_like(u_n), u_n, h * f_tn};
  StepOutput out;
  Vector field = phi_sum_action(B, -sign * h, ws, eval);
  out.trace = u_n - (sign * h) * B.apply(field) + h * f_tn;
  out.field = std::move(field);
  out.phi_action_count = 1;
  return out;
}

}  // namespace detail

/// Classical exponential Euler: u_n + h phi_1(h J_n) F(u_n).
inline StepOutput step_exp_euler_classic(const Linearization& lin, const Vector& u_n, double h,
                                         const PhiEvaluator& eval) {
  detail::check_step(lin, u_n, h);
  const Vector f_n = lin.rhs(u_n);
  const std::array<Vector, 2> ws{detail::zeros_like(u_n), h * f_n};
  StepOutput out;
  out.trace = u_n + phi_sum_action(lin.jacobian(), h, ws, eval);
  out.phi_action_count = 1;
  return out;
}

/// Hybrid exponential Euler. One phi-action for the field; the trace is a
/// matrix-vector post-processing of it.
inline StepOutput step_hybrid_euler(const Linearization& lin, const Vector& u_n, double h,
                                    const PhiEvaluator& eval) {
  detail::check_step(lin, u_n, h);
  const Vector f_n = lin.rhs(u_n);
  StepOutput out;
  Vector field = detail::hybrid_field(lin, u_n, f_n, h, eval);
  out.trace = detail::hybrid_trace(lin, u_n, field, lin.remainder(u_n), h);
  out.field = std::move(field);
  out.phi_action_count = 1;
  return out;
}

/// Two-stage DPG, third order:
///   u2      = u_n + h phi_2 F(u_n)
///   u_{n+1} = u_n + h phi_1 F(u_n) + 8 h phi_3 (g_n(u2) - g_n(u_n))
inline StepOutput step_dpg2(const Linearization& lin, const Vector& u_n, double h,
                            const PhiEvaluator& eval) {
  detail::check_step(lin, u_n, h);
  const Vector f_n = lin.rhs(u_n);
  const Vector g_n = lin.remainder(u_n);
  const Vector z = detail::zeros_like(u_n);

  Vector u2 = detail::hybrid_field(lin, u_n, f_n, h, eval);
  const Vector d2 = lin.remainder(u2) - g_n;
  const std::array<Vector, 4> ws{z, h * f_n, z, (8.0 * h) * d2};

  StepOutput out;
  out.trace = u_n + phi_sum_action(lin.jacobian(), h, ws, eval);
  out.field = u2;
  out.stages = Stages{std::move(u2), std::nullopt};
  out.phi_action_count = 2;
  return out;
}

/// Three-stage DPG, fourth order. The second stage is the post-processed
/// hybrid trace, so only the first stage and the update need
/// phi-actions. The update is
///   u_n + h phi_1 F(u_n) + h b2 (D2 + C2) + h b3 D3,
///   b2 = 16 phi_3 - 48 phi_4,  b3 = 12 phi_4 - 2 phi_3,
/// with D_i = g_n(u_i) - g_n(u_n) and C2 = -1/4 g_n'(u2)(u3 - 2 u2 + u_n).
inline StepOutput step_dpg3(const Linearization& lin, const Vector& u_n, double h,
                            const PhiEvaluator& eval) {
  detail::check_step(lin, u_n, h);
  const Vector f_n = lin.rhs(u_n);
  const Vector g_n = lin.remainder(u_n);
  const Vector z = detail::zeros_like(u_n);

  Vector u2 = detail::hybrid_field(lin, u_n, f_n, h, eval);
  Vector u3 = detail::hybrid_trace(lin, u_n, u2, g_n, h);
  const Vector correction = -0.25 * remainder_directional(lin, u2, u3 - 2.0 * u2 + u_n);
  const Vector d2 = lin.remainder(u2) - g_n + correction;
  const Vector d3 = lin.remainder(u3) - g_n;
  const std::array<Vector, 5> ws{z, h * f_n, z, h * (16.0 * d2 - 2.0 * d3),
                                 h * (12.0 * d3 - 48.0 * d2)};

  StepOutput out;
  out.trace = u_n + phi_sum_action(lin.jacobian(), h, ws, eval);
  out.field = u2;
  out.stages = Stages{std::move(u2), std::move(u3)};
  out.phi_action_count = 2;
  return out;
}

/// Lowest-order DPG step for the linear problem u' + A u = f with the
/// source frozen at t_n:
///   field = phi_1(-hA) u_n + h phi_2(-hA) f(t_n),
///   trace = u_n - h A field + h f(t_n).
inline StepOutput step_linear_dpg_p0(const LinearOperator& A, const Vector& f_tn, const Vector& u_n,
                                     double h, const PhiEvaluator& eval) {
  return detail::linear_dpg_p0(A, 1.0, f_tn, u_n, h, eval);
}

inline StepOutput step(MethodId method, const Linearization& lin, const Vector& u_n, double h,
                       const PhiEvaluator& eval) {
  switch (method) {
    case MethodId::ExpEulerClassic: return step_exp_euler_classic(lin, u_n, h, eval);
    case MethodId::HybridEuler: return step_hybrid_euler(lin, u_n, h, eval);
    case MethodId::DPG2: return step_dpg2(lin, u_n, h, eval);
    case MethodId::DPG3: return step_dpg3(lin, u_n, h, eval);
    case MethodId::LinearDPGp0: break;
  }
  throw std::invalid_argument("step: linear-dpg-p0 does not take a linearization");
}

/// Traces at t_1..t_N together with the per-step outputs.
struct Trajectory {
  std::vector<double> times;  // t_0..t_N
  Vector initial;
  std::vector<StepOutput> steps;

  const Vector& final_state() const { return steps.empty() ? initial : steps.back().trace; }
};

namespace detail {

inline Vector drop_first(const Vector& v) { return v.tail(v.size() - 1); }

inline StepOutput strip_time(StepOutput s) {
  s.trace = drop_first(s.trace);
  if (s.field) s.field = drop_first(*s.field);
  if (s.stages) {
    s.stages->u2 = drop_first(s.stages->u2);
    if (s.stages->u3) s.stages->u3 = drop_first(*s.stages->u3);
  }
  return s;
}

}  // namespace detail

/// Marches over the uniform grid, relinearizing at every step. Non-autonomous
/// systems are autonomized for the Rosenbrock-type methods and the time
/// component is removed from the output. linear-dpg-p0 needs a semilinear
/// split and treats f(t_n, u_n) as the frozen source.
inline Trajectory integrate(const NonlinearSystem& sys, const TimeGrid& grid, const Vector& u0,
                            MethodId method, const PhiEvaluator& eval) {
  grid.validate();
  eval.validate();
  require(static_cast<std::size_t>(u0.size()) == sys.dim, "integrate: initial state dimension mismatch");
  require(u0.allFinite(), "integrate: non-finite initial state");

  Trajectory traj;
  traj.initial = u0;
  traj.times.reserve(grid.N + 1);
  for (std::size_t n = 0; n <= grid.N; ++n) traj.times.push_back(grid.time(n));
  traj.steps.reserve(grid.N);
  const double h = grid.h();

  const bool augment = method != MethodId::LinearDPGp0 && !sys.autonomous;
  const NonlinearSystem marching = augment ? autonomize(sys) : sys;
  if (method == MethodId::LinearDPGp0)
    require(sys.split.has_value(), "integrate: linear-dpg-p0 needs a semilinear split");

  Vector u = u0;
  if (augment) {
    u.resize(u0.size() + 1);
    u[0] = grid.t0;
    u.tail(u0.size()) = u0;
  }

  for (std::size_t n = 0; n < grid.N; ++n) {
    StepOutput out;
    try {
      if (method == MethodId::LinearDPGp0) {
        const Vector f_tn = sys.split->f(traj.times[n], u);
        out = detail::linear_dpg_p0(sys.split->A, -1.0, f_tn, u, h, eval);
      } else {
        out = step(method, linearize(marching, u), u, h, eval);
      }
    } catch (const numerical_error& e) {
      throw step_error(n, e.what());
    } catch (const std::invalid_argument& e) {
      // Inputs were checked above; anything rejected now is an intermediate
      // value that went non-finite.
      throw step_error(n, e.what());
    }
    if (!out.trace.allFinite()) throw step_error(n, "non-finite trace");
    u = out.trace;
    traj.steps.push_back(augment ? detail::strip_time(std::move(out)) : std::move(out));
  }
  return traj;
}

}  // namespace dpgexp
