#pragma once

#include <array>
#include <cmath>
#include <string_view>

#include "dpgexp/types.hpp"

namespace dpgexp {

// Weight functions of the multistage DPG updates as combinations of
// phi-functions. M is double for scalar arguments or DenseMatrix for
// matrix arguments.

template <class M>
struct Dpg2Weights {
  M b1;
  M b2;
};

template <class M>
struct Dpg3Weights {
  M b1;
  M b2;
  M b3;
};

template <class M>
Dpg2Weights<M> dpg2_weights(const M& phi1, const M& phi3) {
  return {M(phi1 - 8.0 * phi3), M(8.0 * phi3)};
}

template <class M>
Dpg3Weights<M> dpg3_weights(const M& phi1, const M& phi3, const M& phi4) {
  return {M(phi1 - 14.0 * phi3 + 36.0 * phi4), M(16.0 * phi3 - 48.0 * phi4),
          M(12.0 * phi4 - 2.0 * phi3)};
}

inline constexpr std::array<std::string_view, 5> order_condition_names{
    "dpg2  b1+b2 = phi1",
    "dpg2  b2/8 = phi3",
    "dpg3  b1+b2+b3 = phi1",
    "dpg3  b2/4+b3 = 2 phi3",
    "dpg3  b2/8+b3 = 6 phi4",
};

namespace detail {
inline double residual_norm(double r) { return std::abs(r); }
inline double residual_norm(const DenseMatrix& r) { return r.lpNorm<Eigen::Infinity>(); }
}  // namespace detail

/// Residuals of the five stiff order conditions for the tabulated weights.
template <class M>
std::array<double, 5> order_condition_residuals(const M& phi1, const M& phi3, const M& phi4) {
  const auto w2 = dpg2_weights(phi1, phi3);
  const auto w3 = dpg3_weights(phi1, phi3, phi4);
  using detail::residual_norm;
  return {
      residual_norm(M(w2.b1 + w2.b2 - phi1)),
      residual_norm(M(w2.b2 / 8.0 - phi3)),
      residual_norm(M(w3.b1 + w3.b2 + w3.b3 - phi1)),
      residual_norm(M(w3.b2 / 4.0 + w3.b3 - 2.0 * phi3)),
      residual_norm(M(w3.b2 / 8.0 + w3.b3 - 6.0 * phi4)),
  };
}

}  // namespace dpgexp
