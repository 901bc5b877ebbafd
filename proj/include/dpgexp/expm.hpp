#pragma once

#include <algorithm>
#include <array>
#include <cmath>

#include "dpgexp/types.hpp"

namespace dpgexp {

namespace detail {

inline void check_square_finite(const DenseMatrix& m, const char* who) {
  require(m.rows() == m.cols(), std::string(who) + ": matrix must be square");
  require(m.allFinite(), std::string(who) + ": matrix has non-finite entries");
}

inline double norm1(const DenseMatrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().colwise().sum().maxCoeff();
}

// Diagonal Padé approximant r_m(A) = (V - U)^{-1} (V + U) of degree m.
inline DenseMatrix pade_approximant(const DenseMatrix& a, int degree) {
  const auto n = a.rows();
  const DenseMatrix id = DenseMatrix::Identity(n, n);
  const DenseMatrix a2 = a * a;
  DenseMatrix u, v;
  switch (degree) {
    case 3: {
      constexpr std::array<double, 4> b{120., 60., 12., 1.};
      u = a * (b[3] * a2 + b[1] * id);
      v = b[2] * a2 + b[0] * id;
      break;
    }
    case 5: {
      constexpr std::array<double, 6> b{30240., 15120., 3360., 420., 30., 1.};
      const DenseMatrix a4 = a2 * a2;
      u = a * (b[5] * a4 + b[3] * a2 + b[1] * id);
      v = b[4] * a4 + b[2] * a2 + b[0] * id;
      break;
    }
    case 7: {
      constexpr std::array<double, 8> b{17297280., 8648640., 1995840., 277200.,
                                        25200.,    1512.,    56.,      1.};
      const DenseMatrix a4 = a2 * a2;
      const DenseMatrix a6 = a4 * a2;
      u = a * (b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * id);
      v = b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * id;
      break;
    }
    case 9: {
      constexpr std::array<double, 10> b{17643225600., 8821612800., 2075673600., 302702400.,
                                         30270240.,    2162160.,    110880.,     3960.,
                                         90.,          1.};
      const DenseMatrix a4 = a2 * a2;
      const DenseMatrix a6 = a4 * a2;
      const DenseMatrix a8 = a6 * a2;
      u = a * (b[9] * a8 + b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * id);
      v = b[8] * a8 + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * id;
      break;
    }
    default: {
      constexpr std::array<double, 14> b{
          64764752532480000., 32382376266240000., 7771770303897600., 1187353796428800.,
          129060195264000.,   10559470521600.,    670442572800.,     33522128640.,
          1323241920.,        40840800.,          960960.,           16380.,
          182.,               1.};
      const DenseMatrix a4 = a2 * a2;
      const DenseMatrix a6 = a4 * a2;
      u = a * (a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) + b[7] * a6 + b[5] * a4 +
               b[3] * a2 + b[1] * id);
      v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 + b[4] * a4 + b[2] * a2 +
          b[0] * id;
      break;
    }
  }
  return (v - u).partialPivLu().solve(v + u);
}

}  // namespace detail

/// Matrix exponential by scaling and squaring with a diagonal Padé
/// approximant of degree 3..13 chosen from the 1-norm.
inline DenseMatrix expm_dense(const DenseMatrix& m) {
  detail::check_square_finite(m, "expm_dense");
  if (m.size() == 0) return m;

  // Largest 1-norm for which degree k is accurate to unit roundoff.
  constexpr std::array<std::pair<int, double>, 4> small_degrees{
      {{3, 1.495585217958292e-2},
       {5, 2.539398330063230e-1},
       {7, 9.504178996162932e-1},
       {9, 2.097847961257068e0}}};
  constexpr double theta13 = 5.371920351148152e0;

  const double norm = detail::norm1(m);
  for (const auto& [degree, theta] : small_degrees)
    if (norm <= theta) return detail::pade_approximant(m, degree);

  int squarings = 0;
  if (norm > theta13) squarings = static_cast<int>(std::ceil(std::log2(norm / theta13)));
  DenseMatrix r = detail::pade_approximant(m / std::ldexp(1.0, squarings), 13);
  for (int i = 0; i < squarings; ++i) r = r * r;
  return r;
}

/// phi_p(M) read off the corner block of one exponential of the
/// (p+1)n x (p+1)n block matrix with M in the top-left corner and identity
/// blocks on the first block superdiagonal.
inline DenseMatrix phi_dense(int p, const DenseMatrix& m) {
  require(p >= 0, "phi_dense: order must be non-negative");
  detail::check_square_finite(m, "phi_dense");
  if (p == 0) return expm_dense(m);
  const auto n = m.rows();
  DenseMatrix big = DenseMatrix::Zero(n * (p + 1), n * (p + 1));
  big.topLeftCorner(n, n) = m;
  for (int k = 0; k < p; ++k) big.block(k * n, (k + 1) * n, n, n).setIdentity();
  return expm_dense(big).block(0, p * n, n, n);
}

}  // namespace dpgexp
