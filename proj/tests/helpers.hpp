#ifndef CKPZ_TESTS_HELPERS_HPP
#define CKPZ_TESTS_HELPERS_HPP

#include <cmath>

#include "ckpz/tensor.hpp"

namespace ckpz::testing {

// d=2 tensor with Gamma^1 = [[2,1],[1,1]], Gamma^2 = [[1,1],[1,2]]:
// trilinear (with sigma = I) but admits no Cole-Hopf factorization.
inline CouplingTensor trilinear_d2_tensor() {
  Matrix g1(2, 2), g2(2, 2);
  g1 << 2, 1, 1, 1;
  g2 << 1, 1, 1, 2;
  return CouplingTensor(2, {g1, g2});
}

// Ertas-Kardar coupling: Gamma^1 = diag(l1, l2), Gamma^2 = [[0,l1],[l1,0]].
inline CouplingTensor ertas_kardar_tensor(double l1, double l2) {
  Matrix g1(2, 2), g2(2, 2);
  g1 << l1, 0, 0, l2;
  g2 << 0, l1, l1, 0;
  return CouplingTensor(2, {g1, g2});
}

// The factorizing matrix for the Ertas-Kardar tensor.
inline ComplexMatrix ertas_kardar_s(double l1, double l2) {
  ComplexMatrix s(2, 2);
  const double r = std::sqrt(l1 * l2);
  s << l1, r, l1, -r;
  return s;
}

inline CouplingTensor scalar_tensor(double gamma) {
  Matrix g(1, 1);
  g << gamma;
  return CouplingTensor(1, {g});
}

}  // namespace ckpz::testing

#endif  // CKPZ_TESTS_HELPERS_HPP
