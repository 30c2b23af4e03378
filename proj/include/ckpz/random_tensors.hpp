#ifndef CKPZ_RANDOM_TENSORS_HPP
#define CKPZ_RANDOM_TENSORS_HPP

#include <vector>

#include "ckpz/rng.hpp"
#include "ckpz/tensor.hpp"

namespace ckpz {

// Generic bilinear tensor: uniform entries symmetrized in the two lower indices.
inline CouplingTensor random_bilinear_tensor(RngStream& rng, int d) {
  std::vector<Matrix> s(d);
  for (int a = 0; a < d; ++a) {
    Matrix m(d, d);
    for (int b = 0; b < d; ++b)
      for (int c = 0; c < d; ++c) m(b, c) = 2.0 * rng.uniform() - 1.0;
    s[a] = 0.5 * (m + m.transpose());
  }
  return CouplingTensor(d, std::move(s));
}

// Fully symmetric tensor: uniform array symmetrized over all six index permutations.
inline CouplingTensor random_fully_symmetric_tensor(RngStream& rng, int d) {
  std::vector<std::vector<std::vector<double>>> raw(
      d, std::vector<std::vector<double>>(d, std::vector<double>(d)));
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      for (int c = 0; c < d; ++c) raw[a][b][c] = 2.0 * rng.uniform() - 1.0;
  std::vector<Matrix> s(d, Matrix::Zero(d, d));
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      for (int c = 0; c < d; ++c)
        s[a](b, c) = (raw[a][b][c] + raw[a][c][b] + raw[b][a][c] + raw[b][c][a] + raw[c][a][b] +
                      raw[c][b][a]) /
                     6.0;
  return CouplingTensor(d, std::move(s));
}

// Well-conditioned invertible sigma: orthogonal factor times a diagonal in [0.7, 1.4].
inline DiffusionPair random_diffusion_pair(RngStream& rng, int d) {
  Matrix m(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) m(i, j) = rng.gaussian();
  Eigen::HouseholderQR<Matrix> qr(m);
  Matrix q = qr.householderQ();
  Vector diag(d);
  for (int i = 0; i < d; ++i) diag(i) = 0.7 + 0.7 * rng.uniform();
  return DiffusionPair::from_sigma(q * diag.asDiagonal());
}

// Trilinear coupling: sample hatGamma fully symmetric, pull back through sigma.
inline CouplingTensor random_trilinear_tensor(RngStream& rng, const DiffusionPair& dp) {
  return inverse_hat_transform(random_fully_symmetric_tensor(rng, dp.dim()), dp);
}

}  // namespace ckpz

#endif  // CKPZ_RANDOM_TENSORS_HPP
