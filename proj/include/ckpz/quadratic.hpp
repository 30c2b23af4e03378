#ifndef CKPZ_QUADRATIC_HPP
#define CKPZ_QUADRATIC_HPP

#include "ckpz/spectral.hpp"
#include "ckpz/tensor.hpp"

namespace ckpz {
namespace detail {

// prefactor * Gamma^a_{bg} f^b g^g contracted pointwise on the padded grid,
// then truncated back to the band: the dealiased quadratic nonlinearity.
inline SpectralField quadratic_contraction(const SpectralField& f, const SpectralField& g,
                                           const CouplingTensor& gamma, double prefactor) {
  const int d = f.dim(), K = f.max_mode();
  const int M = padded_grid_size(K);
  const Matrix a = to_physical(f, M);
  const Matrix b = (&f == &g) ? a : to_physical(g, M);
  Matrix out(d, M);
  for (int al = 0; al < d; ++al) {
    out.row(al).setZero();
    for (int be = 0; be < d; ++be)
      for (int ga = 0; ga < d; ++ga)
        if (gamma(al, be, ga) != 0.0)
          out.row(al) += prefactor * gamma(al, be, ga) * a.row(be).cwiseProduct(b.row(ga));
  }
  return to_spectral(out, K);
}

inline double phi1(double z) { return std::abs(z) < 1e-8 ? 1.0 + 0.5 * z : std::expm1(z) / z; }

}  // namespace detail
}  // namespace ckpz

#endif  // CKPZ_QUADRATIC_HPP
