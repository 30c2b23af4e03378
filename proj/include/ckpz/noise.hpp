#ifndef CKPZ_NOISE_HPP
#define CKPZ_NOISE_HPP

#include <cmath>

#include <Eigen/Cholesky>

#include "ckpz/mollifier.hpp"
#include "ckpz/rng.hpp"
#include "ckpz/spectral.hpp"
#include "ckpz/tensor.hpp"

namespace ckpz {

// Mode-wise complex white-noise increments over a step: conjugate-symmetric,
// zero-mode real, E[dW^{b,k} dW^{g,l}] = delta^{bg} 1_{k+l=0} dt.
struct NoiseIncrement {
  double dt = 0.0;
  ComplexMatrix dw;  // d x (2K+1), column j = mode j-K
  int K = 0;

  Complex at(int comp, int k) const { return dw(comp, k + K); }
};

// Draw order is fixed (component-major, modes ascending, re then im) so that
// seeded runs are reproducible independent of call-site structure.
inline NoiseIncrement sample_noise(RngStream& rng, int K, int d, double dt) {
  if (dt <= 0.0) throw std::invalid_argument("sample_noise: dt must be positive");
  NoiseIncrement n;
  n.dt = dt;
  n.K = K;
  n.dw = ComplexMatrix::Zero(d, 2 * K + 1);
  const double s = std::sqrt(dt / 2.0);
  for (int b = 0; b < d; ++b) {
    n.dw(b, K) = Complex(rng.gaussian() * std::sqrt(dt), 0.0);
    for (int k = 1; k <= K; ++k) {
      const Complex z = Complex(rng.gaussian(), rng.gaussian()) * s;
      n.dw(b, K + k) = z;
      n.dw(b, K - k) = std::conj(z);
    }
  }
  return n;
}

// smearing: dW^{b,k} -> phi(eps k) dW^{b,k}
inline NoiseIncrement mollify_noise(const NoiseIncrement& n, const MollifierSymbol& m, double eps) {
  NoiseIncrement out = n;
  const int d = static_cast<int>(n.dw.rows());
  for (int k = -n.K; k <= n.K; ++k) {
    const double p = m.phi(eps * k);
    for (int b = 0; b < d; ++b) out.dw(b, n.K + k) *= p;
  }
  return out;
}

namespace detail {

inline Matrix cholesky_factor(const Matrix& a) {
  Eigen::LLT<Matrix> llt(a);
  if (llt.info() != Eigen::Success)
    throw numerical_error("Cholesky factorization failed: A is not positive definite");
  return llt.matrixL();
}

}  // namespace detail

// One draw from the Gaussian measure with covariance E[u^a(x) u^b(y)] =
// A^{ab} delta(x-y), restricted to the band: for each k > 0 the d-vector of
// coefficients is L (g1 + i g2) / sqrt(2) with L the Cholesky factor of A;
// the zero mode is 0 (the measure lives on zero-mean distributions).
inline SpectralField sample_mu_a(RngStream& rng, const DiffusionPair& dp, int K) {
  const int d = dp.dim();
  const Matrix L = detail::cholesky_factor(dp.a);
  SpectralField f(d, K);
  Vector g1(d), g2(d);
  for (int k = 1; k <= K; ++k) {
    for (int i = 0; i < d; ++i) g1(i) = rng.gaussian();
    for (int i = 0; i < d; ++i) g2(i) = rng.gaussian();
    const Vector re = L * g1 / std::sqrt(2.0);
    const Vector im = L * g2 / std::sqrt(2.0);
    for (int a = 0; a < d; ++a) f.set_mode(a, k, Complex(re(a), im(a)));
  }
  return f;
}

// Exact one-step transition of the derivative-field OU dynamics
//   du^a = 1/2 dx^2 u^a dt + sigma^a_b dx xi^b  (mollified when m is given):
// u^(k) -> e^{-2 pi^2 k^2 dt} u^(k) + G(k) with G the exact stochastic
// convolution increment, covariance A (1 - e^{-4 pi^2 k^2 dt}) phi^2(eps k).
// G is realized as (2 pi i k) sigma phi(eps k) S(k) where S is the height
// level convolution draw; this phase convention keeps derivative and height
// steppers exactly commuting path by path.
inline SpectralField ou_step(const SpectralField& f, const DiffusionPair& dp, RngStream& rng,
                             double dt, const MollifierSymbol* m = nullptr, double eps = 0.0) {
  if (dt <= 0.0) throw std::invalid_argument("ou_step: dt must be positive");
  const int d = f.dim(), K = f.max_mode();
  const Matrix L = detail::cholesky_factor(dp.a);
  SpectralField out(d, K);
  Vector g1(d), g2(d);
  for (int k = 1; k <= K; ++k) {
    const double lam = 2.0 * pi * pi * k * k;
    const double decay = std::exp(-lam * dt);
    const double sconv = (1.0 - decay * decay) / (4.0 * pi * pi * k * k);  // height-level variance
    const double p = m ? m->phi(eps * k) : 1.0;
    for (int i = 0; i < d; ++i) g1(i) = rng.gaussian();
    for (int i = 0; i < d; ++i) g2(i) = rng.gaussian();
    const Vector re = L * g1, im = L * g2;
    const Complex deriv_phase = Complex(0.0, 2.0 * pi * k) * p * std::sqrt(sconv / 2.0);
    for (int a = 0; a < d; ++a)
      out.set_mode(a, k, decay * f.coeff(a, k) + deriv_phase * Complex(re(a), im(a)));
  }
  // zero mode of the derivative dynamics is untouched: no noise, no decay
  for (int a = 0; a < d; ++a) out.set_mode(a, 0, f.coeff(a, 0));
  return out;
}

}  // namespace ckpz

#endif  // CKPZ_NOISE_HPP
