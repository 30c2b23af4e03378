#ifndef CKPZ_SPECTRAL_HPP
#define CKPZ_SPECTRAL_HPP

#include <functional>
#include <string>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "ckpz/types.hpp"

namespace ckpz {

// d-component complex Fourier coefficients on modes |k| <= K with the reality
// constraint u^(-k) = conj(u^(k)) enforced by construction. Fourier convention
// u^(k) = int_T e^{-2 pi i k x} u(x) dx, so derivatives are 2 pi i k.
class SpectralField {
 public:
  SpectralField(int d, int K) : d_(d), K_(K), coeffs_(ComplexMatrix::Zero(d, 2 * K + 1)) {
    if (d <= 0 || K < 0) throw std::invalid_argument("SpectralField: bad shape");
  }

  // column j holds mode j - K; validates the reality constraint
  static SpectralField from_coeffs(const ComplexMatrix& coeffs, double tol = 1e-12) {
    const int K = static_cast<int>(coeffs.cols() - 1) / 2;
    if (coeffs.cols() != 2 * K + 1)
      throw std::invalid_argument("SpectralField: coefficient count must be odd");
    SpectralField f(static_cast<int>(coeffs.rows()), K);
    f.coeffs_ = coeffs;
    if (!f.satisfies_reality(tol))
      throw std::invalid_argument("SpectralField: reality constraint violated");
    f.enforce_reality();
    return f;
  }

  int dim() const { return d_; }
  int max_mode() const { return K_; }

  Complex coeff(int comp, int k) const { return coeffs_(comp, k + K_); }

  // sets mode k and its conjugate partner
  void set_mode(int comp, int k, Complex v) {
    if (k == 0) v = Complex(v.real(), 0.0);
    coeffs_(comp, k + K_) = v;
    if (k != 0) coeffs_(comp, -k + K_) = std::conj(v);
  }

  const ComplexMatrix& coeffs() const { return coeffs_; }

  bool satisfies_reality(double tol = 0.0) const {
    for (int a = 0; a < d_; ++a) {
      if (std::abs(coeffs_(a, K_).imag()) > tol) return false;
      for (int k = 1; k <= K_; ++k)
        if (std::abs(coeffs_(a, K_ + k) - std::conj(coeffs_(a, K_ - k))) > tol) return false;
    }
    return true;
  }

  bool zero_mean(double tol = 0.0) const {
    for (int a = 0; a < d_; ++a)
      if (std::abs(coeffs_(a, K_)) > tol) return false;
    return true;
  }

  double max_abs() const { return coeffs_.cwiseAbs().maxCoeff(); }

  // sum_k |u^(k)|^2 per component (squared L2 norm by Parseval)
  Vector energy() const {
    Vector e(d_);
    for (int a = 0; a < d_; ++a) e(a) = coeffs_.row(a).squaredNorm();
    return e;
  }

  SpectralField& operator+=(const SpectralField& o) {
    coeffs_ += o.coeffs_;
    return *this;
  }
  SpectralField& operator*=(double s) {
    coeffs_ *= s;
    return *this;
  }

 private:
  void enforce_reality() {
    for (int a = 0; a < d_; ++a) {
      coeffs_(a, K_) = Complex(coeffs_(a, K_).real(), 0.0);
      for (int k = 1; k <= K_; ++k) {
        const Complex avg = 0.5 * (coeffs_(a, K_ + k) + std::conj(coeffs_(a, K_ - k)));
        coeffs_(a, K_ + k) = avg;
        coeffs_(a, K_ - k) = std::conj(avg);
      }
    }
  }

  friend SpectralField to_spectral(const Matrix&, int);

  int d_, K_;
  ComplexMatrix coeffs_;
};

// Even cutoff symbol psi with values in [0,1], psi(0)=1, supported in [-1,1].
struct CutoffSymbol {
  std::function<double(double)> psi;
  std::string name;
  double operator()(double theta) const { return psi(theta); }
};

// 1 on [0,1/2], cos^2(pi(theta-1/2)) taper on (1/2,1], 0 beyond; C^1 and monotone.
inline CutoffSymbol default_cutoff() {
  CutoffSymbol c;
  c.name = "cos2_taper";
  c.psi = [](double th) {
    const double a = std::abs(th);
    if (a <= 0.5) return 1.0;
    if (a >= 1.0) return 0.0;
    const double t = std::cos(pi * (a - 0.5));
    return t * t;
  };
  return c;
}

// indicator of [-1,1]; P_N with this symbol is the sharp projection
inline CutoffSymbol sharp_cutoff() {
  CutoffSymbol c;
  c.name = "sharp";
  c.psi = [](double th) { return std::abs(th) <= 1.0 ? 1.0 : 0.0; };
  return c;
}

namespace detail {

inline int padded_grid_size(int K) {
  int m = 1;
  while (m < 3 * K + 2) m *= 2;
  return m;
}

// thread-local plan cache; Eigen's FFT object is cheap but stateful
inline Eigen::FFT<double>& fft_engine() {
  thread_local Eigen::FFT<double> fft;
  return fft;
}

}  // namespace detail

// samples u(x_j), x_j = j/M, on an M-point grid; requires M >= 2K+2
inline Matrix to_physical(const SpectralField& f, int M) {
  const int K = f.max_mode();
  if (M < 2 * K + 2) throw std::invalid_argument("to_physical: grid too small for the band");
  Matrix out(f.dim(), M);
  std::vector<Complex> spec(M), phys(M);
  for (int a = 0; a < f.dim(); ++a) {
    std::fill(spec.begin(), spec.end(), Complex(0.0, 0.0));
    for (int k = 0; k <= K; ++k) spec[k] = f.coeff(a, k);
    for (int k = 1; k <= K; ++k) spec[M - k] = f.coeff(a, -k);
    detail::fft_engine().inv(phys, spec);  // (1/M) sum X e^{+2 pi i m j / M}
    for (int j = 0; j < M; ++j) out(a, j) = phys[j].real() * M;
  }
  return out;
}

// trapezoidal quadrature of the transform integral; exact for band-limited g
inline SpectralField to_spectral(const Matrix& g, int K) {
  const int M = static_cast<int>(g.cols());
  if (M < 2 * K + 2) throw std::invalid_argument("to_spectral: grid too small for the band");
  SpectralField f(static_cast<int>(g.rows()), K);
  std::vector<Complex> spec(M), phys(M);
  for (int a = 0; a < f.dim(); ++a) {
    for (int j = 0; j < M; ++j) phys[j] = Complex(g(a, j), 0.0);
    detail::fft_engine().fwd(spec, phys);
    for (int k = 0; k <= K; ++k) f.coeffs_(a, K + k) = spec[k] / double(M);
    for (int k = 1; k <= K; ++k) f.coeffs_(a, K - k) = spec[M - k] / double(M);
  }
  f.enforce_reality();
  return f;
}

// u^(k) -> 2 pi i k u^(k)
inline SpectralField derivative(const SpectralField& f) {
  SpectralField out(f.dim(), f.max_mode());
  for (int a = 0; a < f.dim(); ++a)
    for (int k = 1; k <= f.max_mode(); ++k)
      out.set_mode(a, k, Complex(0.0, 2.0 * pi * k) * f.coeff(a, k));
  return out;
}

// P_N = psi(N^{-1} D); smooth Fourier multiplier, idempotent only for 0/1 symbols
inline SpectralField project_smooth(const SpectralField& f, int N, const CutoffSymbol& psi) {
  SpectralField out(f.dim(), f.max_mode());
  for (int a = 0; a < f.dim(); ++a) {
    out.set_mode(a, 0, f.coeff(a, 0));
    for (int k = 1; k <= f.max_mode(); ++k)
      out.set_mode(a, k, psi(double(k) / N) * f.coeff(a, k));
  }
  return out;
}

// sharp projection Pi_N = 1_{[-N,N]}(D) and its complement
inline SpectralField project_sharp(const SpectralField& f, int N) {
  SpectralField out(f.dim(), f.max_mode());
  for (int a = 0; a < f.dim(); ++a)
    for (int k = 0; k <= std::min(N, f.max_mode()); ++k) out.set_mode(a, k, f.coeff(a, k));
  return out;
}

inline SpectralField project_sharp_complement(const SpectralField& f, int N) {
  SpectralField out(f.dim(), f.max_mode());
  for (int a = 0; a < f.dim(); ++a)
    for (int k = N + 1; k <= f.max_mode(); ++k) out.set_mode(a, k, f.coeff(a, k));
  return out;
}

// Componentwise pointwise product, computed on a padded grid of size >= 3K+2
// so every retained mode |k| <= K is alias-free. Dealiasing is mandatory in
// the dynamics: the product of band-K fields has modes up to 2K and sharp
// truncation on an unpadded grid folds those back into the band.
inline SpectralField product(const SpectralField& f, const SpectralField& g) {
  if (f.dim() != g.dim() || f.max_mode() != g.max_mode())
    throw std::invalid_argument("product: incompatible fields");
  const int K = f.max_mode();
  const int M = detail::padded_grid_size(K);
  const Matrix a = to_physical(f, M);
  const Matrix b = to_physical(g, M);
  return to_spectral(a.cwiseProduct(b), K);
}

}  // namespace ckpz

#endif  // CKPZ_SPECTRAL_HPP
