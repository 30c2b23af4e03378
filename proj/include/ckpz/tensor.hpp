#ifndef CKPZ_TENSOR_HPP
#define CKPZ_TENSOR_HPP

#include <cmath>
#include <vector>

#include "ckpz/types.hpp"

namespace ckpz {

// Coupling tensor Gamma^a_{bc} of the quadratic gradient nonlinearity,
// stored as d slices: slice a is the d x d matrix (b,c) -> Gamma^a_{bc}.
template <class Scalar>
class CouplingTensorT {
 public:
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  CouplingTensorT(int d, std::vector<Mat> slices) : d_(d), slices_(std::move(slices)) {
    if (d <= 0) throw std::invalid_argument("CouplingTensor: dimension must be positive");
    if (static_cast<int>(slices_.size()) != d)
      throw std::invalid_argument("CouplingTensor: expected d slices");
    for (const Mat& m : slices_) {
      if (m.rows() != d || m.cols() != d)
        throw std::invalid_argument("CouplingTensor: slice shape does not match dimension");
      if (!m.allFinite()) throw std::invalid_argument("CouplingTensor: non-finite entry");
    }
  }

  static CouplingTensorT zero(int d) {
    return CouplingTensorT(d, std::vector<Mat>(d, Mat::Zero(d, d)));
  }

  int dim() const { return d_; }
  Scalar operator()(int a, int b, int c) const { return slices_[a](b, c); }
  const Mat& slice(int a) const { return slices_[a]; }

  double max_abs() const {
    double m = 0.0;
    for (const Mat& s : slices_) m = std::max(m, s.cwiseAbs().maxCoeff());
    return m;
  }

 private:
  int d_;
  std::vector<Mat> slices_;
};

using CouplingTensor = CouplingTensorT<double>;

// Invertible noise amplitude sigma, its inverse tau, and A = sigma sigma^T.
struct DiffusionPair {
  Matrix sigma;
  Matrix tau;
  Matrix a;

  static DiffusionPair from_sigma(const Matrix& sigma) {
    if (sigma.rows() != sigma.cols())
      throw std::invalid_argument("DiffusionPair: sigma must be square");
    Eigen::FullPivLU<Matrix> lu(sigma);
    if (!lu.isInvertible())
      throw numerical_error("DiffusionPair: sigma is singular");
    DiffusionPair dp;
    dp.sigma = sigma;
    dp.tau = lu.inverse();
    dp.a = sigma * sigma.transpose();
    double resid = (sigma * dp.tau - Matrix::Identity(sigma.rows(), sigma.cols())).cwiseAbs().maxCoeff();
    if (resid > 1e-12 * std::max(1.0, sigma.norm()))
      throw numerical_error("DiffusionPair: sigma*tau deviates from identity; sigma too ill-conditioned");
    return dp;
  }

  static DiffusionPair identity(int d) { return from_sigma(Matrix::Identity(d, d)); }

  int dim() const { return static_cast<int>(sigma.rows()); }
};

// Summary of all algebraic checks on a tensor; serialized by the CLI.
struct TensorReport {
  bool is_bilinear = false;
  bool is_trilinear = false;
  bool satisfies_no_log = false;
  Matrix f_matrix;
  Matrix g_matrix;
  Vector c_shift;  // empty unless trilinear
};

// Gamma^a_{bc} == Gamma^a_{cb}, exactly (inputs are exact constants).
template <class Scalar>
bool validate_bilinear(const CouplingTensorT<Scalar>& t) {
  const int d = t.dim();
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      for (int c = b + 1; c < d; ++c)
        if (t(a, b, c) != t(a, c, b)) return false;
  return true;
}

// Change of basis hat h = tau h: hatGamma^a_{bc} = tau^a_{a'} Gamma^{a'}_{b'c'} sigma^{b'}_b sigma^{c'}_c.
inline CouplingTensor hat_transform(const CouplingTensor& t, const DiffusionPair& dp) {
  const int d = t.dim();
  std::vector<Matrix> out(d, Matrix::Zero(d, d));
  // inner contraction sigma^T Gamma^{a'} sigma first, then mix slices by tau
  std::vector<Matrix> inner(d);
  for (int ap = 0; ap < d; ++ap) inner[ap] = dp.sigma.transpose() * t.slice(ap) * dp.sigma;
  for (int a = 0; a < d; ++a)
    for (int ap = 0; ap < d; ++ap) out[a] += dp.tau(a, ap) * inner[ap];
  return CouplingTensor(d, std::move(out));
}

// Pull a tensor given in the hat coordinates back through sigma (inverse of hat_transform).
inline CouplingTensor inverse_hat_transform(const CouplingTensor& t_hat, const DiffusionPair& dp) {
  DiffusionPair inv;
  inv.sigma = dp.tau;
  inv.tau = dp.sigma;
  inv.a = dp.tau * dp.tau.transpose();
  return hat_transform(t_hat, inv);
}

// Full symmetry of the hat tensor in all three indices (generated by the two swaps tested).
inline bool is_trilinear(const CouplingTensor& t_hat, double tol) {
  const int d = t_hat.dim();
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      for (int c = 0; c < d; ++c) {
        if (std::abs(t_hat(a, b, c) - t_hat(b, c, a)) > tol) return false;
        if (std::abs(t_hat(a, b, c) - t_hat(a, c, b)) > tol) return false;
      }
  return true;
}

namespace detail {

// E^a_{b1 b2} = Gamma^a_{c1 c2} sigma^{c1}_{b1} sigma^{c2}_{b2}, one slice per a.
inline std::vector<Matrix> e_slices(const CouplingTensor& t, const DiffusionPair& dp) {
  std::vector<Matrix> e(t.dim());
  for (int a = 0; a < t.dim(); ++a) e[a] = dp.sigma.transpose() * t.slice(a) * dp.sigma;
  return e;
}

}  // namespace detail

// F^{bg} = sum_{c1 c2} E^b_{c1 c2} E^g_{c1 c2}; symmetric.
inline Matrix f_matrix(const CouplingTensor& t, const DiffusionPair& dp) {
  const int d = t.dim();
  const auto e = detail::e_slices(t, dp);
  Matrix f(d, d);
  for (int b = 0; b < d; ++b)
    for (int g = 0; g < d; ++g) f(b, g) = e[b].cwiseProduct(e[g]).sum();
  return f;
}

// G^{bg} = sum Gamma^b_{c1 c2} E^{c1}_{b1 b2} sigma^{c2}_{b2} sigma^{g}_{b1}.
inline Matrix g_matrix(const CouplingTensor& t, const DiffusionPair& dp) {
  const int d = t.dim();
  const auto e = detail::e_slices(t, dp);
  Matrix out = Matrix::Zero(d, d);
  for (int b = 0; b < d; ++b)
    for (int g = 0; g < d; ++g) {
      double s = 0.0;
      for (int c1 = 0; c1 < d; ++c1)
        for (int c2 = 0; c2 < d; ++c2)
          for (int b1 = 0; b1 < d; ++b1)
            for (int b2 = 0; b2 < d; ++b2)
              s += t(b, c1, c2) * e[c1](b1, b2) * dp.sigma(c2, b2) * dp.sigma(g, b1);
      out(b, g) = s;
    }
  return out;
}

// Same matrices expressed through the hat tensor:
//   F^{bg} = sigma^b_{a1} sigma^g_{a2} hat^{a1}_{b1 b2} hat^{a2}_{b1 b2}
//   G^{bg} = sigma^b_{a1} sigma^g_{a2} hat^{a1}_{b1 b2} hat^{b1}_{a2 b2}
// Used by tests as the second algebraic route of the F = G equivalence.
inline Matrix f_matrix_hat_route(const CouplingTensor& t, const DiffusionPair& dp) {
  const CouplingTensor th = hat_transform(t, dp);
  const int d = t.dim();
  Matrix m(d, d);
  for (int a1 = 0; a1 < d; ++a1)
    for (int a2 = 0; a2 < d; ++a2) m(a1, a2) = th.slice(a1).cwiseProduct(th.slice(a2)).sum();
  return dp.sigma * m * dp.sigma.transpose();
}

inline Matrix g_matrix_hat_route(const CouplingTensor& t, const DiffusionPair& dp) {
  const CouplingTensor th = hat_transform(t, dp);
  const int d = t.dim();
  Matrix m = Matrix::Zero(d, d);
  for (int a1 = 0; a1 < d; ++a1)
    for (int a2 = 0; a2 < d; ++a2)
      for (int b1 = 0; b1 < d; ++b1)
        for (int b2 = 0; b2 < d; ++b2) m(a1, a2) += th(a1, b1, b2) * th(b1, a2, b2);
  return dp.sigma * m * dp.sigma.transpose();
}

// Quartic contraction identity that is necessary and sufficient for the
// logarithmic factors Gamma B^eps to stay bounded; weaker than trilinearity.
inline bool no_log_condition(const CouplingTensor& t_hat, double tol) {
  const int d = t_hat.dim();
  for (int a = 0; a < d; ++a) {
    double lhs = 0.0, rhs = 0.0;
    for (int a1 = 0; a1 < d; ++a1)
      for (int a2 = 0; a2 < d; ++a2)
        for (int a3 = 0; a3 < d; ++a3)
          for (int a4 = 0; a4 < d; ++a4) {
            lhs += t_hat(a, a1, a2) * t_hat(a1, a3, a4) * t_hat(a2, a3, a4);
            rhs += t_hat(a, a1, a2) * t_hat(a1, a3, a4) * t_hat(a3, a2, a4);
          }
    if (std::abs(lhs - rhs) > tol) return false;
  }
  return true;
}

inline double default_no_log_tol(const CouplingTensor& t_hat) {
  return 1e-10 * std::max(1.0, t_hat.max_abs());
}

// Gamma^a_{bc} = sum_{a'} (s^{-1})^a_{a'} s^{a'}_b s^{a'}_c, entrywise within tol.
// s may be complex; comparison is on complex entries.
inline bool verify_cole_hopf(const CouplingTensor& t, const ComplexMatrix& s, double tol) {
  const int d = t.dim();
  if (s.rows() != d || s.cols() != d)
    throw std::invalid_argument("verify_cole_hopf: s has wrong shape");
  Eigen::FullPivLU<ComplexMatrix> lu(s);
  if (!lu.isInvertible()) throw numerical_error("verify_cole_hopf: s is singular");
  const ComplexMatrix sinv = lu.inverse();
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      for (int c = 0; c < d; ++c) {
        Complex rhs = 0.0;
        for (int ap = 0; ap < d; ++ap) rhs += sinv(a, ap) * s(ap, b) * s(ap, c);
        if (std::abs(Complex(t(a, b, c), 0.0) - rhs) > tol) return false;
      }
  return true;
}

// Drift constant c^a = (1/24) sigma^a_b hat^b_{a1 a2} hat^{a1}_{b1 b2} hat^{a2}_{b1 b2}.
// Only meaningful under the trilinear condition; refuses otherwise.
inline Vector c_shift(const CouplingTensor& t, const DiffusionPair& dp, double tol = 1e-10) {
  const CouplingTensor th = hat_transform(t, dp);
  if (!is_trilinear(th, tol * std::max(1.0, th.max_abs())))
    throw std::invalid_argument("c_shift: hat tensor is not trilinear");
  const int d = t.dim();
  Matrix m(d, d);  // m(a1,a2) = hat^{a1}_{b1 b2} hat^{a2}_{b1 b2}
  for (int a1 = 0; a1 < d; ++a1)
    for (int a2 = 0; a2 < d; ++a2) m(a1, a2) = th.slice(a1).cwiseProduct(th.slice(a2)).sum();
  Vector w(d);
  for (int b = 0; b < d; ++b) w(b) = th.slice(b).cwiseProduct(m).sum();
  return (dp.sigma * w) / 24.0;
}

inline TensorReport analyze_tensor(const CouplingTensor& t, const DiffusionPair& dp,
                                   double tol = 1e-12) {
  TensorReport r;
  r.is_bilinear = validate_bilinear(t);
  const CouplingTensor th = hat_transform(t, dp);
  const double scale = std::max(1.0, th.max_abs());
  r.is_trilinear = r.is_bilinear && is_trilinear(th, tol * scale);
  r.satisfies_no_log = no_log_condition(th, default_no_log_tol(th));
  r.f_matrix = f_matrix(t, dp);
  r.g_matrix = g_matrix(t, dp);
  if (r.is_trilinear) r.c_shift = c_shift(t, dp);
  return r;
}

}  // namespace ckpz

#endif  // CKPZ_TENSOR_HPP
