#ifndef CKPZ_RENORM_HPP
#define CKPZ_RENORM_HPP

#include <cmath>
#include <cstdlib>
#include <vector>

#include "ckpz/mollifier.hpp"
#include "ckpz/tensor.hpp"
#include "ckpz/types.hpp"

namespace ckpz {

// Scalar renormalization constants at one mollification scale, together with
// the truncation radius of the lattice sums and a bound on the neglected tail.
struct RenormValues {
  double eps = 0.0;
  double c_eps = 0.0;    // sum_{k != 0} phi^2(eps k), diverges like 1/eps
  double c_big = 0.0;    // C^eps, O(log 1/eps)
  double d_big = 0.0;    // D^eps
  double c_tilde = 0.0;  // filtered variants
  double d_tilde = 0.0;
  long truncation_K = 0;
  double est_truncation_error = 0.0;
};

namespace detail {

// Kahan-Babuska-Neumaier compensated accumulator; the C~ + 2D~ cancellation
// is between same-magnitude terms and plain ordering loses digits.
struct CompensatedSum {
  double s = 0.0, c = 0.0;
  void add(double x) {
    const double t = s + x;
    if (std::abs(s) >= std::abs(x))
      c += (s - t) + x;
    else
      c += (x - t) + s;
    s = t;
  }
  double value() const { return s + c; }
};

inline constexpr long k_hard_limit_1d = 1L << 22;
inline constexpr long k_hard_limit_2d = 1L << 14;

// Smallest K with phi^2(eps K) < tol / (1 + running c_eps); every summand of
// the double sums is bounded by phi^2(eps k1) phi^2(eps k2) times a summable
// lattice factor, so this controls all of them at once.
inline long choose_truncation(const MollifierSymbol& m, double eps, double tol, long hard_limit) {
  CompensatedSum c;
  for (long k = 1; k <= hard_limit; ++k) {
    const double p2 = m.phi(eps * k) * m.phi(eps * k);
    if (p2 < tol / (1.0 + 2.0 * c.value())) return k;
    c.add(p2);
  }
  throw numerical_error("renorm: tail bound never drops below tol within the hard truncation limit");
}

enum class SumKind { c_big, d_big, c_tilde, d_tilde };

// Double lattice sum over the square |k1|,|k2| <= K (optionally further
// restricted to |k1+k2| <= band), accumulated in order of increasing
// |k1|+|k2|. Skips k1, k2, k1+k2 = 0 per the sum* convention.
inline double lattice_sum(const MollifierSymbol& m, double eps, long K, SumKind kind, long band) {
  std::vector<double> p2(2 * K + 1);  // phi^2(eps k) for k = 0..2K
  for (long k = 0; k <= 2 * K; ++k) {
    const double p = m.phi(eps * k);
    p2[k] = p * p;
  }
  CompensatedSum acc;
  for (long s = 2; s <= 2 * K; ++s) {
    const long lo = std::max(1L, s - K);
    const long hi = std::min(K, s - 1);
    for (long a1 = lo; a1 <= hi; ++a1) {
      const long a2 = s - a1;
      const long signs[4][2] = {{a1, a2}, {a1, -a2}, {-a1, a2}, {-a1, -a2}};
      for (const auto& sg : signs) {
        const long k1 = sg[0], k2 = sg[1];
        const long l = k1 + k2;
        if (l == 0) continue;
        if (band > 0 && std::labs(l) > band) continue;
        const double q = static_cast<double>(k1) * k1 + static_cast<double>(k1) * k2 +
                         static_cast<double>(k2) * k2;
        const double la = p2[std::labs(l)];
        double term = 0.0;
        switch (kind) {
          case SumKind::c_big:
            term = p2[std::labs(k1)] * p2[std::labs(k2)] / q;
            break;
          case SumKind::c_tilde:
            term = p2[std::labs(k1)] * p2[std::labs(k2)] * la * la / q;
            break;
          case SumKind::d_big:
            term = -static_cast<double>(l) * p2[std::labs(k1)] * p2[std::labs(k2)] /
                   (static_cast<double>(k1) * q);
            break;
          case SumKind::d_tilde:
            // weight phi^4(eps k1) phi^2(eps k2) phi^2(eps(k1+k2)), from the
            // kernel of the filtered third-order driver
            term = -static_cast<double>(l) * p2[std::labs(k1)] * p2[std::labs(k1)] *
                   p2[std::labs(k2)] * la / (static_cast<double>(k1) * q);
            break;
        }
        acc.add(term);
      }
    }
  }
  return acc.value() / (4.0 * pi * pi);
}

}  // namespace detail

// sum_{k != 0} phi^2(eps k), truncated once the tail bound falls below tol.
inline double c_eps(const MollifierSymbol& m, double eps, double tol) {
  if (eps <= 0.0 || tol <= 0.0) throw std::invalid_argument("c_eps: eps and tol must be positive");
  detail::CompensatedSum acc;
  for (long k = 1; k <= detail::k_hard_limit_1d; ++k) {
    const double p = m.phi(eps * k);
    acc.add(2.0 * p * p);
    if (m.tail(eps, k) < tol) return acc.value();
  }
  throw numerical_error("c_eps: truncation failure");
}

inline double c_big(const MollifierSymbol& m, double eps, double tol) {
  const long K = detail::choose_truncation(m, eps, tol, detail::k_hard_limit_2d);
  return detail::lattice_sum(m, eps, K, detail::SumKind::c_big, 0);
}

inline double d_big(const MollifierSymbol& m, double eps, double tol) {
  const long K = detail::choose_truncation(m, eps, tol, detail::k_hard_limit_2d);
  return detail::lattice_sum(m, eps, K, detail::SumKind::d_big, 0);
}

inline double c_tilde(const MollifierSymbol& m, double eps, double tol) {
  const long K = detail::choose_truncation(m, eps, tol, detail::k_hard_limit_2d);
  return detail::lattice_sum(m, eps, K, detail::SumKind::c_tilde, 0);
}

inline double d_tilde(const MollifierSymbol& m, double eps, double tol) {
  const long K = detail::choose_truncation(m, eps, tol, detail::k_hard_limit_2d);
  return detail::lattice_sum(m, eps, K, detail::SumKind::d_tilde, 0);
}

// All five constants at once, sharing one truncation radius and tail estimate.
inline RenormValues evaluate_renorm(const MollifierSymbol& m, double eps, double tol) {
  if (eps <= 0.0 || tol <= 0.0)
    throw std::invalid_argument("evaluate_renorm: eps and tol must be positive");
  RenormValues v;
  v.eps = eps;
  v.c_eps = c_eps(m, eps, tol);
  const long K = detail::choose_truncation(m, eps, tol, detail::k_hard_limit_2d);
  v.truncation_K = K;
  v.c_big = detail::lattice_sum(m, eps, K, detail::SumKind::c_big, 0);
  v.d_big = detail::lattice_sum(m, eps, K, detail::SumKind::d_big, 0);
  v.c_tilde = detail::lattice_sum(m, eps, K, detail::SumKind::c_tilde, 0);
  v.d_tilde = detail::lattice_sum(m, eps, K, detail::SumKind::d_tilde, 0);
  // outside the square: |C summand| <= 2 phi^2 phi^2 / K^2 and
  // |D summand| <= (8/3) phi^2 phi^2 / K; both tails are covered by
  // tail(K) * (c_eps + tail) pairs of weights
  const double tail = m.tail(eps, K);
  const double wsum = tail * (v.c_eps + tail);
  const double est_c = wsum / (pi * pi * K * K);
  const double est_d = 4.0 * wsum / (3.0 * pi * pi * K);
  v.est_truncation_error = est_c + 2.0 * est_d;
  return v;
}

// Band-limited variants: both summation indices and their sum restricted to
// |k| <= K, matching what a spectral simulation with K retained modes sees.
inline double c_eps_band(const MollifierSymbol& m, double eps, long K) {
  detail::CompensatedSum acc;
  for (long k = 1; k <= K; ++k) {
    const double p = m.phi(eps * k);
    acc.add(2.0 * p * p);
  }
  return acc.value();
}

inline double c_big_band(const MollifierSymbol& m, double eps, long K) {
  return detail::lattice_sum(m, eps, K, detail::SumKind::c_big, K);
}
inline double d_big_band(const MollifierSymbol& m, double eps, long K) {
  return detail::lattice_sum(m, eps, K, detail::SumKind::d_big, K);
}
inline double c_tilde_band(const MollifierSymbol& m, double eps, long K) {
  return detail::lattice_sum(m, eps, K, detail::SumKind::c_tilde, K);
}
inline double d_tilde_band(const MollifierSymbol& m, double eps, long K) {
  return detail::lattice_sum(m, eps, K, detail::SumKind::d_tilde, K);
}

// B^eps = F C^eps + 2 G D^eps and the filtered analogue.
inline std::pair<Matrix, Matrix> b_matrices(const CouplingTensor& t, const DiffusionPair& dp,
                                            const MollifierSymbol& m, double eps, double tol) {
  const RenormValues v = evaluate_renorm(m, eps, tol);
  const Matrix f = f_matrix(t, dp);
  const Matrix g = g_matrix(t, dp);
  return {f * v.c_big + 2.0 * g * v.d_big, f * v.c_tilde + 2.0 * g * v.d_tilde};
}

// Two-point Richardson extrapolation assuming first-order error in eps.
inline double richardson2(double f_eps, double f_eps_half) { return 2.0 * f_eps_half - f_eps; }

}  // namespace ckpz

#endif  // CKPZ_RENORM_HPP
