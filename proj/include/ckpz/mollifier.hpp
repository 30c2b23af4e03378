#ifndef CKPZ_MOLLIFIER_HPP
#define CKPZ_MOLLIFIER_HPP

#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include "ckpz/types.hpp"

namespace ckpz {

// Fourier symbol phi of the smoothing kernel, with a tail bound used for
// truncation control: tail(eps, K) >= sum_{|k| > K} phi^2(eps k).
struct MollifierSymbol {
  std::function<double(double)> phi;
  std::function<double(double, long)> tail;
  std::string name;

  double operator()(double theta) const { return phi(theta); }
};

// phi(theta) = exp(-theta^2). Not compactly supported, but all lattice sums
// converge absolutely and the constants depend only on the decay of phi.
inline MollifierSymbol gaussian_symbol() {
  MollifierSymbol m;
  m.name = "gaussian";
  m.phi = [](double th) { return std::exp(-th * th); };
  // k^2 >= K^2 + (2K+1)(k-K) for k >= K gives a geometric majorant
  m.tail = [](double eps, long K) {
    if (K < 1) return std::numeric_limits<double>::infinity();
    const double e2 = 2.0 * eps * eps;
    const double r = std::exp(-e2 * (2.0 * K + 1.0));
    if (r >= 1.0) return std::numeric_limits<double>::infinity();
    return 2.0 * std::exp(-e2 * K * K) * r / (1.0 - r);
  };
  return m;
}

// Exactly supported in [-1,1]: 1 on |theta| <= 1/2, cos(pi(|theta|-1/2)) taper.
inline MollifierSymbol raised_cosine_symbol() {
  MollifierSymbol m;
  m.name = "raised_cosine";
  m.phi = [](double th) {
    const double a = std::abs(th);
    if (a <= 0.5) return 1.0;
    if (a >= 1.0) return 0.0;
    return std::cos(pi * (a - 0.5));
  };
  m.tail = [](double eps, long K) {
    const long kmax = static_cast<long>(std::floor(1.0 / eps));  // phi(eps k) = 0 beyond
    if (K >= kmax) return 0.0;
    return 2.0 * static_cast<double>(kmax - K);
  };
  return m;
}

inline bool mollifier_invariants_hold(const MollifierSymbol& m, double probe = 1.7) {
  return m.phi(0.0) == 1.0 && m.phi(probe) == m.phi(-probe);
}

}  // namespace ckpz

#endif  // CKPZ_MOLLIFIER_HPP
