#ifndef CKPZ_STATS_HPP
#define CKPZ_STATS_HPP

#include <cmath>
#include <string>
#include <vector>

#include "ckpz/types.hpp"

namespace ckpz {

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

inline MeanSe mean_and_se(const std::vector<double>& xs) {
  if (xs.size() < 2) throw std::invalid_argument("mean_and_se: need at least two samples");
  double m = 0.0;
  for (double x : xs) m += x;
  m /= double(xs.size());
  double v = 0.0;
  for (double x : xs) v += (x - m) * (x - m);
  v /= double(xs.size() - 1);
  return {m, std::sqrt(v / double(xs.size()))};
}

struct ZEntry {
  std::string label;
  double statistic = 0.0;
  double target = 0.0;
  double se = 0.0;
  double z = 0.0;
};

struct ZSummary {
  std::vector<ZEntry> entries;
  double max_abs_z = 0.0;
  double frac_ge3 = 0.0;

  void finalize() {
    max_abs_z = 0.0;
    int ge3 = 0;
    for (const auto& e : entries) {
      max_abs_z = std::max(max_abs_z, std::abs(e.z));
      if (std::abs(e.z) >= 3.0) ++ge3;
    }
    frac_ge3 = entries.empty() ? 0.0 : double(ge3) / double(entries.size());
  }
};

// Per-entry z-scores of empirical means against targets; samples[i] is one
// replica's vector of statistics, one per entry.
inline ZSummary covariance_z_test(const std::vector<std::vector<double>>& samples,
                                  const std::vector<double>& targets,
                                  const std::vector<std::string>& labels) {
  if (samples.size() < 30)
    throw std::invalid_argument("covariance_z_test: need at least 30 samples");
  ZSummary out;
  const std::size_t n = samples.size(), m = targets.size();
  for (std::size_t j = 0; j < m; ++j) {
    std::vector<double> col(n);
    for (std::size_t i = 0; i < n; ++i) col[i] = samples[i][j];
    const MeanSe ms = mean_and_se(col);
    ZEntry e;
    e.label = labels[j];
    e.statistic = ms.mean;
    e.target = targets[j];
    e.se = ms.se;
    e.z = ms.se > 0.0 ? (ms.mean - targets[j]) / ms.se : (ms.mean == targets[j] ? 0.0 : 1e300);
    out.entries.push_back(e);
  }
  out.finalize();
  return out;
}

struct Regression {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_se = 0.0;
};

// ordinary least squares y = a + b t with the usual residual-based slope error
inline Regression linear_fit(const std::vector<double>& t, const std::vector<double>& y) {
  const std::size_t n = t.size();
  if (n < 3 || y.size() != n) throw std::invalid_argument("linear_fit: need >= 3 paired points");
  double mt = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mt += t[i];
    my += y[i];
  }
  mt /= double(n);
  my /= double(n);
  double stt = 0.0, sty = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    stt += (t[i] - mt) * (t[i] - mt);
    sty += (t[i] - mt) * (y[i] - my);
  }
  Regression r;
  r.slope = sty / stt;
  r.intercept = my - r.slope * mt;
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double resid = y[i] - r.intercept - r.slope * t[i];
    ss += resid * resid;
  }
  r.slope_se = std::sqrt(ss / double(n - 2) / stt);
  return r;
}

}  // namespace ckpz

#endif  // CKPZ_STATS_HPP
