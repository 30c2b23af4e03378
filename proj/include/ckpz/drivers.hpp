#ifndef CKPZ_DRIVERS_HPP
#define CKPZ_DRIVERS_HPP

#include <atomic>
#include <thread>
#include <vector>

#include "ckpz/noise.hpp"
#include "ckpz/quadratic.hpp"
#include "ckpz/renorm.hpp"
#include "ckpz/spectral.hpp"

namespace ckpz {

// Triangular chain of stationary driver derivative fields at fixed eps:
//   dxHI: mode-wise OU with stationary variance A phi^2(eps k)
//   dxHY: forced by (1/2) Gamma (dxHI dxHI - c_eps A)
//   dxHW: forced by Gamma (dxHY dxHI)
// The tilde scheme filters both forcings by phi^2(eps D).
struct DriverConfig {
  CouplingTensor gamma = CouplingTensor::zero(1);
  DiffusionPair dp = DiffusionPair::identity(1);
  MollifierSymbol mol;
  double eps = 0.1;
  int K = 16;
  double dt = 1e-4;
  double burn_in = 5.0 / (2.0 * pi * pi);  // several relaxation times of mode 1
  double horizon = 1.0;                    // averaging window per replica after burn-in
  int replicas = 8;
  std::uint64_t seed = 1;
  bool tilde = false;
};

struct DriverState {
  double t = 0.0;
  SpectralField dx_hi, dx_hy, dx_hw;

  DriverState(int d, int K) : dx_hi(d, K), dx_hy(d, K), dx_hw(d, K) {}
};

// dxHI from its exact Gaussian stationary law; the second- and third-order
// fields start at zero and must be burned in (no exact sampler exists).
inline DriverState init_stationary(RngStream& rng, const DriverConfig& cfg) {
  DriverState s(cfg.gamma.dim(), cfg.K);
  SpectralField f = sample_mu_a(rng, cfg.dp, cfg.K);
  for (int a = 0; a < f.dim(); ++a)
    for (int k = 1; k <= cfg.K; ++k)
      s.dx_hi.set_mode(a, k, cfg.mol.phi(cfg.eps * k) * f.coeff(a, k));
  return s;
}

// One step: exact OU integrating factor per mode, exponential-Euler treatment
// of the quadratic forcings evaluated at the start of the step.
inline DriverState step_drivers(const DriverState& s, RngStream& rng, const DriverConfig& cfg) {
  const int d = s.dx_hi.dim(), K = cfg.K;
  const double dt = cfg.dt;
  SpectralField fy = detail::quadratic_contraction(s.dx_hi, s.dx_hi, cfg.gamma, 0.5);
  SpectralField fw = detail::quadratic_contraction(s.dx_hy, s.dx_hi, cfg.gamma, 1.0);

  DriverState out(d, K);
  out.t = s.t + dt;
  out.dx_hi = ou_step(s.dx_hi, cfg.dp, rng, dt, &cfg.mol, cfg.eps);
  for (int k = 1; k <= K; ++k) {
    const double lam = 2.0 * pi * pi * k * k;
    const double decay = std::exp(-lam * dt);
    const double w = detail::phi1(-lam * dt) * dt;
    const Complex dx(0.0, 2.0 * pi * k);  // derivative of the integrated forcing
    const double filt = cfg.tilde ? std::pow(cfg.mol.phi(cfg.eps * k), 2) : 1.0;
    for (int a = 0; a < d; ++a) {
      out.dx_hy.set_mode(a, k, decay * s.dx_hy.coeff(a, k) + w * filt * dx * fy.coeff(a, k));
      out.dx_hw.set_mode(a, k, decay * s.dx_hw.coeff(a, k) + w * filt * dx * fw.coeff(a, k));
    }
  }
  return out;
}

// Spatially averaged equal-time product sum_k Re[f^a(k) conj(g^b(k))].
inline Matrix equal_time_product(const SpectralField& f, const SpectralField& g) {
  const int d = f.dim();
  Matrix out(d, d);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) {
      double s = 0.0;
      for (int k = -f.max_mode(); k <= f.max_mode(); ++k)
        s += (f.coeff(a, k) * std::conj(g.coeff(b, k))).real();
      out(a, b) = s;
    }
  return out;
}

struct MomentEstimate {
  Matrix value;   // d x d
  Matrix stderr_; // standard error across replicas
};

struct DriverMoments {
  MomentEstimate hi_hi;  // E[dxHI dxHI], matches c_eps_band * A
  MomentEstimate hy_hy;  // E[dxHY dxHY], matches F * C_band
  MomentEstimate hw_hi;  // E[dxHW dxHI], matches G * D_band
  long samples_per_replica = 0;
};

// Time- and ensemble-averaged driver moments. Replicas own disjoint rng
// streams and may run on any number of workers; the reduction is in replica
// order, so the result is bit-identical regardless of the worker count.
inline DriverMoments run_driver_moments(const DriverConfig& cfg, int workers = 1) {
  if (cfg.replicas < 2)
    throw std::invalid_argument("run_driver_moments: need at least two replicas for a standard error");
  const int d = cfg.gamma.dim();
  const long burn_steps = static_cast<long>(std::ceil(cfg.burn_in / cfg.dt));
  const long avg_steps = static_cast<long>(std::ceil(cfg.horizon / cfg.dt));
  if (avg_steps <= 0) throw std::invalid_argument("run_driver_moments: empty averaging window");

  std::vector<Matrix> per_replica_ii(cfg.replicas), per_replica_yy(cfg.replicas),
      per_replica_wi(cfg.replicas);

  auto run_replica = [&](int r) {
    RngStream rng(cfg.seed, static_cast<std::uint32_t>(r));
    DriverState s = init_stationary(rng, cfg);
    for (long i = 0; i < burn_steps; ++i) s = step_drivers(s, rng, cfg);
    Matrix ii = Matrix::Zero(d, d), yy = Matrix::Zero(d, d), wi = Matrix::Zero(d, d);
    for (long i = 0; i < avg_steps; ++i) {
      s = step_drivers(s, rng, cfg);
      ii += equal_time_product(s.dx_hi, s.dx_hi);
      yy += equal_time_product(s.dx_hy, s.dx_hy);
      wi += equal_time_product(s.dx_hw, s.dx_hi);
    }
    per_replica_ii[r] = ii / double(avg_steps);
    per_replica_yy[r] = yy / double(avg_steps);
    per_replica_wi[r] = wi / double(avg_steps);
  };

  if (workers <= 1) {
    for (int r = 0; r < cfg.replicas; ++r) run_replica(r);
  } else {
    std::vector<std::thread> pool;
    std::atomic<int> next{0};
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (int r = next.fetch_add(1); r < cfg.replicas; r = next.fetch_add(1)) run_replica(r);
      });
    for (auto& th : pool) th.join();
  }

  auto reduce = [&](const std::vector<Matrix>& xs) {
    MomentEstimate e;
    e.value = Matrix::Zero(d, d);
    for (const Matrix& x : xs) e.value += x;
    e.value /= double(xs.size());
    Matrix var = Matrix::Zero(d, d);
    for (const Matrix& x : xs) var += (x - e.value).cwiseProduct(x - e.value);
    var /= double(xs.size() - 1);
    e.stderr_ = (var / double(xs.size())).cwiseSqrt();
    return e;
  };

  DriverMoments out;
  out.hi_hi = reduce(per_replica_ii);
  out.hy_hy = reduce(per_replica_yy);
  out.hw_hi = reduce(per_replica_wi);
  out.samples_per_replica = avg_steps;
  return out;
}

}  // namespace ckpz

#endif  // CKPZ_DRIVERS_HPP
