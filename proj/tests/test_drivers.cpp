#include <doctest.h>

#include <cmath>

#include "ckpz/drivers.hpp"
#include "helpers.hpp"

using namespace ckpz;
using namespace ckpz::testing;

namespace {

DriverConfig small_scalar_config() {
  DriverConfig cfg;
  cfg.gamma = scalar_tensor(1.0);
  cfg.dp = DiffusionPair::identity(1);
  cfg.mol = gaussian_symbol();
  cfg.eps = 0.5;
  cfg.K = 8;
  cfg.dt = 5e-4;
  cfg.burn_in = 1.0;
  cfg.horizon = 4.0;
  cfg.replicas = 10;
  cfg.seed = 401;
  return cfg;
}

}  // namespace

TEST_CASE("zero coupling: higher drivers stay zero, first stays OU-stationary") {
  DriverConfig cfg = small_scalar_config();
  cfg.gamma = CouplingTensor::zero(1);
  cfg.horizon = 0.05;
  cfg.burn_in = 0.0;
  RngStream rng(cfg.seed, 0);
  DriverState s = init_stationary(rng, cfg);
  for (int i = 0; i < 50; ++i) s = step_drivers(s, rng, cfg);
  CHECK(s.dx_hy.max_abs() == 0.0);
  CHECK(s.dx_hw.max_abs() == 0.0);
  CHECK(s.dx_hi.max_abs() > 0.0);
}

TEST_CASE("stationary initialization matches the smeared covariance") {
  DriverConfig cfg = small_scalar_config();
  const int n = 4000;
  RngStream rng(402, 0);
  const double target = c_eps_band(cfg.mol, cfg.eps, cfg.K);  // E[dxHI dxHI](x)
  double acc = 0.0, acc2 = 0.0;
  for (int i = 0; i < n; ++i) {
    DriverState s = init_stationary(rng, cfg);
    const double v = equal_time_product(s.dx_hi, s.dx_hi)(0, 0);
    acc += v;
    acc2 += v * v;
  }
  const double mean = acc / n;
  const double se = std::sqrt((acc2 / n - mean * mean) / n);
  CHECK(std::abs(mean - target) < 4.0 * se);

  SUBCASE("a fully killed band gives the zero state") {
    DriverConfig dead = cfg;
    dead.mol = raised_cosine_symbol();
    dead.eps = 2.0;
    RngStream r2(403, 0);
    DriverState s = init_stationary(r2, dead);
    CHECK(s.dx_hi.max_abs() == 0.0);
  }
}

TEST_CASE("one step preserves the dxHI mode covariance") {
  DriverConfig cfg = small_scalar_config();
  const int n = 4000, k = 1;
  RngStream rng(404, 0);
  const double target = std::pow(cfg.mol.phi(cfg.eps * k), 2);
  double acc = 0.0, acc2 = 0.0;
  for (int i = 0; i < n; ++i) {
    DriverState s = init_stationary(rng, cfg);
    s = step_drivers(s, rng, cfg);
    const double v = std::norm(s.dx_hi.coeff(0, k));
    acc += v;
    acc2 += v * v;
  }
  const double mean = acc / n;
  const double se = std::sqrt((acc2 / n - mean * mean) / n);
  CHECK(std::abs(mean - target) < 4.0 * se);
}

TEST_CASE("recentred zero-mode forcing has mean zero") {
  // spatial mean of (dxHI dxHI - c_eps_band A) over the stationary law
  DriverConfig cfg = small_scalar_config();
  RngStream rng(405, 0);
  const double target = c_eps_band(cfg.mol, cfg.eps, cfg.K);
  const int n = 5000;
  double acc = 0.0, acc2 = 0.0;
  for (int i = 0; i < n; ++i) {
    DriverState s = init_stationary(rng, cfg);
    const double v = equal_time_product(s.dx_hi, s.dx_hi)(0, 0) - target;
    acc += v;
    acc2 += v * v;
  }
  const double mean = acc / n;
  const double se = std::sqrt((acc2 / n - mean * mean) / n);
  CHECK(std::abs(mean) < 4.0 * se);
}

TEST_CASE("seeded runs are bit-identical") {
  DriverConfig cfg = small_scalar_config();
  cfg.horizon = 0.02;
  cfg.burn_in = 0.0;
  auto run = [&cfg] {
    RngStream rng(cfg.seed, 3);
    DriverState s = init_stationary(rng, cfg);
    for (int i = 0; i < 40; ++i) s = step_drivers(s, rng, cfg);
    return s;
  };
  DriverState a = run(), b = run();
  CHECK((a.dx_hi.coeffs() - b.dx_hi.coeffs()).cwiseAbs().maxCoeff() == 0.0);
  CHECK((a.dx_hy.coeffs() - b.dx_hy.coeffs()).cwiseAbs().maxCoeff() == 0.0);
  CHECK((a.dx_hw.coeffs() - b.dx_hw.coeffs()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("worker count does not change the reduction") {
  DriverConfig cfg = small_scalar_config();
  cfg.horizon = 0.05;
  cfg.burn_in = 0.05;
  cfg.replicas = 4;
  DriverMoments one = run_driver_moments(cfg, 1);
  DriverMoments two = run_driver_moments(cfg, 2);
  CHECK(one.hy_hy.value(0, 0) == two.hy_hy.value(0, 0));
  CHECK(one.hw_hi.value(0, 0) == two.hw_hi.value(0, 0));
}

TEST_CASE("moment estimates against band-limited closed forms") {
  DriverConfig cfg = small_scalar_config();
  DriverMoments m = run_driver_moments(cfg, 2);

  const double ce = c_eps_band(cfg.mol, cfg.eps, cfg.K);
  const double cb = c_big_band(cfg.mol, cfg.eps, cfg.K);
  const double db = d_big_band(cfg.mol, cfg.eps, cfg.K);

  CHECK(std::abs(m.hi_hi.value(0, 0) - ce) < 4.0 * m.hi_hi.stderr_(0, 0));
  CHECK(std::abs(m.hy_hy.value(0, 0) - cb) < 4.0 * m.hy_hy.stderr_(0, 0));
  CHECK(std::abs(m.hw_hi.value(0, 0) - db) < 4.0 * m.hw_hi.stderr_(0, 0));
}

TEST_CASE("tilde scheme: filtered moments cancel in the B combination") {
  DriverConfig cfg = small_scalar_config();
  cfg.tilde = true;
  cfg.seed = 406;
  DriverMoments m = run_driver_moments(cfg, 2);

  const double ct = c_tilde_band(cfg.mol, cfg.eps, cfg.K);
  const double dt = d_tilde_band(cfg.mol, cfg.eps, cfg.K);
  CHECK(std::abs(ct + 2.0 * dt) < 1e-14);  // closed forms cancel exactly

  CHECK(std::abs(m.hy_hy.value(0, 0) - ct) < 4.0 * m.hy_hy.stderr_(0, 0));
  CHECK(std::abs(m.hw_hi.value(0, 0) - dt) < 4.0 * m.hw_hi.stderr_(0, 0));
  const double comb = m.hy_hy.value(0, 0) + 2.0 * m.hw_hi.value(0, 0);
  const double se = m.hy_hy.stderr_(0, 0) + 2.0 * m.hw_hi.stderr_(0, 0);
  CHECK(std::abs(comb) < 4.0 * se);
}

TEST_CASE("spatial homogeneity: point estimate at x=0 agrees with the spatial average") {
  DriverConfig cfg = small_scalar_config();
  cfg.replicas = 10;
  cfg.seed = 407;
  // accumulate both estimators over the same trajectories
  const long burn_steps = static_cast<long>(cfg.burn_in / cfg.dt);
  const long avg_steps = static_cast<long>(cfg.horizon / cfg.dt);
  std::vector<double> avg_r, pt_r;
  for (int r = 0; r < cfg.replicas; ++r) {
    RngStream rng(cfg.seed, r);
    DriverState s = init_stationary(rng, cfg);
    for (long i = 0; i < burn_steps; ++i) s = step_drivers(s, rng, cfg);
    double avg = 0.0, pt = 0.0;
    for (long i = 0; i < avg_steps; ++i) {
      s = step_drivers(s, rng, cfg);
      avg += equal_time_product(s.dx_hy, s.dx_hy)(0, 0);
      Complex at0 = 0.0;  // u(0) = sum_k u^(k)
      for (int k = -cfg.K; k <= cfg.K; ++k) at0 += s.dx_hy.coeff(0, k);
      pt += at0.real() * at0.real();
    }
    avg_r.push_back(avg / avg_steps);
    pt_r.push_back(pt / avg_steps);
  }
  auto mean_se = [](const std::vector<double>& xs) {
    double m = 0.0;
    for (double x : xs) m += x;
    m /= xs.size();
    double v = 0.0;
    for (double x : xs) v += (x - m) * (x - m);
    v /= (xs.size() - 1);
    return std::pair<double, double>(m, std::sqrt(v / xs.size()));
  };
  auto [ma, sa] = mean_se(avg_r);
  auto [mp, sp] = mean_se(pt_r);
  CHECK(std::abs(ma - mp) < 4.0 * (sa + sp));
}

TEST_CASE("halving the timestep moves the estimate by less than two combined errors") {
  DriverConfig coarse = small_scalar_config();
  coarse.horizon = 2.0;
  coarse.replicas = 8;
  coarse.seed = 408;
  DriverConfig fine = coarse;
  fine.dt = coarse.dt / 2.0;
  fine.seed = 409;
  DriverMoments a = run_driver_moments(coarse, 2);
  DriverMoments b = run_driver_moments(fine, 2);
  const double diff = std::abs(a.hy_hy.value(0, 0) - b.hy_hy.value(0, 0));
  CHECK(diff < 2.0 * (a.hy_hy.stderr_(0, 0) + b.hy_hy.stderr_(0, 0)));
}

TEST_CASE("too few replicas is an error") {
  DriverConfig cfg = small_scalar_config();
  cfg.replicas = 1;
  CHECK_THROWS_AS(run_driver_moments(cfg, 1), std::invalid_argument);
}
