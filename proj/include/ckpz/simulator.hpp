#ifndef CKPZ_SIMULATOR_HPP
#define CKPZ_SIMULATOR_HPP

#include <atomic>
#include <thread>
#include <vector>

#include "ckpz/noise.hpp"
#include "ckpz/quadratic.hpp"
#include "ckpz/renorm.hpp"
#include "ckpz/stats.hpp"

namespace ckpz {

enum class Scheme { galerkin_sbe, kpz_plain, kpz_tilde, kpz_pair };
enum class RenormPolicy { zero, computed };

struct SimConfig {
  CouplingTensor tensor = CouplingTensor::zero(1);
  DiffusionPair diffusion = DiffusionPair::identity(1);
  MollifierSymbol mollifier = gaussian_symbol();
  double eps = 0.1;
  int cutoff_n = 12;   // nonlinearity band, P_N = psi(k/N)
  int modes_k = 16;    // retained modes
  double dt = 1e-4;
  double horizon_t = 1.0;
  int replicas = 8;
  std::uint64_t seed = 1;
  Scheme scheme = Scheme::galerkin_sbe;
  RenormPolicy renorm_policy = RenormPolicy::zero;
  CutoffSymbol psi = default_cutoff();
  bool mollified_noise = false;  // galerkin_sbe keeps white noise; the fixed-eps
                                 // schemes smear it (kpz always does)
  int workers = 1;

  void validate() const {
    if (tensor.dim() != diffusion.dim())
      throw std::invalid_argument("SimConfig: tensor and diffusion dimensions differ");
    if (dt <= 0.0) throw std::invalid_argument("SimConfig: dt must be positive");
    if (horizon_t < dt) throw std::invalid_argument("SimConfig: horizon shorter than one step");
    if (modes_k < 4) throw std::invalid_argument("SimConfig: modes_K < 4 is degenerate");
    if (scheme == Scheme::galerkin_sbe && modes_k < cutoff_n)
      throw std::invalid_argument("SimConfig: modes_K must be >= cutoff_N");
    // explicit treatment of the nonlinear term imposes an effective step limit
    const double dt_max = 10.0 / (2.0 * pi * pi * double(modes_k) * double(modes_k));
    if (dt > dt_max)
      throw std::invalid_argument("SimConfig: dt exceeds the stability limit 10/(2 pi^2 K^2)");
  }
};

// F_N^a(u) = 1/2 Gamma^a_{bg} dx P_N(P_N u^b P_N u^g), dealiased.
inline SpectralField f_n_operator(const SpectralField& u, const CouplingTensor& gamma, int N,
                                  const CutoffSymbol& psi) {
  const SpectralField v = project_smooth(u, N, psi);
  const SpectralField w = detail::quadratic_contraction(v, v, gamma, 0.5);
  return project_smooth(derivative(w), N, psi);
}

// (A^{-1})_{ab} <F_N^a(u), u^b>_{L2}; vanishes to roundoff under trilinearity.
inline double energy_identity_residual(const SpectralField& u, const CouplingTensor& gamma,
                                       const DiffusionPair& dp, int N, const CutoffSymbol& psi) {
  const SpectralField f = f_n_operator(u, gamma, N, psi);
  const int d = u.dim(), K = u.max_mode();
  const Matrix ainv = dp.a.inverse();
  double r = 0.0;
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) {
      Complex s = 0.0;
      for (int k = -K; k <= K; ++k) s += f.coeff(a, k) * std::conj(u.coeff(b, k));
      r += ainv(a, b) * s.real();
    }
  return r;
}

// Per-step Gaussian block with a fixed draw order (for k = 0..K: g1 over
// components, then g2), shared between the members of a coupled pair.
struct StepDraws {
  Matrix g1, g2;  // d x (K+1)
};

inline StepDraws draw_step(RngStream& rng, int d, int K) {
  StepDraws s;
  s.g1.resize(d, K + 1);
  s.g2.resize(d, K + 1);
  for (int k = 0; k <= K; ++k) {
    for (int a = 0; a < d; ++a) s.g1(a, k) = rng.gaussian();
    for (int a = 0; a < d; ++a) s.g2(a, k) = rng.gaussian();
  }
  return s;
}

// Everything per-mode the steppers need, precomputed once per trajectory.
struct StepperTables {
  Vector decay;    // e^{-2 pi^2 k^2 dt}, k = 0..K
  Vector fweight;  // phi1(-2 pi^2 k^2 dt) * dt
  Vector conv_sd;  // sqrt of half the height-level convolution variance
  Vector phi;      // phi(eps k)
  Vector phi2;     // phi^2(eps k)
  Matrix chol_a;
  double c_eps_band = 0.0;
  Vector b_shift_plain, b_shift_tilde;  // (1/2) Gamma^a_{bg} B^{bg}, band-limited
};

inline StepperTables make_tables(const SimConfig& cfg) {
  const int K = cfg.modes_k;
  StepperTables t;
  t.decay.resize(K + 1);
  t.fweight.resize(K + 1);
  t.conv_sd.resize(K + 1);
  t.phi.resize(K + 1);
  t.phi2.resize(K + 1);
  for (int k = 0; k <= K; ++k) {
    const double lam = 2.0 * pi * pi * k * k;
    t.decay(k) = std::exp(-lam * cfg.dt);
    t.fweight(k) = detail::phi1(-lam * cfg.dt) * cfg.dt;
    t.conv_sd(k) = k == 0 ? std::sqrt(cfg.dt / 2.0)
                          : std::sqrt((1.0 - t.decay(k) * t.decay(k)) / (8.0 * pi * pi * k * k));
    t.phi(k) = cfg.mollifier.phi(cfg.eps * k);
    t.phi2(k) = t.phi(k) * t.phi(k);
  }
  t.chol_a = detail::cholesky_factor(cfg.diffusion.a);
  t.c_eps_band = c_eps_band(cfg.mollifier, cfg.eps, K);
  const int d = cfg.tensor.dim();
  t.b_shift_plain = Vector::Zero(d);
  t.b_shift_tilde = Vector::Zero(d);
  if (cfg.renorm_policy == RenormPolicy::computed) {
    const Matrix f = f_matrix(cfg.tensor, cfg.diffusion);
    const Matrix g = g_matrix(cfg.tensor, cfg.diffusion);
    const Matrix b = f * c_big_band(cfg.mollifier, cfg.eps, K) +
                     2.0 * g * d_big_band(cfg.mollifier, cfg.eps, K);
    const Matrix bt = f * c_tilde_band(cfg.mollifier, cfg.eps, K) +
                      2.0 * g * d_tilde_band(cfg.mollifier, cfg.eps, K);
    for (int a = 0; a < d; ++a) {
      t.b_shift_plain(a) = 0.5 * cfg.tensor.slice(a).cwiseProduct(b).sum();
      t.b_shift_tilde(a) = 0.5 * cfg.tensor.slice(a).cwiseProduct(bt).sum();
    }
  }
  return t;
}

// One exponential-Euler step of the Galerkin stochastic Burgers dynamics
//   du^a = 1/2 dx^2 u^a dt + F_N^a(u) dt + sigma^a_b dx xi^b.
// The heat factor and the stochastic convolution are exact; modes where the
// cutoff kills F_N evolve as pure OU automatically.
inline SpectralField step_galerkin(const SpectralField& u, const SimConfig& cfg,
                                   const StepperTables& t, const StepDraws& w) {
  const int d = u.dim(), K = u.max_mode();
  const SpectralField f = f_n_operator(u, cfg.tensor, cfg.cutoff_n, cfg.psi);
  SpectralField out(d, K);
  Vector re(d), im(d);
  for (int k = 1; k <= K; ++k) {
    re = t.chol_a * w.g1.col(k);
    im = t.chol_a * w.g2.col(k);
    const double pnoise = cfg.mollified_noise ? t.phi(k) : 1.0;
    const Complex amp = Complex(0.0, 2.0 * pi * k) * pnoise * t.conv_sd(k);
    for (int a = 0; a < d; ++a)
      out.set_mode(a, k,
                   t.decay(k) * u.coeff(a, k) + t.fweight(k) * f.coeff(a, k) +
                       amp * Complex(re(a), im(a)));
  }
  for (int a = 0; a < d; ++a) out.set_mode(a, 0, u.coeff(a, 0));  // conserved exactly
  return out;
}

// One exponential-Euler step of the fixed-eps height dynamics; tilde selects
// the scheme whose nonlinearity is filtered by phi^2(eps D). The zero mode is
// evolved too: it carries the c_eps A subtraction (band-limited, consistent
// with the simulated band) and, under renorm_policy computed, the B shift.
inline SpectralField step_kpz(const SpectralField& h, const SimConfig& cfg, const StepperTables& t,
                              const StepDraws& w, bool tilde) {
  const int d = h.dim(), K = h.max_mode();
  const SpectralField dxh = derivative(h);
  SpectralField n = detail::quadratic_contraction(dxh, dxh, cfg.tensor, 0.5);
  SpectralField out(d, K);
  Vector re(d), im(d);
  Vector shift(d);  // constant subtracted from the zero-mode forcing
  for (int a = 0; a < d; ++a)
    shift(a) = 0.5 * t.c_eps_band * cfg.tensor.slice(a).cwiseProduct(cfg.diffusion.a).sum() +
               (tilde ? t.b_shift_tilde(a) : t.b_shift_plain(a));
  for (int k = 0; k <= K; ++k) {
    re = t.chol_a * w.g1.col(k);
    im = t.chol_a * w.g2.col(k);
    const double filt = tilde ? t.phi2(k) : 1.0;
    for (int a = 0; a < d; ++a) {
      Complex force = n.coeff(a, k);
      if (k == 0) force -= shift(a);
      force *= filt;
      if (k == 0) {
        // heat factor is 1; noise is a plain Brownian increment
        const double next = h.coeff(a, 0).real() + t.fweight(0) * force.real() +
                            t.phi(0) * std::sqrt(2.0) * t.conv_sd(0) * re(a);
        out.set_mode(a, 0, Complex(next, 0.0));
      } else {
        out.set_mode(a, k,
                     t.decay(k) * h.coeff(a, k) + t.fweight(k) * force +
                         t.phi(k) * t.conv_sd(k) * Complex(re(a), im(a)));
      }
    }
  }
  return out;
}

// convenience single-scheme wrappers drawing their own noise
inline SpectralField step_galerkin(const SpectralField& u, const SimConfig& cfg,
                                   const StepperTables& t, RngStream& rng) {
  return step_galerkin(u, cfg, t, draw_step(rng, u.dim(), u.max_mode()));
}
inline SpectralField step_kpz(const SpectralField& h, const SimConfig& cfg,
                              const StepperTables& t, RngStream& rng, bool tilde) {
  return step_kpz(h, cfg, t, draw_step(rng, h.dim(), h.max_mode()), tilde);
}

namespace detail {

template <class Fn>
void run_replicas(int replicas, int workers, Fn&& body) {
  if (workers <= 1) {
    for (int r = 0; r < replicas; ++r) body(r);
    return;
  }
  std::vector<std::thread> pool;
  std::atomic<int> next{0};
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (int r = next.fetch_add(1); r < replicas; r = next.fetch_add(1)) body(r);
    });
  for (auto& th : pool) th.join();
}

}  // namespace detail

struct InvarianceResult {
  ZSummary z;
  int replicas = 0;
  long steps = 0;
  bool pass = false;
};

// Start every replica from the invariant law, evolve the Galerkin dynamics to
// the horizon, and z-test every retained mode covariance against A.
inline InvarianceResult invariance_experiment(const SimConfig& cfg) {
  cfg.validate();
  const int d = cfg.tensor.dim(), K = cfg.modes_k;
  const long steps = static_cast<long>(std::llround(cfg.horizon_t / cfg.dt));
  const StepperTables tables = make_tables(cfg);

  std::vector<std::vector<double>> samples(cfg.replicas);
  detail::run_replicas(cfg.replicas, cfg.workers, [&](int r) {
    RngStream rng(cfg.seed, static_cast<std::uint32_t>(r));
    SpectralField u = sample_mu_a(rng, cfg.diffusion, K);
    for (long i = 0; i < steps; ++i) u = step_galerkin(u, cfg, tables, rng);
    std::vector<double> row;
    row.reserve(std::size_t(K) * d * (d + 1) / 2);
    for (int k = 1; k <= K; ++k)
      for (int a = 0; a < d; ++a)
        for (int b = a; b < d; ++b)
          row.push_back((u.coeff(a, k) * std::conj(u.coeff(b, k))).real());
    samples[r] = std::move(row);
  });

  std::vector<double> targets;
  std::vector<std::string> labels;
  for (int k = 1; k <= K; ++k)
    for (int a = 0; a < d; ++a)
      for (int b = a; b < d; ++b) {
        targets.push_back(cfg.diffusion.a(a, b));
        labels.push_back("k=" + std::to_string(k) + " a=" + std::to_string(a + 1) +
                         " b=" + std::to_string(b + 1));
      }

  InvarianceResult out;
  out.z = covariance_z_test(samples, targets, labels);
  out.replicas = cfg.replicas;
  out.steps = steps;
  out.pass = out.z.max_abs_z <= 4.0 && out.z.frac_ge3 <= 0.01;
  return out;
}

struct DriftResult {
  Vector slope, slope_se, prediction;
  bool sign_ok = false;
  double max_rel_err = 0.0;
  bool pass = false;  // within 25% and correct sign
};

// Coupled pair with common noise draws: plain and filtered height schemes,
// regression of the spatial mean of (h~ - h) against t per component, and the
// fixed-eps band-limited prediction -(1/2) Gamma (F C_band + 2 G D_band).
inline DriftResult drift_experiment(const SimConfig& cfg) {
  cfg.validate();
  const int d = cfg.tensor.dim(), K = cfg.modes_k;
  const CouplingTensor th = hat_transform(cfg.tensor, cfg.diffusion);
  if (!is_trilinear(th, 1e-10 * std::max(1.0, th.max_abs())))
    throw std::invalid_argument("drift_experiment: coupling must be trilinear");

  const long steps = static_cast<long>(std::llround(cfg.horizon_t / cfg.dt));
  const long n_check = 40;
  const long stride = std::max(1L, steps / n_check);
  const StepperTables tables = make_tables(cfg);

  std::vector<std::vector<double>> slopes(cfg.replicas);
  detail::run_replicas(cfg.replicas, cfg.workers, [&](int r) {
    RngStream rng(cfg.seed, static_cast<std::uint32_t>(r));
    SpectralField hp(d, K), ht(d, K);
    std::vector<double> times;
    std::vector<Vector> diffs;
    for (long i = 1; i <= steps; ++i) {
      const StepDraws w = draw_step(rng, d, K);
      hp = step_kpz(hp, cfg, tables, w, false);
      ht = step_kpz(ht, cfg, tables, w, true);
      if (i % stride == 0) {
        times.push_back(double(i) * cfg.dt);
        Vector y(d);
        for (int a = 0; a < d; ++a) y(a) = ht.coeff(a, 0).real() - hp.coeff(a, 0).real();
        diffs.push_back(y);
      }
    }
    // skip the first quarter of the horizon: the chaos structure needs a few
    // relaxation times of the slowest mode before the mean growth is linear
    std::vector<double> ts;
    std::vector<std::vector<double>> ys(d);
    for (std::size_t i = 0; i < times.size(); ++i) {
      if (times[i] < 0.25 * cfg.horizon_t) continue;
      ts.push_back(times[i]);
      for (int a = 0; a < d; ++a) ys[a].push_back(diffs[i](a));
    }
    std::vector<double> row(d);
    for (int a = 0; a < d; ++a) row[a] = linear_fit(ts, ys[a]).slope;
    slopes[r] = std::move(row);
  });

  DriftResult out;
  out.slope.resize(d);
  out.slope_se.resize(d);
  out.prediction.resize(d);
  for (int a = 0; a < d; ++a) {
    std::vector<double> col(cfg.replicas);
    for (int r = 0; r < cfg.replicas; ++r) col[r] = slopes[r][a];
    const MeanSe ms = mean_and_se(col);
    out.slope(a) = ms.mean;
    out.slope_se(a) = ms.se;
  }
  const Matrix f = f_matrix(cfg.tensor, cfg.diffusion);
  const Matrix g = g_matrix(cfg.tensor, cfg.diffusion);
  const Matrix b = f * c_big_band(cfg.mollifier, cfg.eps, K) +
                   2.0 * g * d_big_band(cfg.mollifier, cfg.eps, K);
  for (int a = 0; a < d; ++a)
    out.prediction(a) = -0.5 * cfg.tensor.slice(a).cwiseProduct(b).sum();

  out.sign_ok = true;
  out.max_rel_err = 0.0;
  for (int a = 0; a < d; ++a) {
    if (out.prediction(a) != 0.0) {
      if (out.slope(a) * out.prediction(a) <= 0.0) out.sign_ok = false;
      out.max_rel_err = std::max(out.max_rel_err,
                                 std::abs(out.slope(a) - out.prediction(a)) / std::abs(out.prediction(a)));
    }
  }
  out.pass = out.sign_ok && out.max_rel_err <= 0.25;
  return out;
}

// Single-trajectory driver for the CLI: checkpoints of the field at a fixed
// cadence, plus the zero-mode series for the height schemes.
struct Trajectory {
  std::vector<double> times;
  std::vector<SpectralField> snapshots;
  std::vector<Vector> zero_modes;
};

inline Trajectory simulate_trajectory(const SimConfig& cfg, int checkpoints = 20) {
  cfg.validate();
  const int d = cfg.tensor.dim(), K = cfg.modes_k;
  const long steps = static_cast<long>(std::llround(cfg.horizon_t / cfg.dt));
  const long stride = std::max(1L, steps / std::max(1, checkpoints));
  const StepperTables tables = make_tables(cfg);
  RngStream rng(cfg.seed, 0);

  const bool height = cfg.scheme != Scheme::galerkin_sbe;
  SpectralField state(d, K);
  if (!height) state = sample_mu_a(rng, cfg.diffusion, K);

  Trajectory out;
  auto record = [&](double t, const SpectralField& f) {
    out.times.push_back(t);
    out.snapshots.push_back(f);
    Vector z(d);
    for (int a = 0; a < d; ++a) z(a) = f.coeff(a, 0).real();
    out.zero_modes.push_back(z);
  };
  record(0.0, state);
  for (long i = 1; i <= steps; ++i) {
    switch (cfg.scheme) {
      case Scheme::galerkin_sbe:
        state = step_galerkin(state, cfg, tables, rng);
        break;
      case Scheme::kpz_plain:
        state = step_kpz(state, cfg, tables, rng, false);
        break;
      case Scheme::kpz_tilde:
        state = step_kpz(state, cfg, tables, rng, true);
        break;
      case Scheme::kpz_pair:
        throw std::invalid_argument("simulate_trajectory: kpz_pair is driven by drift_experiment");
    }
    if (i % stride == 0 || i == steps) record(double(i) * cfg.dt, state);
  }
  return out;
}

}  // namespace ckpz

#endif  // CKPZ_SIMULATOR_HPP
