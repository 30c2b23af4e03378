#include <doctest.h>

#include "ckpz/random_tensors.hpp"
#include "ckpz/tensor.hpp"
#include "helpers.hpp"

using namespace ckpz;
using namespace ckpz::testing;

namespace {

// independent quadruple-loop oracle for the hat transform
CouplingTensor hat_oracle(const CouplingTensor& t, const Matrix& sigma) {
  const int d = t.dim();
  const Matrix tau = sigma.inverse();
  std::vector<Matrix> out(d, Matrix::Zero(d, d));
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      for (int c = 0; c < d; ++c) {
        double s = 0.0;
        for (int ap = 0; ap < d; ++ap)
          for (int bp = 0; bp < d; ++bp)
            for (int cp = 0; cp < d; ++cp)
              s += tau(a, ap) * t(ap, bp, cp) * sigma(bp, b) * sigma(cp, c);
        out[a](b, c) = s;
      }
  return CouplingTensor(d, std::move(out));
}

double max_abs_diff(const CouplingTensor& x, const CouplingTensor& y) {
  double m = 0.0;
  for (int a = 0; a < x.dim(); ++a)
    m = std::max(m, (x.slice(a) - y.slice(a)).cwiseAbs().maxCoeff());
  return m;
}

}  // namespace

TEST_CASE("bilinearity validation") {
  CHECK(validate_bilinear(scalar_tensor(1.0)));
  CHECK(validate_bilinear(trilinear_d2_tensor()));

  Matrix g1(2, 2), g2(2, 2);
  g1 << 0, 1, 0, 0;  // Gamma^1_{12}=1, Gamma^1_{21}=0
  g2 << 0, 0, 0, 0;
  CHECK_FALSE(validate_bilinear(CouplingTensor(2, {g1, g2})));

  // declared d inconsistent with slice shapes
  CHECK_THROWS_AS(CouplingTensor(3, {g1, g2}), std::invalid_argument);
  CHECK_THROWS_AS(CouplingTensor(2, {g1, g2, g2}), std::invalid_argument);
}

TEST_CASE("hat transform") {
  SUBCASE("identity sigma leaves the tensor unchanged") {
    auto t = trilinear_d2_tensor();
    auto th = hat_transform(t, DiffusionPair::identity(2));
    CHECK(max_abs_diff(t, th) == 0.0);
  }
  SUBCASE("scalar case: tau*Gamma*sigma*sigma = (1/2)*1*2*2 = 2") {
    Matrix s(1, 1);
    s << 2.0;
    auto th = hat_transform(scalar_tensor(1.0), DiffusionPair::from_sigma(s));
    CHECK(th(0, 0, 0) == doctest::Approx(2.0).epsilon(1e-14));
  }
  SUBCASE("random d=3 tensor matches loop oracle") {
    RngStream rng(101, 0);
    for (int trial = 0; trial < 20; ++trial) {
      auto dp = random_diffusion_pair(rng, 3);
      auto t = random_bilinear_tensor(rng, 3);
      CHECK(max_abs_diff(hat_transform(t, dp), hat_oracle(t, dp.sigma)) < 1e-13);
    }
  }
  SUBCASE("hat followed by inverse hat is the identity") {
    RngStream rng(102, 0);
    for (int trial = 0; trial < 50; ++trial) {
      auto dp = random_diffusion_pair(rng, 3);
      auto t = random_bilinear_tensor(rng, 3);
      auto back = inverse_hat_transform(hat_transform(t, dp), dp);
      CHECK(max_abs_diff(t, back) < 1e-12 * (1.0 + t.max_abs()));
    }
  }
  SUBCASE("output of hat transform is bilinear up to roundoff") {
    RngStream rng(103, 0);
    auto dp = random_diffusion_pair(rng, 3);
    auto th = hat_transform(random_bilinear_tensor(rng, 3), dp);
    for (int a = 0; a < 3; ++a)
      CHECK((th.slice(a) - th.slice(a).transpose()).cwiseAbs().maxCoeff() < 1e-13);
  }
}

TEST_CASE("trilinear condition") {
  const auto id2 = DiffusionPair::identity(2);
  CHECK(is_trilinear(hat_transform(trilinear_d2_tensor(), id2), 1e-14));
  // Ertas-Kardar with lambda1=1, lambda2=2: hat^1_{22}=2 but hat^2_{21}=1
  CHECK_FALSE(is_trilinear(hat_transform(ertas_kardar_tensor(1.0, 2.0), id2), 1e-10));
  CHECK(is_trilinear(CouplingTensor::zero(3), 0.0));
}

TEST_CASE("F matrix") {
  const auto id1 = DiffusionPair::identity(1);
  const auto id2 = DiffusionPair::identity(2);
  CHECK(f_matrix(scalar_tensor(1.0), id1)(0, 0) == doctest::Approx(1.0));
  CHECK(f_matrix(CouplingTensor::zero(2), id2).cwiseAbs().maxCoeff() == 0.0);

  // brute force sum_{ab} Gamma^b_{ab} Gamma^g_{ab} for the d=2 trilinear tensor
  Matrix expect(2, 2);
  expect << 7, 6, 6, 7;
  CHECK((f_matrix(trilinear_d2_tensor(), id2) - expect).cwiseAbs().maxCoeff() < 1e-13);

  SUBCASE("symmetric output") {
    RngStream rng(104, 0);
    auto dp = random_diffusion_pair(rng, 3);
    Matrix f = f_matrix(random_bilinear_tensor(rng, 3), dp);
    CHECK((f - f.transpose()).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("G matrix and the F=G equivalence") {
  const auto id1 = DiffusionPair::identity(1);
  CHECK(g_matrix(scalar_tensor(1.0), id1)(0, 0) == doctest::Approx(1.0));
  CHECK(g_matrix(CouplingTensor::zero(2), DiffusionPair::identity(2)).cwiseAbs().maxCoeff() == 0.0);

  SUBCASE("hat-route expressions agree with the direct contractions") {
    RngStream rng(105, 0);
    for (int trial = 0; trial < 25; ++trial) {
      auto dp = random_diffusion_pair(rng, 3);
      auto t = random_bilinear_tensor(rng, 3);
      Matrix f = f_matrix(t, dp), g = g_matrix(t, dp);
      CHECK((f - f_matrix_hat_route(t, dp)).cwiseAbs().maxCoeff() < 1e-11 * (1 + f.cwiseAbs().maxCoeff()));
      CHECK((g - g_matrix_hat_route(t, dp)).cwiseAbs().maxCoeff() < 1e-11 * (1 + g.cwiseAbs().maxCoeff()));
    }
  }
  SUBCASE("trilinear tensors give F = G") {
    RngStream rng(106, 0);
    for (int trial = 0; trial < 100; ++trial) {
      auto dp = random_diffusion_pair(rng, 3);
      auto t = random_trilinear_tensor(rng, dp);
      Matrix f = f_matrix(t, dp), g = g_matrix(t, dp);
      CHECK((f - g).cwiseAbs().maxCoeff() <= 1e-12 * (1.0 + f.cwiseAbs().maxCoeff()));
    }
  }
  SUBCASE("generic bilinear tensors give F != G") {
    RngStream rng(107, 0);
    int separated = 0;
    for (int trial = 0; trial < 100; ++trial) {
      auto dp = random_diffusion_pair(rng, 3);
      auto t = random_bilinear_tensor(rng, 3);
      Matrix f = f_matrix(t, dp), g = g_matrix(t, dp);
      if ((f - g).cwiseAbs().maxCoeff() > 1e-6 * (1.0 + f.cwiseAbs().maxCoeff())) ++separated;
    }
    CHECK(separated >= 99);
  }
}

TEST_CASE("no-log condition") {
  const auto id2 = DiffusionPair::identity(2);
  SUBCASE("implied by trilinearity") {
    RngStream rng(108, 0);
    for (int trial = 0; trial < 100; ++trial) {
      auto th = random_fully_symmetric_tensor(rng, 3);
      CHECK(no_log_condition(th, default_no_log_tol(th)));
    }
  }
  SUBCASE("implied by a Cole-Hopf factorization") {
    auto th = hat_transform(ertas_kardar_tensor(1.0, 2.0), id2);
    CHECK(no_log_condition(th, default_no_log_tol(th)));
  }
  CHECK(no_log_condition(CouplingTensor::zero(2), 0.0));
}

TEST_CASE("Cole-Hopf factorization check") {
  CHECK(verify_cole_hopf(ertas_kardar_tensor(1.0, 2.0), ertas_kardar_s(1.0, 2.0), 1e-12));
  CHECK(verify_cole_hopf(scalar_tensor(1.0), ComplexMatrix::Identity(1, 1), 1e-14));
  // the trilinear d=2 tensor is off-diagonal coupled; identity s gives a diagonal-only tensor
  CHECK_FALSE(verify_cole_hopf(trilinear_d2_tensor(), ComplexMatrix::Identity(2, 2), 1e-6));
  CHECK_THROWS_AS(verify_cole_hopf(trilinear_d2_tensor(), ComplexMatrix::Zero(2, 2), 1e-6),
                  numerical_error);
}

TEST_CASE("drift constant c^alpha") {
  const auto id1 = DiffusionPair::identity(1);
  const auto id2 = DiffusionPair::identity(2);
  CHECK(std::abs(c_shift(scalar_tensor(1.0), id1)(0) - 1.0 / 24.0) <= 1e-15);
  CHECK(c_shift(CouplingTensor::zero(2), id2).cwiseAbs().maxCoeff() == 0.0);

  // (1/24) Gamma^a_{bg} F^{bg} with F = [[7,6],[6,7]] gives 33/24 = 11/8 per component
  Vector c = c_shift(trilinear_d2_tensor(), id2);
  CHECK(c(0) == doctest::Approx(11.0 / 8.0).epsilon(1e-14));
  CHECK(c(1) == doctest::Approx(11.0 / 8.0).epsilon(1e-14));

  SUBCASE("sigma-hat route equals (1/24) Gamma F route") {
    RngStream rng(109, 0);
    for (int trial = 0; trial < 100; ++trial) {
      auto dp = random_diffusion_pair(rng, 3);
      auto t = random_trilinear_tensor(rng, dp);
      Vector via_hat = c_shift(t, dp);
      Matrix f = f_matrix(t, dp);
      Vector via_f(3);
      for (int a = 0; a < 3; ++a) via_f(a) = t.slice(a).cwiseProduct(f).sum() / 24.0;
      CHECK((via_hat - via_f).cwiseAbs().maxCoeff() < 1e-12 * (1.0 + via_f.cwiseAbs().maxCoeff()));
    }
  }
  SUBCASE("refuses non-trilinear input") {
    CHECK_THROWS_AS(c_shift(ertas_kardar_tensor(1.0, 2.0), id2), std::invalid_argument);
  }
}

TEST_CASE("F and G are insensitive to the lower-index order used to build Gamma") {
  RngStream rng(110, 0);
  auto dp = random_diffusion_pair(rng, 3);
  auto t = random_bilinear_tensor(rng, 3);
  std::vector<Matrix> swapped;
  for (int a = 0; a < 3; ++a) swapped.push_back(t.slice(a).transpose());
  CouplingTensor ts(3, std::move(swapped));
  CHECK((f_matrix(t, dp) - f_matrix(ts, dp)).cwiseAbs().maxCoeff() < 1e-13);
  CHECK((g_matrix(t, dp) - g_matrix(ts, dp)).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("tensor report aggregates the checks") {
  auto r = analyze_tensor(trilinear_d2_tensor(), DiffusionPair::identity(2));
  CHECK(r.is_bilinear);
  CHECK(r.is_trilinear);
  CHECK(r.satisfies_no_log);
  CHECK((r.f_matrix - r.g_matrix).cwiseAbs().maxCoeff() < 1e-12 * (1 + r.f_matrix.cwiseAbs().maxCoeff()));
  CHECK(r.c_shift.size() == 2);

  auto r2 = analyze_tensor(ertas_kardar_tensor(1.0, 2.0), DiffusionPair::identity(2));
  CHECK(r2.is_bilinear);
  CHECK_FALSE(r2.is_trilinear);
  CHECK(r2.satisfies_no_log);
  CHECK(r2.c_shift.size() == 0);
}
