#include <doctest.h>

#include <cmath>

#include "kmeclip/kernel.hpp"
#include "kmeclip/rng.hpp"

using namespace kmeclip;

namespace {
RkhsExpansion random_expansion(Rng& rng, const KernelSpec& kernel, int n,
                               int d) {
  std::vector<Eigen::VectorXd> pts;
  std::vector<double> coeffs;
  for (int i = 0; i < n; ++i) {
    pts.push_back(rng.unit_vector(d));
    coeffs.push_back(rng.uniform(-2.0, 2.0));
  }
  return RkhsExpansion(pts, coeffs, kernel);
}
}  // namespace

TEST_CASE("kernel_eval known values") {
  const KernelSpec k1(1.0);
  Eigen::VectorXd u(2), v(2);
  u << 1.0, 0.0;
  v << 0.0, 1.0;
  CHECK(kernel_eval(k1, u, u) == 1.0);
  CHECK(kernel_eval(k1, u, v) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
  const KernelSpec k2(0.5);
  // ||u-v||^2 = 2, sigma = 0.5 -> exp(-2 / (2 * 0.25)) = exp(-4).
  CHECK(kernel_eval(k2, u, v) == doctest::Approx(std::exp(-4.0)).epsilon(1e-15));
  CHECK(log_kernel_eval(k2, u, v) == doctest::Approx(-4.0).epsilon(1e-15));
}

TEST_CASE("KernelSpec validates sigma and exposes tau") {
  CHECK_THROWS(KernelSpec(0.0));
  CHECK_THROWS(KernelSpec(-1.0));
  CHECK(KernelSpec(0.5).tau() == doctest::Approx(4.0).epsilon(1e-15));
}

TEST_CASE("log_kernel_eval avoids the exp/log round trip at tiny sigma") {
  const KernelSpec k(0.01);
  Eigen::VectorXd u(2), v(2);
  u << 1.0, 0.0;
  v << -1.0, 0.0;
  // ||u-v||^2 = 4 -> log k = -4 / (2e-4) = -20000; exp underflows to 0.
  CHECK(kernel_eval(k, u, v) == 0.0);
  CHECK(log_kernel_eval(k, u, v) == doctest::Approx(-20000.0).epsilon(1e-12));
}

TEST_CASE("rkhs_inner reproduces the single-term closed form") {
  const KernelSpec k(1.3);
  Rng rng(3);
  const Eigen::VectorXd u = rng.unit_vector(3), v = rng.unit_vector(3);
  const RkhsExpansion f({u}, {2.0}, k), g({v}, {-0.5}, k);
  CHECK(rkhs_inner(f, g) ==
        doctest::Approx(2.0 * -0.5 * kernel_eval(k, u, v)).epsilon(1e-14));
}

TEST_CASE("rkhs_inner is symmetric and bilinear") {
  const KernelSpec k(0.8);
  Rng rng(5);
  const RkhsExpansion f = random_expansion(rng, k, 4, 3);
  const RkhsExpansion g = random_expansion(rng, k, 3, 3);
  const RkhsExpansion h = random_expansion(rng, k, 5, 3);
  CHECK(rkhs_inner(f, g) == doctest::Approx(rkhs_inner(g, f)).epsilon(1e-12));

  // alpha f + g as one expansion.
  const double alpha = 1.7;
  std::vector<Eigen::VectorXd> pts = f.points;
  std::vector<double> coeffs;
  for (double c : f.coefficients) coeffs.push_back(alpha * c);
  pts.insert(pts.end(), g.points.begin(), g.points.end());
  coeffs.insert(coeffs.end(), g.coefficients.begin(), g.coefficients.end());
  const RkhsExpansion combo(pts, coeffs, k);
  CHECK(rkhs_inner(combo, h) ==
        doctest::Approx(alpha * rkhs_inner(f, h) + rkhs_inner(g, h))
            .epsilon(1e-10));
}

TEST_CASE("Cauchy-Schwarz and nonnegative norms") {
  const KernelSpec k(1.1);
  Rng rng(8);
  for (int t = 0; t < 20; ++t) {
    const RkhsExpansion f = random_expansion(rng, k, 4, 2);
    const RkhsExpansion g = random_expansion(rng, k, 4, 2);
    const double inner = rkhs_inner(f, g);
    const double nf = rkhs_norm_sq(f), ng = rkhs_norm_sq(g);
    CHECK(nf >= 0.0);
    CHECK(inner * inner <= nf * ng * (1.0 + 1e-9) + 1e-12);
  }
}

TEST_CASE("rkhs_inner rejects mismatched kernels and dimensions") {
  Rng rng(10);
  const RkhsExpansion f = random_expansion(rng, KernelSpec(1.0), 2, 3);
  const RkhsExpansion g = random_expansion(rng, KernelSpec(2.0), 2, 3);
  const RkhsExpansion h = random_expansion(rng, KernelSpec(1.0), 2, 4);
  CHECK_THROWS(rkhs_inner(f, g));
  CHECK_THROWS(rkhs_inner(f, h));
}

TEST_CASE("empty expansion is the zero function") {
  const KernelSpec k(1.0);
  const RkhsExpansion zero({}, {}, k);
  Rng rng(12);
  const RkhsExpansion f = random_expansion(rng, k, 3, 2);
  CHECK(rkhs_inner(zero, f) == 0.0);
  CHECK(rkhs_norm_sq(zero) == 0.0);
}
