#include <doctest.h>

#include <cmath>

#include <nlohmann/json.hpp>

#include "kmeclip/embedding.hpp"
#include "kmeclip/rng.hpp"

using namespace kmeclip;

TEST_CASE("single-point log similarity equals the vector form plus constant") {
  Rng rng(21);
  for (double sigma : {0.1, 1.0, 3.0}) {
    const KernelSpec kernel(sigma);
    const double tau = sigma * sigma;
    for (int t = 0; t < 50; ++t) {
      const Eigen::VectorXd u = rng.unit_vector(5), v = rng.unit_vector(5);
      const PointSetEmbedding a({u}, {1.0}), b({v}, {1.0});
      const double lhs = kme_similarity(a, b, kernel);
      const double rhs =
          clip_similarity(ClipEmbedding(u, tau), ClipEmbedding(v, tau)) +
          prop2_constant(kernel);
      CHECK(std::abs(lhs - rhs) < 1e-12);
    }
  }
}

TEST_CASE("kme_similarity closed form for one weighted point per side") {
  const KernelSpec kernel(0.7);
  Rng rng(22);
  const Eigen::VectorXd u = rng.unit_vector(3), v = rng.unit_vector(3);
  const PointSetEmbedding a({u}, {0.4}), b({v}, {2.5});
  CHECK(kme_similarity(a, b, kernel) ==
        doctest::Approx(std::log(0.4) + std::log(2.5) +
                        log_kernel_eval(kernel, u, v))
            .epsilon(1e-13));
}

TEST_CASE("wpse_similarity is the raw weighted double sum") {
  const KernelSpec kernel(1.0);
  Rng rng(23);
  std::vector<Eigen::VectorXd> pa{rng.unit_vector(3), rng.unit_vector(3)};
  std::vector<Eigen::VectorXd> pb{rng.unit_vector(3), rng.unit_vector(3)};
  const PointSetEmbedding a(pa, {0.5, 1.5}), b(pb, {2.0, 0.25});
  double expected = 0.0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      expected += a.weights()[i] * b.weights()[j] *
                  kernel_eval(kernel, pa[i], pb[j]);
  CHECK(wpse_similarity(a, b, kernel) ==
        doctest::Approx(expected).epsilon(1e-13));
  CHECK(kme_similarity(a, b, kernel) ==
        doctest::Approx(std::log(expected)).epsilon(1e-12));
}

TEST_CASE("kme_similarity survives tiny sigma where the raw sum underflows") {
  const KernelSpec kernel(0.005);
  Eigen::VectorXd u(2), v(2);
  u << 1.0, 0.0;
  v << -1.0, 0.0;
  const PointSetEmbedding a({u}, {1.0}), b({v}, {1.0});
  CHECK(wpse_similarity(a, b, kernel) == 0.0);
  CHECK(std::isfinite(kme_similarity(a, b, kernel)));
  CHECK(kme_similarity(a, b, kernel) ==
        doctest::Approx(log_kernel_eval(kernel, u, v)).epsilon(1e-12));
}

TEST_CASE("constructor validation") {
  Rng rng(24);
  const Eigen::VectorXd u = rng.unit_vector(3);
  CHECK_THROWS(PointSetEmbedding({2.0 * u}, {1.0}));        // off the sphere
  CHECK_THROWS(PointSetEmbedding({u}, {0.0}));              // weight <= 0
  CHECK_THROWS(PointSetEmbedding({u}, {-1.0}));
  CHECK_THROWS(PointSetEmbedding({}, {}));                  // empty
  CHECK_THROWS(PointSetEmbedding({u, u}, {1.0}));           // length mismatch
  CHECK_NOTHROW(PointSetEmbedding::unchecked({2.0 * u}, {1.0}));
}

TEST_CASE("json round trip") {
  Rng rng(25);
  const PointSetEmbedding a({rng.unit_vector(3), rng.unit_vector(3)},
                            {0.5, 1.25});
  const PointSetEmbedding back = PointSetEmbedding::from_json(a.to_json());
  REQUIRE(back.size() == a.size());
  for (int i = 0; i < a.size(); ++i) {
    CHECK(back.weights()[i] == a.weights()[i]);
    CHECK((back.points()[i] - a.points()[i]).norm() == 0.0);
  }
}

TEST_CASE("clip_similarity value and tau mismatch") {
  Eigen::VectorXd u(2), v(2);
  u << 1.0, 0.0;
  v << 0.0, 1.0;
  CHECK(clip_similarity(ClipEmbedding(u, 0.5), ClipEmbedding(u, 0.5)) ==
        doctest::Approx(2.0).epsilon(1e-15));
  CHECK(clip_similarity(ClipEmbedding(u, 0.5), ClipEmbedding(v, 0.5)) ==
        doctest::Approx(0.0));
  CHECK_THROWS(clip_similarity(ClipEmbedding(u, 0.5), ClipEmbedding(v, 0.6)));
}

TEST_CASE("prop2_constant is -1/sigma^2") {
  CHECK(prop2_constant(KernelSpec(2.0)) == doctest::Approx(-0.25).epsilon(1e-15));
}
