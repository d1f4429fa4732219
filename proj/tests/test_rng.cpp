#include <doctest.h>

#include "kmeclip/rng.hpp"

using kmeclip::Rng;

TEST_CASE("identical seeds give identical streams") {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("derive separates streams") {
  CHECK(Rng::derive(1, 0, 0) != Rng::derive(1, 1, 0));
  CHECK(Rng::derive(1, 0, 0) != Rng::derive(1, 0, 1));
  CHECK(Rng::derive(1, 2, 3) == Rng::derive(1, 2, 3));
}

TEST_CASE("uniform stays in [0, 1) with sane mean") {
  Rng rng(7);
  double sum = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  CHECK(sum / n == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("normal has roughly standard moments") {
  Rng rng(9);
  double sum = 0.0, sum_sq = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const double x = rng.normal();
    sum += x;
    sum_sq += x * x;
  }
  CHECK(sum / n == doctest::Approx(0.0).epsilon(1.0));
  CHECK(std::abs(sum / n) < 0.05);
  CHECK(sum_sq / n == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("categorical matches its weights") {
  Rng rng(11);
  const std::vector<double> w{0.1, 0.6, 0.3};
  std::vector<int> counts(3, 0);
  const int n = 30000;
  for (int i = 0; i < n; ++i) counts[rng.categorical(w)]++;
  for (int k = 0; k < 3; ++k)
    CHECK(static_cast<double>(counts[k]) / n ==
          doctest::Approx(w[k]).epsilon(0.1));
  CHECK_THROWS(rng.categorical({0.0, 0.0}));
}

TEST_CASE("unit_vector is unit norm") {
  Rng rng(13);
  for (int d : {2, 3, 8})
    CHECK(rng.unit_vector(d).norm() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("index is in range and throws on nonpositive n") {
  Rng rng(17);
  for (int i = 0; i < 1000; ++i) {
    const int v = rng.index(7);
    REQUIRE(v >= 0);
    REQUIRE(v < 7);
  }
  CHECK_THROWS(rng.index(0));
}
