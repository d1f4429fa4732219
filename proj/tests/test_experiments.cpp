#include <doctest.h>

#include <cstdlib>

#include "kmeclip/experiments.hpp"
#include "kmeclip/io.hpp"

using namespace kmeclip;

TEST_CASE("format_double round-trips exactly") {
  for (double v : {0.1, 1.0 / 3.0, 2.2250738585072014e-308, 12345.678901234567,
                   -0.0, 1e300}) {
    const std::string s = format_double(v);
    CHECK(std::strtod(s.c_str(), nullptr) == v);
  }
}

TEST_CASE("experiment CSV output is byte-identical for a fixed seed") {
  const ExperimentResult a = run_prop2({1.0}, 50, 4, 123);
  const ExperimentResult b = run_prop2({1.0}, 50, 4, 123);
  REQUIRE(a.csv.size() == 1);
  CHECK(a.csv[0].second == b.csv[0].second);
  CHECK(a.passed);

  const ExperimentResult c = run_prop2({1.0}, 50, 4, 124);
  CHECK(c.csv[0].second != a.csv[0].second);
}

TEST_CASE("small experiment runs report sane summaries") {
  const ExperimentResult lemma = run_lemma8(5, {1e-3}, 7);
  CHECK(lemma.passed);
  CHECK(lemma.summary["results"]["failures"].get<int>() == 0);

  const ExperimentResult gap = run_thm3(5, {1e-3}, 7);
  CHECK(gap.passed);

  const ExperimentResult quad = run_thm5(8, 2, {4, 16, 64}, 30, 1.0, 7);
  CHECK(quad.summary["results"].contains("slope"));

  const ExperimentResult retr = run_retrieval(4, {1, 5, 10});
  CHECK(retr.passed);
  CHECK(retr.csv[0].second.find("direction,k,accuracy,n_ties") == 0);
}
