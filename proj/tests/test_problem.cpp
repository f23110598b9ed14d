#include "doctest.h"
#include "tetra/problem.hpp"

using namespace tetra;

TEST_CASE("problem file parsing") {
  auto p = parse_problem(R"({"schema_version": 1, "M": [40, 0, 0],
    "Gamma": [[1, 0, 0], [0, 1, 0], [0, 0, 1]], "seed": 7, "count_cap": 10,
    "configuration": [[1, 0.7, 0.3]], "eta": [0.01, 0.001], "output": "t.csv"})");
  REQUIRE(p.M);
  CHECK((*p.M)[0] == 40.0);
  CHECK(p.gamma == GammaMatrix::identity());
  CHECK(p.count_cap == 10);
  CHECK(p.configuration.size() == 1);
  CHECK(p.eta.size() == 2);
  auto o = p.minimize_options();
  CHECK(o.count_cap == 10);
  CHECK(o.inner.seed == 7);

  auto bare = parse_problem(R"({"schema_version": 1})");
  CHECK_FALSE(bare.M);
  CHECK(bare.gamma == GammaMatrix::zero());
  CHECK_THROWS_AS(bare.minimize_options(), ProblemError);
}

TEST_CASE("problem file rejections") {
  CHECK_THROWS_AS(parse_problem("{"), ProblemError);
  CHECK_THROWS_AS(parse_problem("[]"), ProblemError);
  CHECK_THROWS_AS(parse_problem(R"({"M": [1, 1, 1]})"), ProblemError);
  CHECK_THROWS_AS(parse_problem(R"({"schema_version": 2})"), ProblemError);
  CHECK_THROWS_AS(parse_problem(R"({"schema_version": 1, "colour": 1})"), ProblemError);
  CHECK_THROWS_AS(parse_problem(R"({"schema_version": 1, "Gamma": [[1, 2, 0], [0, 1, 0], [0, 0, 1]]})"), ProblemError);
  CHECK_THROWS_AS(parse_problem(R"({"schema_version": 1, "M": [1, -1, 0]})"), ProblemError);
  CHECK_THROWS_AS(parse_problem(R"({"schema_version": 1, "eta": [1.0]})"), ProblemError);
  CHECK_THROWS_AS(parse_problem(R"({"schema_version": 1, "configuration": [[0, 0, 0]]})"), ProblemError);
  CHECK_THROWS_AS(parse_problem(R"({"schema_version": 1, "count_cap": 0})"), ProblemError);
  CHECK_THROWS_AS(load_problem("/nonexistent/problem.json"), ProblemError);
}
