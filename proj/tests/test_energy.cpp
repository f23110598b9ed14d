#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "tetra/energy.hpp"
#include "tetra/errors.hpp"

using namespace tetra;

namespace {

GammaMatrix generic_gamma() { return GammaMatrix({{{1.3, 0.4, 0.2}, {0.4, 0.9, 0.6}, {0.2, 0.6, 2.1}}}); }

GammaMatrix permuted(const GammaMatrix& g, const std::array<int, 3>& p) {
  std::array<std::array<double, 3>, 3> out{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) out[i][j] = g(p[i], p[j]);
  return GammaMatrix(out);
}

}  // namespace

TEST_CASE("gamma validation") {
  CHECK_THROWS_AS(GammaMatrix({{{1, 0.5, 0}, {0.4, 1, 0}, {0, 0, 1}}}), DomainError);
  CHECK_THROWS_AS(GammaMatrix({{{-1, 0, 0}, {0, 1, 0}, {0, 0, 1}}}), DomainError);
  CHECK_THROWS_AS(GammaMatrix({{{INFINITY, 0, 0}, {0, 1, 0}, {0, 0, 1}}}), DomainError);
  // negative off-diagonals are allowed here
  CHECK_NOTHROW(GammaMatrix({{{1, -0.5, 0}, {-0.5, 1, 0}, {0, 0, 1}}}));
  CHECK(GammaMatrix::identity().is_diagonal());
  CHECK_FALSE(generic_gamma().is_diagonal());
  CHECK(GammaMatrix::identity().scaled(2.0)(1, 1) == 2.0);
}

TEST_CASE("e0 closed forms") {
  const auto I = GammaMatrix::identity();
  CHECK(e0(MassTriple(4 * kPi, 0, 0), I) == doctest::Approx(8 * kPi).epsilon(1e-14));

  const MassTriple m(1.0, 0.6, 1.7);
  CHECK(e0(m, GammaMatrix::zero()) == perimeter(m));

  GammaMatrix cross({{{0, 2 * kPi, 0}, {2 * kPi, 0, 0}, {0, 0, 0}}});
  CHECK(e0(MassTriple(1, 1, 0), cross) == doctest::Approx(double_bubble_perimeter(1, 1) + 1.0).epsilon(1e-14));
}

TEST_CASE("e0 gradient") {
  auto g = e0_gradient(MassTriple(kPi, 0, 0), GammaMatrix::identity());
  REQUIRE(g[0]);
  CHECK(*g[0] == doctest::Approx(1.5).epsilon(1e-14));
  CHECK_FALSE(g[1]);
  CHECK_FALSE(g[2]);

  const MassTriple ones(1, 1, 1);
  auto pg = perimeter_gradient(ones);
  auto g0 = e0_gradient(ones, GammaMatrix::zero());
  for (int i = 0; i < 3; ++i) CHECK(*g0[i] == doctest::Approx(pg[i]).epsilon(1e-12));

  // central differences on a generic triple
  const auto G = generic_gamma();
  const std::array<double, 3> m{2.0, 1.0, 0.5};
  auto ga = e0_gradient(MassTriple(m), G);
  for (int i = 0; i < 3; ++i) {
    const double h = 1e-4 * m[i];
    auto p = m, q = m;
    p[i] += h;
    q[i] -= h;
    const double fd = (e0(MassTriple(p), G) - e0(MassTriple(q), G)) / (2 * h);
    CHECK(std::abs(*ga[i] - fd) < 1e-6 * std::abs(fd));
  }
}

TEST_CASE("e0 invariants") {
  const auto G = generic_gamma();
  const std::array<double, 3> m{1.4, 0.7, 2.2};
  const double base = e0(MassTriple(m), G);
  for (auto p : std::vector<std::array<int, 3>>{{1, 0, 2}, {2, 1, 0}, {1, 2, 0}}) {
    const MassTriple mp(m[p[0]], m[p[1]], m[p[2]]);
    CHECK(e0(mp, permuted(G, p)) == doctest::Approx(base).epsilon(1e-12));
  }

  // lobe to zero: triple -> double -> single
  const double dbl = e0(MassTriple(1.4, 0.7, 0), G);
  CHECK(std::abs(e0(MassTriple(1.4, 0.7, 1e-8), G) - dbl) < 1e-3);
  const double single = e0(MassTriple(1.4, 0, 0), G);
  CHECK(std::abs(e0(MassTriple(1.4, 1e-8, 0), G) - single) < 1e-3);

  // diagonal monotonicity
  auto bumped = G.rows();
  bumped[1][1] += 0.1;
  CHECK(e0(MassTriple(m), GammaMatrix(bumped)) > base);
}

TEST_CASE("configuration energy") {
  const auto Z = GammaMatrix::zero();
  Configuration two({MassTriple(kPi, 0, 0), MassTriple(kPi, 0, 0)});
  CHECK(configuration_energy(two, Z) == doctest::Approx(4 * kPi).epsilon(1e-14));

  Configuration merged({MassTriple(1, 1, 1)});
  Configuration apart({MassTriple(1, 0, 0), MassTriple(0, 1, 0), MassTriple(0, 0, 1)});
  CHECK(configuration_energy(merged, Z) < configuration_energy(apart, Z));

  std::vector<MassTriple> five(5, MassTriple(8, 0, 0));
  const double f5 = configuration_energy(Configuration(five), GammaMatrix::identity());
  CHECK(f5 == doctest::Approx(2 * std::sqrt(40 * kPi * 5) + 1600 / (4 * kPi * 5)).epsilon(1e-13));
  CHECK(f5 == doctest::Approx(75.60).epsilon(1e-3));

  // order independence
  std::vector<MassTriple> mix{MassTriple(1, 2, 0.5), MassTriple(0, 0.3, 0), MassTriple(4, 0, 1)};
  const double e = configuration_energy(Configuration(mix), generic_gamma());
  std::reverse(mix.begin(), mix.end());
  CHECK(configuration_energy(Configuration(mix), generic_gamma()) == e);
}

TEST_CASE("configuration invariants") {
  Configuration c({MassTriple(1, 2, 0), MassTriple(0.5, 0, 0)}, {1.5, 2.0, 0.0});
  CHECK(c.totals()[0] == 1.5);
  CHECK(c.lobe_counts() == std::array<int, 3>{2, 1, 0});
  CHECK(c.count_double(0, 1) == 1);
  CHECK(c.count_single(0) == 1);
  CHECK_THROWS_AS(Configuration({MassTriple(1, 2, 0)}, {1.5, 2.0, 0.0}), DomainError);
  auto canon = c.canonical();
  CHECK(canon[0].kind() == BubbleKind::Double);
}

TEST_CASE("stable sum") {
  std::vector<double> v{1e16, 1.0, -1e16, 1.0};
  CHECK(stable_sum(v) == 2.0);
  std::vector<double> w(1000, 0.1);
  const double s = stable_sum(w);
  std::reverse(w.begin(), w.end());
  CHECK(stable_sum(w) == s);
  CHECK(s == doctest::Approx(100.0).epsilon(1e-15));
}
