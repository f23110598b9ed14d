#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "tetra/errors.hpp"
#include "tetra/geometry.hpp"

using namespace tetra;

namespace {

std::vector<MassTriple> log_grid(double lo, double hi, int n) {
  std::vector<double> v;
  for (int i = 0; i < n; ++i) v.push_back(lo * std::pow(hi / lo, n == 1 ? 0.0 : double(i) / (n - 1)));
  std::vector<MassTriple> out;
  for (double a : v)
    for (double b : v)
      for (double c : v) out.emplace_back(a, b, c);
  return out;
}

// Three straight walls of length L at 120 degrees; each lobe is a triangle
// with apex angle 120 plus a half disk on the chord L*sqrt(3).
double symmetric_oracle(double m) {
  const double tri = 0.5 * std::sin(2.0 * kPi / 3.0);  // per L^2
  const double half_disk = 0.5 * kPi * 0.75;             // r = L*sqrt(3)/2
  const double len = std::sqrt(m / (tri + half_disk));
  return 3.0 * len + 3.0 * kPi * len * std::sqrt(3.0) / 2.0;
}

}  // namespace

TEST_CASE("single bubble closed forms") {
  auto g = solve_single(kPi);
  CHECK(g.curvatures[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(g.perimeter == doctest::Approx(2.0 * kPi).epsilon(1e-15));
  CHECK(solve_single(4.0 * kPi).perimeter == doctest::Approx(4.0 * kPi).epsilon(1e-15));
  CHECK(solve_single(1.0).perimeter == doctest::Approx(3.5449077018).epsilon(1e-10));
  CHECK(check_geometry(g).area_rel_error < 1e-14);
  CHECK_THROWS_AS(solve_single(0.0), DomainError);
  CHECK_THROWS_AS(solve_single(-1.0), DomainError);
}

TEST_CASE("mass triple validation and kind") {
  CHECK(MassTriple(1, 0, 0).kind() == BubbleKind::Single);
  CHECK(MassTriple(1, 0, 2).kind() == BubbleKind::Double);
  CHECK(MassTriple(1, 3, 2).kind() == BubbleKind::Triple);
  CHECK_THROWS_AS(MassTriple(0, 0, 0), DomainError);
  CHECK_THROWS_AS(MassTriple(-1, 1, 1), DomainError);
  CHECK_THROWS_AS(MassTriple(NAN, 1, 1), DomainError);
}

TEST_CASE("symmetric double bubble") {
  const double area = 0.5 * (4.0 * kPi / 3.0 + std::sqrt(3.0) / 2.0);
  auto g = solve_double(area, area);
  CHECK(g.perimeter == doctest::Approx(8.0 * kPi / 3.0 + std::sqrt(3.0)).epsilon(1e-13));
  CHECK(std::abs(g.curvatures[3]) < 1e-12);
  CHECK(g.curvatures[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(g.arc_angles[0] == doctest::Approx(4.0 * kPi / 3.0).epsilon(1e-12));
  auto chk = check_geometry(g);
  CHECK(chk.area_rel_error < 1e-12);
  CHECK(chk.junction_angle_error < 1e-12);
}

TEST_CASE("double bubble invariants and limits") {
  for (double a : {0.1, 1.0, 3.0, 10.0}) {
    for (double b : {0.01, 0.5, 2.0, 7.0}) {
      auto g = solve_double(a, b);
      auto chk = check_geometry(g);
      CHECK(chk.area_rel_error < 1e-10);
      CHECK(chk.junction_angle_error < 1e-10);
      CHECK(chk.reciprocal_residual < 1e-10);
      CHECK(chk.collinearity_error < 1e-9);
      CHECK(g.perimeter > 2.0 * std::sqrt(kPi * (a + b)));
      // The interface bulges into the larger lobe.
      if (a > b) CHECK(g.curvatures[3] > 0.0);
      if (a < b) CHECK(g.curvatures[3] < 0.0);
    }
  }
  CHECK(double_bubble_perimeter(1.0, 1e-8) == doctest::Approx(2.0 * std::sqrt(kPi)).epsilon(1e-3));
  double prev = 1e9;
  for (int k = 2; k <= 8; ++k) {
    const double err = double_bubble_perimeter(1.0, std::pow(10.0, -k)) - 2.0 * std::sqrt(kPi);
    CHECK(err > 0.0);
    CHECK(err < prev);
    prev = err;
  }
}

TEST_CASE("symmetric triple bubble") {
  for (double m : {0.3, 1.0, 5.0}) {
    auto g = solve_triple(MassTriple(m, m, m));
    CHECK(g.perimeter == doctest::Approx(symmetric_oracle(m)).epsilon(1e-13));
    CHECK(g.perimeter == doctest::Approx(symmetric_triple_perimeter(m)).epsilon(1e-13));
    for (int s = 3; s < 6; ++s) CHECK(std::abs(g.curvatures[s]) < 1e-10);
  }
  CHECK(symmetric_triple_perimeter(1.0) == doctest::Approx(8.793934128445743).epsilon(1e-14));
}

TEST_CASE("triple bubble invariants on a log grid") {
  for (const auto& m : log_grid(0.1, 10.0, 3)) {
    auto g = solve(m);
    REQUIRE(g.kind == BubbleKind::Triple);
    auto chk = check_geometry(g);
    CHECK(chk.area_rel_error < 1e-10);
    CHECK(chk.junction_angle_error < 1e-8);
    CHECK(chk.reciprocal_residual < 1e-10);
    CHECK(chk.collinearity_error < 1e-8);
    // Canonical frame: central junction at the origin, wall (1,2) along +y.
    CHECK(g.junctions[0].norm() < 1e-15);
    CHECK(std::abs(g.arcs[3].heading - kPi / 2.0) < 1e-14);
  }
}

TEST_CASE("triple bubble scaling and permutation symmetry") {
  const MassTriple base(2.0, 1.0, 0.5);
  const auto g = solve(base);
  for (double t : {0.25, 4.0}) {
    const auto gt = solve(MassTriple(2.0 * t, 1.0 * t, 0.5 * t));
    CHECK(gt.perimeter == doctest::Approx(std::sqrt(t) * g.perimeter).epsilon(1e-12));
    for (int s = 0; s < 6; ++s)
      CHECK(gt.curvatures[s] * std::sqrt(t) == doctest::Approx(g.curvatures[s]).epsilon(1e-9));
  }
  std::array<int, 3> p{0, 1, 2};
  do {
    const std::array<double, 3> v{base[p[0]], base[p[1]], base[p[2]]};
    CHECK(std::abs(perimeter(MassTriple(v)) - g.perimeter) < 1e-10);
  } while (std::next_permutation(p.begin(), p.end()));
}

TEST_CASE("perimeter gradient matches finite differences") {
  for (const auto& m : {MassTriple(1, 1, 1), MassTriple(2, 1, 0.5), MassTriple(0.1, 3, 10)}) {
    const auto grad = perimeter_gradient(m);
    for (int i = 0; i < 3; ++i) {
      const double h = 1e-5;
      auto up = m.values(), dn = m.values();
      up[i] += h;
      dn[i] -= h;
      const double fd = (perimeter(MassTriple(up)) - perimeter(MassTriple(dn))) / (2 * h);
      CHECK(std::abs(fd - grad[i]) / grad[i] < 1e-6);
    }
  }
  const auto gs = perimeter_gradient(MassTriple(kPi, 0, 0));
  CHECK(gs[0] == doctest::Approx(1.0));
  CHECK(std::isnan(gs[1]));
}

TEST_CASE("triple degenerates to double") {
  const double pd = double_bubble_perimeter(1.0, 1.0);
  CHECK(perimeter(MassTriple(1, 1, 1e-8)) == doctest::Approx(pd).epsilon(1e-3));
  double prev = 1e9;
  for (int k = 2; k <= 8; ++k) {
    const double err = perimeter(MassTriple(1, 1, std::pow(10.0, -k))) - pd;
    CHECK(err > 0.0);
    CHECK(err < prev);
    prev = err;
  }
  auto g = solve(MassTriple(1, 1, 1e-12));
  CHECK(g.degenerate);
  CHECK(g.kind == BubbleKind::Double);
}

TEST_CASE("warm start agrees with cold solve") {
  const auto g0 = solve(MassTriple(3, 1, 0.2));
  REQUIRE(g0.seed.has_value());
  const auto g1 = solve(MassTriple(3.1, 1, 0.21), {}, &*g0.seed);
  const auto g2 = solve(MassTriple(3.1, 1, 0.21));
  CHECK(g1.perimeter == doctest::Approx(g2.perimeter).epsilon(1e-13));
}

TEST_CASE("comparability constants") {
  std::vector<MassTriple> singles{MassTriple(1, 0, 0), MassTriple(0, 5, 0), MassTriple(0, 0, 0.1)};
  auto cs = comparability_constants(singles);
  CHECK(cs.c1 == doctest::Approx(kPi));
  CHECK(cs.c2 == doctest::Approx(kPi));
  auto mixed = log_grid(1e-2, 1e2, 3);
  auto cm = comparability_constants(mixed);
  CHECK(cm.c1 > 0.0);
  CHECK(cm.c2 > cm.c1);
  CHECK_THROWS_AS(comparability_constants(std::span<const MassTriple>{}), DomainError);
}
