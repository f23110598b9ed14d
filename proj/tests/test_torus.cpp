#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "tetra/errors.hpp"
#include "tetra/torus.hpp"

using namespace tetra;

namespace {

const GreensEvaluator& greens() {
  static const GreensEvaluator g;
  return g;
}

Configuration identical(int k) { return Configuration(std::vector<MassTriple>(k, MassTriple(1, 0, 0))); }

}  // namespace

TEST_CASE("torus metric") {
  auto p = canonical_point({0.75, -0.6});
  CHECK(p.x == doctest::Approx(-0.25));
  CHECK(p.y == doctest::Approx(0.4));
  CHECK(torus_distance({0.45, 0}, {-0.45, 0}) == doctest::Approx(0.1));
  CHECK(torus_distance({0, 0}, {0.5, 0.5}) == doctest::Approx(std::sqrt(0.5)));
}

TEST_CASE("green's function symmetries") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  for (int n = 0; n < 100; ++n) {
    const Vec2 x{u(rng), u(rng)};
    CHECK(greens().eval(x) == greens().eval({-x.x, -x.y}));
    CHECK(greens().eval(x) == doctest::Approx(greens().eval({x.y, x.x})).epsilon(1e-13));
    CHECK(greens().eval(x) == doctest::Approx(greens().eval({x.x + 1, x.y - 2})).epsilon(1e-13));
  }
  CHECK_THROWS_AS(greens().eval({0, 0}), SingularityError);
  CHECK_THROWS_AS(greens().eval({1, 0}), SingularityError);
  CHECK_THROWS_AS(GreensEvaluator(1).eval({0.3, 0.1}), AccuracyError);
}

TEST_CASE("green's function zero mean") {
  const int N = 256;
  double sum = 0;
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) sum += greens().eval({(i + 0.5) / N - 0.5, (j + 0.5) / N - 0.5}, 1e-12);
  CHECK(std::abs(sum / (N * N)) < 1e-6);
}

TEST_CASE("green's function laplacian") {
  const double h = 2e-4;
  for (Vec2 x : {Vec2{0.3, 0.1}, Vec2{-0.2, 0.35}, Vec2{0.5, 0.5}}) {
    const double c = greens().eval(x);
    const double lap = (greens().eval({x.x + h, x.y}) + greens().eval({x.x - h, x.y}) +
                        greens().eval({x.x, x.y + h}) + greens().eval({x.x, x.y - h}) - 4 * c) /
                       (h * h);
    CHECK(-lap == doctest::Approx(-1.0).epsilon(1e-3));
  }
  // gradient against central differences
  const Vec2 x{0.21, -0.13};
  const Vec2 g = greens().gradient(x);
  const double d = 1e-6;
  CHECK(g.x == doctest::Approx((greens().eval({x.x + d, x.y}) - greens().eval({x.x - d, x.y})) / (2 * d)).epsilon(1e-7));
  CHECK(g.y == doctest::Approx((greens().eval({x.x, x.y + d}) - greens().eval({x.x, x.y - d})) / (2 * d)).epsilon(1e-7));
}

TEST_CASE("regular part") {
  const double r0 = greens().regular_at_zero();
  CHECK(r0 == doctest::Approx(kronecker_regular_at_zero()).epsilon(1e-13));
  CHECK(std::abs(r0 - spectral_regular_at_zero(128)) < 1e-12);
  CHECK(std::abs(r0 - spectral_regular_at_zero_extrapolated(32)) < 1e-10);

  CHECK(std::isfinite(greens().regular_part({1e-6, 0})));
  CHECK(greens().regular_part({1e-6, 0}) == doctest::Approx(r0).epsilon(1e-9));
  CHECK(greens().eval({1e-6, 0}) == doctest::Approx(-std::log(1e-6) / (2 * kPi) + r0).epsilon(1e-12));
  for (double t : {1e-1, 1e-2, 1e-3}) {
    const Vec2 x{0.6 * t, 0.8 * t};
    CHECK(greens().eval(x) + std::log(t) / (2 * kPi) == doctest::Approx(greens().regular_part(x)).epsilon(1e-12));
  }
  CHECK(greens().regular_part({0.1, 0.2}) == greens().regular_part({-0.1, -0.2}));
  CHECK_THROWS_AS(greens().regular_part({0.5, 0}), DomainError);
}

TEST_CASE("placement energy") {
  const auto I = GammaMatrix::identity();
  const auto two = identical(2);
  TorusPlacement far({{0, 0}, {0.5, 0.5}}, {0, 1});
  TorusPlacement near({{0, 0}, {0.1, 0}}, {0, 1});
  CHECK(placement_energy(far, two, I) < placement_energy(near, two, I));

  CHECK(placement_energy(TorusPlacement({{0.1, 0.2}}, {0}), identical(1), I) == 0.0);

  const Configuration mixed({MassTriple(1, 0.5, 0), MassTriple(0, 0.7, 0.2), MassTriple(0.3, 0.3, 0.3)});
  const GammaMatrix G({{{1, 0.2, 0.1}, {0.2, 1.5, 0.3}, {0.1, 0.3, 0.8}}});
  TorusPlacement p({{0, 0}, {0.3, -0.2}, {-0.4, 0.25}}, {0, 1, 2});
  CHECK(placement_energy(p, mixed, G.scaled(2.0)) == 2.0 * placement_energy(p, mixed, G));

  auto grad = placement_gradient(p, mixed, G);
  const double d = 1e-6;
  auto moved = [&](double dx) {
    auto q = p.positions;
    q[1].x += dx;
    return placement_energy(TorusPlacement(q, p.bubble_index), mixed, G);
  };
  CHECK(grad[1].x == doctest::Approx((moved(d) - moved(-d)) / (2 * d)).epsilon(1e-6));

  CHECK_THROWS_AS(TorusPlacement({{0, 0}}, {0, 1}), DomainError);
}

TEST_CASE("min pairwise distance") {
  const auto two = identical(2);
  auto s = min_pairwise_distance(TorusPlacement({{0, 0}, {0.5, 0}}, {0, 1}), two);
  CHECK(s.distance == doctest::Approx(0.5));
  CHECK_FALSE(s.overlap);
  auto c = min_pairwise_distance(TorusPlacement({{0.2, 0.2}, {0.2, 0.2}}, {0, 1}), two);
  CHECK(c.distance == 0.0);
  CHECK(c.overlap);
  // finite eta shrinks the gap by the enclosing radii
  const double r = 1.0 / std::sqrt(kPi);
  auto e = min_pairwise_distance(TorusPlacement({{0, 0}, {0.5, 0}}, {0, 1}, 0.01), two);
  CHECK(e.distance == doctest::Approx(0.5 - 2 * 0.01 * r).epsilon(1e-12));
  CHECK_THROWS_AS(min_pairwise_distance(TorusPlacement({{0, 0}}, {0}), identical(1)), DomainError);
}

TEST_CASE("optimize placement") {
  const auto I = GammaMatrix::identity();
  auto one = optimize_placement(identical(1), I, 2);
  CHECK(one.energy == 0.0);

  auto two = optimize_placement(identical(2), I, 3);
  CHECK(two.converged);
  CHECK(two.energy <= two.initial_energy);
  const double d2 = torus_distance(two.placement.positions[0], two.placement.positions[1]);
  CHECK(d2 >= 0.5 - 1e-6);

  const int n = 3;
  auto four = optimize_placement(identical(4), I, n);
  CHECK(four.min_distance >= 1.0 / (2 * n));
  CHECK(four.energy <= four.initial_energy);
  CHECK(four.gradient_norm < 1e-6);

  CHECK_THROWS_AS(optimize_placement(identical(4), I, 2), DomainError);
}

TEST_CASE("cluster supports and lobe quadrature") {
  const MassTriple m(1, 0.7, 0.3);
  auto s = cluster_support(m);
  for (int i = 0; i < 3; ++i) {
    auto rule = lobe_rule(s.lobes[i], 8);
    double area = 0, mx = 0, my = 0;
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
      area += rule.weights[q];
      mx += rule.weights[q] * rule.nodes[q].x;
      my += rule.weights[q] * rule.nodes[q].y;
    }
    CHECK(area == doctest::Approx(m[i]).epsilon(1e-13));
  }
  CHECK(s.enclosing_radius > 0);

  // disk of radius a: int int log|z - w| = pi^2 a^4 (log a - 1/4)
  auto disk = cluster_support(MassTriple(kPi * 0.49, 0, 0));
  const double a = 0.7;
  CHECK(log_double_integral(disk.lobes[0], disk.lobes[0]) ==
        doctest::Approx(kPi * kPi * std::pow(a, 4) * (std::log(a) - 0.25)).epsilon(1e-10));
}

TEST_CASE("finite-scale energy") {
  const Configuration single({MassTriple(1.3, 0, 0)});
  const TorusPlacement at0({{0, 0}}, {0});
  auto z = assemble_E_eta(single, at0, 1e-2, GammaMatrix::zero());
  CHECK(z.total == doctest::Approx(perimeter(MassTriple(1.3, 0, 0))).epsilon(1e-14));

  // single bubble: remainder * |log eta| stays put, so E_eta -> e0
  const auto I = GammaMatrix::identity();
  const double e = e0(MassTriple(1.3, 0, 0), I);
  double prev = 0;
  for (double eta : {1e-2, 1e-4}) {
    auto E = assemble_E_eta(single, at0, eta, I);
    const double scaled = (E.total - e) * std::abs(std::log(eta));
    if (prev != 0) CHECK(scaled == doctest::Approx(prev).epsilon(0.1));
    prev = scaled;
  }
  CHECK(std::abs(assemble_E_eta(single, at0, 1e-4, I).total - e) < std::abs(assemble_E_eta(single, at0, 1e-2, I).total - e));

  // translation invariance
  const TorusPlacement shifted({{0.31, -0.17}}, {0});
  CHECK(assemble_E_eta(single, shifted, 1e-2, I).total == doctest::Approx(assemble_E_eta(single, at0, 1e-2, I).total).epsilon(1e-12));

  CHECK_THROWS_AS(assemble_E_eta(single, at0, 1.5, I), DomainError);
  CHECK_THROWS_AS(assemble_E_eta(single, at0, 0.9, I), DomainError);
  const Configuration pair({MassTriple(1, 0, 0), MassTriple(1, 0, 0)});
  CHECK_THROWS_AS(assemble_E_eta(pair, TorusPlacement({{0, 0}, {0.5, 0}}, {0, 0}), 1e-2, I), DomainError);
}
