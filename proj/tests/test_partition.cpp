#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "doctest.h"
#include "tetra/errors.hpp"
#include "tetra/partition.hpp"

using namespace tetra;

namespace {

// n equal singles of type 1 holding 40, Gamma_11 = 1.
double f40(int n) { return 2 * std::sqrt(40 * kPi * n) + 1600 / (4 * kPi * n); }

OptimizerOptions seeded() {
  OptimizerOptions o;
  o.seed = 11;
  return o;
}

}  // namespace

TEST_CASE("mass upper bound") {
  CHECK(mass_upper_bound(GammaMatrix::identity())[0] == doctest::Approx(8 * kPi).epsilon(1e-15));
  CHECK(mass_upper_bound(GammaMatrix::diagonal(8, 1, 1))[0] == doctest::Approx(2 * kPi).epsilon(1e-15));
  CHECK(std::isinf(mass_upper_bound(GammaMatrix::zero())[0]));
}

TEST_CASE("mass lower bound") {
  CHECK_THROWS_AS(mass_lower_bound({1, 1, 1}, GammaMatrix::identity(), 10, 0, 1, 1), DomainError);

  // Gamma = 0 leaves only the second branch
  const double q = 1.0 * 2.0 / (4 * 0.5 * 10.0);
  CHECK(mass_lower_bound({2, 1, 1}, GammaMatrix::zero(), 10, 1, 0.5, 1)[0] == doctest::Approx(q * q));

  auto sym = bounds_report({1, 1, 1}, GammaMatrix::identity());
  CHECK(sym.m_minus[0] == sym.m_minus[1]);
  CHECK(sym.m_minus[1] == sym.m_minus[2]);

  auto r = mass_lower_bound({40, 0, 0}, GammaMatrix::identity(), 76, sym.c1, sym.c2, sym.C2);
  CHECK(r[0] > 0);
  CHECK(std::isfinite(40 / r[0]));

  auto b = bounds_report({40, 0, 0}, GammaMatrix::identity());
  CHECK(b.m_minus[0] <= b.m_plus[0]);
  CHECK(b.count_upper[0] >= 1);
  CHECK(b.energy_upper >= f40(5) - 1e-12);
}

TEST_CASE("signature enumeration") {
  const auto I = GammaMatrix::identity();
  CHECK_THROWS_AS(enumerate_signatures({1, 1, 1}, I, 0), DomainError);

  auto only1 = enumerate_signatures({40, 0, 0}, I, 12);
  for (const auto& s : only1) {
    CHECK(s.n_triple == 0);
    CHECK(s.n_double == std::array<int, 3>{});
    CHECK(s.n_single[1] + s.n_single[2] == 0);
  }
  CHECK(only1.size() == 12 - 2 + 1);  // at least ceil(40 / 8 pi) = 2 lobes

  // cap 1: one triple, or one double plus a single, or three singles
  const GammaMatrix coupled({{{1, 0.1, 0}, {0.1, 1, 0}, {0, 0, 1}}});
  auto rep = enumerate_signatures_report({1, 1, 1}, coupled, 1);
  CHECK_FALSE(rep.pruned);
  CHECK(rep.signatures.size() == 5);
  auto pruned = enumerate_signatures_report({1, 1, 1}, I, 1);
  CHECK(pruned.pruned);
  CHECK(pruned.signatures.size() == 1);
  CHECK(pruned.pruned_count == 4);

  for (const auto& s : enumerate_signatures({3, 2, 5}, I, 4)) {
    CHECK_FALSE((s.n_single[0] > 0 && s.n_single[1] > 0));
    CHECK_FALSE((s.n_single[0] > 0 && s.n_double[double_index(1, 2)] > 0));
    auto n = s.lobe_counts();
    for (int i = 0; i < 3; ++i) CHECK(n[i] <= 4);
  }
}

TEST_CASE("optimize masses") {
  const auto I = GammaMatrix::identity();
  Signature five;
  five.n_single[0] = 5;
  auto c = optimize_masses(five, {40, 0, 0}, I, seeded());
  REQUIRE(c.size() == 5);
  for (const auto& b : c.bubbles()) CHECK(b[0] == doctest::Approx(8.0).epsilon(1e-10));

  Signature one;
  one.n_triple = 1;
  auto t = optimize_masses_detailed(one, {1, 1, 1}, I, seeded());
  CHECK(t.config[0][1] == doctest::Approx(1.0));
  auto g = e0_gradient(MassTriple(1, 1, 1), I);
  for (int i = 0; i < 3; ++i) CHECK(t.kkt.multiplier[i] == doctest::Approx(*g[i]).epsilon(1e-12));

  // The equal split of two triples is stationary but not a minimum: moving
  // mass from one to the other lowers the energy, down to a single triple.
  const Configuration equal({MassTriple(1, 1, 1), MassTriple(1, 1, 1)});
  CHECK(kkt_residual(equal, I).max_spread() < 1e-12);
  const double split = configuration_energy(equal, I);
  CHECK(split == doctest::Approx(2 * e0(MassTriple(1, 1, 1), I)).epsilon(1e-15));
  const double tilted = e0(MassTriple(1.1, 1.1, 1.1), I) + e0(MassTriple(0.9, 0.9, 0.9), I);
  CHECK(tilted < split);
  Signature two;
  two.n_triple = 2;
  auto tt = optimize_masses_detailed(two, {2, 2, 2}, I, seeded());
  CHECK(tt.energy < split);
  CHECK(tt.energy == doctest::Approx(e0(MassTriple(2, 2, 2), I)).epsilon(1e-9));

  Signature bad;
  bad.n_single[1] = 1;
  CHECK_THROWS_AS(optimize_masses(bad, {1, 0, 0}, I), DomainError);
}

TEST_CASE("kkt residual") {
  const auto I = GammaMatrix::identity();
  std::vector<MassTriple> five(5, MassTriple(8, 0, 0));
  auto k = kkt_residual(Configuration(five), I);
  CHECK(k.spread[0] == 0.0);
  CHECK(k.multiplier[0] == doctest::Approx(8 / (2 * kPi) + std::sqrt(kPi / 8)).epsilon(1e-14));
  CHECK(k.multiplier[0] == doctest::Approx(1.9000).epsilon(1e-4));

  CHECK(kkt_residual(Configuration({MassTriple(1, 2, 3)}), I).max_spread() == 0.0);

  // spread responds linearly to a small imbalance
  auto spread_at = [&](double d) {
    std::vector<MassTriple> v(5, MassTriple(8, 0, 0));
    v[0] = MassTriple(8 + d, 0, 0);
    v[1] = MassTriple(8 - d, 0, 0);
    return kkt_residual(Configuration(v), I).spread[0];
  };
  const double s1 = spread_at(1e-3), s2 = spread_at(2e-3);
  CHECK(s1 > 0);
  CHECK(s2 / s1 == doctest::Approx(2.0).epsilon(1e-3));
}

TEST_CASE("merge and split moves") {
  const auto I = GammaMatrix::identity();
  // two large singles want to split
  auto mv = merge_split_moves(Configuration({MassTriple(20, 0, 0), MassTriple(20, 0, 0)}), I);
  REQUIRE(mv);
  CHECK(mv->energy_after < mv->energy_before);
  CHECK(mv->config.size() == 3);

  // Gamma = 0: three separate singles merge
  auto m3 = merge_split_moves(Configuration({MassTriple(1, 0, 0), MassTriple(0, 1, 0), MassTriple(0, 0, 1)}),
                              GammaMatrix::zero());
  REQUIRE(m3);
  CHECK(m3->config.size() < 3);
}

TEST_CASE("minimize e0bar examples") {
  const auto I = GammaMatrix::identity();
  MinimizeOptions opts;
  opts.inner.seed = 3;

  auto r = minimize_e0bar({40, 0, 0}, I, opts);
  REQUIRE(r.config.size() == 5);
  for (const auto& b : r.config.bubbles()) CHECK(b[0] == doctest::Approx(8.0).epsilon(1e-9));
  double best = 1e300;
  int arg = 0;
  for (int n = 1; n <= 10; ++n)
    if (f40(n) < best) best = f40(n), arg = n;
  CHECK(arg == 5);
  CHECK(r.energy == doctest::Approx(best).epsilon(1e-12));
  CHECK_FALSE(r.cap_saturated);

  auto pi = minimize_e0bar({kPi, 0, 0}, I, opts);
  REQUIRE(pi.config.size() == 1);
  CHECK(pi.config[0][0] == doctest::Approx(kPi));

  opts.count_cap = 2;
  auto z = minimize_e0bar({1, 1, 1}, GammaMatrix::zero(), opts);
  REQUIRE(z.config.size() == 1);
  CHECK(z.config[0].kind() == BubbleKind::Triple);
  for (const auto& s : enumerate_signatures({1, 1, 1}, GammaMatrix::zero(), 2)) {
    auto o = optimize_masses_detailed(s, {1, 1, 1}, GammaMatrix::zero(), seeded());
    CHECK(o.energy >= z.energy - 1e-12);
  }

  CHECK_THROWS_AS(minimize_e0bar({0, 0, 0}, I, opts), DomainError);
}

TEST_CASE("grid oracle agrees with the optimiser") {
  const GammaMatrix G({{{1.0, 0.3, 0.0}, {0.3, 2.0, 0.5}, {0.0, 0.5, 0.7}}});
  const Totals M{3.0, 1.5, 2.0};
  MinimizeOptions opts;
  opts.count_cap = 3;
  opts.inner.seed = 5;
  auto r = minimize_e0bar(M, G, opts);
  auto o = brute_force_oracle(M, G, 3, 3.0 / 8);
  CHECK(o.grid_points > 0);
  if (r.config.size() <= 3) CHECK(r.energy <= o.energy + 1e-9 * o.energy);
  CHECK(std::abs(r.energy - o.energy) < 1e-7 * o.energy);

  auto t = brute_force_oracle({1, 1, 1}, GammaMatrix::zero(), 2, 0.25);
  CHECK(t.config.size() == 1);
  CHECK(t.energy == doctest::Approx(perimeter(MassTriple(1, 1, 1))).epsilon(1e-12));

  OracleOptions tiny;
  tiny.budget = 10;
  CHECK_THROWS_AS(brute_force_oracle(M, G, 3, 0.01, tiny), DomainError);
}

TEST_CASE("coexistence parameters") {
  CHECK_THROWS_AS(coexistence_params(0, 1, 1), DomainError);
  auto p = coexistence_params(1, 1, 1);
  CHECK(p.gamma.is_diagonal());
  bool first = false;
  for (const auto& c : p.certificate.checks)
    if (c.name == "M1/m1+ > N1") first = c.holds;
  CHECK(first);
  CHECK(p.M[0] / mass_upper_bound(p.gamma)[0] > 1.0);
  CHECK(p.M[1] >= p.M[0]);
  CHECK(p.M[2] >= p.M[1]);
}
