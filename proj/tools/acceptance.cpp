// Acceptance suite: one PASS/FAIL line per criterion; exits 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "tetra/errors.hpp"
#include "tetra/partition.hpp"
#include "tetra/torus.hpp"

using namespace tetra;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::vector<MassTriple> log_grid() {
  const double v[] = {0.1, 1.0, 10.0};
  std::vector<MassTriple> out;
  for (double a : v)
    for (double b : v)
      for (double c : v) out.emplace_back(a, b, c);
  return out;
}

Outcome geometry_exactness() {
  const auto t0 = Clock::now();
  double area = 0, angle = 0, curv = 0;
  for (const auto& m : log_grid()) {
    const auto g = solve_triple(m);
    const auto c = check_geometry(g);
    area = std::max(area, c.area_rel_error);
    angle = std::max(angle, c.junction_angle_error);
    curv = std::max(curv, c.reciprocal_residual);
  }
  const double t = seconds_since(t0);
  return {area < 1e-10 && angle < 1e-8 && curv < 1e-10 && t < 5.0,
          fmt("area %.2e, angle %.2e rad, curvature %.2e, %.2f s", area, angle, curv, t)};
}

Outcome perimeter_derivative() {
  double worst = 0;
  for (const auto& m : log_grid()) {
    const auto g = solve_triple(m);
    for (int i = 0; i < 3; ++i) {
      auto p = m.values(), q = m.values();
      const double h = 1e-5 * m[i];
      p[i] += h;
      q[i] -= h;
      const double fd = (perimeter(MassTriple(p)) - perimeter(MassTriple(q))) / (2 * h);
      const double exact = g.curvatures[i];
      worst = std::max(worst, std::abs(fd - exact) / std::abs(exact));
    }
  }
  return {worst < 1e-6, fmt("max relative error %.2e", worst)};
}

Outcome symmetric_degeneration() {
  double walls = 0;
  for (double m : {0.1, 1.0, 10.0}) {
    const auto g = solve_triple(MassTriple(m, m, m));
    for (int s = 3; s < 6; ++s) walls = std::max(walls, std::abs(g.curvatures[s]) * m);
  }
  const double m1 = 1.0, m2 = 0.6, pd = double_bubble_perimeter(m1, m2);
  std::string sweep;
  double err = 0, prev = 1e300;
  bool monotone = true;
  for (int k = 1; k <= 8; ++k) {
    err = std::abs(perimeter(MassTriple(m1, m2, std::pow(10.0, -k))) - pd);
    monotone = monotone && err < prev;
    prev = err;
    if (k % 2 == 0) sweep += fmt(" k=%d:%.1e", k, err);
  }
  return {walls < 1e-10 && err < 1e-3,
          fmt("wall curvature (scaled) %.2e; sweep%s%s", walls, sweep.c_str(), monotone ? "" : " (non-monotone)")};
}

struct Instance {
  Totals M;
  GammaMatrix gamma;
  MinimizeResult result;
};

// Random diagonal instances. The small family fits the grid oracle; the large
// one has one or two constituents with several bubbles each (lobe counts
// beyond M_i / m_i^+, where a lobe above m^+ would show).
std::vector<Instance> random_suite(std::uint64_t seed, double mass_lo, double mass_hi, double g_lo, double g_hi,
                                   bool sparse) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> mass(mass_lo, mass_hi), coupling(g_lo, g_hi);
  std::vector<Instance> out;
  MinimizeOptions opts;
  opts.inner.seed = 17;
  for (int k = 0; k < 20; ++k) {
    Instance in;
    in.M = {mass(rng), mass(rng), mass(rng)};
    if (sparse) {
      // one or two types present, rotating which
      in.M[k % 3] = 0.0;
      if (k % 2 == 0) in.M[(k + 1) % 3] = 0.0;
    }
    const double a = coupling(rng), b = coupling(rng), c = coupling(rng);
    in.gamma = GammaMatrix::diagonal(a, b, c);
    in.result = minimize_e0bar(in.M, in.gamma, opts);
    out.push_back(std::move(in));
  }
  return out;
}

Outcome max_mass_bound(const std::vector<Instance>& suite) {
  double worst = -1e300;
  std::size_t bubbles = 0;
  int saturated = 0;
  for (const auto& in : suite) {
    bubbles += in.result.config.size();
    saturated += in.result.cap_saturated;
    const auto mp = mass_upper_bound(in.gamma);
    for (const auto& b : in.result.config.bubbles())
      for (int i = 0; i < 3; ++i) worst = std::max(worst, b[i] / mp[i] - 1.0);
  }
  return {worst <= 1e-6 && saturated == 0,
          fmt("max lobe / m+ - 1 = %.3f over %zu instances (%zu bubbles, %d at the count cap)", worst, suite.size(),
              bubbles, saturated)};
}

Outcome single_constituent() {
  const auto t0 = Clock::now();
  MinimizeOptions opts;
  opts.inner.seed = 1;
  const auto r = minimize_e0bar({40, 0, 0}, GammaMatrix::identity(), opts);
  const double t = seconds_since(t0);
  int best_n = 1;
  double best = 1e300;
  for (int n = 1; n <= 12; ++n) {
    const double f = 2 * std::sqrt(40 * kPi * n) + 1600 / (4 * kPi * n);
    if (f < best) best = f, best_n = n;
  }
  bool equal = r.config.size() == std::size_t(best_n);
  for (const auto& b : r.config.bubbles()) equal = equal && std::abs(b[0] - 40.0 / best_n) < 1e-8;
  const double diff = std::abs(r.energy - best);
  return {equal && diff < 1e-8 && t < 1.0,
          fmt("%zu bubbles, energy %.10f vs f(%d) = %.10f (diff %.1e), %.2f s", r.config.size(), r.energy, best_n,
              best, diff, t)};
}

Outcome kkt_stationarity(const std::vector<Instance>& suite) {
  double worst = 0;
  for (const auto& in : suite) worst = std::max(worst, kkt_residual(in.result.config, in.gamma).max_spread());
  return {worst < 1e-6, fmt("max multiplier spread %.2e over %zu optima", worst, suite.size())};
}

Outcome oracle_equivalence(const std::vector<Instance>& suite) {
  double worst = 0;
  int used = 0;
  for (const auto& in : suite) {
    if (in.result.config.size() > 3) continue;
    const double step = std::max({in.M[0], in.M[1], in.M[2]}) / 12;
    const auto o = brute_force_oracle(in.M, in.gamma, 3, step);
    worst = std::max(worst, std::abs(o.energy - in.result.energy));
    ++used;
  }
  return {used == int(suite.size()) && worst < 1e-5,
          fmt("max |E_min - E_oracle| = %.2e on %d/%zu instances", worst, used, suite.size())};
}

Outcome coexistence() {
  const auto t0 = Clock::now();
  const auto p = coexistence_params(2, 2, 2);
  MinimizeOptions opts;
  opts.count_cap = 12;
  opts.inner.seed = 5;
  const auto r = minimize_e0bar(p.M, p.gamma, opts);
  const double t = seconds_since(t0);
  const int triples = r.config.count(BubbleKind::Triple);
  const int doubles = r.config.count_double(1, 2);
  const int singles = r.config.count_single(2);
  return {triples >= 2 && doubles >= 2 && singles >= 2 && t < 300.0,
          fmt("M = (%.3f, %.3f, %.3f): %d triples, %d doubles {2,3}, %d singles of type 3%s, %.0f s", p.M[0], p.M[1],
              p.M[2], triples, doubles, singles, r.cap_saturated ? ", count cap saturated" : "", t)};
}

Outcome greens_function() {
  const GreensEvaluator g;
  const int N = 256;
  double sum = 0;
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) sum += g.eval({(i + 0.5) / N - 0.5, (j + 0.5) / N - 0.5}, 1e-12);
  const double mean = std::abs(sum / (N * N));

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  double odd = 0;
  for (int k = 0; k < 100; ++k) {
    const Vec2 x{u(rng), u(rng)};
    odd = std::max(odd, std::abs(g.eval(x) - g.eval({-x.x, -x.y})));
  }

  const double h = 2e-4;
  double lap = 0;
  for (Vec2 x : {Vec2{0.3, 0.1}, Vec2{-0.2, 0.35}, Vec2{0.5, 0.5}, Vec2{0.12, -0.05}}) {
    const double d = -(g.eval({x.x + h, x.y}) + g.eval({x.x - h, x.y}) + g.eval({x.x, x.y + h}) +
                       g.eval({x.x, x.y - h}) - 4 * g.eval(x)) / (h * h);
    lap = std::max(lap, std::abs(d + 1.0));
  }

  const double r0 = g.regular_at_zero();
  const double s32 = spectral_regular_at_zero_extrapolated(32), s64 = spectral_regular_at_zero_extrapolated(64);
  const double doubling = std::abs(s64 - s32);
  const double vs_oracle = std::abs(r0 - s64);
  const double vs_trunc = std::abs(GreensEvaluator(32).regular_at_zero() - GreensEvaluator(64).regular_at_zero());
  return {mean < 1e-6 && odd == 0.0 && lap < 1e-3 && doubling < 1e-8 && vs_oracle < 1e-8 && vs_trunc < 1e-8,
          fmt("mean %.2e, evenness %.1e, |-lap G + 1| %.2e, R(0) = %.15f (spectral doubling %.1e, vs spectral "
              "%.1e, truncation doubling %.1e)",
              mean, odd, lap, r0, doubling, vs_oracle, vs_trunc)};
}

Outcome eta_expansion() {
  const Configuration c({MassTriple(1, 0.7, 0.3), MassTriple(0, 0.5, 0.4)});
  const auto I = GammaMatrix::identity();
  const auto placed = optimize_placement(c, I, 3);
  const double sum_e0 = configuration_energy(c, I);
  std::vector<double> seq;
  for (double eta : {1e-2, 1e-3, 1e-4}) {
    auto p = placed.placement;
    p.eta = eta;
    const auto E = assemble_E_eta(c, p, eta, I);
    seq.push_back(std::abs(E.total - sum_e0) * std::abs(std::log(eta)));
  }
  bool ok = true;
  for (std::size_t k = 1; k < seq.size(); ++k) ok = ok && seq[k] <= 1.1 * seq[k - 1];
  return {ok, fmt("|E - sum e0| |log eta| = %.7f, %.7f, %.7f", seq[0], seq[1], seq[2])};
}

Outcome separation() {
  const GammaMatrix G({{{1.0, 0.3, 0.2}, {0.3, 1.2, 0.4}, {0.2, 0.4, 0.9}}});
  std::string detail;
  bool ok = true;
  for (int K = 2; K <= 6; ++K) {
    std::vector<MassTriple> bubbles;
    for (int k = 0; k < K; ++k) bubbles.emplace_back(0.5 + 0.2 * k, k % 2 ? 0.3 : 0.0, k % 3 ? 0.0 : 0.4);
    const Configuration c(bubbles);
    const int n = int(std::ceil(std::sqrt(double(K)))) + 1;
    const auto r = optimize_placement(c, G, n);
    const bool bound = r.min_distance >= 1.0 / (2 * n);
    const bool fair = r.min_distance >= r.initial_min_distance || r.energy < r.initial_energy;
    ok = ok && bound && fair;
    detail += fmt("%sK=%d n=%d d=%.4f", K == 2 ? "" : ", ", K, n, r.min_distance);
    if (!bound) detail += " (below 1/2n)";
    if (!fair) detail += " (beats the grid start on distance without lower energy)";
  }
  return {ok, detail};
}

}  // namespace

int main() {
  int failed = 0;
  auto report = [&](int id, const char* name, const std::function<Outcome()>& run) {
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("[%s] %2d %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str(), seconds_since(t0));
    std::fflush(stdout);
  };

  report(1, "geometry exactness", geometry_exactness);
  report(2, "perimeter derivative", perimeter_derivative);
  report(3, "symmetric degeneration", symmetric_degeneration);
  // Built on first use, so their cost shows up on the first criterion using them.
  std::optional<std::vector<Instance>> small, large;
  auto small_suite = [&]() -> const std::vector<Instance>& {
    if (!small) small = random_suite(20240601, 0.5, 4.5, 0.2, 2.2, false);
    return *small;
  };
  auto large_suite = [&]() -> const std::vector<Instance>& {
    if (!large) large = random_suite(7151, 10.0, 40.0, 0.5, 3.0, true);
    return *large;
  };
  report(4, "max-mass bound", [&] { return max_mass_bound(large_suite()); });
  report(5, "single-constituent closed form", single_constituent);
  report(6, "KKT stationarity", [&] {
    auto all = large_suite();
    all.insert(all.end(), small_suite().begin(), small_suite().end());
    return kkt_stationarity(all);
  });
  report(7, "oracle equivalence", [&] { return oracle_equivalence(small_suite()); });
  report(8, "coexistence", coexistence);
  report(9, "Green's function", greens_function);
  report(10, "eta expansion", eta_expansion);
  report(11, "separation", separation);
  std::printf("%d of 11 criteria failed\n", failed);
  return failed == 0 ? 0 : 1;
}
