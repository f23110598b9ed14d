// Bubble placement on the torus under the pairwise Green's interaction.

#include <algorithm>
#include <cmath>
#include <limits>

#include "tetra/errors.hpp"
#include "tetra/torus.hpp"

namespace tetra {

TorusPlacement::TorusPlacement(std::vector<Vec2> pos, std::vector<std::size_t> index, double eta_)
    : positions(std::move(pos)), bubble_index(std::move(index)), eta(eta_) {
  if (positions.size() != bubble_index.size()) throw DomainError("placement: one bubble index per position");
  if (!(eta >= 0.0) || !std::isfinite(eta)) throw DomainError("placement: eta must be >= 0");
  for (auto& x : positions) {
    if (!std::isfinite(x.x) || !std::isfinite(x.y)) throw DomainError("placement: positions must be finite");
    x = canonical_point(x);
  }
}

double pair_weight(const MassTriple& a, const MassTriple& b, const GammaMatrix& gamma) {
  double w = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) w += gamma(i, j) * a[i] * b[j];
  return 0.5 * w;
}

namespace {

void check_indices(const TorusPlacement& p, const Configuration& c) {
  for (std::size_t k : p.bubble_index)
    if (k >= c.size()) throw DomainError("placement refers to a bubble outside the configuration");
}

}  // namespace

double placement_energy(const TorusPlacement& p, const Configuration& c, const GammaMatrix& gamma,
                        const GreensEvaluator& greens) {
  check_indices(p, c);
  std::vector<double> terms;
  const std::size_t K = p.positions.size();
  for (std::size_t k = 0; k < K; ++k)
    for (std::size_t h = k + 1; h < K; ++h) {
      const double w = pair_weight(c[p.bubble_index[k]], c[p.bubble_index[h]], gamma);
      // Ordered pairs (k, h) and (h, k) contribute equally.
      terms.push_back(2.0 * w * greens.eval(p.positions[k] - p.positions[h]));
    }
  return stable_sum(std::move(terms));
}

std::vector<Vec2> placement_gradient(const TorusPlacement& p, const Configuration& c, const GammaMatrix& gamma,
                                     const GreensEvaluator& greens) {
  check_indices(p, c);
  const std::size_t K = p.positions.size();
  std::vector<Vec2> g(K);
  for (std::size_t k = 0; k < K; ++k)
    for (std::size_t h = k + 1; h < K; ++h) {
      const double w = pair_weight(c[p.bubble_index[k]], c[p.bubble_index[h]], gamma);
      const Vec2 d = greens.gradient(p.positions[k] - p.positions[h]) * (2.0 * w);
      g[k] = g[k] + d;
      g[h] = g[h] - d;
    }
  return g;
}

SeparationReport min_pairwise_distance(const TorusPlacement& p, const Configuration& c, const GeometryOptions& opts) {
  if (p.positions.size() < 2) throw DomainError("min_pairwise_distance needs at least two bubbles");
  check_indices(p, c);
  std::vector<double> radius(p.positions.size(), 0.0);
  if (p.eta > 0.0)
    for (std::size_t k = 0; k < radius.size(); ++k)
      radius[k] = p.eta * cluster_support(c[p.bubble_index[k]], opts).enclosing_radius;
  SeparationReport r;
  r.distance = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < p.positions.size(); ++k)
    for (std::size_t h = k + 1; h < p.positions.size(); ++h) {
      const double d = torus_distance(p.positions[k], p.positions[h]) - radius[k] - radius[h];
      if (d < r.distance) {
        r.distance = d;
        r.first = k;
        r.second = h;
      }
    }
  r.overlap = r.distance <= 0.0;
  return r;
}

namespace {

double gradient_norm(const std::vector<Vec2>& g) {
  double s = 0.0;
  for (const auto& v : g) s += dot(v, v);
  return std::sqrt(s);
}

// Distinct barycentres of an n x n partition of the fundamental domain,
// spread by farthest-point selection (ties to the lowest cell index).
std::vector<Vec2> grid_barycentres(std::size_t K, int n) {
  std::vector<Vec2> cells;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) cells.push_back({(a + 0.5) / n - 0.5, (b + 0.5) / n - 0.5});
  std::vector<Vec2> chosen{cells.front()};
  std::vector<bool> used(cells.size(), false);
  used[0] = true;
  while (chosen.size() < K) {
    std::size_t best = 0;
    double best_d = -1.0;
    for (std::size_t q = 0; q < cells.size(); ++q) {
      if (used[q]) continue;
      double d = std::numeric_limits<double>::infinity();
      for (const auto& x : chosen) d = std::min(d, torus_distance(cells[q], x));
      if (d > best_d + 1e-12) {
        best_d = d;
        best = q;
      }
    }
    used[best] = true;
    chosen.push_back(cells[best]);
  }
  return chosen;
}

}  // namespace

PlacementResult optimize_placement(const Configuration& c, const GammaMatrix& gamma, int n_grid,
                                   const PlacementOptions& opts, const GreensEvaluator& greens) {
  const std::size_t K = c.size();
  if (K == 0) throw DomainError("optimize_placement needs at least one bubble");
  const int need = int(std::ceil(std::sqrt(double(K)))) + 1;
  if (n_grid < need || std::size_t(n_grid) * std::size_t(n_grid) < K)
    throw DomainError("optimize_placement: n_grid must be at least ceil(sqrt(K)) + 1 = " + std::to_string(need));

  std::vector<std::size_t> index(K);
  for (std::size_t k = 0; k < K; ++k) index[k] = k;
  PlacementResult out;
  out.initial = TorusPlacement(grid_barycentres(K, n_grid), index, 0.0);
  out.initial_energy = placement_energy(out.initial, c, gamma, greens);
  out.initial_min_distance = K >= 2 ? min_pairwise_distance(out.initial, c).distance : 0.0;

  // Barzilai-Borwein steps safeguarded by an Armijo backtrack.
  TorusPlacement p = out.initial;
  double e = out.initial_energy;
  auto g = placement_gradient(p, c, gamma, greens);
  double step = 1e-2;
  std::vector<Vec2> prev_x, prev_g;
  int it = 0;
  for (; it < opts.max_iterations; ++it) {
    const double gn = gradient_norm(g);
    if (gn < opts.gradient_tol) break;
    if (!prev_x.empty()) {
      double ss = 0.0, sy = 0.0;
      for (std::size_t k = 0; k < K; ++k) {
        const Vec2 s = torus_delta(p.positions[k], prev_x[k]);
        const Vec2 y = g[k] - prev_g[k];
        ss += dot(s, s);
        sy += dot(s, y);
      }
      if (sy > 0.0) step = ss / sy;
    }
    // Keep every move well below the cell size.
    step = std::min(step, 0.05 / gn);
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls, step *= 0.5) {
      TorusPlacement trial = p;
      for (std::size_t k = 0; k < K; ++k) trial.positions[k] = canonical_point(p.positions[k] - g[k] * step);
      double et;
      try {
        et = placement_energy(trial, c, gamma, greens);
      } catch (const SingularityError&) {
        continue;
      }
      if (et <= e - 1e-4 * step * gn * gn) {
        prev_x = p.positions;
        prev_g = g;
        p = trial;
        e = et;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
    g = placement_gradient(p, c, gamma, greens);
  }
  out.iterations = it;
  out.gradient_norm = gradient_norm(g);
  out.converged = out.gradient_norm < opts.gradient_tol;
  // The grid competitor is kept unless descent strictly lowered the energy.
  if (e < out.initial_energy) {
    out.placement = p;
    out.energy = e;
  } else {
    out.placement = out.initial;
    out.energy = out.initial_energy;
    out.gradient_norm = gradient_norm(placement_gradient(out.initial, c, gamma, greens));
    out.converged = out.gradient_norm < opts.gradient_tol;
  }
  out.min_distance = K >= 2 ? min_pairwise_distance(out.placement, c).distance : 0.0;
  return out;
}

}  // namespace tetra
