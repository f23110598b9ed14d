// Exhaustive grid search used to cross-check the KKT optimiser. Shares only
// the single-bubble energy with it.

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

#include "tetra/errors.hpp"
#include "tetra/partition.hpp"

namespace tetra {

namespace {

using Pattern = unsigned;  // bit i set: lobe of type i present

struct GridCandidate {
  double energy;
  std::vector<std::array<int, 3>> units;  // grid units per bubble and type
  bool operator<(const GridCandidate& o) const { return energy < o.energy; }
};

std::int64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return static_cast<std::int64_t>(std::llround(std::min(r, 1e18)));
}

// All multisets of `k` patterns (non-decreasing lists) drawn from `patterns`.
void multisets(const std::vector<Pattern>& patterns, int k, std::size_t from, std::vector<Pattern>& cur,
               std::vector<std::vector<Pattern>>& out) {
  if (int(cur.size()) == k) {
    out.push_back(cur);
    return;
  }
  for (std::size_t p = from; p < patterns.size(); ++p) {
    cur.push_back(patterns[p]);
    multisets(patterns, k, p, cur, out);
    cur.pop_back();
  }
}

class Search {
 public:
  Search(const Totals& M, const GammaMatrix& gamma, const OracleOptions& opts, double step)
      : gamma_(gamma), opts_(opts) {
    for (int i = 0; i < 3; ++i) {
      n_[i] = M[i] > 0.0 ? std::max(1, int(std::ceil(M[i] / step - 1e-12))) : 0;
      unit_[i] = n_[i] > 0 ? M[i] / n_[i] : 0.0;
    }
  }

  std::int64_t count(const std::vector<Pattern>& bubbles) const {
    std::int64_t total = 1;
    for (int i = 0; i < 3; ++i) {
      int c = 0;
      for (Pattern p : bubbles) c += (p >> i) & 1u;
      if (n_[i] == 0) continue;
      total *= binomial(n_[i] - 1, c - 1);
      if (total > std::int64_t(1e15)) return std::int64_t(1e15);
    }
    return total;
  }

  void run(const std::vector<Pattern>& bubbles) {
    bubbles_ = bubbles;
    cur_.assign(bubbles.size(), {0, 0, 0});
    fill_type(0);
  }

  std::vector<GridCandidate>& best() { return best_; }
  std::int64_t visited() const { return visited_; }
  const std::array<double, 3>& unit() const { return unit_; }

  double bubble_energy(const std::array<int, 3>& u) {
    const std::int64_t key = (std::int64_t(u[0]) * (n_[1] + 1) + u[1]) * (n_[2] + 1) + u[2];
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    const double e = e0(MassTriple(u[0] * unit_[0], u[1] * unit_[1], u[2] * unit_[2]), gamma_, opts_.geometry);
    cache_.emplace(key, e);
    return e;
  }

 private:
  // Distribute the n_i units of type i over the bubbles carrying type i,
  // every carrier getting at least one.
  void fill_type(int i) {
    if (i == 3) {
      record();
      return;
    }
    std::vector<int> carriers;
    for (std::size_t b = 0; b < bubbles_.size(); ++b)
      if ((bubbles_[b] >> i) & 1u) carriers.push_back(int(b));
    if (carriers.empty()) {
      fill_type(i + 1);
      return;
    }
    compose(i, carriers, 0, n_[i]);
  }

  void compose(int i, const std::vector<int>& carriers, std::size_t pos, int left) {
    const int slots = int(carriers.size() - pos);
    if (slots == 1) {
      cur_[carriers[pos]][i] = left;
      fill_type(i + 1);
      return;
    }
    for (int take = 1; take <= left - (slots - 1); ++take) {
      cur_[carriers[pos]][i] = take;
      compose(i, carriers, pos + 1, left - take);
    }
  }

  void record() {
    // Bubbles of equal pattern are interchangeable; keep one ordering.
    for (std::size_t b = 1; b < bubbles_.size(); ++b)
      if (bubbles_[b] == bubbles_[b - 1] && cur_[b] > cur_[b - 1]) return;
    ++visited_;
    double e = 0.0;
    for (const auto& u : cur_) e += bubble_energy(u);
    const std::size_t keep = std::size_t(std::max(1, opts_.polish_candidates));
    if (best_.size() < keep || e < best_.back().energy) {
      best_.push_back({e, cur_});
      std::sort(best_.begin(), best_.end());
      if (best_.size() > keep) best_.pop_back();
    }
  }

  const GammaMatrix& gamma_;
  OracleOptions opts_;
  std::array<int, 3> n_{};
  std::array<double, 3> unit_{};
  std::vector<Pattern> bubbles_;
  std::vector<std::array<int, 3>> cur_;
  std::vector<GridCandidate> best_;
  std::unordered_map<std::int64_t, double> cache_;
  std::int64_t visited_ = 0;
};

// Compass search over mass transfers between bubbles sharing a type.
std::vector<MassTriple> polish(std::vector<MassTriple> bubbles, const GammaMatrix& gamma, const Totals& unit,
                               const GeometryOptions& geo, double* energy) {
  std::vector<double> e(bubbles.size());
  for (std::size_t b = 0; b < bubbles.size(); ++b) e[b] = e0(bubbles[b], gamma, geo);
  // Step fraction of a grid unit, shared by all types and halved when a full
  // sweep finds no improving transfer.
  for (double frac = 0.5; frac > 1e-13; ) {
    bool improved = false;
    for (int i = 0; i < 3; ++i) {
      const double step = frac * unit[i];
      if (!(step > 0.0)) continue;
      for (std::size_t a = 0; a < bubbles.size(); ++a)
        for (std::size_t b = 0; b < bubbles.size(); ++b) {
          if (a == b || !(bubbles[a][i] > 0.0) || !(bubbles[b][i] > step)) continue;
          auto va = bubbles[a].values(), vb = bubbles[b].values();
          va[i] += step;
          vb[i] -= step;
          const MassTriple ta(va), tb(vb);
          const double ea = e0(ta, gamma, geo), eb = e0(tb, gamma, geo);
          if (ea + eb < e[a] + e[b] - 1e-15 * std::abs(e[a] + e[b])) {
            bubbles[a] = ta;
            bubbles[b] = tb;
            e[a] = ea;
            e[b] = eb;
            improved = true;
          }
        }
    }
    if (!improved) frac *= 0.5;
  }
  *energy = stable_sum(e);
  return bubbles;
}

}  // namespace

OracleResult brute_force_oracle(const Totals& M, const GammaMatrix& gamma, int max_bubbles, double grid_step,
                                const OracleOptions& opts) {
  if (max_bubbles < 1 || max_bubbles > 3) throw DomainError("brute_force_oracle: max_bubbles must be 1..3");
  if (!(grid_step > 0.0) || !std::isfinite(grid_step)) throw DomainError("brute_force_oracle: grid_step must be > 0");
  for (double v : M)
    if (!std::isfinite(v) || v < 0.0) throw DomainError("total masses must be finite and >= 0");
  Pattern need = 0;
  for (int i = 0; i < 3; ++i)
    if (M[i] > 0.0) need |= 1u << i;
  if (need == 0) throw DomainError("at least one total mass must be positive");

  std::vector<Pattern> patterns;
  for (Pattern p = 1; p < 8; ++p)
    if ((p & ~need) == 0) patterns.push_back(p);

  Search search(M, gamma, opts, grid_step);
  std::vector<std::vector<Pattern>> plans;
  for (int k = 1; k <= max_bubbles; ++k) {
    std::vector<std::vector<Pattern>> all;
    std::vector<Pattern> cur;
    multisets(patterns, k, 0, cur, all);
    for (auto& ms : all) {
      Pattern cover = 0;
      for (Pattern p : ms) cover |= p;
      if (cover == need) plans.push_back(ms);
    }
  }
  std::int64_t total = 0;
  for (const auto& ms : plans) total += search.count(ms);
  if (total > opts.budget)
    throw DomainError("brute_force_oracle: " + std::to_string(total) + " grid configurations exceed the budget of " +
                      std::to_string(opts.budget));
  for (const auto& ms : plans) search.run(ms);

  OracleResult out;
  out.grid_points = search.visited();
  out.energy = std::numeric_limits<double>::infinity();
  for (const auto& cand : search.best()) {
    std::vector<MassTriple> bubbles;
    for (const auto& u : cand.units)
      bubbles.emplace_back(u[0] * search.unit()[0], u[1] * search.unit()[1], u[2] * search.unit()[2]);
    double e = 0.0;
    bubbles = polish(std::move(bubbles), gamma, search.unit(), opts.geometry, &e);
    if (e < out.energy) {
      out.energy = e;
      out.config = Configuration(bubbles, M).canonical();
    }
  }
  return out;
}

}  // namespace tetra
