// Signatures, analytic mass bounds and signature enumeration.

#include <algorithm>
#include <cmath>
#include <limits>

#include "tetra/errors.hpp"
#include "tetra/partition.hpp"

namespace tetra {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::array<std::array<int, 2>, 3> kPairs{{{0, 1}, {0, 2}, {1, 2}}};

void require_totals(const Totals& M) {
  for (double v : M)
    if (!std::isfinite(v) || v < 0.0) throw DomainError("total masses must be finite and >= 0");
  if (M[0] + M[1] + M[2] <= 0.0) throw DomainError("at least one total mass must be positive");
}
}  // namespace

int double_index(int i, int j) { return pair_slot(i, j) - 3; }

int Signature::bubble_count() const {
  return n_triple + n_double[0] + n_double[1] + n_double[2] + n_single[0] + n_single[1] + n_single[2];
}

std::array<int, 3> Signature::lobe_counts() const {
  std::array<int, 3> n{n_triple, n_triple, n_triple};
  for (int p = 0; p < 3; ++p) {
    n[kPairs[p][0]] += n_double[p];
    n[kPairs[p][1]] += n_double[p];
  }
  for (int i = 0; i < 3; ++i) n[i] += n_single[i];
  return n;
}

std::string Signature::to_string() const {
  std::string s = "T" + std::to_string(n_triple);
  s += " D12:" + std::to_string(n_double[0]) + " D13:" + std::to_string(n_double[1]) +
       " D23:" + std::to_string(n_double[2]);
  s += " S1:" + std::to_string(n_single[0]) + " S2:" + std::to_string(n_single[1]) +
       " S3:" + std::to_string(n_single[2]);
  return s;
}

Signature signature_of(const Configuration& c) {
  Signature s;
  for (const auto& b : c.bubbles()) {
    const auto lobes = b.present();
    if (lobes.size() == 3)
      ++s.n_triple;
    else if (lobes.size() == 2)
      ++s.n_double[double_index(lobes[0], lobes[1])];
    else
      ++s.n_single[lobes[0]];
  }
  return s;
}

// ---------------------------------------------------------------------------

Totals mass_upper_bound(const GammaMatrix& gamma) {
  Totals out;
  for (int i = 0; i < 3; ++i) {
    const double g = gamma(i, i);
    out[i] = g > 0.0 ? 8.0 * kPi / std::cbrt(g * g) : kInf;
  }
  return out;
}

Totals mass_lower_bound(const Totals& M, const GammaMatrix& gamma, double energy_upper, double c1,
                        double c2, double C2) {
  if (!(c1 > 0.0) || !(c2 > 0.0) || !(C2 > 0.0) || !(energy_upper > 0.0))
    throw DomainError("mass_lower_bound needs positive constants and energy bound");
  Totals out{};
  for (int i = 0; i < 3; ++i) {
    if (!(M[i] > 0.0)) continue;
    double row = 0.0;
    for (int j = 0; j < 3; ++j) row += gamma(i, j) * M[j];
    row /= kPi;
    const double first = row > 0.0 ? 1.0 / (row * row) : kInf;
    const double q = C2 * M[i] / (4.0 * c2 * energy_upper);
    out[i] = c1 * std::min(first, q * q);
  }
  return out;
}

ComparabilityConstants default_comparability_constants() {
  // m / r^2 is scale free, so one decade-spaced sample covers all sizes.
  const double levels[] = {0.0, 0.01, 0.1, 1.0};
  std::vector<MassTriple> grid;
  for (double a : levels)
    for (double b : levels)
      for (double c : levels)
        if (a + b + c > 0.0) grid.emplace_back(a, b, c);
  return comparability_constants(grid);
}

double feasible_energy_upper(const Totals& M, const GammaMatrix& gamma) {
  require_totals(M);
  const Totals mp = mass_upper_bound(gamma);
  double total = 0.0;
  for (int i = 0; i < 3; ++i) {
    if (!(M[i] > 0.0)) continue;
    const double n0 = std::max(1.0, std::ceil(M[i] / mp[i]));
    double best = kInf;
    for (double n = n0; n < n0 + 64.0; n += 1.0) {
      const double m = M[i] / n;
      best = std::min(best, n * (2.0 * std::sqrt(kPi * m) + gamma(i, i) * m * m / (4.0 * kPi)));
    }
    total += best;
  }
  return total;
}

BoundsReport bounds_report(const Totals& M, const GammaMatrix& gamma) {
  require_totals(M);
  BoundsReport r;
  const auto cc = default_comparability_constants();
  r.c1 = cc.c1;
  r.c2 = cc.c2;
  r.C1 = 2.0 * std::sqrt(kPi);
  // sqrt(m) >= sqrt(c1) r turns the per-lobe isoperimetric constant into C2.
  r.C2 = r.C1 * std::sqrt(r.c1);
  r.energy_upper = feasible_energy_upper(M, gamma);
  r.m_plus = mass_upper_bound(gamma);
  r.m_minus = mass_lower_bound(M, gamma, r.energy_upper, r.c1, r.c2, r.C2);
  for (int i = 0; i < 3; ++i) {
    if (!(M[i] > 0.0)) continue;
    const double n = std::ceil(M[i] / r.m_minus[i]);
    r.count_upper[i] = n > 1e15 ? std::int64_t(1e15) : std::int64_t(n);
    double row = 0.0;
    for (int j = 0; j < 3; ++j) row += gamma(i, j) * M[j];
    r.lagrange_estimate[i] = row / (2.0 * kPi) + std::sqrt(r.c2 / r.m_minus[i]);
  }
  return r;
}

// ---------------------------------------------------------------------------

EnumerationReport enumerate_signatures_report(const Totals& M, const GammaMatrix& gamma, int count_cap) {
  if (count_cap < 1) throw DomainError("count_cap must be at least 1");
  require_totals(M);
  const BoundsReport b = bounds_report(M, gamma);

  EnumerationReport rep;
  rep.pruned = gamma.is_diagonal();
  std::array<bool, 3> on{};
  for (int i = 0; i < 3; ++i) {
    on[i] = M[i] > 0.0;
    if (!on[i]) continue;
    // Every lobe is at most m^+, so at least M_i / m^+ lobes are needed.
    const double need = std::isfinite(b.m_plus[i]) ? std::ceil(M[i] / b.m_plus[i] * (1.0 - 1e-12)) : 1.0;
    rep.lobe_min[i] = static_cast<int>(std::max(1.0, std::min(need, 1e9)));
    rep.lobe_max[i] = static_cast<int>(std::min<std::int64_t>(count_cap, b.count_upper[i]));
  }
  for (int i = 0; i < 3; ++i)
    if (on[i] && rep.lobe_min[i] > rep.lobe_max[i]) return rep;  // nothing fits under the cap

  auto room = [&](int i, const std::array<int, 3>& used) { return on[i] ? rep.lobe_max[i] - used[i] : 0; };

  const int t_max = (on[0] && on[1] && on[2]) ? std::min({rep.lobe_max[0], rep.lobe_max[1], rep.lobe_max[2]}) : 0;
  for (int t = 0; t <= t_max; ++t) {
    std::array<int, 3> used{t, t, t};
    const int d0_max = std::min(room(0, used), room(1, used));
    for (int d0 = 0; d0 <= d0_max; ++d0) {
      std::array<int, 3> u0{used[0] + d0, used[1] + d0, used[2]};
      const int d1_max = std::min(room(0, u0), room(2, u0));
      for (int d1 = 0; d1 <= d1_max; ++d1) {
        std::array<int, 3> u1{u0[0] + d1, u0[1], u0[2] + d1};
        const int d2_max = std::min(room(1, u1), room(2, u1));
        for (int d2 = 0; d2 <= d2_max; ++d2) {
          std::array<int, 3> u2{u1[0], u1[1] + d2, u1[2] + d2};
          std::array<int, 3> s_lo{}, s_hi{};
          for (int i = 0; i < 3; ++i) {
            s_lo[i] = on[i] ? std::max(0, rep.lobe_min[i] - u2[i]) : 0;
            s_hi[i] = room(i, u2);
          }
          for (int s0 = s_lo[0]; s0 <= s_hi[0]; ++s0)
            for (int s1 = s_lo[1]; s1 <= s_hi[1]; ++s1)
              for (int s2 = s_lo[2]; s2 <= s_hi[2]; ++s2) {
                Signature sig{t, {d0, d1, d2}, {s0, s1, s2}};
                if (sig.bubble_count() == 0) continue;
                if (rep.pruned) {
                  const int kinds = (s0 > 0) + (s1 > 0) + (s2 > 0);
                  bool excluded = kinds > 1;
                  for (int i = 0; i < 3 && !excluded; ++i)
                    excluded = sig.n_single[i] > 0 && sig.n_double[2 - i] > 0;
                  if (excluded) {
                    ++rep.pruned_count;
                    continue;
                  }
                }
                rep.signatures.push_back(sig);
              }
        }
      }
    }
  }
  return rep;
}

std::vector<Signature> enumerate_signatures(const Totals& M, const GammaMatrix& gamma, int count_cap) {
  return enumerate_signatures_report(M, gamma, count_cap).signatures;
}

}  // namespace tetra
