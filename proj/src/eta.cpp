// Finite-scale energy of a placed configuration. Each bubble is the frozen
// droplet-limit cluster scaled by eta and centred at its placement:
//
//   E_eta = sum_k p(m^k)
//         + (1/|log eta|) sum_ij (Gamma_ij/2) sum_{k,h} int int G(x_k - x_h + eta(z - w))
//
// On the diagonal k = h, G = -(1/2pi) log|.| + R splits off the e0 interaction
// exactly; the rest is the O(1/|log eta|) remainder.

#include <cmath>
#include <limits>

#include "tetra/errors.hpp"
#include "tetra/torus.hpp"

namespace tetra {

namespace {

void check_bijection(const TorusPlacement& p, const Configuration& c) {
  if (p.positions.size() != c.size()) throw DomainError("placement must place every bubble exactly once");
  std::vector<bool> seen(c.size(), false);
  for (std::size_t k : p.bubble_index) {
    if (k >= c.size() || seen[k]) throw DomainError("placement must place every bubble exactly once");
    seen[k] = true;
  }
}

double eta_max_from(const TorusPlacement& p, const std::vector<double>& radius) {
  double em = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < p.positions.size(); ++k) {
    em = std::min(em, 0.25 / radius[k]);
    for (std::size_t h = k + 1; h < p.positions.size(); ++h)
      em = std::min(em, torus_distance(p.positions[k], p.positions[h]) / (radius[k] + radius[h]));
  }
  return em;
}

// Double integral of f(z - w) over two lobes, doubling the rule order until
// two successive values agree to `tol`.
template <class F>
double smooth_double(const std::vector<Arc>& a, const std::vector<Arc>& b, F f, double tol) {
  double prev = std::numeric_limits<double>::quiet_NaN();
  for (int order = 4; order <= 32; order *= 2) {
    const auto ra = lobe_rule(a, order), rb = lobe_rule(b, order);
    std::vector<double> rows;
    rows.reserve(ra.nodes.size());
    for (std::size_t q = 0; q < ra.nodes.size(); ++q) {
      double row = 0.0;
      for (std::size_t r = 0; r < rb.nodes.size(); ++r) row += rb.weights[r] * f(ra.nodes[q] - rb.nodes[r]);
      rows.push_back(ra.weights[q] * row);
    }
    const double v = stable_sum(std::move(rows));
    if (std::abs(v - prev) <= tol * std::abs(v) + 1e-15) return v;
    prev = v;
  }
  throw AccuracyError("E_eta quadrature did not reach the requested tolerance");
}

}  // namespace

double eta_max(const TorusPlacement& p, const Configuration& c, const GeometryOptions& opts) {
  check_bijection(p, c);
  std::vector<double> radius;
  for (std::size_t k = 0; k < p.positions.size(); ++k)
    radius.push_back(cluster_support(c[p.bubble_index[k]], opts).enclosing_radius);
  return eta_max_from(p, radius);
}

EtaEnergy assemble_E_eta(const Configuration& c, const TorusPlacement& p, double eta, const GammaMatrix& gamma,
                         double tol, const GreensEvaluator& greens) {
  if (!(eta > 0.0) || !(eta < 1.0)) throw DomainError("assemble_E_eta needs 0 < eta < 1");
  check_bijection(p, c);
  const std::size_t K = p.positions.size();
  std::vector<ClusterSupport> sup;
  std::vector<double> radius;
  for (std::size_t k = 0; k < K; ++k) {
    sup.push_back(cluster_support(c[p.bubble_index[k]]));
    radius.push_back(sup.back().enclosing_radius);
  }
  EtaEnergy out;
  out.eta = eta;
  out.eta_max = eta_max_from(p, radius);
  if (!(eta < out.eta_max))
    throw DomainError("eta = " + std::to_string(eta) + " exceeds eta_max = " + std::to_string(out.eta_max) +
                      " (supports overlap or reach the torus scale)");

  std::vector<double> perim, lead, logs, regs, cross;
  for (std::size_t k = 0; k < K; ++k) {
    const MassTriple& m = c[p.bubble_index[k]];
    perim.push_back(sup[k].geometry.perimeter);
    lead.push_back(interaction_energy(m, gamma));
    for (int i = 0; i < 3; ++i)
      for (int j = i; j < 3; ++j) {
        if (gamma(i, j) == 0.0 || sup[k].lobes[i].empty() || sup[k].lobes[j].empty()) continue;
        // Off-diagonal pairs (i, j) and (j, i) are equal.
        const double w = (i == j ? 0.5 : 1.0) * gamma(i, j);
        logs.push_back(-w * log_double_integral(sup[k].lobes[i], sup[k].lobes[j]) / (2.0 * kPi));
        regs.push_back(w * smooth_double(
                               sup[k].lobes[i], sup[k].lobes[j],
                               [&](Vec2 d) { return greens.regular_part(d * eta); }, tol));
      }
  }
  for (std::size_t k = 0; k < K; ++k)
    for (std::size_t h = k + 1; h < K; ++h) {
      const Vec2 x = torus_delta(p.positions[k], p.positions[h]);
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
          if (gamma(i, j) == 0.0 || sup[k].lobes[i].empty() || sup[h].lobes[j].empty()) continue;
          // (k, h) and (h, k) agree by evenness of G.
          cross.push_back(gamma(i, j) * smooth_double(
                                            sup[k].lobes[i], sup[h].lobes[j],
                                            [&](Vec2 d) { return greens.eval(x + d * eta); }, tol));
        }
    }
  out.perimeter = stable_sum(perim);
  out.leading = stable_sum(lead);
  out.log_self = stable_sum(logs);
  out.regular_self = stable_sum(regs);
  out.cross = stable_sum(cross);
  out.remainder = (out.log_self + out.regular_self + out.cross) / std::abs(std::log(eta));
  out.total = out.perimeter + out.leading + out.remainder;
  return out;
}

}  // namespace tetra
