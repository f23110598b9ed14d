#include "tetra/energy.hpp"

#include <algorithm>
#include <cmath>

#include "tetra/errors.hpp"

namespace tetra {

GammaMatrix::GammaMatrix(const std::array<std::array<double, 3>, 3>& g) : g_(g) {
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      if (!std::isfinite(g[i][j])) throw DomainError("Gamma entries must be finite");
      if (g[i][j] != g[j][i]) throw DomainError("Gamma must be symmetric");
    }
    if (g[i][i] < 0.0) throw DomainError("Gamma diagonal must be nonnegative");
  }
}

GammaMatrix GammaMatrix::diagonal(double g1, double g2, double g3) {
  return GammaMatrix({{{g1, 0.0, 0.0}, {0.0, g2, 0.0}, {0.0, 0.0, g3}}});
}

bool GammaMatrix::is_diagonal() const {
  return g_[0][1] == 0.0 && g_[0][2] == 0.0 && g_[1][2] == 0.0;
}

GammaMatrix GammaMatrix::scaled(double t) const {
  auto g = g_;
  for (auto& row : g)
    for (double& v : row) v *= t;
  return GammaMatrix(g);
}

// ---------------------------------------------------------------------------

Configuration::Configuration(std::vector<MassTriple> bubbles) : bubbles_(std::move(bubbles)) {
  for (int i = 0; i < 3; ++i) {
    std::vector<double> col;
    for (const auto& b : bubbles_) col.push_back(b[i]);
    totals_[i] = stable_sum(std::move(col));
  }
}

Configuration::Configuration(std::vector<MassTriple> bubbles, const std::array<double, 3>& totals)
    : Configuration(std::move(bubbles)) {
  for (int i = 0; i < 3; ++i) {
    if (std::abs(totals_[i] - totals[i]) > 1e-12 * std::max(1.0, std::abs(totals[i])))
      throw DomainError("bubble masses do not add up to the totals");
    totals_[i] = totals[i];
  }
}

std::array<int, 3> Configuration::lobe_counts() const {
  std::array<int, 3> n{};
  for (const auto& b : bubbles_)
    for (int i = 0; i < 3; ++i) n[i] += b[i] > 0.0;
  return n;
}

int Configuration::count(BubbleKind kind) const {
  return static_cast<int>(
      std::count_if(bubbles_.begin(), bubbles_.end(), [&](const MassTriple& b) { return b.kind() == kind; }));
}

int Configuration::count_double(int i, int j) const {
  int n = 0;
  for (const auto& b : bubbles_)
    if (b.kind() == BubbleKind::Double && b[i] > 0.0 && b[j] > 0.0) ++n;
  return n;
}

int Configuration::count_single(int i) const {
  int n = 0;
  for (const auto& b : bubbles_)
    if (b.kind() == BubbleKind::Single && b[i] > 0.0) ++n;
  return n;
}

Configuration Configuration::canonical() const {
  auto sorted = bubbles_;
  std::sort(sorted.begin(), sorted.end(), [](const MassTriple& a, const MassTriple& b) {
    if (a.lobe_count() != b.lobe_count()) return a.lobe_count() > b.lobe_count();
    // Zero pattern first (type 1 lobes before type 2 ...), then larger masses.
    for (int i = 0; i < 3; ++i)
      if ((a[i] > 0.0) != (b[i] > 0.0)) return a[i] > 0.0;
    return a.values() > b.values();
  });
  Configuration out;
  out.bubbles_ = std::move(sorted);
  out.totals_ = totals_;
  return out;
}

// ---------------------------------------------------------------------------

double interaction_energy(const MassTriple& m, const GammaMatrix& gamma) {
  double s = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) s += gamma(i, j) * m[i] * m[j];
  return s / (4.0 * kPi);
}

BubbleEvaluation evaluate_bubble(const MassTriple& m, const GammaMatrix& gamma,
                                 const GeometryOptions& opts, const TripleSeed* hint) {
  BubbleEvaluation out;
  out.geometry = solve(m, opts, hint);
  out.energy = out.geometry.perimeter + interaction_energy(m, gamma);
  for (int i = 0; i < 3; ++i) {
    if (!(m[i] > 0.0)) continue;
    double lin = 0.0;
    for (int j = 0; j < 3; ++j) lin += gamma(i, j) * m[j];
    // A lobe dropped by the degeneracy threshold has no arc of its own; its
    // curvature is effectively infinite, so it is reported as inactive.
    if (out.geometry.present[i]) out.gradient[i] = lin / (2.0 * kPi) + out.geometry.curvatures[i];
  }
  return out;
}

double e0(const MassTriple& m, const GammaMatrix& gamma, const GeometryOptions& opts) {
  return evaluate_bubble(m, gamma, opts).energy;
}

LobeGradient e0_gradient(const MassTriple& m, const GammaMatrix& gamma, const GeometryOptions& opts) {
  return evaluate_bubble(m, gamma, opts).gradient;
}

double stable_sum(std::vector<double> values) {
  std::sort(values.begin(), values.end(), [](double a, double b) {
    return std::abs(a) != std::abs(b) ? std::abs(a) < std::abs(b) : a < b;
  });
  double sum = 0.0, comp = 0.0;
  for (double v : values) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v))
      comp += (sum - t) + v;
    else
      comp += (v - t) + sum;
    sum = t;
  }
  return sum + comp;
}

double configuration_energy(const Configuration& c, const GammaMatrix& gamma, const GeometryOptions& opts) {
  std::vector<double> parts;
  parts.reserve(c.size());
  for (const auto& b : c.bubbles()) parts.push_back(e0(b, gamma, opts));
  return stable_sum(std::move(parts));
}

}  // namespace tetra
