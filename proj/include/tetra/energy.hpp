#pragma once

// Leading-order droplet energy e0 of one bubble and of a finite configuration.
//
//   e0(m) = p(m) + sum_ij Gamma_ij m_i m_j / (4 pi)
//
// which reduces to the double/single forms when lobes vanish.

#include <array>
#include <optional>
#include <vector>

#include "tetra/geometry.hpp"

namespace tetra {

/// Symmetric 3x3 interaction matrix. Symmetry is checked exactly.
class GammaMatrix {
 public:
  GammaMatrix() = default;
  explicit GammaMatrix(const std::array<std::array<double, 3>, 3>& g);

  static GammaMatrix zero() { return {}; }
  static GammaMatrix identity() { return diagonal(1.0, 1.0, 1.0); }
  static GammaMatrix diagonal(double g1, double g2, double g3);

  double operator()(int i, int j) const { return g_[i][j]; }
  const std::array<std::array<double, 3>, 3>& rows() const { return g_; }
  bool is_diagonal() const;
  GammaMatrix scaled(double t) const;

  bool operator==(const GammaMatrix&) const = default;

 private:
  std::array<std::array<double, 3>, 3> g_{};
};

/// Finite list of bubbles with cached totals.
class Configuration {
 public:
  Configuration() = default;
  explicit Configuration(std::vector<MassTriple> bubbles);
  /// Also checks that the bubbles sum to `totals` (1e-12 relative per type).
  Configuration(std::vector<MassTriple> bubbles, const std::array<double, 3>& totals);

  const std::vector<MassTriple>& bubbles() const { return bubbles_; }
  const std::array<double, 3>& totals() const { return totals_; }
  std::size_t size() const { return bubbles_.size(); }
  bool empty() const { return bubbles_.empty(); }
  const MassTriple& operator[](std::size_t k) const { return bubbles_[k]; }

  /// Lobes of each type, and bubbles of each kind.
  std::array<int, 3> lobe_counts() const;
  int count(BubbleKind kind) const;
  /// Doubles made of lobe types i and j.
  int count_double(int i, int j) const;
  int count_single(int i) const;

  /// Deterministic order: triples, doubles, singles; larger masses first.
  Configuration canonical() const;

 private:
  std::vector<MassTriple> bubbles_;
  std::array<double, 3> totals_{};
};

/// Per-lobe gradient; std::nullopt marks an inactive (zero) lobe.
using LobeGradient = std::array<std::optional<double>, 3>;

double interaction_energy(const MassTriple& m, const GammaMatrix& gamma);

double e0(const MassTriple& m, const GammaMatrix& gamma, const GeometryOptions& opts = {});
/// g_i = (1/2pi) sum_j Gamma_ij m_j + 1/r_i on positive lobes.
LobeGradient e0_gradient(const MassTriple& m, const GammaMatrix& gamma,
                         const GeometryOptions& opts = {});

/// e0, gradient and geometry from a single solve.
struct BubbleEvaluation {
  double energy = 0.0;
  LobeGradient gradient;
  ClusterGeometry geometry;
};
BubbleEvaluation evaluate_bubble(const MassTriple& m, const GammaMatrix& gamma,
                                 const GeometryOptions& opts = {}, const TripleSeed* hint = nullptr);

/// Order-independent sum of e0 over the bubbles (sorted compensated summation).
double configuration_energy(const Configuration& c, const GammaMatrix& gamma,
                            const GeometryOptions& opts = {});

/// Neumaier-compensated sum of the values after sorting by magnitude, so the
/// result does not depend on input order.
double stable_sum(std::vector<double> values);

}  // namespace tetra
