#pragma once

// Global minimisation of the mass-partition energy
//
//   e0bar(M) = inf { sum_k e0(m^k) : sum_k m^k_i = M_i, m^k_i >= 0 }
//
// over finite bubble configurations: discrete enumeration of bubble-count
// signatures, a continuous KKT solve per signature, and analytic bounds.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tetra/energy.hpp"

namespace tetra {

using Totals = std::array<double, 3>;

/// Bubble counts by kind. Double pairs are indexed (1,2), (1,3), (2,3).
struct Signature {
  int n_triple = 0;
  std::array<int, 3> n_double{};
  std::array<int, 3> n_single{};

  int bubble_count() const;
  /// Lobes of each type implied by the counts.
  std::array<int, 3> lobe_counts() const;
  std::string to_string() const;

  auto operator<=>(const Signature&) const = default;
};

/// Index of the double pair (i, j) in Signature::n_double.
int double_index(int i, int j);
Signature signature_of(const Configuration& c);

struct BoundsReport {
  Totals m_plus{};
  Totals m_minus{};
  std::array<std::int64_t, 3> count_upper{};
  Totals lagrange_estimate{};
  // Constants the bounds were computed with.
  double c1 = 0.0;
  double c2 = 0.0;
  double C1 = 0.0;
  double C2 = 0.0;
  double energy_upper = 0.0;
};

/// m_i^+ = 8 pi / Gamma_ii^(2/3); +inf when Gamma_ii = 0.
Totals mass_upper_bound(const GammaMatrix& gamma);
/// m_i^- = c1 min{ [(1/pi) sum_j Gamma_ij M_j]^-2, [C2 M_i / (4 c2 E)]^2 }; 0 for M_i = 0.
Totals mass_lower_bound(const Totals& M, const GammaMatrix& gamma, double energy_upper, double c1,
                        double c2, double C2);

/// Comparability constants over a fixed scale-free sample of single, double
/// and triple shapes (mass ratios down to 1e-2).
ComparabilityConstants default_comparability_constants();
/// Energy of equal single bubbles no larger than m^+: a feasible upper bound on e0bar.
double feasible_energy_upper(const Totals& M, const GammaMatrix& gamma);
BoundsReport bounds_report(const Totals& M, const GammaMatrix& gamma);

struct EnumerationReport {
  std::vector<Signature> signatures;
  std::array<int, 3> lobe_min{};
  std::array<int, 3> lobe_max{};
  bool pruned = false;             ///< exclusion rules applied (diagonal Gamma)
  std::int64_t pruned_count = 0;
};

EnumerationReport enumerate_signatures_report(const Totals& M, const GammaMatrix& gamma, int count_cap);
std::vector<Signature> enumerate_signatures(const Totals& M, const GammaMatrix& gamma, int count_cap);

struct OptimizerOptions {
  int multistart = 8;
  std::uint64_t seed = 0;
  double tol = 1e-11;   ///< target multiplier spread of the Newton polish
  int max_gradient_steps = 400;
  int max_newton_steps = 60;
  /// Solve only the symmetric problem in which bubbles of the same kind share
  /// their masses (one start).
  bool class_reduced = false;
  GeometryOptions geometry;
};

struct KKTReport {
  Totals spread{};      ///< max - min of g_i over bubbles with m_i > 0
  Totals multiplier{};  ///< mean of g_i over those bubbles
  std::array<int, 3> active{};
  double max_spread() const;
};

struct MassOptimum {
  Configuration config;
  double energy = 0.0;
  KKTReport kkt;
  bool converged = false;
  int iterations = 0;
};

MassOptimum optimize_masses_detailed(const Signature& sig, const Totals& M, const GammaMatrix& gamma,
                                     const OptimizerOptions& opts = {});
Configuration optimize_masses(const Signature& sig, const Totals& M, const GammaMatrix& gamma,
                              const OptimizerOptions& opts = {});
/// Local refinement that keeps the bubble list of `start` (lobes may vanish).
MassOptimum refine_configuration(const Configuration& start, const GammaMatrix& gamma,
                                 const OptimizerOptions& opts = {});

KKTReport kkt_residual(const Configuration& c, const GammaMatrix& gamma, const GeometryOptions& opts = {});

struct MoveResult {
  Configuration config;
  double energy_before = 0.0;
  double energy_after = 0.0;
  std::string move;
};
/// Best strictly improving split or merge move, or nullopt when none improves.
std::optional<MoveResult> merge_split_moves(const Configuration& c, const GammaMatrix& gamma,
                                            const GeometryOptions& opts = {});

struct MinimizeOptions {
  int count_cap = 12;
  OptimizerOptions inner;
  /// Signatures whose symmetric energy is within this relative window of the
  /// best are re-solved with the full multi-start.
  double refine_window = 2e-3;
  int refine_min = 4;
};

struct MinimizeResult {
  Configuration config;
  double energy = 0.0;
  Signature signature;
  BoundsReport bounds;
  KKTReport kkt;
  bool cap_saturated = false;
  std::size_t signatures_examined = 0;
  bool pruned = false;
  /// Distinct configurations within 1e-9 of the optimum (the optimum first).
  std::vector<Configuration> ties;
};

MinimizeResult minimize_e0bar(const Totals& M, const GammaMatrix& gamma, const MinimizeOptions& opts = {});

struct CoexistenceCertificate {
  Totals m_plus{};
  Totals m_minus{};
  /// Named inequalities of the construction, with whether each holds.
  struct Check {
    std::string name;
    double lhs = 0.0;
    double rhs = 0.0;
    bool holds = false;
  };
  std::vector<Check> checks;
  std::string note;
};

struct CoexistenceParams {
  Totals M{};
  GammaMatrix gamma;
  CoexistenceCertificate certificate;
};

/// Parameters for at least N1 triples, N2 doubles of types {2,3} and N3
/// singles of type 3.
CoexistenceParams coexistence_params(int n1, int n2, int n3);

struct OracleOptions {
  std::int64_t budget = 5'000'000;  ///< max grid configurations evaluated
  int polish_candidates = 4;
  GeometryOptions geometry;
};

struct OracleResult {
  Configuration config;
  double energy = 0.0;
  std::int64_t grid_points = 0;
};

/// Exhaustive grid search over all configurations of at most max_bubbles
/// bubbles, followed by a compass-search polish. Independent of the KKT solver.
OracleResult brute_force_oracle(const Totals& M, const GammaMatrix& gamma, int max_bubbles,
                                double grid_step, const OracleOptions& opts = {});

}  // namespace tetra
