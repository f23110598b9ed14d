#pragma once

// Periodic Green's function of the unit flat torus, bubble placement and the
// finite-scale energy E_eta of a placed configuration.
//
//   -Delta G = delta - 1,  int G = 0,   G(x) = -(1/2pi) log|x| + R(x)
//
// Points live in the fundamental domain [-1/2, 1/2)^2.

#include <array>
#include <optional>
#include <vector>

#include "tetra/energy.hpp"
#include "tetra/vec2.hpp"

namespace tetra {

/// Wrap into [-1/2, 1/2)^2.
Vec2 canonical_point(Vec2 x);
/// Shortest periodic displacement a - b, and its length.
Vec2 torus_delta(Vec2 a, Vec2 b);
double torus_distance(Vec2 a, Vec2 b);

/// Ewald-split evaluator: a Gaussian-damped Fourier sum plus exponential
/// integrals over periodic images. Immutable after construction.
class GreensEvaluator {
 public:
  /// `truncation` caps the Fourier modes per axis (and image shells);
  /// `split` is the Ewald time s (Fourier damping exp(-4 pi^2 s |k|^2)).
  explicit GreensEvaluator(int truncation = 64, double split = 0.25 / kPi);

  int truncation() const { return truncation_; }
  double split() const { return split_; }

  /// G(x); throws SingularityError at x = 0 (mod 1) and AccuracyError when
  /// `tol` needs more modes than the truncation allows.
  double eval(Vec2 x, double tol = 1e-14) const;
  Vec2 gradient(Vec2 x, double tol = 1e-14) const;
  /// R(x) = G(x) + (1/2pi) log|x| for |x| < 1/2 (R(0) included).
  double regular_part(Vec2 x, double tol = 1e-14) const;
  double regular_at_zero(double tol = 1e-14) const { return regular_part({0.0, 0.0}, tol); }

  /// Modes per axis and image shells needed for an absolute tolerance.
  int modes_for(double tol) const;
  int images_for(double tol) const;

 private:
  double fourier(Vec2 y, int modes) const;
  double images(Vec2 y, int shells, bool drop_origin) const;
  void require(int modes, int shells) const;

  int truncation_;
  double split_;
};

/// Independent value of R(0): heat-regularised Fourier series alone (no image
/// sum) with the regularisation tied to the cutoff, s = 1/cutoff.
double spectral_regular_at_zero(int cutoff);
/// Aitken extrapolation of the spectral values at cutoff, 2 cutoff, 4 cutoff.
double spectral_regular_at_zero_extrapolated(int cutoff);
/// Closed form -(1/2pi) log(2 pi eta(i)^2) from the Kronecker limit formula.
double kronecker_regular_at_zero();

// ---------------------------------------------------------------------------
// Bubble supports

/// One bubble's exact planar support, translated so its area centroid sits at
/// the origin, with oriented (counter-clockwise) boundary chains per lobe.
struct ClusterSupport {
  ClusterGeometry geometry;
  Vec2 centroid;                          ///< in the solver's frame
  double enclosing_radius = 0.0;          ///< max distance from the centroid
  std::array<std::vector<Arc>, 3> lobes;  ///< empty for absent lobes, centroid frame
};

ClusterSupport cluster_support(const MassTriple& m, const GeometryOptions& opts = {});

/// Signed-cone quadrature of a lobe: integrates smooth f exactly up to the
/// order of the rule. `order` Gauss points per panel and radial direction.
struct LobeRule {
  std::vector<Vec2> nodes;
  std::vector<double> weights;
};
LobeRule lobe_rule(const std::vector<Arc>& boundary, int order);

/// int_A int_B log|z - w| dz dw over two lobes of one bubble, via the double
/// boundary form -oint oint (r^2/4)(log r - 1) (n_z . n_w).
double log_double_integral(const std::vector<Arc>& a, const std::vector<Arc>& b, int order = 16);

// ---------------------------------------------------------------------------
// Placement

struct TorusPlacement {
  std::vector<Vec2> positions;           ///< canonicalised on construction
  std::vector<std::size_t> bubble_index; ///< configuration bubble of each position
  double eta = 0.0;                      ///< 0: point-mass limit

  TorusPlacement() = default;
  TorusPlacement(std::vector<Vec2> pos, std::vector<std::size_t> index, double eta = 0.0);
};

/// Pair weights w_kh = (1/2) sum_ij Gamma_ij m_i^k m_j^h.
double pair_weight(const MassTriple& a, const MassTriple& b, const GammaMatrix& gamma);

/// Surrogate next-order placement energy sum_{k != h} w_kh G(x_k - x_h).
double placement_energy(const TorusPlacement& p, const Configuration& c, const GammaMatrix& gamma,
                        const GreensEvaluator& greens = GreensEvaluator());
std::vector<Vec2> placement_gradient(const TorusPlacement& p, const Configuration& c, const GammaMatrix& gamma,
                                     const GreensEvaluator& greens = GreensEvaluator());

struct SeparationReport {
  double distance = 0.0;  ///< negative (or zero for coincident centres) on overlap
  bool overlap = false;
  std::size_t first = 0;
  std::size_t second = 0;
};
/// Minimal torus distance between supports: centre distance minus eta times
/// the enclosing radii. Needs at least two positions.
SeparationReport min_pairwise_distance(const TorusPlacement& p, const Configuration& c,
                                       const GeometryOptions& opts = {});

struct PlacementOptions {
  double gradient_tol = 1e-8;
  int max_iterations = 5000;
};

struct PlacementResult {
  TorusPlacement placement;
  double energy = 0.0;
  double gradient_norm = 0.0;
  double min_distance = 0.0;
  TorusPlacement initial;  ///< grid-square barycentres
  double initial_energy = 0.0;
  double initial_min_distance = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Start from distinct barycentres of an n_grid x n_grid partition, then
/// descend on placement_energy. Requires n_grid >= ceil(sqrt(K)) + 1.
PlacementResult optimize_placement(const Configuration& c, const GammaMatrix& gamma, int n_grid,
                                   const PlacementOptions& opts = {},
                                   const GreensEvaluator& greens = GreensEvaluator());

// ---------------------------------------------------------------------------
// Finite-scale energy

struct EtaEnergy {
  double total = 0.0;
  double perimeter = 0.0;    ///< sum of cluster perimeters (scale free)
  double leading = 0.0;      ///< sum_k Gamma-interaction of e0
  double log_self = 0.0;     ///< -(1/2pi) sum int int log|z-w|, weighted by Gamma_ij/2
  double regular_self = 0.0; ///< int int R(eta(z-w)), weighted
  double cross = 0.0;        ///< inter-bubble int int G, weighted
  double remainder = 0.0;    ///< (log_self + regular_self + cross) / |log eta| = total - sum e0
  double eta = 0.0;
  double eta_max = 0.0;
};

/// Largest eta with every enclosing radius below 1/4 and supports disjoint.
double eta_max(const TorusPlacement& p, const Configuration& c, const GeometryOptions& opts = {});

EtaEnergy assemble_E_eta(const Configuration& c, const TorusPlacement& p, double eta, const GammaMatrix& gamma,
                         double tol = 1e-8, const GreensEvaluator& greens = GreensEvaluator());

}  // namespace tetra
