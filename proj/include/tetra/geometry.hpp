#pragma once

// Exact planar geometry of single, double and triple bubbles.
//
// Arc slots follow one fixed numbering throughout the library:
//   0, 1, 2  outer arcs of lobes 1, 2, 3
//   3        interface between lobes 1 and 2
//   4        interface between lobes 1 and 3
//   5        interface between lobes 2 and 3
// Interface curvature for the pair (i < j) is kappa_j - kappa_i, i.e. positive
// when the wall bulges into lobe i. Outer curvatures are always positive.
//
// Junction slots: 0 is the central junction of a triple bubble (or the first
// junction of a double bubble); 1 + (pair slot - 3) is the outer junction where
// the interface of that pair ends.

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tetra/vec2.hpp"

namespace tetra {

inline constexpr double kPi = 3.14159265358979323846;

enum class BubbleKind { Single, Double, Triple };

/// Lobe masses of one bubble. Lobe types are 0-based internally (type 1 is index 0).
class MassTriple {
 public:
  MassTriple(double m1, double m2, double m3);
  explicit MassTriple(const std::array<double, 3>& m) : MassTriple(m[0], m[1], m[2]) {}

  double operator[](int i) const { return m_[i]; }
  const std::array<double, 3>& values() const { return m_; }
  double total() const { return m_[0] + m_[1] + m_[2]; }

  BubbleKind kind() const;
  /// Indices of the positive lobes in increasing order.
  std::vector<int> present() const;
  int lobe_count() const;

  bool operator==(const MassTriple&) const = default;

 private:
  std::array<double, 3> m_;
};

const char* to_string(BubbleKind kind);
/// Slot of the interface between lobes i != j (0-based), in {3, 4, 5}.
int pair_slot(int i, int j);

/// One circular arc (or straight segment), stored as a turtle path.
struct Arc {
  Vec2 start;
  double heading = 0.0;  ///< tangent direction at start, radians
  double turn = 0.0;     ///< signed curvature, positive turning left
  double length = 0.0;

  Vec2 end() const;
  double end_heading() const { return heading + turn * length; }
  Vec2 point_at(double s) const;
  Vec2 tangent_at(double s) const { return unit(heading + turn * s); }
  std::optional<Vec2> center() const;
  /// Area between the chord and the arc, positive when the arc lies to the
  /// right of the chord (outward for a counter-clockwise loop).
  double segment_area() const;
};

/// Triple-solver unknowns in the sorted, mass-normalised frame. Lets callers
/// warm-start repeated solves at nearby masses.
struct TripleSeed {
  std::array<double, 3> sorted_masses{};  ///< normalised so the largest is 1
  std::array<double, 9> unknowns{};
};

struct ClusterGeometry {
  BubbleKind kind = BubbleKind::Single;
  std::array<double, 3> masses{};

  std::array<bool, 6> present{};
  std::array<Arc, 6> arcs{};
  std::array<double, 6> curvatures{};   ///< inverse length, slot convention above
  std::array<double, 6> arc_angles{};   ///< signed central angle curvature * length
  std::array<double, 6> arc_lengths{};
  std::array<double, 6> chords{};
  /// Angles at the central junction between chords (h4,h5), (h4,h6), (h5,h6).
  std::array<double, 3> junction_angles{};
  std::vector<Vec2> junctions;
  std::array<std::optional<Vec2>, 6> centers{};
  double perimeter = 0.0;

  bool degenerate = false;  ///< a lobe below the mass-ratio threshold was dropped
  std::string note;
  double residual = 0.0;    ///< final scaled residual of the iterative solve
  std::optional<TripleSeed> seed;

  /// 1/r_i of the outer arcs; only meaningful for present lobes.
  std::array<double, 3> outer_curvatures() const {
    return {curvatures[0], curvatures[1], curvatures[2]};
  }
};

struct GeometryOptions {
  double tolerance = 1e-12;
  int max_newton_iterations = 100;
  int max_continuation_steps = 400;
  /// Lobes with m_i / max m below this are dropped and the bubble is solved
  /// one order lower.
  double degeneracy_ratio = 1e-9;
};

ClusterGeometry solve_single(double m);
ClusterGeometry solve_double(double mi, double mj, const GeometryOptions& opts = {});
ClusterGeometry solve_triple(const MassTriple& m, const GeometryOptions& opts = {},
                             const TripleSeed* hint = nullptr);
/// Dispatch on the zero pattern of m. Lobe labels are preserved in the result.
ClusterGeometry solve(const MassTriple& m, const GeometryOptions& opts = {},
                      const TripleSeed* hint = nullptr);

double perimeter(const MassTriple& m, const GeometryOptions& opts = {});
/// dp/dm_i = 1/r_i for each present lobe; absent lobes report NaN.
std::array<double, 3> perimeter_gradient(const MassTriple& m, const GeometryOptions& opts = {});

/// Perimeter of the double bubble with lobe areas a and b.
double double_bubble_perimeter(double a, double b);
/// Closed form of the symmetric triple bubble (three straight walls).
double symmetric_triple_perimeter(double m);

struct ComparabilityConstants {
  double c1 = 0.0;  ///< min over the sample of m_i / r_i^2
  double c2 = 0.0;  ///< max over the sample of m_i / r_i^2
};
ComparabilityConstants comparability_constants(std::span<const MassTriple> grid,
                                               const GeometryOptions& opts = {});

// Independent re-evaluation of invariants on a solved geometry.
struct GeometryCheck {
  std::array<double, 3> areas{};         ///< recomputed from segment + triangle formulas
  double area_rel_error = 0.0;
  double junction_angle_error = 0.0;     ///< max |angle - 2pi/3| over all junctions
  double reciprocal_residual = 0.0;      ///< max |kappa_pair - (kappa_j - kappa_i)|
  double collinearity_error = 0.0;       ///< max normalised sine over center triples
};
GeometryCheck check_geometry(const ClusterGeometry& g);

}  // namespace tetra
