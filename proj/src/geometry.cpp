#include "tetra/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Dense>

#include "tetra/errors.hpp"

namespace tetra {

namespace {

constexpr double kThird = 2.0 * kPi / 3.0;  // 120 degrees
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// sin(x)/x, exact at 0.
double sinc(double x) {
  if (std::abs(x) < 1e-4) {
    const double x2 = x * x;
    return 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
  }
  return std::sin(x) / x;
}

// (t - sin t) / t^2, regular at 0.
double segment_shape(double t) {
  if (std::abs(t) < 1e-2) {
    const double t2 = t * t;
    return t * (1.0 / 6.0 - t2 / 120.0 + t2 * t2 / 5040.0 - t2 * t2 * t2 / 362880.0);
  }
  return (t - std::sin(t)) / (t * t);
}

double segment_from(double length, double theta) {
  return 0.5 * length * length * segment_shape(theta);
}

double angle_between(Vec2 a, Vec2 b) { return std::atan2(std::abs(cross(a, b)), dot(a, b)); }

}  // namespace

// ---------------------------------------------------------------------------
// MassTriple

MassTriple::MassTriple(double m1, double m2, double m3) : m_{m1, m2, m3} {
  for (double v : m_) {
    if (!std::isfinite(v) || v < 0.0) throw DomainError("lobe masses must be finite and >= 0");
  }
  if (m1 + m2 + m3 <= 0.0) throw DomainError("at least one lobe mass must be positive");
}

BubbleKind MassTriple::kind() const {
  switch (lobe_count()) {
    case 1: return BubbleKind::Single;
    case 2: return BubbleKind::Double;
    default: return BubbleKind::Triple;
  }
}

std::vector<int> MassTriple::present() const {
  std::vector<int> out;
  for (int i = 0; i < 3; ++i)
    if (m_[i] > 0.0) out.push_back(i);
  return out;
}

int MassTriple::lobe_count() const {
  return static_cast<int>(std::count_if(m_.begin(), m_.end(), [](double v) { return v > 0.0; }));
}

const char* to_string(BubbleKind kind) {
  switch (kind) {
    case BubbleKind::Single: return "single";
    case BubbleKind::Double: return "double";
    case BubbleKind::Triple: return "triple";
  }
  return "?";
}

int pair_slot(int i, int j) {
  if (i > j) std::swap(i, j);
  if (i == 0 && j == 1) return 3;
  if (i == 0 && j == 2) return 4;
  if (i == 1 && j == 2) return 5;
  throw DomainError("pair_slot needs two distinct lobe indices in 0..2");
}

// ---------------------------------------------------------------------------
// Arc

Vec2 Arc::point_at(double s) const {
  const double half = 0.5 * turn * s;
  return start + unit(heading + half) * (s * sinc(half));
}

Vec2 Arc::end() const { return point_at(length); }

std::optional<Vec2> Arc::center() const {
  if (turn == 0.0) return std::nullopt;
  return start + unit(heading + 0.5 * kPi) * (1.0 / turn);
}

double Arc::segment_area() const { return segment_from(length, turn * length); }

// ---------------------------------------------------------------------------
// Assembly helpers

namespace {

void finish_arc_fields(ClusterGeometry& g, int slot, double spec_curvature) {
  const Arc& a = g.arcs[slot];
  g.present[slot] = true;
  g.curvatures[slot] = spec_curvature;
  g.arc_lengths[slot] = a.length;
  g.arc_angles[slot] = spec_curvature * a.length;
  g.chords[slot] = (a.end() - a.start).norm();
  g.centers[slot] = a.center();
}

ClusterGeometry single_geometry(int lobe, double m) {
  if (!(m > 0.0) || !std::isfinite(m)) throw DomainError("single bubble mass must be positive");
  ClusterGeometry g;
  g.kind = BubbleKind::Single;
  g.masses[lobe] = m;
  const double r = std::sqrt(m / kPi);
  g.arcs[lobe] = Arc{{r, 0.0}, 0.5 * kPi, 1.0 / r, 2.0 * kPi * r};
  finish_arc_fields(g, lobe, 1.0 / r);
  g.chords[lobe] = 0.0;
  g.centers[lobe] = Vec2{0.0, 0.0};
  g.perimeter = 2.0 * std::sqrt(kPi * m);
  return g;
}

// Double bubble on a unit chord: arcs are parametrised by their tangent-chord
// angle psi, so an arc spans 2 psi and has curvature 2 sin(psi).
struct UnitChordArc {
  double length;
  double segment;
};

UnitChordArc unit_chord_arc(double psi) {
  const double len = std::abs(psi) < 1e-8 ? 1.0 : psi / std::sin(psi);
  return {len, segment_from(len, 2.0 * psi)};
}

struct DoubleShape {
  double big_area;
  double small_area;
  double length;  // total arc length on a unit chord
};

DoubleShape double_shape(double psi) {
  const auto big = unit_chord_arc(kThird + psi);
  const auto small = unit_chord_arc(kThird - psi);
  const auto wall = unit_chord_arc(psi);
  return {big.segment - wall.segment, small.segment + wall.segment,
          big.length + small.length + wall.length};
}

// Interface tangent-chord angle in [0, pi/3) for the area ratio big/small >= 1.
double solve_interface_angle(double ratio) {
  if (ratio <= 1.0) return 0.0;
  const double target = std::log(ratio);
  double lo = 0.0;
  double hi = kPi / 3.0;
  for (int it = 0; it < 200 && hi - lo > 4.0 * std::numeric_limits<double>::epsilon(); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    const auto s = double_shape(mid);
    if (std::log(s.big_area / s.small_area) < target)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

ClusterGeometry double_geometry(int li, int lj, double mi, double mj) {
  if (!(mi > 0.0 && mj > 0.0)) throw DomainError("double bubble masses must be positive");
  if (li > lj) {
    std::swap(li, lj);
    std::swap(mi, mj);
  }
  const bool left_big = mi >= mj;
  const double big = std::max(mi, mj);
  const double small = std::min(mi, mj);
  const double psi = solve_interface_angle(big / small);
  const auto shape = double_shape(psi);
  const double h = std::sqrt(big / shape.big_area);

  // Junctions at (0,0) and (0,h); lobe li on the left (-x side).
  const double psi_left = left_big ? kThird + psi : kThird - psi;
  const double psi_right = left_big ? kThird - psi : kThird + psi;
  auto make = [h](double psi_arc, bool bulge_left) {
    const auto a = unit_chord_arc(psi_arc);
    const double kappa = 2.0 * std::sin(psi_arc) / h;
    return Arc{{0.0, 0.0},
               bulge_left ? 0.5 * kPi + psi_arc : 0.5 * kPi - psi_arc,
               bulge_left ? -kappa : kappa,
               a.length * h};
  };

  ClusterGeometry g;
  g.kind = BubbleKind::Double;
  g.masses[li] = mi;
  g.masses[lj] = mj;
  const int ps = pair_slot(li, lj);
  g.arcs[li] = make(psi_left, true);
  g.arcs[lj] = make(psi_right, false);
  g.arcs[ps] = make(psi, left_big);
  const double kl = 2.0 * std::sin(psi_left) / h;
  const double kr = 2.0 * std::sin(psi_right) / h;
  finish_arc_fields(g, li, kl);
  finish_arc_fields(g, lj, kr);
  // Convexity seen from lobe lj: positive when the wall bulges into li (left).
  const double kw = 2.0 * std::sin(psi) / h;
  finish_arc_fields(g, ps, left_big ? kw : -kw);
  g.junctions = {{0.0, 0.0}, {0.0, h}};
  g.perimeter = shape.length * h;
  return g;
}

// ---------------------------------------------------------------------------
// Triple bubble. Solved for sorted masses a >= b >= c normalised to a = 1.
//
// Unknowns u = (k1, k2, k3, t4, t5, t6, l4, l5, l6): outer curvatures, signed
// turning curvatures of the three walls traversed outward from the central
// junction, and the wall lengths. The walls leave the centre at 90, 210 and
// 330 degrees; each outer arc starts at one wall end turning 60 degrees and
// must close on the next wall end at 120 degrees. The closing angle fixes the
// outer arc length, so the residual is the closure position plus the areas.

using Vec9 = Eigen::Matrix<double, 9, 1>;
using Mat9 = Eigen::Matrix<double, 9, 9>;

struct TripleFrame {
  std::array<Arc, 3> walls;  // pairs (0,1), (0,2), (1,2)
  std::array<Arc, 3> outer;  // lobes 0, 1, 2
  std::array<Vec2, 4> junctions;
  std::array<double, 3> areas;
  std::array<Vec2, 3> closure;
};

TripleFrame build_frame(const Vec9& u) {
  TripleFrame f;
  const Vec2 o{0.0, 0.0};
  const double base = 0.5 * kPi;
  f.walls[0] = Arc{o, base, u[3], u[6]};
  f.walls[1] = Arc{o, base + kThird, u[4], u[7]};
  f.walls[2] = Arc{o, base + 2.0 * kThird, u[5], u[8]};
  const Vec2 p01 = f.walls[0].end();
  const Vec2 p02 = f.walls[1].end();
  const Vec2 p12 = f.walls[2].end();
  const double a01 = f.walls[0].end_heading();
  const double a02 = f.walls[1].end_heading();
  const double a12 = f.walls[2].end_heading();
  f.junctions = {o, p01, p02, p12};

  const double turn0 = a02 - a01 + kPi / 3.0;
  const double turn1 = a01 - a12 + kPi / 3.0 + 2.0 * kPi;
  const double turn2 = a12 - a02 + kPi / 3.0;
  f.outer[0] = Arc{p01, a01 + kPi / 3.0, u[0], turn0 / u[0]};
  f.outer[1] = Arc{p12, a12 + kPi / 3.0, u[1], turn1 / u[1]};
  f.outer[2] = Arc{p02, a02 + kPi / 3.0, u[2], turn2 / u[2]};
  f.closure = {f.outer[0].end() - p02, f.outer[1].end() - p01, f.outer[2].end() - p12};

  const double s01 = f.walls[0].segment_area();
  const double s02 = f.walls[1].segment_area();
  const double s12 = f.walls[2].segment_area();
  f.areas[0] = 0.5 * cross(p01, p02) + s01 + f.outer[0].segment_area() - s02;
  f.areas[1] = 0.5 * cross(p12, p01) + s12 + f.outer[1].segment_area() - s01;
  f.areas[2] = 0.5 * cross(p02, p12) + s02 + f.outer[2].segment_area() - s12;
  return f;
}

bool admissible(const Vec9& u) {
  for (int i = 0; i < 3; ++i)
    if (!(u[i] > 0.0) || !(u[6 + i] > 0.0)) return false;
  const TripleFrame f = build_frame(u);
  for (const Arc& a : f.outer)
    if (!(a.length > 0.0)) return false;
  return true;
}

Vec9 triple_residual(const Vec9& u, const std::array<double, 3>& m) {
  const TripleFrame f = build_frame(u);
  Vec9 r;
  for (int i = 0; i < 3; ++i) {
    r[2 * i] = f.closure[i].x * u[i];
    r[2 * i + 1] = f.closure[i].y * u[i];
    r[6 + i] = f.areas[i] / m[i] - 1.0;
  }
  return r;
}

Vec9 symmetric_unknowns() {
  const double len = std::sqrt(1.0 / (std::sqrt(3.0) / 4.0 + 3.0 * kPi / 8.0));
  const double k = 2.0 / (len * std::sqrt(3.0));
  Vec9 u;
  u << k, k, k, 0.0, 0.0, 0.0, len, len, len;
  return u;
}

struct NewtonResult {
  Vec9 u;
  double residual;
  bool converged;
};

NewtonResult triple_newton(Vec9 u, const std::array<double, 3>& m, double tol, int max_iter) {
  Vec9 r = triple_residual(u, m);
  double rinf = r.lpNorm<Eigen::Infinity>();
  for (int it = 0; it < max_iter; ++it) {
    if (rinf < 0.01 * tol) break;
    const double kmax = u.head<3>().maxCoeff();
    Mat9 jac;
    for (int j = 0; j < 9; ++j) {
      const double scale = j >= 3 && j < 6 ? std::abs(u[j]) + 1e-2 * kmax : std::abs(u[j]);
      const double h = 1e-8 * scale;
      Vec9 up = u;
      up[j] += h;
      jac.col(j) = (triple_residual(up, m) - r) / h;
    }
    const Vec9 step = jac.partialPivLu().solve(-r);
    if (!step.allFinite()) break;
    const double r2 = r.norm();
    double t = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 30; ++ls, t *= 0.5) {
      const Vec9 trial = u + t * step;
      if (!admissible(trial)) continue;
      const Vec9 rt = triple_residual(trial, m);
      if (rt.allFinite() && rt.norm() < (1.0 - 1e-4 * t) * r2) {
        u = trial;
        r = rt;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
    rinf = r.lpNorm<Eigen::Infinity>();
  }
  return {u, rinf, rinf <= tol};
}

struct TripleSolution {
  Vec9 u;
  double residual;
};

// Continuation along a straight line in log-mass space, halving the step on
// failure and growing it again after successes.
TripleSolution continue_triple(const std::array<double, 3>& from_m, Vec9 u,
                               const std::array<double, 3>& to_m, const GeometryOptions& opts) {
  std::array<double, 3> la, lb;
  for (int i = 0; i < 3; ++i) {
    la[i] = std::log(from_m[i]);
    lb[i] = std::log(to_m[i]);
  }
  double s = 0.0;
  double ds = 1.0;
  double best = std::numeric_limits<double>::infinity();
  for (int step = 0; step < opts.max_continuation_steps; ++step) {
    const double sn = std::min(1.0, s + ds);
    std::array<double, 3> m;
    for (int i = 0; i < 3; ++i) m[i] = sn == 1.0 ? to_m[i] : std::exp(la[i] + sn * (lb[i] - la[i]));
    const int iters = sn == 1.0 ? opts.max_newton_iterations : 30;
    const auto res = triple_newton(u, m, opts.tolerance, iters);
    if (res.converged) {
      u = res.u;
      s = sn;
      if (s == 1.0) return {u, res.residual};
      ds = std::min(1.0, 2.0 * ds);
    } else {
      if (sn == 1.0) best = std::min(best, res.residual);
      ds *= 0.5;
      if (ds < 1e-9) break;
    }
  }
  throw NumericError("triple bubble continuation failed", best);
}

ClusterGeometry triple_geometry(const MassTriple& m, const GeometryOptions& opts,
                                const TripleSeed* hint) {
  std::array<int, 3> order{0, 1, 2};
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return m[a] > m[b]; });
  const double scale = m[order[0]];
  const std::array<double, 3> target{1.0, m[order[1]] / scale, m[order[2]] / scale};

  TripleSolution sol;
  bool solved = false;
  if (hint != nullptr) {
    try {
      Vec9 u0 = Eigen::Map<const Vec9>(hint->unknowns.data());
      sol = continue_triple(hint->sorted_masses, u0, target, opts);
      solved = true;
    } catch (const NumericError&) {
    }
  }
  if (!solved) sol = continue_triple({1.0, 1.0, 1.0}, symmetric_unknowns(), target, opts);

  const TripleFrame f = build_frame(sol.u);
  const double len = std::sqrt(scale);

  // Sorted-frame arcs mapped back to the caller's lobe labels.
  std::array<Arc, 6> arcs;
  std::array<int, 3> wall_left{};  // original label of the lobe left of each wall
  const std::array<std::array<int, 2>, 3> wall_pairs{{{0, 1}, {0, 2}, {1, 2}}};
  const std::array<int, 3> sorted_left{0, 2, 1};
  for (int s = 0; s < 3; ++s) arcs[order[s]] = f.outer[s];
  std::array<Vec2, 4> junction;
  junction[0] = f.junctions[0];
  std::array<int, 3> wall_slot{};
  for (int w = 0; w < 3; ++w) {
    const int slot = pair_slot(order[wall_pairs[w][0]], order[wall_pairs[w][1]]);
    wall_slot[w] = slot;
    arcs[slot] = f.walls[w];
    junction[1 + slot - 3] = f.junctions[1 + w];
    wall_left[slot - 3] = order[sorted_left[w]];
  }

  // Canonical frame: wall (1,2) leaves the origin along +y with lobe 1 on its left.
  const double rot = 0.5 * kPi - arcs[3].heading;
  const double c = std::cos(rot), sn = std::sin(rot);
  const bool reflect = wall_left[0] != 0;
  auto map_point = [&](Vec2 p) {
    Vec2 q{c * p.x - sn * p.y, sn * p.x + c * p.y};
    if (reflect) q.x = -q.x;
    return q * len;
  };
  for (Arc& a : arcs) {
    a.start = map_point(a.start);
    a.heading += rot;
    if (reflect) {
      a.heading = kPi - a.heading;
      a.turn = -a.turn;
    }
    a.turn /= len;
    a.length *= len;
  }
  for (Vec2& p : junction) p = map_point(p);
  if (reflect) {
    for (int p = 0; p < 3; ++p) {
      const auto& pr = wall_pairs[p];
      wall_left[p] = wall_left[p] == pr[0] ? pr[1] : pr[0];
    }
  }

  ClusterGeometry g;
  g.kind = BubbleKind::Triple;
  g.masses = m.values();
  g.arcs = arcs;
  for (int i = 0; i < 3; ++i) finish_arc_fields(g, i, std::abs(arcs[i].turn));
  for (int p = 0; p < 3; ++p) {
    const int j = wall_pairs[p][1];
    const double t = arcs[3 + p].turn;
    finish_arc_fields(g, 3 + p, wall_left[p] == j ? t : -t);
  }
  g.junctions.assign(junction.begin(), junction.end());
  const Vec2 h4 = junction[1] - junction[0];
  const Vec2 h5 = junction[2] - junction[0];
  const Vec2 h6 = junction[3] - junction[0];
  g.junction_angles = {angle_between(h4, h5), angle_between(h4, h6), angle_between(h5, h6)};
  // The three sectors fill the full turn; at most one is reflex, and the
  // unsigned angle above folds it back below pi.
  auto& ja = g.junction_angles;
  const auto widest = std::max_element(ja.begin(), ja.end());
  if (ja[0] + ja[1] + ja[2] < 2.0 * kPi - 1e-9) *widest = 2.0 * kPi - (ja[0] + ja[1] + ja[2] - *widest);
  g.perimeter = 0.0;
  for (const Arc& a : arcs) g.perimeter += a.length;
  g.residual = sol.residual;

  TripleSeed seed;
  seed.sorted_masses = target;
  std::copy(sol.u.data(), sol.u.data() + 9, seed.unknowns.begin());
  g.seed = seed;
  return g;
}

ClusterGeometry lower_order(const MassTriple& m, const GeometryOptions& opts, const char* why) {
  const double mx = std::max({m[0], m[1], m[2]});
  std::array<double, 3> kept{};
  for (int i = 0; i < 3; ++i) kept[i] = m[i] / mx < opts.degeneracy_ratio ? 0.0 : m[i];
  const MassTriple reduced(kept);
  const auto lobes = reduced.present();
  ClusterGeometry g = lobes.size() == 1 ? single_geometry(lobes[0], kept[lobes[0]])
                                        : double_geometry(lobes[0], lobes[1], kept[lobes[0]],
                                                          kept[lobes[1]]);
  g.masses = m.values();
  g.degenerate = true;
  g.note = why;
  return g;
}

bool below_ratio(const MassTriple& m, const GeometryOptions& opts) {
  const auto lobes = m.present();
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (int i : lobes) {
    lo = std::min(lo, m[i]);
    hi = std::max(hi, m[i]);
  }
  return lobes.size() > 1 && lo / hi < opts.degeneracy_ratio;
}

}  // namespace

// ---------------------------------------------------------------------------
// Public solvers

ClusterGeometry solve_single(double m) { return single_geometry(0, m); }

ClusterGeometry solve_double(double mi, double mj, const GeometryOptions& opts) {
  if (!(mi > 0.0 && mj > 0.0)) throw DomainError("double bubble masses must be positive");
  const MassTriple m(mi, mj, 0.0);
  if (below_ratio(m, opts)) return lower_order(m, opts, "mass ratio below threshold; solved as single");
  return double_geometry(0, 1, mi, mj);
}

ClusterGeometry solve_triple(const MassTriple& m, const GeometryOptions& opts, const TripleSeed* hint) {
  if (m.kind() != BubbleKind::Triple) throw DomainError("solve_triple needs three positive masses");
  if (below_ratio(m, opts)) return lower_order(m, opts, "mass ratio below threshold; solved one order lower");
  return triple_geometry(m, opts, hint);
}

ClusterGeometry solve(const MassTriple& m, const GeometryOptions& opts, const TripleSeed* hint) {
  const auto lobes = m.present();
  switch (m.kind()) {
    case BubbleKind::Single: return single_geometry(lobes[0], m[lobes[0]]);
    case BubbleKind::Double:
      if (below_ratio(m, opts)) return lower_order(m, opts, "mass ratio below threshold; solved as single");
      return double_geometry(lobes[0], lobes[1], m[lobes[0]], m[lobes[1]]);
    case BubbleKind::Triple: return solve_triple(m, opts, hint);
  }
  return {};
}

double perimeter(const MassTriple& m, const GeometryOptions& opts) { return solve(m, opts).perimeter; }

std::array<double, 3> perimeter_gradient(const MassTriple& m, const GeometryOptions& opts) {
  const ClusterGeometry g = solve(m, opts);
  std::array<double, 3> out{kNaN, kNaN, kNaN};
  for (int i = 0; i < 3; ++i)
    if (g.present[i]) out[i] = g.curvatures[i];
  return out;
}

double double_bubble_perimeter(double a, double b) { return solve_double(a, b).perimeter; }

double symmetric_triple_perimeter(double m) {
  if (!(m > 0.0)) throw DomainError("mass must be positive");
  const double len = std::sqrt(m / (std::sqrt(3.0) / 4.0 + 3.0 * kPi / 8.0));
  return 3.0 * len + 1.5 * std::sqrt(3.0) * kPi * len;
}

ComparabilityConstants comparability_constants(std::span<const MassTriple> grid,
                                               const GeometryOptions& opts) {
  if (grid.empty()) throw DomainError("comparability_constants needs a nonempty grid");
  ComparabilityConstants out{std::numeric_limits<double>::infinity(), 0.0};
  for (const MassTriple& m : grid) {
    const ClusterGeometry g = solve(m, opts);
    for (int i = 0; i < 3; ++i) {
      if (!g.present[i]) continue;
      const double ratio = g.masses[i] * g.curvatures[i] * g.curvatures[i];
      out.c1 = std::min(out.c1, ratio);
      out.c2 = std::max(out.c2, ratio);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Invariant checks

GeometryCheck check_geometry(const ClusterGeometry& g) {
  GeometryCheck out;
  auto seg = [&](int slot) {
    return g.present[slot] ? segment_from(g.arc_lengths[slot], g.arc_angles[slot]) : 0.0;
  };

  if (g.kind == BubbleKind::Triple) {
    const double h4 = g.chords[3], h5 = g.chords[4], h6 = g.chords[5];
    out.areas[0] = seg(0) - seg(3) - seg(4) + 0.5 * h4 * h5 * std::sin(g.junction_angles[0]);
    out.areas[1] = seg(1) + seg(3) - seg(5) + 0.5 * h4 * h6 * std::sin(g.junction_angles[1]);
    out.areas[2] = seg(2) + seg(4) + seg(5) + 0.5 * h5 * h6 * std::sin(g.junction_angles[2]);
  } else {
    for (int i = 0; i < 3; ++i) out.areas[i] = seg(i);
    for (int i = 0; i < 3; ++i) {
      for (int j = i + 1; j < 3; ++j) {
        const int p = pair_slot(i, j);
        if (!g.present[p]) continue;
        out.areas[i] -= seg(p);
        out.areas[j] += seg(p);
      }
    }
  }

  double kmax = 0.0;
  for (int i = 0; i < 3; ++i) {
    if (!g.present[i]) continue;
    kmax = std::max(kmax, g.curvatures[i]);
    const double target = g.masses[i];
    if (target > 0.0 && !g.degenerate)
      out.area_rel_error = std::max(out.area_rel_error, std::abs(out.areas[i] - target) / target);
  }

  // Junction angles: find the arcs incident to each junction geometrically.
  double scale = 0.0;
  for (int s = 0; s < 6; ++s)
    if (g.present[s]) scale = std::max(scale, g.chords[s] + g.arc_lengths[s]);
  for (const Vec2& p : g.junctions) {
    std::vector<Vec2> tangents;
    for (int s = 0; s < 6; ++s) {
      if (!g.present[s]) continue;
      const Arc& a = g.arcs[s];
      if ((a.start - p).norm() < 1e-9 * scale) tangents.push_back(unit(a.heading));
      if ((a.end() - p).norm() < 1e-9 * scale) tangents.push_back(-unit(a.end_heading()));
    }
    if (tangents.size() != 3) {
      out.junction_angle_error = std::numeric_limits<double>::infinity();
      continue;
    }
    for (int a = 0; a < 3; ++a)
      for (int b = a + 1; b < 3; ++b)
        out.junction_angle_error =
            std::max(out.junction_angle_error, std::abs(angle_between(tangents[a], tangents[b]) - kThird));
  }

  for (int i = 0; i < 3; ++i) {
    for (int j = i + 1; j < 3; ++j) {
      const int p = pair_slot(i, j);
      if (!g.present[p]) continue;
      out.reciprocal_residual =
          std::max(out.reciprocal_residual, std::abs(g.curvatures[p] - (g.curvatures[j] - g.curvatures[i])));
    }
  }

  // Centers of arcs with curvature at noise level are undefined.
  auto usable = [&](int s) {
    return g.present[s] && g.centers[s].has_value() && std::abs(g.curvatures[s]) > 1e-8 * kmax;
  };
  const std::array<std::array<int, 3>, 4> lines{{{0, 1, 3}, {0, 2, 4}, {1, 2, 5}, {3, 4, 5}}};
  for (const auto& ln : lines) {
    if (!usable(ln[0]) || !usable(ln[1]) || !usable(ln[2])) continue;
    const Vec2 a = *g.centers[ln[0]], b = *g.centers[ln[1]], c = *g.centers[ln[2]];
    const double denom = (b - a).norm() * (c - a).norm();
    if (denom <= 0.0) continue;
    out.collinearity_error = std::max(out.collinearity_error, std::abs(cross(b - a, c - a)) / denom);
  }
  return out;
}

}  // namespace tetra
