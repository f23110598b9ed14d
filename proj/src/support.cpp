// Exact bubble supports and quadrature over lobes.

#include <algorithm>
#include <cmath>

#include "gauss.hpp"
#include "tetra/errors.hpp"
#include "tetra/torus.hpp"

namespace tetra {

namespace {

Arc reversed(const Arc& a) { return Arc{a.end(), a.end_heading() + kPi, -a.turn, a.length}; }

Arc translated(Arc a, Vec2 d) {
  a.start = a.start - d;
  return a;
}

// Order the arcs of one lobe into a closed chain.
std::vector<Arc> chain(std::vector<Arc> arcs, double scale) {
  const double tol = 1e-7 * scale;
  std::vector<Arc> out{arcs.front()};
  arcs.erase(arcs.begin());
  while (!arcs.empty()) {
    const Vec2 e = out.back().end();
    auto it = std::find_if(arcs.begin(), arcs.end(), [&](const Arc& a) {
      return (a.start - e).norm() < tol || (a.end() - e).norm() < tol;
    });
    if (it == arcs.end()) throw NumericError("lobe boundary does not close", 0.0);
    out.push_back((it->start - e).norm() < tol ? *it : reversed(*it));
    arcs.erase(it);
  }
  if ((out.back().end() - out.front().start).norm() > tol) throw NumericError("lobe boundary does not close", 0.0);
  return out;
}

int panels(const Arc& a, double max_turn, double max_len) {
  const int by_turn = int(std::ceil(std::abs(a.turn * a.length) / max_turn));
  const int by_len = int(std::ceil(a.length / max_len));
  return std::max({1, by_turn, by_len});
}

struct BoundaryNode {
  Vec2 point;
  Vec2 tangent;
  double weight;
};

std::vector<BoundaryNode> boundary_nodes(const std::vector<Arc>& arcs, int order, double max_turn, double max_len) {
  const auto& g = detail::gauss_rule(order);
  std::vector<BoundaryNode> out;
  for (const Arc& a : arcs) {
    const int np = panels(a, max_turn, max_len);
    const double h = a.length / np;
    for (int p = 0; p < np; ++p)
      for (int q = 0; q < order; ++q) {
        const double s = (p + g.x[q]) * h;
        out.push_back({a.point_at(s), a.tangent_at(s), g.w[q] * h});
      }
  }
  return out;
}

double arc_far_distance(const Arc& a, Vec2 p) {
  double best = std::max((a.start - p).norm(), (a.end() - p).norm());
  if (const auto c = a.center()) {
    // Farthest point of the full circle, kept only if it lies on the arc.
    const Vec2 d = *c - p;
    const double r = 1.0 / std::abs(a.turn);
    const double dn = d.norm();
    if (dn > 0.0) {
      const Vec2 far = *c + d * (r / dn);
      const Vec2 from_start = a.start - *c;
      const double a0 = std::atan2(from_start.y, from_start.x);
      const double af = std::atan2((far - *c).y, (far - *c).x);
      double delta = (af - a0) * (a.turn > 0 ? 1.0 : -1.0);
      delta = std::fmod(delta, 2.0 * kPi);
      if (delta < 0) delta += 2.0 * kPi;
      if (delta <= std::abs(a.turn * a.length)) best = std::max(best, dn + r);
    }
  }
  return best;
}

}  // namespace

LobeRule lobe_rule(const std::vector<Arc>& boundary, int order) {
  if (boundary.empty()) return {};
  const auto& g = detail::gauss_rule(order);
  double perim = 0.0;
  Vec2 origin{};
  for (const Arc& a : boundary) {
    perim += a.length;
    origin = origin + a.start;
  }
  origin = origin * (1.0 / boundary.size());
  LobeRule r;
  // Signed cones from `origin` over each boundary panel.
  for (const auto& b : boundary_nodes(boundary, order, kPi / 2.0, perim / 3.0)) {
    const Vec2 d = b.point - origin;
    const double jac = cross(d, b.tangent) * b.weight;
    for (int q = 0; q < order; ++q) {
      r.nodes.push_back(origin + d * g.x[q]);
      r.weights.push_back(jac * g.x[q] * g.w[q]);
    }
  }
  return r;
}

namespace {

struct Panel {
  Arc arc;
  double s0, s1;
};

// Parameter of z on the panel's curve when z lies on it, else -1.
double on_panel(const Panel& p, Vec2 z, double tol) {
  const Arc& a = p.arc;
  double s;
  if (const auto c = a.center()) {
    const Vec2 d = z - *c;
    const double r = 1.0 / std::abs(a.turn);
    if (std::abs(d.norm() - r) > tol) return -1.0;
    const Vec2 d0 = a.start - *c;
    double delta = (std::atan2(d.y, d.x) - std::atan2(d0.y, d0.x)) * (a.turn > 0 ? 1.0 : -1.0);
    delta = std::fmod(delta, 2.0 * kPi);
    if (delta < 0) delta += 2.0 * kPi;
    s = delta * r;
  } else {
    const Vec2 t = a.tangent_at(0.0), d = z - a.start;
    if (std::abs(cross(t, d)) > tol) return -1.0;
    s = dot(t, d);
  }
  return s > p.s0 && s < p.s1 ? s : -1.0;
}

}  // namespace

double log_double_integral(const std::vector<Arc>& a, const std::vector<Arc>& b, int order) {
  double perim = 0.0;
  for (const Arc& x : a) perim += x.length;
  for (const Arc& x : b) perim += x.length;
  const double max_turn = kPi / 8.0, max_len = perim / 32.0;
  const auto na = boundary_nodes(a, order, max_turn, max_len);
  std::vector<Panel> pb;
  for (const Arc& x : b) {
    const int np = panels(x, max_turn, max_len);
    for (int p = 0; p < np; ++p) pb.push_back({x, x.length * p / np, x.length * (p + 1) / np});
  }
  const auto& g = detail::gauss_rule(order);
  // (r^2/4)(log r - 1) (n_z . n_w) with outward normals of counter-clockwise chains.
  auto kernel = [](Vec2 z, Vec2 nz, Vec2 w, Vec2 tw) {
    const Vec2 d = z - w;
    const double r2 = dot(d, d);
    if (r2 == 0.0) return 0.0;
    return 0.125 * r2 * (std::log(r2) - 2.0) * dot(nz, Vec2{tw.y, -tw.x});
  };
  auto segment = [&](const Arc& arc, double s0, double s1, Vec2 z, Vec2 nz) {
    double sum = 0.0;
    const double h = s1 - s0;
    for (int q = 0; q < order; ++q) {
      const double s = s0 + g.x[q] * h;
      sum += g.w[q] * h * kernel(z, nz, arc.point_at(s), arc.tangent_at(s));
    }
    return sum;
  };
  std::vector<double> rows;
  rows.reserve(na.size());
  for (const auto& z : na) {
    const Vec2 nz{z.tangent.y, -z.tangent.x};
    double row = 0.0;
    for (const Panel& p : pb) {
      // Split at the coincidence point so each piece only has an endpoint
      // r^2 log r singularity.
      const double s = on_panel(p, z.point, 1e-10 * perim);
      if (s > 0.0)
        row += segment(p.arc, p.s0, s, z.point, nz) + segment(p.arc, s, p.s1, z.point, nz);
      else
        row += segment(p.arc, p.s0, p.s1, z.point, nz);
    }
    rows.push_back(z.weight * row);
  }
  return -stable_sum(std::move(rows));
}

ClusterSupport cluster_support(const MassTriple& m, const GeometryOptions& opts) {
  ClusterSupport s;
  s.geometry = solve(m, opts);
  const auto& g = s.geometry;
  double scale = 0.0;
  for (int k = 0; k < 6; ++k)
    if (g.present[k]) scale = std::max(scale, g.arcs[k].length);

  std::array<std::vector<Arc>, 3> raw;
  for (int i = 0; i < 3; ++i) {
    if (!g.present[i]) continue;
    raw[i].push_back(g.arcs[i]);
    for (int j = 0; j < 3; ++j)
      if (j != i && g.present[j] && g.present[pair_slot(i, j)]) raw[i].push_back(g.arcs[pair_slot(i, j)]);
    raw[i] = chain(raw[i], scale);
    double area = 0.0;
    for (double w : lobe_rule(raw[i], 8).weights) area += w;
    if (area < 0.0) {
      std::vector<Arc> rev;
      for (auto it = raw[i].rbegin(); it != raw[i].rend(); ++it) rev.push_back(reversed(*it));
      raw[i] = rev;
    }
  }

  double area = 0.0;
  Vec2 moment{};
  for (int i = 0; i < 3; ++i) {
    const auto r = lobe_rule(raw[i], 12);
    for (std::size_t q = 0; q < r.nodes.size(); ++q) {
      area += r.weights[q];
      moment = moment + r.nodes[q] * r.weights[q];
    }
  }
  s.centroid = moment * (1.0 / area);
  for (int i = 0; i < 3; ++i)
    for (const Arc& a : raw[i]) s.lobes[i].push_back(translated(a, s.centroid));
  for (int i = 0; i < 3; ++i)
    if (g.present[i]) s.enclosing_radius = std::max(s.enclosing_radius, arc_far_distance(translated(g.arcs[i], s.centroid), {0.0, 0.0}));
  return s;
}

}  // namespace tetra
