// Continuous mass optimisation for a fixed signature, KKT checks, local
// merge/split moves and the global minimiser over signatures.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include <Eigen/Dense>

#include "tetra/errors.hpp"
#include "tetra/partition.hpp"

namespace tetra {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Uniform in [0,1) from the top 53 bits; identical on every platform.
double unit_draw(std::mt19937_64& rng) { return double(rng() >> 11) * 0x1.0p-53; }

// Bubbles grouped into classes of identical members. Variables are the class
// totals y = weight * x per (class, lobe type), so each type's variables live
// on a simplex of size M_i and dF/dy is exactly the bubble gradient.
class Problem {
 public:
  struct Class {
    std::array<bool, 3> lobes{};
    int weight = 1;
  };

  Problem(std::vector<Class> classes, const Totals& M, const GammaMatrix& gamma, const GeometryOptions& geo)
      : classes_(std::move(classes)), M_(M), gamma_(gamma), geo_(geo) {
    for (int c = 0; c < int(classes_.size()); ++c)
      for (int i = 0; i < 3; ++i)
        if (classes_[c].lobes[i]) {
          type_vars_[i].push_back(int(vars_.size()));
          vars_.push_back({c, i});
        }
    for (int i = 0; i < 3; ++i)
      if (M_[i] > 0.0 && type_vars_[i].empty()) throw DomainError("signature has no lobe for a positive total");
  }

  int size() const { return int(vars_.size()); }
  const Totals& totals() const { return M_; }
  const std::vector<int>& type_vars(int i) const { return type_vars_[i]; }
  int type_of(int v) const { return vars_[v].second; }
  int class_of(int v) const { return vars_[v].first; }
  int weight(int c) const { return classes_[c].weight; }

  std::array<double, 3> class_masses(const std::vector<double>& y, int c) const {
    std::array<double, 3> x{};
    for (int v = 0; v < size(); ++v)
      if (vars_[v].first == c) x[vars_[v].second] = y[v] / classes_[c].weight;
    return x;
  }

  struct Eval {
    double energy = 0.0;
    std::vector<double> grad;  // +inf on absent lobes
  };

  Eval eval(const std::vector<double>& y) const {
    Eval e;
    e.grad.assign(size(), kInf);
    std::vector<double> parts;
    for (int c = 0; c < int(classes_.size()); ++c) {
      const auto x = class_masses(y, c);
      if (x[0] + x[1] + x[2] <= 0.0) continue;
      const auto be = evaluate_bubble(MassTriple(x), gamma_, geo_);
      parts.push_back(classes_[c].weight * be.energy);
      for (int v = 0; v < size(); ++v)
        if (vars_[v].first == c && be.gradient[vars_[v].second]) e.grad[v] = *be.gradient[vars_[v].second];
    }
    e.energy = stable_sum(std::move(parts));
    return e;
  }

  double energy(const std::vector<double>& y) const { return eval(y).energy; }

  /// d g / d y within each class (block diagonal), central differences.
  Eigen::MatrixXd hessian(const std::vector<double>& y, const std::vector<int>& active) const {
    const int n = int(active.size());
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(n, n);
    for (int a = 0; a < n; ++a) {
      const int va = active[a];
      const int c = vars_[va].first;
      const int j = vars_[va].second;
      const auto x = class_masses(y, c);
      const double h = 1e-5 * x[j];
      auto xp = x, xm = x;
      xp[j] += h;
      xm[j] -= h;
      const auto gp = evaluate_bubble(MassTriple(xp), gamma_, geo_).gradient;
      const auto gm = evaluate_bubble(MassTriple(xm), gamma_, geo_).gradient;
      for (int b = 0; b < n; ++b) {
        const int vb = active[b];
        if (vars_[vb].first != c) continue;
        const int i = vars_[vb].second;
        if (gp[i] && gm[i]) H(b, a) = (*gp[i] - *gm[i]) / (2.0 * h) / classes_[c].weight;
      }
    }
    return 0.5 * (H + H.transpose());
  }

  Configuration to_configuration(const std::vector<double>& y) const {
    std::vector<std::array<double, 3>> raw;
    for (int c = 0; c < int(classes_.size()); ++c) {
      const auto x = class_masses(y, c);
      if (x[0] + x[1] + x[2] <= 0.0) continue;
      for (int k = 0; k < classes_[c].weight; ++k) raw.push_back(x);
    }
    // Absorb rounding so the totals are met exactly.
    for (int i = 0; i < 3; ++i) {
      if (!(M_[i] > 0.0)) continue;
      std::vector<double> col;
      int big = -1;
      for (int k = 0; k < int(raw.size()); ++k) {
        col.push_back(raw[k][i]);
        if (raw[k][i] > 0.0 && (big < 0 || raw[k][i] > raw[big][i])) big = k;
      }
      raw[big][i] += M_[i] - stable_sum(col);
    }
    std::vector<MassTriple> bubbles;
    for (const auto& r : raw) bubbles.emplace_back(r);
    return Configuration(std::move(bubbles), M_).canonical();
  }

 private:
  std::vector<Class> classes_;
  std::vector<std::pair<int, int>> vars_;
  std::array<std::vector<int>, 3> type_vars_;
  Totals M_;
  GammaMatrix gamma_;
  GeometryOptions geo_;
};

// Euclidean projection onto { v >= 0, sum v = s }.
std::vector<double> project_simplex(const std::vector<double>& u, double s) {
  std::vector<double> sorted = u;
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double cum = 0.0, theta = 0.0;
  for (std::size_t j = 0; j < sorted.size(); ++j) {
    cum += sorted[j];
    const double t = (cum - s) / double(j + 1);
    if (sorted[j] - t > 0.0)
      theta = t;
    else
      break;
  }
  std::vector<double> out(u.size());
  for (std::size_t j = 0; j < u.size(); ++j) out[j] = std::max(0.0, u[j] - theta);
  return out;
}

class Solver {
 public:
  Solver(const Problem& p, const OptimizerOptions& opts) : p_(p), opts_(opts) {}

  struct Result {
    std::vector<double> y;
    double energy = kInf;
    int iterations = 0;
    bool converged = false;
  };

  Result run(std::vector<double> y) {
    Result r;
    absorb(y);
    gradient_phase(y, r.iterations);
    for (int escape = 0; escape < 8; ++escape) {
      r.converged = newton_phase(y, r.iterations);
      if (!escape_saddle(y)) break;
    }
    r.energy = p_.energy(y);
    r.y = std::move(y);
    return r;
  }

 private:
  // Lobes the geometry reports as inactive carry no arc; their mass moves to
  // the largest active lobe of the same type.
  void absorb(std::vector<double>& y) {
    const auto e = p_.eval(y);
    for (int i = 0; i < 3; ++i) {
      int big = -1;
      for (int v : p_.type_vars(i))
        if (y[v] > 0.0 && std::isfinite(e.grad[v]) && (big < 0 || y[v] > y[big])) big = v;
      if (big < 0) continue;
      for (int v : p_.type_vars(i))
        if (y[v] > 0.0 && !std::isfinite(e.grad[v])) {
          y[big] += y[v];
          y[v] = 0.0;
        }
    }
  }

  double spread(const std::vector<double>& y, const std::vector<double>& g) const {
    double worst = 0.0;
    for (int i = 0; i < 3; ++i) {
      double lo = kInf, hi = -kInf;
      for (int v : p_.type_vars(i))
        if (y[v] > 0.0) {
          lo = std::min(lo, g[v]);
          hi = std::max(hi, g[v]);
        }
      if (hi >= lo) worst = std::max(worst, hi - lo);
    }
    return worst;
  }

  double scale(const std::vector<double>& g) const {
    double s = 1.0;
    for (double v : g)
      if (std::isfinite(v)) s = std::max(s, std::abs(v));
    return s;
  }

  void gradient_phase(std::vector<double>& y, int& iterations) {
    auto e = p_.eval(y);
    double t = 0.05;
    for (int it = 0; it < opts_.max_gradient_steps; ++it, ++iterations) {
      if (spread(y, e.grad) < 1e-6 * scale(e.grad)) return;
      bool accepted = false;
      for (int ls = 0; ls < 40; ++ls, t *= 0.5) {
        std::vector<double> trial = y;
        for (int i = 0; i < 3; ++i) {
          std::vector<int> free;
          std::vector<double> u;
          for (int v : p_.type_vars(i))
            if (y[v] > 0.0) {
              free.push_back(v);
              u.push_back(y[v] - t * p_.totals()[i] * e.grad[v]);
            }
          if (free.empty()) continue;
          const auto proj = project_simplex(u, p_.totals()[i]);
          for (std::size_t k = 0; k < free.size(); ++k) trial[free[k]] = proj[k];
        }
        double pred = 0.0;
        for (int v = 0; v < p_.size(); ++v)
          if (trial[v] != y[v]) pred += e.grad[v] * (trial[v] - y[v]);
        if (pred >= 0.0) continue;
        absorb(trial);
        const auto et = p_.eval(trial);
        if (et.energy <= e.energy + 1e-4 * pred) {
          const double moved = [&] {
            double m = 0.0;
            for (int v = 0; v < p_.size(); ++v) m = std::max(m, std::abs(trial[v] - y[v]) / p_.totals()[p_.type_of(v)]);
            return m;
          }();
          y = std::move(trial);
          e = et;
          accepted = true;
          t = std::min(4.0 * t, 10.0);
          if (moved < 1e-7) return;
          break;
        }
      }
      if (!accepted) return;
    }
  }

  // Active-set Newton on the KKT system with Levenberg-style shifts when the
  // reduced Hessian is indefinite or the step fails to decrease the energy.
  bool newton_phase(std::vector<double>& y, int& iterations) {
    for (int it = 0; it < opts_.max_newton_steps; ++it, ++iterations) {
      absorb(y);
      const auto e = p_.eval(y);
      if (spread(y, e.grad) <= opts_.tol * scale(e.grad)) return true;

      std::vector<int> active;
      for (int v = 0; v < p_.size(); ++v)
        if (y[v] > 0.0) active.push_back(v);
      std::vector<int> types;
      for (int i = 0; i < 3; ++i)
        if (std::any_of(active.begin(), active.end(), [&](int v) { return p_.type_of(v) == i; }))
          types.push_back(i);
      const int n = int(active.size()), m = int(types.size());
      const Eigen::MatrixXd H = p_.hessian(y, active);
      Eigen::VectorXd g(n);
      for (int a = 0; a < n; ++a) g[a] = e.grad[active[a]];

      const double hnorm = std::max(H.cwiseAbs().maxCoeff(), 1e-12);
      bool moved = false;
      for (double shift = 0.0; shift < 1e8 * hnorm; shift = shift == 0.0 ? 1e-8 * hnorm : shift * 10.0) {
        Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n + m, n + m);
        K.topLeftCorner(n, n) = H + shift * Eigen::MatrixXd::Identity(n, n);
        for (int a = 0; a < n; ++a)
          for (int b = 0; b < m; ++b)
            if (p_.type_of(active[a]) == types[b]) K(a, n + b) = K(n + b, a) = 1.0;
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + m);
        rhs.head(n) = -g;
        const Eigen::VectorXd sol = K.fullPivLu().solve(rhs);
        if (!sol.allFinite()) continue;
        const Eigen::VectorXd d = sol.head(n);
        const double slope = g.dot(d);
        if (!(slope < 0.0)) continue;

        double amax = kInf;
        for (int a = 0; a < n; ++a)
          if (d[a] < 0.0) amax = std::min(amax, -y[active[a]] / d[a]);
        double alpha = std::min(1.0, amax);
        const bool tiny = -slope < 1e-14 * std::max(1.0, std::abs(e.energy));
        for (int ls = 0; ls < 30; ++ls, alpha *= 0.5) {
          std::vector<double> trial = y;
          for (int a = 0; a < n; ++a) {
            trial[active[a]] = y[active[a]] + alpha * d[a];
            if (alpha == amax && d[a] < 0.0 && std::abs(trial[active[a]]) <= 1e-12 * p_.totals()[p_.type_of(active[a])])
              trial[active[a]] = 0.0;
            trial[active[a]] = std::max(0.0, trial[active[a]]);
          }
          const double et = p_.energy(trial);
          if (et <= e.energy + 1e-4 * alpha * slope || (tiny && alpha == 1.0 && et <= e.energy + 1e-13 * std::abs(e.energy))) {
            y = std::move(trial);
            moved = true;
            break;
          }
        }
        if (moved) break;
      }
      if (!moved) return spread(y, e.grad) <= 1e3 * opts_.tol * scale(e.grad);
    }
    const auto e = p_.eval(y);
    return spread(y, e.grad) <= 1e3 * opts_.tol * scale(e.grad);
  }

  // Leave a stationary point along a direction of negative curvature of the
  // energy restricted to the constraint set. Returns true if it moved.
  bool escape_saddle(std::vector<double>& y) {
    std::vector<int> active;
    for (int v = 0; v < p_.size(); ++v)
      if (y[v] > 0.0) active.push_back(v);
    const int n = int(active.size());
    std::vector<int> types;
    for (int i = 0; i < 3; ++i)
      if (std::any_of(active.begin(), active.end(), [&](int v) { return p_.type_of(v) == i; })) types.push_back(i);
    const int m = int(types.size());
    if (n <= m) return false;
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m, n);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < m; ++b)
        if (p_.type_of(active[a]) == types[b]) A(b, a) = 1.0;
    const Eigen::MatrixXd Z = Eigen::HouseholderQR<Eigen::MatrixXd>(Eigen::MatrixXd(Eigen::FullPivLU<Eigen::MatrixXd>(A).kernel()))
                                  .householderQ() *
                              Eigen::MatrixXd::Identity(n, n - m);
    const Eigen::MatrixXd H = p_.hessian(y, active);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(Z.transpose() * H * Z);
    const double lmin = eig.eigenvalues()[0];
    if (!(lmin < -1e-7 * std::max(1.0, eig.eigenvalues().cwiseAbs().maxCoeff()))) return false;
    const Eigen::VectorXd dir = Z * eig.eigenvectors().col(0);
    const double e0v = p_.energy(y);
    for (double sign : {1.0, -1.0}) {
      double amax = kInf;
      for (int a = 0; a < n; ++a)
        if (sign * dir[a] < 0.0) amax = std::min(amax, -y[active[a]] / (sign * dir[a]));
      double alpha = amax;
      for (int ls = 0; ls < 40; ++ls, alpha *= 0.5) {
        std::vector<double> trial = y;
        for (int a = 0; a < n; ++a) {
          trial[active[a]] = std::max(0.0, y[active[a]] + alpha * sign * dir[a]);
          if (alpha == amax && sign * dir[a] < 0.0 && trial[active[a]] <= 1e-12 * p_.totals()[p_.type_of(active[a])])
            trial[active[a]] = 0.0;
        }
        if (p_.energy(trial) < e0v - 1e-13 * std::abs(e0v)) {
          y = std::move(trial);
          absorb(y);
          return true;
        }
      }
    }
    return false;
  }

  const Problem& p_;
  const OptimizerOptions& opts_;
};

struct Candidate {
  Configuration config;
  double energy = kInf;
  int iterations = 0;
  bool converged = false;
};

// Sorted list of bubble mass vectors, ascending, for tie-breaking.
std::vector<std::array<double, 3>> tie_key(const Configuration& c) {
  std::vector<std::array<double, 3>> k;
  for (const auto& b : c.bubbles()) k.push_back(b.values());
  std::sort(k.begin(), k.end());
  return k;
}

double tie_tolerance(double e) { return 1e-9 * std::max(1.0, std::abs(e)); }

// True if a is preferred over b: lower energy, then fewer bubbles, then the
// lexicographically smaller sorted mass list.
bool better(const Configuration& a, double ea, const Configuration& b, double eb) {
  if (std::abs(ea - eb) > tie_tolerance(std::min(ea, eb))) return ea < eb;
  if (a.size() != b.size()) return a.size() < b.size();
  return tie_key(a) < tie_key(b);
}

bool same_configuration(const Configuration& a, const Configuration& b) {
  if (a.size() != b.size()) return false;
  const auto ka = tie_key(a), kb = tie_key(b);
  for (std::size_t k = 0; k < ka.size(); ++k)
    for (int i = 0; i < 3; ++i)
      if (std::abs(ka[k][i] - kb[k][i]) > 1e-6 * std::max(1.0, std::abs(ka[k][i]))) return false;
  return true;
}

std::vector<Problem::Class> signature_classes(const Signature& sig, bool reduced) {
  std::vector<Problem::Class> out;
  auto add = [&](std::array<bool, 3> lobes, int count) {
    if (count <= 0) return;
    if (reduced)
      out.push_back({lobes, count});
    else
      for (int k = 0; k < count; ++k) out.push_back({lobes, 1});
  };
  add({true, true, true}, sig.n_triple);
  add({true, true, false}, sig.n_double[0]);
  add({true, false, true}, sig.n_double[1]);
  add({false, true, true}, sig.n_double[2]);
  for (int i = 0; i < 3; ++i) {
    std::array<bool, 3> l{};
    l[i] = true;
    add(l, sig.n_single[i]);
  }
  return out;
}

std::uint64_t signature_hash(const Signature& s) {
  std::uint64_t h = std::uint64_t(s.n_triple);
  for (int v : s.n_double) h = splitmix(h * 31 + std::uint64_t(v));
  for (int v : s.n_single) h = splitmix(h * 31 + std::uint64_t(v));
  return h;
}

std::vector<double> equal_split(const Problem& p) {
  std::vector<double> y(p.size(), 0.0);
  for (int i = 0; i < 3; ++i) {
    const auto& vs = p.type_vars(i);
    if (vs.empty() || !(p.totals()[i] > 0.0)) continue;
    double w = 0.0;
    for (int v : vs) w += p.weight(p.class_of(v));
    for (int v : vs) y[v] = p.totals()[i] * p.weight(p.class_of(v)) / w;
  }
  return y;
}

std::vector<double> perturbed_split(const Problem& p, std::mt19937_64& rng) {
  std::vector<double> y(p.size(), 0.0);
  for (int i = 0; i < 3; ++i) {
    const auto& vs = p.type_vars(i);
    if (vs.empty() || !(p.totals()[i] > 0.0)) continue;
    double sum = 0.0;
    for (int v : vs) sum += (y[v] = p.weight(p.class_of(v)) * (0.4 + 1.2 * unit_draw(rng)));
    for (int v : vs) y[v] *= p.totals()[i] / sum;
  }
  return y;
}

Candidate solve_problem(const Problem& p, const std::vector<std::vector<double>>& starts,
                        const OptimizerOptions& opts) {
  Candidate best;
  for (const auto& y0 : starts) {
    Solver s(p, opts);
    auto r = s.run(y0);
    Configuration c = p.to_configuration(r.y);
    const double e = r.energy;
    if (!std::isfinite(best.energy) || better(c, e, best.config, best.energy)) {
      best.config = std::move(c);
      best.energy = e;
      best.converged = r.converged;
    }
    best.iterations += r.iterations;
  }
  return best;
}

}  // namespace

// ---------------------------------------------------------------------------

double KKTReport::max_spread() const { return std::max({spread[0], spread[1], spread[2]}); }

KKTReport kkt_residual(const Configuration& c, const GammaMatrix& gamma, const GeometryOptions& opts) {
  KKTReport r;
  std::array<std::vector<double>, 3> g;
  for (const auto& b : c.bubbles()) {
    const auto grad = e0_gradient(b, gamma, opts);
    for (int i = 0; i < 3; ++i)
      if (grad[i]) g[i].push_back(*grad[i]);
  }
  for (int i = 0; i < 3; ++i) {
    r.active[i] = int(g[i].size());
    if (g[i].empty()) continue;
    const auto [lo, hi] = std::minmax_element(g[i].begin(), g[i].end());
    r.spread[i] = *hi - *lo;
    r.multiplier[i] = stable_sum(g[i]) / double(g[i].size());
  }
  return r;
}

MassOptimum optimize_masses_detailed(const Signature& sig, const Totals& M, const GammaMatrix& gamma,
                                     const OptimizerOptions& opts) {
  for (double v : M)
    if (!std::isfinite(v) || v < 0.0) throw DomainError("total masses must be finite and >= 0");
  const auto lobes = sig.lobe_counts();
  for (int i = 0; i < 3; ++i) {
    if (M[i] > 0.0 && lobes[i] == 0) throw DomainError("signature has no lobe of a type with positive total");
    if (!(M[i] > 0.0) && lobes[i] > 0) throw DomainError("signature has lobes of a type with zero total");
  }
  if (sig.bubble_count() == 0) throw DomainError("empty signature");

  const Problem p(signature_classes(sig, opts.class_reduced), M, gamma, opts.geometry);
  std::vector<std::vector<double>> starts{equal_split(p)};
  if (!opts.class_reduced) {
    std::mt19937_64 rng(splitmix(opts.seed ^ signature_hash(sig)));
    for (int s = 1; s < opts.multistart; ++s) starts.push_back(perturbed_split(p, rng));
  }
  Candidate best = solve_problem(p, starts, opts);

  MassOptimum out;
  out.config = best.config;
  out.energy = configuration_energy(best.config, gamma, opts.geometry);
  out.kkt = kkt_residual(best.config, gamma, opts.geometry);
  out.converged = best.converged;
  out.iterations = best.iterations;
  return out;
}

Configuration optimize_masses(const Signature& sig, const Totals& M, const GammaMatrix& gamma,
                              const OptimizerOptions& opts) {
  return optimize_masses_detailed(sig, M, gamma, opts).config;
}

MassOptimum refine_configuration(const Configuration& start, const GammaMatrix& gamma,
                                 const OptimizerOptions& opts) {
  std::vector<Problem::Class> classes;
  for (const auto& b : start.bubbles()) classes.push_back({{b[0] > 0.0, b[1] > 0.0, b[2] > 0.0}, 1});
  const Problem p(classes, start.totals(), gamma, opts.geometry);
  std::vector<double> y0(p.size());
  for (int v = 0, k = 0; k < int(start.size()); ++k)
    for (int i = 0; i < 3; ++i)
      if (start[k][i] > 0.0) y0[v++] = start[k][i];
  const Candidate c = solve_problem(p, {y0}, opts);
  MassOptimum out;
  out.config = c.config;
  out.energy = configuration_energy(c.config, gamma, opts.geometry);
  out.kkt = kkt_residual(c.config, gamma, opts.geometry);
  out.converged = c.converged;
  out.iterations = c.iterations;
  return out;
}

// ---------------------------------------------------------------------------

std::optional<MoveResult> merge_split_moves(const Configuration& c, const GammaMatrix& gamma,
                                            const GeometryOptions& opts) {
  const int n = int(c.size());
  std::vector<double> e(n);
  for (int k = 0; k < n; ++k) e[k] = e0(c[k], gamma, opts);
  const double total = stable_sum(e);
  const double threshold = 1e-10 * std::max(1.0, std::abs(total));

  double best_delta = -threshold;
  std::vector<MassTriple> best_bubbles;
  std::string best_move;

  auto consider = [&](double delta, std::vector<MassTriple> bubbles, std::string what) {
    if (delta < best_delta) {
      best_delta = delta;
      best_bubbles = std::move(bubbles);
      best_move = std::move(what);
    }
  };

  for (int k = 0; k < n; ++k) {
    for (int i = 0; i < 3; ++i) {
      if (!(c[k][i] > 0.0)) continue;
      auto kept = c[k].values();
      kept[i] *= 0.5;
      std::array<double, 3> split{};
      split[i] = kept[i];
      const double delta = e0(MassTriple(kept), gamma, opts) + e0(MassTriple(split), gamma, opts) - e[k];
      if (delta >= best_delta) continue;
      auto bubbles = c.bubbles();
      bubbles[k] = MassTriple(kept);
      bubbles.emplace_back(split);
      consider(delta, std::move(bubbles),
               "split half of lobe " + std::to_string(i + 1) + " of bubble " + std::to_string(k + 1));
    }
  }
  for (int k = 0; k < n; ++k) {
    for (int h = k + 1; h < n; ++h) {
      std::array<double, 3> merged{};
      for (int i = 0; i < 3; ++i) merged[i] = c[k][i] + c[h][i];
      const double delta = e0(MassTriple(merged), gamma, opts) - e[k] - e[h];
      if (delta >= best_delta) continue;
      std::vector<MassTriple> bubbles;
      for (int q = 0; q < n; ++q)
        if (q != k && q != h) bubbles.push_back(c[q]);
      bubbles.emplace_back(merged);
      consider(delta, std::move(bubbles),
               "merge bubbles " + std::to_string(k + 1) + " and " + std::to_string(h + 1));
    }
  }
  if (best_bubbles.empty()) return std::nullopt;
  MoveResult r;
  r.config = Configuration(std::move(best_bubbles), c.totals()).canonical();
  r.energy_before = total;
  r.energy_after = configuration_energy(r.config, gamma, opts);
  r.move = best_move;
  return r;
}

// ---------------------------------------------------------------------------

MinimizeResult minimize_e0bar(const Totals& M, const GammaMatrix& gamma, const MinimizeOptions& opts) {
  const EnumerationReport rep = enumerate_signatures_report(M, gamma, opts.count_cap);
  if (rep.signatures.empty())
    throw DomainError("count cap admits no signature: more lobes are forced by the max-mass bound");

  MinimizeResult out;
  out.bounds = bounds_report(M, gamma);
  out.pruned = rep.pruned;
  out.signatures_examined = rep.signatures.size();

  // Symmetric screening of every signature.
  OptimizerOptions screen = opts.inner;
  screen.class_reduced = true;
  std::vector<std::pair<double, std::size_t>> order;
  std::vector<Candidate> pool;
  for (std::size_t s = 0; s < rep.signatures.size(); ++s) {
    const auto r = optimize_masses_detailed(rep.signatures[s], M, gamma, screen);
    order.emplace_back(r.energy, s);
    pool.push_back({r.config, r.energy, r.iterations, r.converged});
  }
  std::sort(order.begin(), order.end());

  // Full multi-start on the most promising signatures.
  OptimizerOptions full = opts.inner;
  full.class_reduced = false;
  // Signatures whose screened optimum lost lobes collapse onto a smaller one;
  // each effective signature is refined once.
  const double e_best = order.front().first;
  std::vector<Signature> refined;
  for (std::size_t k = 0; k < order.size(); ++k) {
    const bool inside = order[k].first <= e_best + opts.refine_window * std::abs(e_best);
    if (!inside && int(refined.size()) >= opts.refine_min) break;
    const Signature effective = signature_of(pool[order[k].second].config);
    if (std::find(refined.begin(), refined.end(), effective) != refined.end()) continue;
    refined.push_back(effective);
    const auto r = optimize_masses_detailed(effective, M, gamma, full);
    pool.push_back({r.config, r.energy, r.iterations, r.converged});
  }

  std::size_t best = 0;
  for (std::size_t k = 1; k < pool.size(); ++k)
    if (better(pool[k].config, pool[k].energy, pool[best].config, pool[best].energy)) best = k;
  Configuration config = pool[best].config;
  double energy = pool[best].energy;

  // Local moves the signature search cannot see (e.g. a split beyond the
  // symmetric class structure); accepted only inside the cap.
  for (int round = 0; round < 16; ++round) {
    const auto mv = merge_split_moves(config, gamma, opts.inner.geometry);
    if (!mv) break;
    const auto counts = mv->config.lobe_counts();
    if (std::any_of(counts.begin(), counts.end(), [&](int n) { return n > opts.count_cap; })) {
      out.cap_saturated = true;
      break;
    }
    const auto r = refine_configuration(mv->config, gamma, full);
    if (!(r.energy < energy - tie_tolerance(energy))) break;
    pool.push_back({r.config, r.energy, r.iterations, r.converged});
    config = r.config;
    energy = r.energy;
  }

  out.config = config;
  out.energy = energy;
  out.signature = signature_of(config);
  out.kkt = kkt_residual(config, gamma, opts.inner.geometry);
  const auto counts = config.lobe_counts();
  for (int i = 0; i < 3; ++i)
    if (M[i] > 0.0 && counts[i] >= opts.count_cap && out.bounds.count_upper[i] > opts.count_cap)
      out.cap_saturated = true;

  out.ties.push_back(config);
  for (const auto& c : pool) {
    if (std::abs(c.energy - energy) > tie_tolerance(energy)) continue;
    if (std::none_of(out.ties.begin(), out.ties.end(), [&](const Configuration& t) { return same_configuration(t, c.config); }))
      out.ties.push_back(c.config);
  }
  return out;
}

}  // namespace tetra
