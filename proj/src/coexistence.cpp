// Parameter construction for coexisting single, double and triple bubbles.
//
// Follows the cascade of the existence argument with diagonal Gamma: M1 is
// fixed by M1/m1+ > N1, then M2 and M3 are raised by the mass their extra
// doubles and singles need. The certified lower bound m- is far too
// conservative to size M2, M3 at desk scale, so the consumed masses are taken
// from equilibrium lobe sizes: each bubble kind minimises its energy per unit
// of lead-lobe mass at prices (multipliers) set by the bubble kinds below it.

#include <cmath>
#include <functional>

#include <Eigen/Dense>

#include "tetra/errors.hpp"
#include "tetra/partition.hpp"

namespace tetra {

namespace {

double golden_min(const std::function<double(double)>& f, double lo, double hi, double* argmin) {
  const double r = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = lo, b = hi;
  double c = b - r * (b - a), d = a + r * (b - a);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < 80 && b - a > 1e-10 * (std::abs(a) + std::abs(b)); ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - r * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + r * (b - a);
      fd = f(d);
    }
  }
  *argmin = 0.5 * (a + b);
  return f(*argmin);
}

struct PricedBubble {
  std::array<double, 3> masses{};
  double lead_price = 0.0;  // multiplier of the lead type at equilibrium
};

// With the lead lobe fixed at `lead_mass`, minimise e0 - sum_j price_j m_j over
// the partner lobes (Newton on g_j = price_j).
double partner_minimum(int lead, double lead_mass, const std::vector<int>& partners, const Totals& price,
                       const GammaMatrix& gamma, const Totals& start, std::array<double, 3>* out) {
  std::array<double, 3> x{};
  x[lead] = lead_mass;
  for (int j : partners) x[j] = start[j];
  const int n = int(partners.size());
  auto objective = [&](const std::array<double, 3>& m) {
    double v = e0(MassTriple(m), gamma);
    for (int j : partners) v -= price[j] * m[j];
    return v;
  };
  for (int it = 0; it < 60 && n > 0; ++it) {
    const auto g = e0_gradient(MassTriple(x), gamma);
    Eigen::VectorXd r(n);
    for (int a = 0; a < n; ++a) r[a] = *g[partners[a]] - price[partners[a]];
    if (r.cwiseAbs().maxCoeff() < 1e-12) break;
    Eigen::MatrixXd H(n, n);
    for (int a = 0; a < n; ++a) {
      const double h = 1e-5 * x[partners[a]];
      auto xp = x, xm = x;
      xp[partners[a]] += h;
      xm[partners[a]] -= h;
      const auto gp = e0_gradient(MassTriple(xp), gamma), gm = e0_gradient(MassTriple(xm), gamma);
      for (int b = 0; b < n; ++b) H(b, a) = (*gp[partners[b]] - *gm[partners[b]]) / (2.0 * h);
    }
    H = 0.5 * (H + H.transpose());
    Eigen::VectorXd step = H.ldlt().solve(-r);
    if (!step.allFinite() || r.dot(step) >= 0.0) step = -r;  // fall back to descent
    const double f0 = objective(x);
    double t = 1.0;
    bool moved = false;
    for (int ls = 0; ls < 50; ++ls, t *= 0.5) {
      auto trial = x;
      bool ok = true;
      for (int a = 0; a < n; ++a) {
        trial[partners[a]] = x[partners[a]] + t * step[a];
        ok = ok && trial[partners[a]] > 0.0;
      }
      if (ok && objective(trial) <= f0) {
        x = trial;
        moved = true;
        break;
      }
    }
    if (!moved) break;
  }
  *out = x;
  return objective(x);
}

PricedBubble equilibrium_bubble(int lead, const std::vector<int>& partners, const Totals& price,
                                const GammaMatrix& gamma) {
  const double mplus = mass_upper_bound(gamma)[lead];
  Totals start{};
  for (int j : partners) start[j] = std::pow(4.0 * std::pow(kPi, 1.5) / gamma(j, j), 2.0 / 3.0);
  std::array<double, 3> best{};
  auto per_mass = [&](double log_a) {
    const double a = std::exp(log_a);
    std::array<double, 3> x{};
    const double v = partner_minimum(lead, a, partners, price, gamma, start, &x);
    best = x;
    return v / a;
  };
  double log_a = 0.0;
  const double value = golden_min(per_mass, std::log(0.01 * mplus), std::log(mplus), &log_a);
  PricedBubble out;
  per_mass(log_a);
  out.masses = best;
  out.lead_price = value;
  return out;
}

}  // namespace

CoexistenceParams coexistence_params(int n1, int n2, int n3) {
  if (n1 < 1 || n2 < 1 || n3 < 1) throw DomainError("coexistence counts must be at least 1");
  CoexistenceParams out;
  out.gamma = GammaMatrix::identity();
  const GammaMatrix& G = out.gamma;
  const Totals mp = mass_upper_bound(G);

  // Singles of type 3 set its price, doubles (2,3) the price of type 2, and
  // triples then fix the equilibrium type-1 lobe.
  Totals price{};
  const auto single = equilibrium_bubble(2, {}, price, G);
  price[2] = single.lead_price;
  const auto dbl = equilibrium_bubble(1, {2}, price, G);
  price[1] = dbl.lead_price;
  const auto tri = equilibrium_bubble(0, {1, 2}, price, G);

  // Smallest triple count whose type-1 mass exceeds N1 m1+.
  const double a = tri.masses[0];
  const int triples = int(std::floor(n1 * mp[0] / a)) + 1;
  Totals& M = out.M;
  M[0] = triples * a;
  // Half a bubble of slack on the doubles and singles keeps their counts at or
  // above the target when masses rebalance.
  M[1] = triples * tri.masses[1] + (n2 + 0.5) * dbl.masses[1];
  M[2] = triples * tri.masses[2] + (n2 + 0.5) * dbl.masses[2] + (n3 + 0.5) * single.masses[2];

  auto& cert = out.certificate;
  const BoundsReport b = bounds_report(M, G);
  cert.m_plus = b.m_plus;
  cert.m_minus = b.m_minus;
  auto check = [&](std::string name, double lhs, double rhs) {
    cert.checks.push_back({std::move(name), lhs, rhs, lhs > rhs});
  };
  check("M1/m1+ > N1", M[0] / mp[0], n1);
  check("M2 >= M1", M[1], M[0] * (1.0 - 1e-15));
  check("M3 >= M2", M[2], M[1] * (1.0 - 1e-15));
  // Cascade with the certified lower bound (type-1 lobe count <= M1/m1-).
  const double type1_lobes = M[0] / b.m_minus[0];
  check("M2 > m2+ (N2 + M1/m1-)", M[1], mp[1] * (n2 + type1_lobes));
  const double doubles_cap = std::max(0.0, (M[1] - mp[1] * type1_lobes) / b.m_minus[1]);
  check("M3 > m3+ (N3 + M1/m1- + doubles)", M[2], mp[2] * (n3 + type1_lobes + doubles_cap));
  // Desk-scale cascade with equilibrium lobe sizes.
  check("M2 - T b_triple > N2 b_double", M[1] - triples * tri.masses[1], n2 * dbl.masses[1]);
  check("M3 - T c_triple - N2 c_double > N3 s", M[2] - triples * tri.masses[2] - n2 * dbl.masses[2],
        n3 * single.masses[2]);
  cert.note = "designed for " + std::to_string(triples) + " triples (lobes " + std::to_string(tri.masses[0]) +
              ", " + std::to_string(tri.masses[1]) + ", " + std::to_string(tri.masses[2]) +
              "); type-3 lobe count of the design is " +
              std::to_string(triples + n2 + n3) + "-" + std::to_string(triples + n2 + n3 + 2);
  return out;
}

}  // namespace tetra
