// Batch front-end: geometry, e0, minimize, coexist, place, eta-check, greens.
//
// Exit codes: 0 ok, 2 numeric failure, 3 input error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "tetra/errors.hpp"
#include "tetra/partition.hpp"
#include "tetra/problem.hpp"
#include "tetra/torus.hpp"

using nlohmann::ordered_json;
using namespace tetra;

namespace {

constexpr int kOk = 0;
constexpr int kNumeric = 2;
constexpr int kInput = 3;

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void emit(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw ProblemError("cannot write " + path);
  out << text;
}

ordered_json triple_json(const std::array<double, 3>& v) { return ordered_json::array({v[0], v[1], v[2]}); }

ordered_json radii_json(const ClusterGeometry& g) {
  ordered_json r = ordered_json::array();
  for (int i = 0; i < 3; ++i) r.push_back(g.present[i] ? ordered_json(1.0 / g.curvatures[i]) : ordered_json(nullptr));
  return r;
}

ordered_json geometry_json(const ClusterGeometry& g) {
  const auto chk = check_geometry(g);
  ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["kind"] = to_string(g.kind);
  j["masses"] = triple_json(g.masses);
  j["perimeter"] = g.perimeter;
  j["radii"] = radii_json(g);
  ordered_json arcs = ordered_json::array();
  static const char* names[6] = {"outer1", "outer2", "outer3", "wall12", "wall13", "wall23"};
  for (int k = 0; k < 6; ++k) {
    if (!g.present[k]) continue;
    arcs.push_back({{"slot", names[k]},
                    {"curvature", g.curvatures[k]},
                    {"angle", g.arc_angles[k]},
                    {"length", g.arc_lengths[k]},
                    {"chord", g.chords[k]}});
  }
  j["arcs"] = arcs;
  if (g.kind == BubbleKind::Triple) j["junction_angles"] = triple_json(g.junction_angles);
  j["degenerate"] = g.degenerate;
  if (!g.note.empty()) j["note"] = g.note;
  j["residual"] = g.residual;
  j["check"] = {{"area_rel_error", chk.area_rel_error},
                {"junction_angle_error", chk.junction_angle_error},
                {"reciprocal_residual", chk.reciprocal_residual}};
  return j;
}

std::string configuration_csv(const Configuration& c, const GammaMatrix& gamma) {
  std::ostringstream os;
  os << "schema_version,bubble,kind,m1,m2,m3,r1,r2,r3,e0\n";
  for (std::size_t k = 0; k < c.size(); ++k) {
    const auto ev = evaluate_bubble(c[k], gamma);
    os << kSchemaVersion << ',' << k << ',' << to_string(c[k].kind());
    for (int i = 0; i < 3; ++i) os << ',' << num(c[k][i]);
    for (int i = 0; i < 3; ++i) os << ',' << (ev.geometry.present[i] ? num(1.0 / ev.geometry.curvatures[i]) : "");
    os << ',' << num(ev.energy) << '\n';
  }
  return os.str();
}

ordered_json bounds_json(const BoundsReport& b) {
  ordered_json j;
  j["m_plus"] = triple_json(b.m_plus);
  j["m_minus"] = triple_json(b.m_minus);
  j["count_upper"] = ordered_json::array({b.count_upper[0], b.count_upper[1], b.count_upper[2]});
  j["lagrange_estimate"] = triple_json(b.lagrange_estimate);
  j["constants"] = {{"c1", b.c1}, {"c2", b.c2}, {"C1", b.C1}, {"C2", b.C2}, {"energy_upper", b.energy_upper}};
  return j;
}

ordered_json counts_json(const Configuration& c) {
  return {{"triples", c.count(BubbleKind::Triple)},
          {"doubles_12", c.count_double(0, 1)},
          {"doubles_13", c.count_double(0, 2)},
          {"doubles_23", c.count_double(1, 2)},
          {"singles_1", c.count_single(0)},
          {"singles_2", c.count_single(1)},
          {"singles_3", c.count_single(2)}};
}

ordered_json minimize_json(const MinimizeResult& r) {
  ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["energy"] = r.energy;
  j["signature"] = r.signature.to_string();
  j["counts"] = counts_json(r.config);
  ordered_json rows = ordered_json::array();
  for (const auto& b : r.config.bubbles()) rows.push_back({{"kind", to_string(b.kind())}, {"masses", triple_json(b.values())}});
  j["configuration"] = rows;
  j["kkt_spread"] = triple_json(r.kkt.spread);
  j["multipliers"] = triple_json(r.kkt.multiplier);
  j["cap_saturated"] = r.cap_saturated;
  j["signatures_examined"] = r.signatures_examined;
  j["pruned"] = r.pruned;
  j["ties"] = r.ties.size();
  j["bounds"] = bounds_json(r.bounds);
  return j;
}

Configuration problem_configuration(const ProblemFile& p) {
  if (p.configuration.empty()) throw ProblemError("the problem file needs a non-empty 'configuration'");
  return Configuration(p.configuration);
}

int grid_for(const ProblemFile& p, int flag, std::size_t K) {
  if (flag > 0) return flag;
  if (p.n_grid > 0) return p.n_grid;
  return int(std::ceil(std::sqrt(double(K)))) + 1;
}

std::string placement_csv(const PlacementResult& r, const Configuration& c) {
  std::ostringstream os;
  os << "schema_version,bubble,kind,m1,m2,m3,x,y,min_distance,energy\n";
  for (std::size_t k = 0; k < r.placement.positions.size(); ++k) {
    const auto& b = c[r.placement.bubble_index[k]];
    os << kSchemaVersion << ',' << r.placement.bubble_index[k] << ',' << to_string(b.kind());
    for (int i = 0; i < 3; ++i) os << ',' << num(b[i]);
    os << ',' << num(r.placement.positions[k].x) << ',' << num(r.placement.positions[k].y) << ','
       << num(r.min_distance) << ',' << num(r.energy) << '\n';
  }
  return os.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quaternary droplet energies: bubble geometry, mass partition and torus placement"};
  app.require_subcommand(1);

  std::string input, out;
  std::optional<std::uint64_t> seed;
  int cap = 0, grid = 0;
  double tol = 0.0;
  auto common = [&](CLI::App* sub) {
    sub->add_option("--input", input, "problem file (JSON)");
    sub->add_option("--seed", seed, "multi-start seed (overrides the file)");
    sub->add_option("--cap", cap, "lobe count cap per type")->check(CLI::PositiveNumber);
    sub->add_option("--tol", tol, "tolerance")->check(CLI::PositiveNumber);
    sub->add_option("--grid", grid, "grid size")->check(CLI::PositiveNumber);
    sub->add_option("--out", out, "output path (default stdout)");
  };

  std::vector<double> masses;
  auto* geo = app.add_subcommand("geometry", "solve one bubble: geometry m1 m2 m3");
  geo->add_option("masses", masses)->expected(3)->required();
  common(geo);
  auto* e0c = app.add_subcommand("e0", "droplet energy of one bubble: e0 m1 m2 m3 [--input for Gamma]");
  e0c->add_option("masses", masses)->expected(3)->required();
  common(e0c);
  auto* mini = app.add_subcommand("minimize", "global mass partition (needs --input)");
  common(mini);
  std::vector<int> counts;
  auto* coex = app.add_subcommand("coexist", "coexistence parameters and verification: coexist N1 N2 N3");
  coex->add_option("counts", counts)->expected(3)->required();
  common(coex);
  auto* place = app.add_subcommand("place", "optimize bubble positions on the torus (needs --input)");
  common(place);
  auto* eta = app.add_subcommand("eta-check", "E_eta against sum e0 for a list of eta (needs --input)");
  common(eta);
  auto* greens = app.add_subcommand("greens", "sample the torus Green's function on a grid");
  common(greens);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInput;
  }

  try {
    ProblemFile pf;
    if (!input.empty()) pf = load_problem(input);
    if (seed) pf.seed = seed;
    if (cap > 0) pf.count_cap = cap;
    if (tol > 0.0) pf.tol = tol;
    if (out.empty()) out = pf.output;

    if (geo->parsed()) {
      const MassTriple m(masses[0], masses[1], masses[2]);
      emit(geometry_json(solve(m)).dump(2) + "\n", out);
    } else if (e0c->parsed()) {
      const MassTriple m(masses[0], masses[1], masses[2]);
      const auto ev = evaluate_bubble(m, pf.gamma);
      ordered_json j;
      j["schema_version"] = kSchemaVersion;
      j["masses"] = triple_json(m.values());
      j["kind"] = to_string(m.kind());
      j["e0"] = ev.energy;
      j["perimeter"] = ev.geometry.perimeter;
      j["interaction"] = interaction_energy(m, pf.gamma);
      ordered_json g = ordered_json::array();
      for (const auto& v : ev.gradient) g.push_back(v ? ordered_json(*v) : ordered_json(nullptr));
      j["gradient"] = g;
      j["radii"] = radii_json(ev.geometry);
      emit(j.dump(2) + "\n", out);
    } else if (mini->parsed()) {
      if (!pf.M) throw ProblemError("minimize needs a problem file with M");
      const auto r = minimize_e0bar(*pf.M, pf.gamma, pf.minimize_options());
      std::cout << minimize_json(r).dump(2) << "\n";
      if (!out.empty()) emit(configuration_csv(r.config, pf.gamma), out);
    } else if (coex->parsed()) {
      for (int n : counts)
        if (n < 1) throw ProblemError("coexist counts must be >= 1");
      const auto params = coexistence_params(counts[0], counts[1], counts[2]);
      MinimizeOptions opts;
      opts.count_cap = cap > 0 ? cap : 12;
      opts.inner.seed = pf.seed.value_or(0);
      const auto r = minimize_e0bar(params.M, params.gamma, opts);
      ordered_json j;
      j["schema_version"] = kSchemaVersion;
      j["requested"] = {{"triples", counts[0]}, {"doubles_23", counts[1]}, {"singles_3", counts[2]}};
      j["M"] = triple_json(params.M);
      j["Gamma_diagonal"] = ordered_json::array({params.gamma(0, 0), params.gamma(1, 1), params.gamma(2, 2)});
      ordered_json checks = ordered_json::array();
      for (const auto& c : params.certificate.checks)
        checks.push_back({{"name", c.name}, {"lhs", c.lhs}, {"rhs", c.rhs}, {"holds", c.holds}});
      j["certificate"] = {{"m_plus", triple_json(params.certificate.m_plus)},
                          {"m_minus", triple_json(params.certificate.m_minus)},
                          {"checks", checks},
                          {"note", params.certificate.note}};
      j["count_cap"] = opts.count_cap;
      j["verification"] = minimize_json(r);
      const bool ok = r.config.count(BubbleKind::Triple) >= counts[0] && r.config.count_double(1, 2) >= counts[1] &&
                      r.config.count_single(2) >= counts[2];
      j["verified"] = ok;
      emit(j.dump(2) + "\n", out);
    } else if (place->parsed()) {
      const auto c = problem_configuration(pf);
      const auto r = optimize_placement(c, pf.gamma, grid_for(pf, grid, c.size()));
      emit(placement_csv(r, c), out);
      std::cerr << "min_distance " << num(r.min_distance) << " grid_competitor " << num(r.initial_min_distance)
                << " energy " << num(r.energy) << " initial_energy " << num(r.initial_energy) << "\n";
    } else if (eta->parsed()) {
      const auto c = problem_configuration(pf);
      const auto pl = optimize_placement(c, pf.gamma, grid_for(pf, grid, c.size()));
      const auto etas = pf.eta.empty() ? std::vector<double>{1e-2, 1e-3, 1e-4} : pf.eta;
      std::vector<double> parts;
      for (const auto& b : c.bubbles()) parts.push_back(e0(b, pf.gamma));
      const double sum_e0 = stable_sum(parts);
      std::ostringstream os;
      os << "schema_version,eta,E_eta,sum_e0,difference,difference_times_abs_log_eta,perimeter,leading,log_self,"
            "regular_self,cross,eta_max\n";
      for (double e : etas) {
        const auto r = assemble_E_eta(c, pl.placement, e, pf.gamma, tol > 0.0 ? tol : 1e-8);
        const double diff = r.total - sum_e0;
        os << kSchemaVersion << ',' << num(e) << ',' << num(r.total) << ',' << num(sum_e0) << ',' << num(diff) << ','
           << num(std::abs(diff) * std::abs(std::log(e))) << ',' << num(r.perimeter) << ',' << num(r.leading) << ','
           << num(r.log_self) << ',' << num(r.regular_self) << ',' << num(r.cross) << ',' << num(r.eta_max) << '\n';
      }
      emit(os.str(), out);
    } else if (greens->parsed()) {
      const int n = grid > 0 ? grid : 64;
      const GreensEvaluator G;
      std::ostringstream csv;
      csv << "schema_version,x,y,G\n";
      std::vector<double> vals;
      double odd = 0.0;
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
          const Vec2 x{(a + 0.5) / n - 0.5, (b + 0.5) / n - 0.5};
          const double v = G.eval(x);
          vals.push_back(v);
          odd = std::max(odd, std::abs(v - G.eval(-x)));
          csv << kSchemaVersion << ',' << num(x.x) << ',' << num(x.y) << ',' << num(v) << '\n';
        }
      const double mean = stable_sum(vals) / vals.size();
      if (!out.empty()) emit(csv.str(), out);
      std::cout << "zero_mean grid " << n << " mean " << num(mean) << " evenness " << num(odd) << " R0 "
                << num(G.regular_at_zero()) << " R0_spectral " << num(spectral_regular_at_zero_extrapolated(32))
                << "\n";
    }
  } catch (const DomainError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kInput;
  } catch (const SingularityError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kInput;
  } catch (const NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return kNumeric;
  } catch (const AccuracyError& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return kNumeric;
  } catch (const std::exception& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return kNumeric;
  }
  return kOk;
}
