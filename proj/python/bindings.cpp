#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "tetra/errors.hpp"
#include "tetra/partition.hpp"
#include "tetra/torus.hpp"

namespace py = pybind11;
using namespace tetra;

namespace {

using Rows = std::array<std::array<double, 3>, 3>;

GammaMatrix gamma_of(const std::optional<Rows>& rows) { return rows ? GammaMatrix(*rows) : GammaMatrix::zero(); }

Rows rows_of(const GammaMatrix& g) { return g.rows(); }

std::vector<std::array<double, 3>> bubbles_of(const Configuration& c) {
  std::vector<std::array<double, 3>> out;
  for (const auto& b : c.bubbles()) out.push_back(b.values());
  return out;
}

Configuration config_of(const std::vector<std::array<double, 3>>& bubbles) {
  std::vector<MassTriple> v;
  for (const auto& b : bubbles) v.emplace_back(b);
  return Configuration(v);
}

py::dict geometry_dict(const ClusterGeometry& g) {
  py::dict d;
  d["kind"] = to_string(g.kind);
  d["masses"] = g.masses;
  d["perimeter"] = g.perimeter;
  d["curvatures"] = g.curvatures;
  d["arc_lengths"] = g.arc_lengths;
  d["present"] = g.present;
  d["junction_angles"] = g.junction_angles;
  d["degenerate"] = g.degenerate;
  return d;
}

}  // namespace

PYBIND11_MODULE(_tetra, m) {
  m.doc() = "Bubble geometry, droplet energies, partition minimisation and torus placement.";

  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<NumericError>(m, "NumericError", PyExc_RuntimeError);
  py::register_exception<AccuracyError>(m, "AccuracyError", PyExc_RuntimeError);
  py::register_exception<SingularityError>(m, "SingularityError", PyExc_ValueError);

  m.def("solve", [](std::array<double, 3> masses) { return geometry_dict(solve(MassTriple(masses))); },
        py::arg("masses"), "Minimal cluster for lobe areas (m1, m2, m3); zeros drop lobes.");
  m.def("perimeter", [](std::array<double, 3> masses) { return perimeter(MassTriple(masses)); }, py::arg("masses"));
  m.def("perimeter_gradient", [](std::array<double, 3> masses) { return perimeter_gradient(MassTriple(masses)); },
        py::arg("masses"));

  m.def(
      "e0", [](std::array<double, 3> masses, std::optional<Rows> gamma) { return e0(MassTriple(masses), gamma_of(gamma)); },
      py::arg("masses"), py::arg("gamma") = py::none());
  m.def(
      "e0_gradient",
      [](std::array<double, 3> masses, std::optional<Rows> gamma) {
        return e0_gradient(MassTriple(masses), gamma_of(gamma));
      },
      py::arg("masses"), py::arg("gamma") = py::none(), "Per-lobe multipliers; None for absent lobes.");
  m.def(
      "configuration_energy",
      [](const std::vector<std::array<double, 3>>& bubbles, std::optional<Rows> gamma) {
        return configuration_energy(config_of(bubbles), gamma_of(gamma));
      },
      py::arg("bubbles"), py::arg("gamma") = py::none());
  m.def(
      "kkt_spread",
      [](const std::vector<std::array<double, 3>>& bubbles, std::optional<Rows> gamma) {
        return kkt_residual(config_of(bubbles), gamma_of(gamma)).spread;
      },
      py::arg("bubbles"), py::arg("gamma") = py::none());

  m.def("mass_upper_bound", [](std::optional<Rows> gamma) { return mass_upper_bound(gamma_of(gamma)); },
        py::arg("gamma") = py::none());

  m.def(
      "minimize",
      [](Totals M, std::optional<Rows> gamma, int count_cap, std::uint64_t seed, int multistart) {
        MinimizeOptions o;
        o.count_cap = count_cap;
        o.inner.seed = seed;
        o.inner.multistart = multistart;
        MinimizeResult r;
        {
          py::gil_scoped_release release;
          r = minimize_e0bar(M, gamma_of(gamma), o);
        }
        py::dict d;
        d["energy"] = r.energy;
        d["bubbles"] = bubbles_of(r.config);
        d["signature"] = r.signature.to_string();
        d["cap_saturated"] = r.cap_saturated;
        d["kkt_spread"] = r.kkt.spread;
        d["multipliers"] = r.kkt.multiplier;
        d["signatures_examined"] = r.signatures_examined;
        d["m_plus"] = r.bounds.m_plus;
        d["m_minus"] = r.bounds.m_minus;
        return d;
      },
      py::arg("M"), py::arg("gamma") = py::none(), py::arg("count_cap") = 12, py::arg("seed") = 0,
      py::arg("multistart") = 8);

  m.def(
      "oracle",
      [](Totals M, double grid_step, std::optional<Rows> gamma, int max_bubbles) {
        const auto r = brute_force_oracle(M, gamma_of(gamma), max_bubbles, grid_step);
        py::dict d;
        d["energy"] = r.energy;
        d["bubbles"] = bubbles_of(r.config);
        d["grid_points"] = r.grid_points;
        return d;
      },
      py::arg("M"), py::arg("grid_step"), py::arg("gamma") = py::none(), py::arg("max_bubbles") = 3,
      "Exhaustive grid search over configurations of at most max_bubbles bubbles.");

  m.def(
      "coexistence_params",
      [](int n1, int n2, int n3) {
        const auto p = coexistence_params(n1, n2, n3);
        py::dict d;
        d["M"] = p.M;
        d["gamma"] = rows_of(p.gamma);
        py::list checks;
        for (const auto& c : p.certificate.checks) {
          py::dict e;
          e["name"] = c.name;
          e["lhs"] = c.lhs;
          e["rhs"] = c.rhs;
          e["holds"] = c.holds;
          checks.append(e);
        }
        d["checks"] = checks;
        d["note"] = p.certificate.note;
        return d;
      },
      py::arg("n1"), py::arg("n2"), py::arg("n3"));

  m.def(
      "signature",
      [](const std::vector<std::array<double, 3>>& bubbles) { return signature_of(config_of(bubbles)).to_string(); },
      py::arg("bubbles"), "Bubble counts by kind, e.g. 'T1 D12:0 ... S3:2'.");

  // torus
  m.def(
      "greens",
      [](double x, double y) {
        static const GreensEvaluator g;
        return g.eval({x, y});
      },
      py::arg("x"), py::arg("y"), "Zero-mean periodic Green's function of the unit torus.");
  m.def(
      "regular_part",
      [](double x, double y) {
        static const GreensEvaluator g;
        return g.regular_part({x, y});
      },
      py::arg("x"), py::arg("y"));
  m.def("kronecker_regular_at_zero", &kronecker_regular_at_zero);

  m.def(
      "optimize_placement",
      [](const std::vector<std::array<double, 3>>& bubbles, int n_grid, std::optional<Rows> gamma) {
        PlacementResult r;
        const auto c = config_of(bubbles);
        {
          py::gil_scoped_release release;
          r = optimize_placement(c, gamma_of(gamma), n_grid);
        }
        std::vector<std::array<double, 2>> pos;
        for (const auto& p : r.placement.positions) pos.push_back({p.x, p.y});
        py::dict d;
        d["positions"] = pos;
        d["bubble_index"] = r.placement.bubble_index;
        d["energy"] = r.energy;
        d["min_distance"] = r.min_distance;
        d["initial_energy"] = r.initial_energy;
        d["initial_min_distance"] = r.initial_min_distance;
        d["converged"] = r.converged;
        return d;
      },
      py::arg("bubbles"), py::arg("n_grid"), py::arg("gamma") = py::none());

  m.def(
      "E_eta",
      [](const std::vector<std::array<double, 3>>& bubbles, const std::vector<std::array<double, 2>>& positions,
         double eta, std::optional<Rows> gamma) {
        const auto c = config_of(bubbles);
        std::vector<Vec2> pos;
        std::vector<std::size_t> index;
        for (std::size_t k = 0; k < positions.size(); ++k) {
          pos.push_back({positions[k][0], positions[k][1]});
          index.push_back(k);
        }
        EtaEnergy e;
        {
          py::gil_scoped_release release;
          e = assemble_E_eta(c, TorusPlacement(pos, index, eta), eta, gamma_of(gamma));
        }
        py::dict d;
        d["total"] = e.total;
        d["perimeter"] = e.perimeter;
        d["leading"] = e.leading;
        d["remainder"] = e.remainder;
        d["eta_max"] = e.eta_max;
        return d;
      },
      py::arg("bubbles"), py::arg("positions"), py::arg("eta"), py::arg("gamma") = py::none());
}
