#include "tetra/problem.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace tetra {

namespace {

using nlohmann::json;

double number(const json& v, const std::string& what) {
  if (!v.is_number()) throw ProblemError(what + " must be a number");
  return v.get<double>();
}

int integer(const json& v, const std::string& what, int lo) {
  if (!v.is_number_integer() || v.get<long long>() < lo) throw ProblemError(what + " must be an integer >= " + std::to_string(lo));
  return int(v.get<long long>());
}

std::array<double, 3> triple(const json& v, const std::string& what) {
  if (!v.is_array() || v.size() != 3) throw ProblemError(what + " must be an array of three numbers");
  return {number(v[0], what), number(v[1], what), number(v[2], what)};
}

}  // namespace

MinimizeOptions ProblemFile::minimize_options() const {
  MinimizeOptions o;
  o.count_cap = count_cap;
  o.inner.tol = tol;
  o.inner.multistart = multistart;
  if (multistart > 1 && !seed) throw ProblemError("a seed is required for multi-start runs");
  o.inner.seed = seed.value_or(0);
  return o;
}

ProblemFile parse_problem(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ProblemError(std::string("problem file is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ProblemError("problem file must be a JSON object");
  static const std::set<std::string> known{"schema_version", "M", "Gamma", "seed", "count_cap", "tol",
                                           "multistart", "configuration", "n_grid", "eta", "output"};
  for (const auto& [key, _] : j.items())
    if (!known.count(key)) throw ProblemError("unknown key '" + key + "'");

  ProblemFile p;
  if (!j.contains("schema_version")) throw ProblemError("schema_version is required");
  p.schema_version = integer(j["schema_version"], "schema_version", 1);
  if (p.schema_version != kSchemaVersion)
    throw ProblemError("unsupported schema_version " + std::to_string(p.schema_version));

  if (j.contains("M")) {
    const auto M = triple(j["M"], "M");
    for (double v : M)
      if (!std::isfinite(v) || v < 0.0) throw ProblemError("M entries must be finite and >= 0");
    p.M = M;
  }
  if (j.contains("Gamma")) {
    const auto& g = j["Gamma"];
    if (!g.is_array() || g.size() != 3) throw ProblemError("Gamma must be a 3x3 array");
    std::array<std::array<double, 3>, 3> rows;
    for (int i = 0; i < 3; ++i) rows[i] = triple(g[i], "Gamma row");
    try {
      p.gamma = GammaMatrix(rows);
    } catch (const DomainError& e) {
      throw ProblemError(e.what());
    }
  }
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned() && !(j["seed"].is_number_integer() && j["seed"].get<long long>() >= 0))
      throw ProblemError("seed must be a nonnegative integer");
    p.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("count_cap")) p.count_cap = integer(j["count_cap"], "count_cap", 1);
  if (j.contains("tol")) {
    p.tol = number(j["tol"], "tol");
    if (!(p.tol > 0.0)) throw ProblemError("tol must be > 0");
  }
  if (j.contains("multistart")) p.multistart = integer(j["multistart"], "multistart", 1);
  if (j.contains("configuration")) {
    if (!j["configuration"].is_array()) throw ProblemError("configuration must be an array of mass triples");
    for (const auto& b : j["configuration"]) {
      try {
        p.configuration.emplace_back(triple(b, "configuration bubble"));
      } catch (const ProblemError&) {
        throw;
      } catch (const DomainError& e) {
        throw ProblemError(e.what());
      }
    }
  }
  if (j.contains("n_grid")) p.n_grid = integer(j["n_grid"], "n_grid", 1);
  if (j.contains("eta")) {
    if (!j["eta"].is_array()) throw ProblemError("eta must be an array");
    for (const auto& v : j["eta"]) {
      const double e = number(v, "eta");
      if (!(e > 0.0 && e < 1.0)) throw ProblemError("eta values must lie in (0, 1)");
      p.eta.push_back(e);
    }
  }
  if (j.contains("output")) {
    if (!j["output"].is_string()) throw ProblemError("output must be a string");
    p.output = j["output"].get<std::string>();
  }
  return p;
}

ProblemFile load_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ProblemError("cannot read problem file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_problem(ss.str());
}

}  // namespace tetra
