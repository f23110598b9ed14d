#pragma once

// Problem files: JSON input for the batch front-end.
//
//   {
//     "schema_version": 1,
//     "M": [40, 0, 0],
//     "Gamma": [[1, 0, 0], [0, 1, 0], [0, 0, 1]],
//     "seed": 7,
//     "count_cap": 12, "tol": 1e-11, "multistart": 8,
//     "configuration": [[1, 0.7, 0.3], [0, 0.5, 0.4]],
//     "n_grid": 3, "eta": [1e-2, 1e-3, 1e-4],
//     "output": "table.csv"
//   }
//
// Unknown keys are rejected. Gamma symmetry is enforced at parse time.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tetra/errors.hpp"
#include "tetra/partition.hpp"

namespace tetra {

inline constexpr int kSchemaVersion = 1;

class ProblemError : public DomainError {
 public:
  using DomainError::DomainError;
};

struct ProblemFile {
  int schema_version = kSchemaVersion;
  std::optional<Totals> M;
  GammaMatrix gamma;
  std::optional<std::uint64_t> seed;
  int count_cap = 12;
  double tol = 1e-11;
  int multistart = 8;
  std::vector<MassTriple> configuration;
  int n_grid = 0;  ///< 0: ceil(sqrt(K)) + 1
  std::vector<double> eta;
  std::string output;

  /// Minimiser options; throws ProblemError when a multi-start run has no seed.
  MinimizeOptions minimize_options() const;
};

ProblemFile parse_problem(const std::string& json_text);
ProblemFile load_problem(const std::string& path);

}  // namespace tetra
