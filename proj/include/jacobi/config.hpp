#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "jacobi/recursion.hpp"
#include "jacobi/structures.hpp"

namespace jacobi {

struct FlowConfig {
  std::vector<double> x0;
  double t_end = 0.0;
  double dt = 0.0;
  std::vector<Expression> invariants;
  std::vector<std::string> invariant_sources;
};

/// Parsed, validated, defaulted contents of one run configuration file.
struct RunConfig {
  std::string path;
  std::string digest;  // FNV-1a 64 of the file bytes, hex

  ChartPtr chart;
  std::optional<JacobiStructure> structure;
  std::optional<Expression> phi;
  std::optional<Expression> hamiltonian;

  BasisSpec basis;
  int max_steps = 8;
  double tol = 1e-8;
  std::optional<int> target_r;

  int samples = 100;
  std::uint64_t seed = 42;
  double box_min = -1.0;
  double box_max = 1.0;
  double svd_cutoff = 1e-10;

  std::optional<FlowConfig> flow;

  SampleBox sample_box() const {
    return SampleBox::uniform(chart->dimension(), box_min, box_max);
  }
};

/// Loads a sectioned key/value file.  Sections: [manifold] dimension,
/// coordinates; [structure] P."i,j" (1-based, strictly upper), a;
/// [gauge] phi; [hamiltonian] H; [recursion] basis | monomial_degree,
/// exp_multiplier_range, max_steps, tol, target_r; [numeric] samples, seed,
/// box_min, box_max, svd_cutoff; [flow] x0, t_end, dt, invariants.
/// Unknown sections or keys are errors; all expressions are parsed against
/// the declared chart at load time.
RunConfig load_config(const std::string& path);

}  // namespace jacobi
