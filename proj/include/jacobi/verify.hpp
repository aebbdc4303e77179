#pragma once

#include <cstdint>

#include "jacobi/sampling.hpp"
#include "jacobi/structures.hpp"

namespace jacobi {

struct VerifyOptions {
  int samples = 100;
  std::uint64_t seed = 42;
  double tolerance = 1e-8;
  SampleBox box;            // empty: [-1, 1] on every axis
  int function_triples = 10;  // random triples for the bracket route
  int poly_degree = 2;        // degree of those test polynomials
  int redraw_budget = 200;    // total resamples allowed on domain errors
};

/// Residuals are scale-relative: |sum of terms| / (1 + sum |term|), with the
/// per-term magnitudes evaluated at the same point.  Components of gauged
/// structures reach 1e13 and beyond inside the sampling box, where an
/// absolute residual would drown in roundoff of the individual terms.
struct VerificationReport {
  double eq1_max = 0.0;    // [P,P] - 2 a^P, worst triple over all samples
  double eq2_max = 0.0;    // L_a P, worst pair over all samples
  double cyclic_max = 0.0; // cyclic bracket sums over random function triples
  bool tensor_pass = false;
  bool cyclic_pass = false;
  bool pass = false;       // both routes
  int rank_min = 0;        // pointwise rank of P across the sample set
  int rank_max = 0;
  int samples = 0;
  std::uint64_t seed = 0;
  double tolerance = 0.0;
  int redraws = 0;
};

/// Samples the structure equations and the cyclic bracket identity at random
/// points of the box.  Domain errors trigger a resample from the same stream,
/// bounded by redraw_budget.
VerificationReport verify_jacobi(const JacobiStructure& J, const VerifyOptions& opts);

/// The two routes test the same property through different formulas, so they
/// must agree on any input, including structures that fail.
struct ConsistencyReport {
  VerificationReport report;
  bool consistent = false;  // tensor_pass == cyclic_pass
};

ConsistencyReport consistency_check(const JacobiStructure& J, const VerifyOptions& opts);

}  // namespace jacobi
