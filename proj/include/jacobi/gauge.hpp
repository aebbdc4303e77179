#pragma once

#include <string>

#include "jacobi/structures.hpp"
#include "jacobi/verify.hpp"

namespace jacobi {

/// Conformal rescaling data: a smooth exponent on the structure's chart.
struct GaugeFunction {
  ChartPtr chart;
  Expression phi;
};

/// Whether phi is constant, and how that was decided.  Structural detection
/// looks at the folded partial derivatives; when no derivative folds to a
/// constant the call falls back to probing 10 seeded points.
struct GaugeConstancy {
  bool constant = false;
  std::string method;  // "structural" or "numeric-probe"
};

GaugeConstancy detect_constant_gauge(const GaugeFunction& g, std::uint64_t seed = 42);

/// (P, a) -> (e^phi P, e^phi (a - i(P) dphi)) with
/// (i(P) dphi)^i = sum_j P^{ij} d_j phi.  The output is again a valid
/// structure of the same kind; a constant phi merely rescales.
JacobiStructure gauge_transform(const JacobiStructure& J, const GaugeFunction& g);

/// f -> f e^{-phi}; intertwines the brackets of J and gauge_transform(J).
/// Inverse: apply again with -phi.
Expression gauge_map_psi(const Expression& f, const GaugeFunction& g);

/// Componentwise sum; performs no verification.
JacobiStructure sum_structures(const JacobiStructure& J1, const JacobiStructure& J2);

/// Two structures are compatible when each of them and their sum all verify.
struct CompatibilityReport {
  VerificationReport first;
  VerificationReport second;
  VerificationReport sum;
  bool pass = false;
};

CompatibilityReport check_compatibility(const JacobiStructure& J1, const JacobiStructure& J2,
                                        const VerifyOptions& opts);

/// Max scale-relative residual of mapping the bracket through f -> f e^{-phi}
/// versus bracketing the mapped functions in the transformed structure, over
/// 10 seeded polynomial pairs evaluated at opts.samples points.
double check_isomorphism(const JacobiStructure& J, const GaugeFunction& g,
                         const VerifyOptions& opts);

}  // namespace jacobi
