#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "jacobi/gauge.hpp"
#include "jacobi/sampling.hpp"
#include "jacobi/structures.hpp"

namespace jacobi {

/// First-order operator form of the bracket with one slot fixed:
/// {I, f} = sum_l V^l d_l f + s f, where V^l = sum_k P^{kl} d_k I + I a^l and
/// s = -sum_k a^k d_k I.  Equality of two brackets for every test function f
/// is equivalent to equality of the (V, s) pairs, which is what the chain
/// conditions below solve for.
struct BracketOperator {
  VectorField V;
  Expression s;
};

BracketOperator bracket_operator(const JacobiStructure& J, const Expression& I);

/// Basis to search in: either an explicit list, or a generated family of
/// monomials up to monomial_degree, each multiplied by exp(k*phi) for
/// |k| <= exp_multiplier_range.
struct BasisSpec {
  std::vector<Expression> explicit_basis;
  int monomial_degree = 2;
  int exp_multiplier_range = 0;
};

std::vector<Expression> materialize_basis(const BasisSpec& spec, const Chart& chart,
                                          const Expression& phi);

struct RecursionOptions {
  int samples = 100;
  std::uint64_t seed = 42;
  double tol = 1e-8;
  double svd_cutoff = 1e-10;  // relative to the largest singular value
  int max_steps = 8;
  bool allow_constant_gauge = false;
  int redraw_budget = 200;
  SampleBox box;  // empty: [-1, 1] on every axis
  std::optional<int> target_r;
  Expression guard_phi;  // points with |phi| > ln(1e6) are excluded
  bool use_guard = false;
};

/// One solved (or failed) chain condition.
struct StepResult {
  Expression particular;  // minimal-norm solution in the basis
  std::vector<double> coefficients;
  std::vector<std::vector<double>> nullspace;  // coefficient vectors
  double residual = 0.0;  // max condition violation at 2x fresh points
  int rank = 0;           // numerical rank of the design matrix
  bool underdetermined = false;  // fewer rows than basis elements
  bool success = false;   // residual <= tol
};

/// Finds I_next with bracket_operator(Jt, I_next) == bracket_operator(J, I_prev)
/// as a least-squares problem over the basis: the n+1 operator components are
/// collocated at `samples` admissible points, solved by SVD with minimal-norm
/// tie-breaking, and certified at fresh points drawn after the collocation
/// set.  A failed step is a result with success=false, not an error.
StepResult solve_recursion_step(const JacobiStructure& J, const JacobiStructure& Jt,
                                const Expression& I_prev, const std::vector<Expression>& basis,
                                const RecursionOptions& opts);

struct StepRecord {
  int index = 0;  // 1-based
  double residual = 0.0;
  bool success = false;
  int rank = 0;
  bool underdetermined = false;
  std::vector<double> coefficients;
  std::vector<std::vector<double>> nullspace;
};

struct InvolutionReport {
  std::vector<std::vector<double>> first;   // max |{I_i, I_j}| under J
  std::vector<std::vector<double>> second;  // same under the transformed structure
  double max_entry = 0.0;
  bool pass = false;
};

struct RecursionChain {
  std::vector<Expression> integrals;  // I_0 = H first
  std::vector<StepRecord> steps;
  std::string stop_reason;  // "max-steps" or "unsolvable-in-basis"
  InvolutionReport involution;
  int independence_rank = 0;
  std::optional<int> target_r;
  GaugeConstancy gauge_constancy;
  bool pass = false;  // at least one accepted step and involution holds
};

/// Runs the chain I_0 = H, I_k from solve_recursion_step against
/// (J, gauge_transform(J, phi)), stopping at max_steps or the first failed
/// step.  Refuses constant phi unless allow_constant_gauge is set: a constant
/// gauge only rescales, so the chain degenerates to multiples of H.
RecursionChain run_recursion(const JacobiStructure& J, const GaugeFunction& g,
                             const Expression& H, const std::vector<Expression>& basis,
                             const RecursionOptions& opts);

/// Max scale-relative |{I_i, I_j}| over fresh samples, under both structures.
InvolutionReport check_involution(const JacobiStructure& J, const JacobiStructure& Jt,
                                  const std::vector<Expression>& chain,
                                  const RecursionOptions& opts);

/// Largest numerical rank of the chain's Jacobian over sampled points
/// (SVD, cutoff 1e-8 relative); the count of functionally independent
/// integrals the chain actually provides.
int functional_independence(const std::vector<Expression>& chain, const Chart& chart,
                            int points, std::uint64_t seed, const SampleBox& box = {});

}  // namespace jacobi
