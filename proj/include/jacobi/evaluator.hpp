#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "jacobi/chart.hpp"
#include "jacobi/expression.hpp"

namespace jacobi {

/// Flat instruction program compiled from a set of expression roots.
/// Shared subtrees are deduplicated by node identity, so a DAG of N distinct
/// nodes costs N slots per evaluation regardless of how often it is shared.
/// Used wherever expressions are evaluated at many sample points.
class Tape {
 public:
  Tape() = default;
  Tape(std::vector<Expression> roots, const Chart& chart);

  std::size_t root_count() const { return root_slots_.size(); }
  std::size_t slot_count() const { return code_.size(); }

  /// Evaluates every root at the given coordinates.  scratch is reused
  /// between calls; out must have root_count() entries.  Throws DomainError
  /// exactly where the tree-walking evaluator would.
  void eval(std::span<const double> coords, std::vector<double>& scratch,
            std::span<double> out) const;

  /// Convenience: evaluate all roots into a fresh vector.
  std::vector<double> eval_at(const Point& p) const;

 private:
  enum class Op : std::uint8_t { Const, Var, Add, Mul, Div, Neg, PowInt, Pow, Exp, Ln, Sin, Cos };
  struct Instr {
    Op op;
    std::uint32_t a = 0;
    std::uint32_t b = 0;
    double cval = 0.0;     // Const
    std::int64_t ipow = 0; // PowInt
  };

  struct CompileState;
  std::uint32_t compile(const Expression& e, const Chart& chart, CompileState& st);
  [[noreturn]] void fail_at(std::size_t slot, const char* msg) const;

  std::vector<Expression> roots_;  // keeps nodes alive
  std::vector<Instr> code_;
  std::vector<const Node*> origin_;  // per-slot node for diagnostics
  std::vector<std::uint32_t> root_slots_;
};

}  // namespace jacobi
