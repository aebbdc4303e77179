#pragma once

#include <cstddef>
#include <vector>

#include "jacobi/chart.hpp"
#include "jacobi/expression.hpp"

namespace jacobi {

/// Antisymmetric 2-tensor field, stored by strictly upper components P^{ij}
/// with i < j.  component(i, j) resolves signs; the diagonal is zero.
class Bivector {
 public:
  explicit Bivector(ChartPtr chart);

  const ChartPtr& chart() const { return chart_; }
  std::size_t dimension() const { return chart_->dimension(); }

  /// Requires i < j.
  void set_upper(std::size_t i, std::size_t j, Expression e);
  /// Requires i < j.
  const Expression& upper(std::size_t i, std::size_t j) const;
  /// Signed component for any index pair; zero on the diagonal.
  Expression component(std::size_t i, std::size_t j) const;

 private:
  std::size_t slot(std::size_t i, std::size_t j) const;

  ChartPtr chart_;
  std::vector<Expression> upper_;  // row-major over i < j
};

/// Vector field by components.
class VectorField {
 public:
  explicit VectorField(ChartPtr chart);

  const ChartPtr& chart() const { return chart_; }
  std::size_t dimension() const { return chart_->dimension(); }

  void set(std::size_t i, Expression e);
  const Expression& component(std::size_t i) const { return comps_.at(i); }

 private:
  ChartPtr chart_;
  std::vector<Expression> comps_;
};

/// Antisymmetric 3-tensor field, stored by strictly increasing triples.
class TriVector {
 public:
  explicit TriVector(ChartPtr chart);

  const ChartPtr& chart() const { return chart_; }
  std::size_t dimension() const { return chart_->dimension(); }
  /// Number of stored triples, C(n, 3).
  std::size_t triple_count() const { return upper_.size(); }

  /// Requires i < j < k.
  void set_upper(std::size_t i, std::size_t j, std::size_t k, Expression e);
  /// Requires i < j < k.
  const Expression& upper(std::size_t i, std::size_t j, std::size_t k) const;
  /// Signed component for any index triple; zero on repeated indices.
  Expression component(std::size_t i, std::size_t j, std::size_t k) const;

 private:
  std::size_t slot(std::size_t i, std::size_t j, std::size_t k) const;

  ChartPtr chart_;
  std::vector<Expression> upper_;
};

/// Bivector field P plus vector field a on a common chart.  The pair encodes
/// a bracket on functions; whether it actually satisfies the two structure
/// equations is checked numerically by the verification engine.
struct JacobiStructure {
  ChartPtr chart;
  Bivector P;
  VectorField a;

  explicit JacobiStructure(ChartPtr c) : chart(c), P(c), a(c) {}

  /// Throws UnknownIdentifier if any component references a name outside
  /// the chart.
  void validate() const;
};

/// {f, g} = sum_{k,l} P^{kl} d_k f d_l g + sum_k a^k (f d_k g - g d_k f).
/// Skew and Jacobi when the structure equations hold; not a derivation in
/// each argument unless a == 0.
Expression jacobi_bracket(const JacobiStructure& J, const Expression& f, const Expression& g);

/// The individual summands of jacobi_bracket, before folding them into one
/// expression.  Residual checks divide by 1 + sum |term| evaluated pointwise,
/// so cancellation between large terms is measured relative to their size.
std::vector<Expression> jacobi_bracket_terms(const JacobiStructure& J, const Expression& f,
                                             const Expression& g);

/// T^{ijk} = 2 sum_l (P^{li} d_l P^{jk} + P^{lj} d_l P^{ki} + P^{lk} d_l P^{ij}).
TriVector schouten_pp(const Bivector& P);
/// Summands of schouten_pp at one strictly increasing triple.
std::vector<Expression> schouten_terms(const Bivector& P, std::size_t i, std::size_t j,
                                       std::size_t k);

/// (a ^ P)^{ijk} = a^i P^{jk} + a^j P^{ki} + a^k P^{ij}.
TriVector wedge_ap(const VectorField& a, const Bivector& P);
/// Summands of wedge_ap at one strictly increasing triple.
std::vector<Expression> wedge_terms(const VectorField& a, const Bivector& P, std::size_t i,
                                    std::size_t j, std::size_t k);

/// (L_a P)^{ij} = sum_k (a^k d_k P^{ij} - P^{kj} d_k a^i - P^{ik} d_k a^j).
Bivector lie_derivative_pa(const Bivector& P, const VectorField& a);
/// Summands of lie_derivative_pa at one upper pair.
std::vector<Expression> lie_derivative_terms(const Bivector& P, const VectorField& a,
                                             std::size_t i, std::size_t j);

}  // namespace jacobi
