#include "jacobi/structures.hpp"

#include <utility>

#include "jacobi/errors.hpp"

namespace jacobi {

namespace {

Expression fold_sum(const std::vector<Expression>& terms) {
  Expression s = Expression::integer(0);
  for (const Expression& t : terms) s = s + t;
  return s;
}

void push_nonzero(std::vector<Expression>& out, Expression e) {
  if (!e.is_zero()) out.push_back(std::move(e));
}

}  // namespace

Bivector::Bivector(ChartPtr chart) : chart_(std::move(chart)) {
  std::size_t n = chart_->dimension();
  upper_.assign(n * (n - 1) / 2, Expression::integer(0));
}

std::size_t Bivector::slot(std::size_t i, std::size_t j) const {
  std::size_t n = chart_->dimension();
  if (!(i < j && j < n)) throw Error("bivector index pair must satisfy i < j < dimension");
  return i * n - i * (i + 1) / 2 + (j - i - 1);
}

void Bivector::set_upper(std::size_t i, std::size_t j, Expression e) {
  upper_[slot(i, j)] = std::move(e);
}

const Expression& Bivector::upper(std::size_t i, std::size_t j) const { return upper_[slot(i, j)]; }

Expression Bivector::component(std::size_t i, std::size_t j) const {
  if (i == j) return Expression::integer(0);
  if (i < j) return upper_[slot(i, j)];
  return -upper_[slot(j, i)];
}

VectorField::VectorField(ChartPtr chart) : chart_(std::move(chart)) {
  comps_.assign(chart_->dimension(), Expression::integer(0));
}

void VectorField::set(std::size_t i, Expression e) { comps_.at(i) = std::move(e); }

TriVector::TriVector(ChartPtr chart) : chart_(std::move(chart)) {
  std::size_t n = chart_->dimension();
  std::size_t count = n >= 3 ? n * (n - 1) * (n - 2) / 6 : 0;
  upper_.assign(count, Expression::integer(0));
}

std::size_t TriVector::slot(std::size_t i, std::size_t j, std::size_t k) const {
  std::size_t n = chart_->dimension();
  if (!(i < j && j < k && k < n)) {
    throw Error("trivector index triple must satisfy i < j < k < dimension");
  }
  // lexicographic position among strictly increasing triples
  std::size_t idx = 0;
  for (std::size_t p = 0; p < i; ++p) idx += (n - 1 - p) * (n - 2 - p) / 2;
  for (std::size_t q = i + 1; q < j; ++q) idx += n - 1 - q;
  return idx + (k - j - 1);
}

void TriVector::set_upper(std::size_t i, std::size_t j, std::size_t k, Expression e) {
  upper_[slot(i, j, k)] = std::move(e);
}

const Expression& TriVector::upper(std::size_t i, std::size_t j, std::size_t k) const {
  return upper_[slot(i, j, k)];
}

Expression TriVector::component(std::size_t i, std::size_t j, std::size_t k) const {
  if (i == j || j == k || i == k) return Expression::integer(0);
  // sort the triple, tracking permutation parity
  std::size_t a = i, b = j, c = k;
  bool neg = false;
  if (a > b) { std::swap(a, b); neg = !neg; }
  if (b > c) { std::swap(b, c); neg = !neg; }
  if (a > b) { std::swap(a, b); neg = !neg; }
  const Expression& u = upper_[slot(a, b, c)];
  return neg ? -u : u;
}

void JacobiStructure::validate() const {
  std::size_t n = chart->dimension();
  for (std::size_t i = 0; i < n; ++i) {
    a.component(i).validate_over(*chart);
    for (std::size_t j = i + 1; j < n; ++j) P.upper(i, j).validate_over(*chart);
  }
}

std::vector<Expression> jacobi_bracket_terms(const JacobiStructure& J, const Expression& f,
                                             const Expression& g) {
  const Chart& ch = *J.chart;
  std::size_t n = ch.dimension();
  std::vector<Expression> df(n), dg(n);
  for (std::size_t k = 0; k < n; ++k) {
    df[k] = differentiate(f, ch, ch.coordinate(k));
    dg[k] = differentiate(g, ch, ch.coordinate(k));
  }
  std::vector<Expression> terms;
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t l = k + 1; l < n; ++l) {
      const Expression& p = J.P.upper(k, l);
      push_nonzero(terms, p * df[k] * dg[l]);
      push_nonzero(terms, -(p * df[l] * dg[k]));
    }
  }
  for (std::size_t k = 0; k < n; ++k) {
    const Expression& ak = J.a.component(k);
    push_nonzero(terms, ak * f * dg[k]);
    push_nonzero(terms, -(ak * g * df[k]));
  }
  return terms;
}

Expression jacobi_bracket(const JacobiStructure& J, const Expression& f, const Expression& g) {
  return fold_sum(jacobi_bracket_terms(J, f, g));
}

std::vector<Expression> schouten_terms(const Bivector& P, std::size_t i, std::size_t j,
                                       std::size_t k) {
  const Chart& ch = *P.chart();
  std::size_t n = ch.dimension();
  Expression two = Expression::integer(2);
  std::vector<Expression> terms;
  for (std::size_t l = 0; l < n; ++l) {
    const std::string& xl = ch.coordinate(l);
    push_nonzero(terms, two * P.component(l, i) * differentiate(P.component(j, k), ch, xl));
    push_nonzero(terms, two * P.component(l, j) * differentiate(P.component(k, i), ch, xl));
    push_nonzero(terms, two * P.component(l, k) * differentiate(P.component(i, j), ch, xl));
  }
  return terms;
}

TriVector schouten_pp(const Bivector& P) {
  std::size_t n = P.dimension();
  TriVector T(P.chart());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      for (std::size_t k = j + 1; k < n; ++k)
        T.set_upper(i, j, k, fold_sum(schouten_terms(P, i, j, k)));
  return T;
}

std::vector<Expression> wedge_terms(const VectorField& a, const Bivector& P, std::size_t i,
                                    std::size_t j, std::size_t k) {
  std::vector<Expression> terms;
  push_nonzero(terms, a.component(i) * P.component(j, k));
  push_nonzero(terms, a.component(j) * P.component(k, i));
  push_nonzero(terms, a.component(k) * P.component(i, j));
  return terms;
}

TriVector wedge_ap(const VectorField& a, const Bivector& P) {
  std::size_t n = P.dimension();
  TriVector W(P.chart());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      for (std::size_t k = j + 1; k < n; ++k)
        W.set_upper(i, j, k, fold_sum(wedge_terms(a, P, i, j, k)));
  return W;
}

std::vector<Expression> lie_derivative_terms(const Bivector& P, const VectorField& a,
                                             std::size_t i, std::size_t j) {
  const Chart& ch = *P.chart();
  std::size_t n = ch.dimension();
  std::vector<Expression> terms;
  for (std::size_t k = 0; k < n; ++k) {
    const std::string& xk = ch.coordinate(k);
    push_nonzero(terms, a.component(k) * differentiate(P.component(i, j), ch, xk));
    push_nonzero(terms, -(P.component(k, j) * differentiate(a.component(i), ch, xk)));
    push_nonzero(terms, -(P.component(i, k) * differentiate(a.component(j), ch, xk)));
  }
  return terms;
}

Bivector lie_derivative_pa(const Bivector& P, const VectorField& a) {
  std::size_t n = P.dimension();
  Bivector L(P.chart());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      L.set_upper(i, j, fold_sum(lie_derivative_terms(P, a, i, j)));
  return L;
}

}  // namespace jacobi
