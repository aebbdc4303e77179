#include "jacobi/verify.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <cmath>
#include <cstddef>

#include "jacobi/errors.hpp"
#include "jacobi/evaluator.hpp"

namespace jacobi {

namespace {

enum class Category { Eq1, Eq2, Cyclic };

struct Group {
  Category cat;
  std::size_t offset;
  std::size_t count;
};

void add_group(std::vector<Expression>& roots, std::vector<Group>& groups, Category cat,
               std::vector<Expression> terms) {
  if (terms.empty()) return;
  groups.push_back({cat, roots.size(), terms.size()});
  for (Expression& t : terms) roots.push_back(std::move(t));
}

void append(std::vector<Expression>& dst, std::vector<Expression> src) {
  for (Expression& t : src) dst.push_back(std::move(t));
}

int rank_of(const Eigen::MatrixXd& m) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) == 0.0) return 0;
  int r = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > 1e-10 * sv(0)) ++r;
  }
  return r;
}

}  // namespace

VerificationReport verify_jacobi(const JacobiStructure& J, const VerifyOptions& opts) {
  J.validate();
  const ChartPtr& chart = J.chart;
  std::size_t n = chart->dimension();
  SampleBox box = opts.box.lo.empty() ? SampleBox::uniform(n, -1.0, 1.0) : opts.box;

  std::vector<Expression> roots;
  std::vector<Group> groups;

  // route 1: the two tensor equations, one residual group per component
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      for (std::size_t k = j + 1; k < n; ++k) {
        std::vector<Expression> terms = schouten_terms(J.P, i, j, k);
        Expression minus_two = Expression::integer(-2);
        for (Expression& w : wedge_terms(J.a, J.P, i, j, k)) {
          terms.push_back(minus_two * w);
        }
        add_group(roots, groups, Category::Eq1, std::move(terms));
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      add_group(roots, groups, Category::Eq2, lie_derivative_terms(J.P, J.a, i, j));
    }
  }

  // route 2: cyclic bracket sums over random polynomial triples
  SampleRng fn_rng(SampleRng::derive(opts.seed, 1));
  for (int t = 0; t < opts.function_triples; ++t) {
    Expression f = random_polynomial(fn_rng, *chart, opts.poly_degree);
    Expression g = random_polynomial(fn_rng, *chart, opts.poly_degree);
    Expression h = random_polynomial(fn_rng, *chart, opts.poly_degree);
    std::vector<Expression> terms = jacobi_bracket_terms(J, f, jacobi_bracket(J, g, h));
    append(terms, jacobi_bracket_terms(J, g, jacobi_bracket(J, h, f)));
    append(terms, jacobi_bracket_terms(J, h, jacobi_bracket(J, f, g)));
    add_group(roots, groups, Category::Cyclic, std::move(terms));
  }

  // pointwise rank of P rides along as extra roots
  std::size_t p_offset = roots.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) roots.push_back(J.P.upper(i, j));

  Tape tape(std::move(roots), *chart);

  VerificationReport rep;
  rep.samples = opts.samples;
  rep.seed = opts.seed;
  rep.tolerance = opts.tolerance;
  rep.rank_min = static_cast<int>(n) + 1;
  rep.rank_max = -1;

  SampleRng pt_rng(SampleRng::derive(opts.seed, 0));
  std::vector<double> scratch;
  std::vector<double> vals(tape.root_count());
  Eigen::MatrixXd pmat(n, n);

  int redraws = 0;
  for (int s = 0; s < opts.samples; ++s) {
    for (;;) {
      Point p = draw_point(pt_rng, chart, box);
      try {
        tape.eval(p.values(), scratch, vals);
        break;
      } catch (const DomainError&) {
        if (++redraws > opts.redraw_budget) {
          throw DegenerateSampling("verification exceeded its resample budget of " +
                                   std::to_string(opts.redraw_budget));
        }
      }
    }

    for (const Group& g : groups) {
      double sum = 0.0, mag = 0.0;
      for (std::size_t t = 0; t < g.count; ++t) {
        double v = vals[g.offset + t];
        sum += v;
        mag += std::fabs(v);
      }
      double rel = std::fabs(sum) / (1.0 + mag);
      switch (g.cat) {
        case Category::Eq1: rep.eq1_max = std::max(rep.eq1_max, rel); break;
        case Category::Eq2: rep.eq2_max = std::max(rep.eq2_max, rel); break;
        case Category::Cyclic: rep.cyclic_max = std::max(rep.cyclic_max, rel); break;
      }
    }

    pmat.setZero();
    std::size_t t = p_offset;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j, ++t) {
        pmat(i, j) = vals[t];
        pmat(j, i) = -vals[t];
      }
    }
    int r = rank_of(pmat);
    rep.rank_min = std::min(rep.rank_min, r);
    rep.rank_max = std::max(rep.rank_max, r);
  }

  rep.redraws = redraws;
  rep.tensor_pass = rep.eq1_max <= opts.tolerance && rep.eq2_max <= opts.tolerance;
  rep.cyclic_pass = rep.cyclic_max <= opts.tolerance;
  rep.pass = rep.tensor_pass && rep.cyclic_pass;
  if (opts.samples <= 0) {
    rep.rank_min = 0;
    rep.rank_max = 0;
  }
  return rep;
}

ConsistencyReport consistency_check(const JacobiStructure& J, const VerifyOptions& opts) {
  ConsistencyReport c;
  c.report = verify_jacobi(J, opts);
  c.consistent = c.report.tensor_pass == c.report.cyclic_pass;
  return c;
}

}  // namespace jacobi
