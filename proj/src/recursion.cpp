#include "jacobi/recursion.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <cmath>

#include "jacobi/errors.hpp"
#include "jacobi/evaluator.hpp"

namespace jacobi {

namespace {

constexpr double kGuardBound = 13.815510557964274;  // ln(1e6)

SampleBox resolve_box(const SampleBox& box, std::size_t n) {
  return box.lo.empty() ? SampleBox::uniform(n, -1.0, 1.0) : box;
}

}  // namespace

BracketOperator bracket_operator(const JacobiStructure& J, const Expression& I) {
  const Chart& ch = *J.chart;
  I.validate_over(ch);
  std::size_t n = ch.dimension();

  std::vector<Expression> dI(n);
  for (std::size_t k = 0; k < n; ++k) dI[k] = differentiate(I, ch, ch.coordinate(k));

  BracketOperator op{VectorField(J.chart), Expression::integer(0)};
  for (std::size_t l = 0; l < n; ++l) {
    Expression vl = Expression::integer(0);
    for (std::size_t k = 0; k < n; ++k) vl = vl + J.P.component(k, l) * dI[k];
    vl = vl + I * J.a.component(l);
    op.V.set(l, simplify(vl));
  }
  Expression s = Expression::integer(0);
  for (std::size_t k = 0; k < n; ++k) s = s - J.a.component(k) * dI[k];
  op.s = simplify(s);
  return op;
}

std::vector<Expression> materialize_basis(const BasisSpec& spec, const Chart& chart,
                                          const Expression& phi) {
  std::vector<Expression> out;
  if (!spec.explicit_basis.empty()) {
    out = spec.explicit_basis;
  } else {
    std::vector<Expression> monomials = monomial_basis(chart, spec.monomial_degree);
    int range = spec.exp_multiplier_range;
    for (int k = -range; k <= range; ++k) {
      Expression mult = exp(Expression::integer(k) * phi);
      for (const Expression& m : monomials) {
        Expression b = simplify(m * mult);
        bool seen = false;
        for (const Expression& prev : out) {
          if (prev == b) {
            seen = true;
            break;
          }
        }
        if (!seen) out.push_back(b);
      }
    }
  }
  if (out.empty()) throw EmptyBasis("recursion basis is empty");
  for (std::size_t i = 0; i < out.size(); ++i) {
    for (std::size_t j = i + 1; j < out.size(); ++j) {
      if (out[i] == out[j]) throw Error("recursion basis elements must be pairwise distinct");
    }
  }
  return out;
}

StepResult solve_recursion_step(const JacobiStructure& J, const JacobiStructure& Jt,
                                const Expression& I_prev, const std::vector<Expression>& basis,
                                const RecursionOptions& opts) {
  if (basis.empty()) throw EmptyBasis("recursion basis is empty");
  const ChartPtr& chart = J.chart;
  const Chart& ch = *chart;
  std::size_t n = ch.dimension();
  std::size_t m = basis.size();
  std::size_t conds = n + 1;  // n field components plus the scalar part
  SampleBox box = resolve_box(opts.box, n);

  // columns: operator of each basis element in the transformed structure;
  // right-hand side: operator of the previous integral in the original one
  std::vector<Expression> roots;
  roots.reserve((m + 1) * conds + 1);
  for (const Expression& b : basis) {
    BracketOperator op = bracket_operator(Jt, b);
    for (std::size_t l = 0; l < n; ++l) roots.push_back(op.V.component(l));
    roots.push_back(op.s);
  }
  BracketOperator rhs = bracket_operator(J, I_prev);
  for (std::size_t l = 0; l < n; ++l) roots.push_back(rhs.V.component(l));
  roots.push_back(rhs.s);
  std::size_t guard_slot = roots.size();
  if (opts.use_guard) roots.push_back(opts.guard_phi);

  Tape tape(std::move(roots), ch);
  SampleRng rng(SampleRng::derive(opts.seed, 0));
  std::vector<double> scratch, vals(tape.root_count());
  int redraws = 0;

  auto next_admissible = [&]() {
    for (;;) {
      Point p = draw_point(rng, chart, box);
      bool ok = false;
      try {
        tape.eval(p.values(), scratch, vals);
        ok = !opts.use_guard || std::fabs(vals[guard_slot]) <= kGuardBound;
      } catch (const DomainError&) {
        ok = false;
      }
      if (ok) return;
      if (++redraws > opts.redraw_budget) {
        throw DegenerateSampling("recursion step exceeded its resample budget of " +
                                 std::to_string(opts.redraw_budget));
      }
    }
  };

  std::size_t rows = static_cast<std::size_t>(opts.samples) * conds;
  Eigen::MatrixXd A(rows, m);
  Eigen::VectorXd y(rows);
  for (int s = 0; s < opts.samples; ++s) {
    next_admissible();
    for (std::size_t l = 0; l < conds; ++l) {
      std::size_t r = static_cast<std::size_t>(s) * conds + l;
      for (std::size_t i = 0; i < m; ++i) A(r, i) = vals[i * conds + l];
      y(r) = vals[m * conds + l];
    }
  }
  if (A.lpNorm<Eigen::Infinity>() == 0.0) {
    throw DegenerateSampling("collocation produced an identically zero design matrix");
  }

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeFullV);
  const Eigen::VectorXd& sv = svd.singularValues();
  double cut = opts.svd_cutoff * sv(0);
  Eigen::VectorXd uty = svd.matrixU().transpose() * y;

  StepResult result;
  result.underdetermined = rows < m;
  Eigen::VectorXd c = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m));
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > cut) {
      c += (uty(i) / sv(i)) * svd.matrixV().col(i);
      ++result.rank;
    }
  }
  for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(m); ++i) {
    double sigma = i < sv.size() ? sv(i) : 0.0;
    if (sigma <= cut) {
      Eigen::VectorXd col = svd.matrixV().col(i);
      result.nullspace.emplace_back(col.data(), col.data() + col.size());
    }
  }
  result.coefficients.assign(c.data(), c.data() + c.size());

  Expression particular = Expression::integer(0);
  for (std::size_t i = 0; i < m; ++i) {
    particular = particular + Expression::real(result.coefficients[i]) * basis[i];
  }
  result.particular = simplify(particular);

  // certify on fresh points only; the collocation set proves nothing
  double worst = 0.0;
  for (int s = 0; s < 2 * opts.samples; ++s) {
    next_admissible();
    for (std::size_t l = 0; l < conds; ++l) {
      double lhs = 0.0, mag = 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        double t = result.coefficients[i] * vals[i * conds + l];
        lhs += t;
        mag += std::fabs(t);
      }
      double rhs_v = vals[m * conds + l];
      worst = std::max(worst, std::fabs(lhs - rhs_v) / (1.0 + mag + std::fabs(rhs_v)));
    }
  }
  result.residual = worst;
  result.success = worst <= opts.tol;
  return result;
}

RecursionChain run_recursion(const JacobiStructure& J, const GaugeFunction& g,
                             const Expression& H, const std::vector<Expression>& basis,
                             const RecursionOptions& opts) {
  RecursionChain chain;
  chain.gauge_constancy = detect_constant_gauge(g, opts.seed);
  if (chain.gauge_constancy.constant && !opts.allow_constant_gauge) {
    throw ConstantGaugeRefused(
        "gauge function is constant (" + chain.gauge_constancy.method +
        " detection): the chain degenerates to rescalings of H; pass the override to proceed");
  }
  for (std::size_t i = 0; i < basis.size(); ++i) {
    for (std::size_t j = i + 1; j < basis.size(); ++j) {
      if (basis[i] == basis[j]) throw Error("recursion basis elements must be pairwise distinct");
    }
  }

  JacobiStructure Jt = gauge_transform(J, g);
  RecursionOptions step_opts = opts;
  step_opts.use_guard = true;
  step_opts.guard_phi = simplify(g.phi);

  chain.integrals.push_back(simplify(H));
  for (int k = 1; k <= opts.max_steps; ++k) {
    step_opts.seed = SampleRng::derive(opts.seed, 100 + static_cast<std::uint64_t>(k));
    StepResult r = solve_recursion_step(J, Jt, chain.integrals.back(), basis, step_opts);
    StepRecord rec;
    rec.index = k;
    rec.residual = r.residual;
    rec.success = r.success;
    rec.rank = r.rank;
    rec.underdetermined = r.underdetermined;
    rec.coefficients = r.coefficients;
    rec.nullspace = r.nullspace;
    chain.steps.push_back(std::move(rec));
    if (!r.success) {
      chain.stop_reason = "unsolvable-in-basis";
      break;
    }
    chain.integrals.push_back(r.particular);
  }
  if (chain.stop_reason.empty()) chain.stop_reason = "max-steps";

  chain.involution = check_involution(J, Jt, chain.integrals, opts);
  chain.independence_rank =
      functional_independence(chain.integrals, *J.chart, opts.samples,
                              SampleRng::derive(opts.seed, 300), opts.box);
  chain.target_r = opts.target_r;
  bool any_step = false;
  for (const StepRecord& s : chain.steps) any_step = any_step || s.success;
  chain.pass = any_step && chain.involution.pass;
  return chain;
}

InvolutionReport check_involution(const JacobiStructure& J, const JacobiStructure& Jt,
                                  const std::vector<Expression>& chain,
                                  const RecursionOptions& opts) {
  const ChartPtr& chart = J.chart;
  std::size_t n = chart->dimension();
  std::size_t len = chain.size();
  SampleBox box = resolve_box(opts.box, n);

  struct Group {
    std::size_t offset, count, row, col;
    bool second;
  };
  std::vector<Expression> roots;
  std::vector<Group> groups;
  for (int which = 0; which < 2; ++which) {
    const JacobiStructure& S = which ? Jt : J;
    for (std::size_t i = 0; i < len; ++i) {
      for (std::size_t j = i + 1; j < len; ++j) {
        std::vector<Expression> terms = jacobi_bracket_terms(S, chain[i], chain[j]);
        if (terms.empty()) continue;
        groups.push_back({roots.size(), terms.size(), i, j, which == 1});
        for (Expression& t : terms) roots.push_back(std::move(t));
      }
    }
  }

  InvolutionReport rep;
  rep.first.assign(len, std::vector<double>(len, 0.0));
  rep.second.assign(len, std::vector<double>(len, 0.0));

  Tape tape(std::move(roots), *chart);
  SampleRng rng(SampleRng::derive(opts.seed, 200));
  std::vector<double> scratch, vals(tape.root_count());
  int redraws = 0;
  for (int s = 0; s < opts.samples; ++s) {
    for (;;) {
      Point p = draw_point(rng, chart, box);
      try {
        tape.eval(p.values(), scratch, vals);
        break;
      } catch (const DomainError&) {
        if (++redraws > opts.redraw_budget) {
          throw DegenerateSampling("involution check exceeded its resample budget of " +
                                   std::to_string(opts.redraw_budget));
        }
      }
    }
    for (const Group& grp : groups) {
      double sum = 0.0, mag = 0.0;
      for (std::size_t t = 0; t < grp.count; ++t) {
        double v = vals[grp.offset + t];
        sum += v;
        mag += std::fabs(v);
      }
      double rel = std::fabs(sum) / (1.0 + mag);
      auto& mat = grp.second ? rep.second : rep.first;
      mat[grp.row][grp.col] = std::max(mat[grp.row][grp.col], rel);
      mat[grp.col][grp.row] = mat[grp.row][grp.col];
    }
  }
  for (const auto& mat : {rep.first, rep.second}) {
    for (const auto& row : mat) {
      for (double v : row) rep.max_entry = std::max(rep.max_entry, v);
    }
  }
  rep.pass = rep.max_entry <= opts.tol;
  return rep;
}

int functional_independence(const std::vector<Expression>& chain, const Chart& chart,
                            int points, std::uint64_t seed, const SampleBox& box_in) {
  std::size_t n = chart.dimension();
  std::size_t len = chain.size();
  if (len == 0) return 0;
  SampleBox box = resolve_box(box_in, n);

  std::vector<Expression> roots;
  roots.reserve(len * n);
  for (const Expression& I : chain) {
    for (std::size_t j = 0; j < n; ++j) {
      roots.push_back(simplify(differentiate(I, chart, chart.coordinate(j))));
    }
  }
  Tape tape(std::move(roots), chart);
  auto chart_ptr = std::make_shared<const Chart>(chart);
  SampleRng rng(seed);
  std::vector<double> scratch, vals(tape.root_count());
  Eigen::MatrixXd jac(len, n);
  int best = 0;
  int redraws = 0;
  for (int s = 0; s < points; ++s) {
    for (;;) {
      Point p = draw_point(rng, chart_ptr, box);
      try {
        tape.eval(p.values(), scratch, vals);
        break;
      } catch (const DomainError&) {
        if (++redraws > 200) {
          throw DegenerateSampling("independence check exceeded its resample budget");
        }
      }
    }
    for (std::size_t i = 0; i < len; ++i)
      for (std::size_t j = 0; j < n; ++j) jac(i, j) = vals[i * n + j];
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(jac);
    const Eigen::VectorXd& sv = svd.singularValues();
    if (sv.size() == 0 || sv(0) == 0.0) continue;
    int r = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
      if (sv(i) > 1e-8 * sv(0)) ++r;
    }
    best = std::max(best, r);
  }
  return best;
}

}  // namespace jacobi
