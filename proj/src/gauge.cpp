#include "jacobi/gauge.hpp"

#include <cmath>

#include "jacobi/errors.hpp"
#include "jacobi/evaluator.hpp"
#include "jacobi/sampling.hpp"

namespace jacobi {

namespace {

void require_same_chart(const Chart& a, const Chart& b, const char* what) {
  if (a != b) throw ChartMismatch(std::string(what) + ": charts differ");
}

}  // namespace

GaugeConstancy detect_constant_gauge(const GaugeFunction& g, std::uint64_t seed) {
  const Chart& ch = *g.chart;
  std::size_t n = ch.dimension();
  std::vector<Expression> grads(n);
  bool all_zero = true;
  for (std::size_t i = 0; i < n; ++i) {
    grads[i] = simplify(differentiate(g.phi, ch, ch.coordinate(i)));
    if (!grads[i].is_zero()) all_zero = false;
  }
  if (all_zero) return {true, "structural"};
  for (const Expression& d : grads) {
    if (d.is_constant() && !d.is_zero()) return {false, "structural"};
  }
  // derivatives are non-constant expressions; they may still vanish
  // identically, so decide by probing
  SampleRng rng(SampleRng::derive(seed, 7));
  SampleBox box = SampleBox::uniform(n, -1.0, 1.0);
  Tape tape(grads, ch);
  std::vector<double> scratch, vals(n);
  for (int k = 0; k < 10; ++k) {
    Point p = draw_point(rng, g.chart, box);
    try {
      tape.eval(p.values(), scratch, vals);
    } catch (const DomainError&) {
      continue;
    }
    for (double v : vals) {
      if (std::fabs(v) > 1e-12) return {false, "numeric-probe"};
    }
  }
  return {true, "numeric-probe"};
}

JacobiStructure gauge_transform(const JacobiStructure& J, const GaugeFunction& g) {
  require_same_chart(*J.chart, *g.chart, "gauge_transform");
  const Chart& ch = *J.chart;
  std::size_t n = ch.dimension();

  // simplify phi first so the per-component simplify below never rewrites
  // inside the shared exp(phi) subtree, which would break node sharing
  Expression phi = simplify(g.phi);
  Expression ephi = exp(phi);
  std::vector<Expression> dphi(n);
  for (std::size_t j = 0; j < n; ++j) {
    dphi[j] = simplify(differentiate(phi, ch, ch.coordinate(j)));
  }

  JacobiStructure out(J.chart);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      out.P.set_upper(i, j, simplify(ephi * J.P.upper(i, j)));
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    Expression inner = J.a.component(i);
    for (std::size_t j = 0; j < n; ++j) {
      inner = inner - J.P.component(i, j) * dphi[j];
    }
    out.a.set(i, simplify(ephi * inner));
  }
  return out;
}

Expression gauge_map_psi(const Expression& f, const GaugeFunction& g) {
  return f * exp(-g.phi);
}

JacobiStructure sum_structures(const JacobiStructure& J1, const JacobiStructure& J2) {
  require_same_chart(*J1.chart, *J2.chart, "sum_structures");
  std::size_t n = J1.chart->dimension();
  JacobiStructure out(J1.chart);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      out.P.set_upper(i, j, J1.P.upper(i, j) + J2.P.upper(i, j));
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    out.a.set(i, J1.a.component(i) + J2.a.component(i));
  }
  return out;
}

CompatibilityReport check_compatibility(const JacobiStructure& J1, const JacobiStructure& J2,
                                        const VerifyOptions& opts) {
  require_same_chart(*J1.chart, *J2.chart, "check_compatibility");
  CompatibilityReport rep;
  rep.first = verify_jacobi(J1, opts);
  rep.second = verify_jacobi(J2, opts);
  rep.sum = verify_jacobi(sum_structures(J1, J2), opts);
  rep.pass = rep.first.pass && rep.second.pass && rep.sum.pass;
  return rep;
}

double check_isomorphism(const JacobiStructure& J, const GaugeFunction& g,
                         const VerifyOptions& opts) {
  require_same_chart(*J.chart, *g.chart, "check_isomorphism");
  const ChartPtr& chart = J.chart;
  std::size_t n = chart->dimension();
  SampleBox box = opts.box.lo.empty() ? SampleBox::uniform(n, -1.0, 1.0) : opts.box;
  JacobiStructure Jt = gauge_transform(J, g);
  Expression eminus = exp(-g.phi);

  // one residual group per function pair: terms of Psi({f,g}) minus terms of
  // {Psi f, Psi g} in the transformed structure
  struct Group {
    std::size_t offset;
    std::size_t count;
  };
  std::vector<Expression> roots;
  std::vector<Group> groups;
  SampleRng fn_rng(SampleRng::derive(opts.seed, 1));
  for (int t = 0; t < 10; ++t) {
    Expression f = random_polynomial(fn_rng, *chart, opts.poly_degree);
    Expression h = random_polynomial(fn_rng, *chart, opts.poly_degree);
    std::size_t offset = roots.size();
    for (const Expression& term : jacobi_bracket_terms(J, f, h)) {
      roots.push_back(term * eminus);
    }
    Expression pf = gauge_map_psi(f, g);
    Expression ph = gauge_map_psi(h, g);
    for (const Expression& term : jacobi_bracket_terms(Jt, pf, ph)) {
      roots.push_back(-term);
    }
    groups.push_back({offset, roots.size() - offset});
  }

  Tape tape(std::move(roots), *chart);
  SampleRng pt_rng(SampleRng::derive(opts.seed, 0));
  std::vector<double> scratch, vals(tape.root_count());
  double worst = 0.0;
  int redraws = 0;
  for (int s = 0; s < opts.samples; ++s) {
    for (;;) {
      Point p = draw_point(pt_rng, chart, box);
      try {
        tape.eval(p.values(), scratch, vals);
        break;
      } catch (const DomainError&) {
        if (++redraws > opts.redraw_budget) {
          throw DegenerateSampling("isomorphism check exceeded its resample budget of " +
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
      worst = std::max(worst, std::fabs(sum) / (1.0 + mag));
    }
  }
  return worst;
}

}  // namespace jacobi
