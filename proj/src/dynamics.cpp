#include "jacobi/dynamics.hpp"

#include <cmath>

#include "jacobi/errors.hpp"
#include "jacobi/sampling.hpp"

namespace jacobi {

VectorField hamiltonian_vector_field(const JacobiStructure& J, const Expression& H) {
  const Chart& ch = *J.chart;
  std::size_t n = ch.dimension();
  H.validate_over(ch);

  std::vector<Expression> dH(n);
  for (std::size_t k = 0; k < n; ++k) dH[k] = differentiate(H, ch, ch.coordinate(k));
  Expression a_dH = Expression::integer(0);
  for (std::size_t k = 0; k < n; ++k) a_dH = a_dH + J.a.component(k) * dH[k];

  VectorField V(J.chart);
  for (std::size_t j = 0; j < n; ++j) {
    Expression vj = Expression::integer(0);
    for (std::size_t k = 0; k < n; ++k) vj = vj + J.P.component(k, j) * dH[k];
    vj = vj + H * J.a.component(j);
    vj = vj - Expression::variable(ch.coordinate(j)) * a_dH;
    V.set(j, simplify(vj));
  }
  return V;
}

namespace {

Tape compile_field(const VectorField& V, const Chart& ch) {
  std::vector<Expression> roots;
  roots.reserve(V.dimension());
  for (std::size_t j = 0; j < V.dimension(); ++j) roots.push_back(V.component(j));
  return Tape(std::move(roots), ch);
}

// strips the subexpression suffix DomainError::what appends
std::string core_message(const DomainError& e) {
  std::string msg = e.what();
  auto pos = msg.find(" in subexpression:");
  if (pos != std::string::npos) msg.resize(pos);
  return msg;
}

}  // namespace

HamiltonianSystem::HamiltonianSystem(JacobiStructure J, Expression H)
    : J_(std::move(J)), H_(std::move(H)), V_(hamiltonian_vector_field(J_, H_)),
      tape_(compile_field(V_, *J_.chart)) {
  // independent assembly of the same field through the bracket
  const Chart& ch = *J_.chart;
  std::size_t n = ch.dimension();
  std::vector<Expression> diff;
  diff.reserve(n);
  for (std::size_t j = 0; j < n; ++j) {
    Expression xj = Expression::variable(ch.coordinate(j));
    diff.push_back(V_.component(j) - jacobi_bracket(J_, H_, xj));
  }
  Tape cross(std::move(diff), ch);
  SampleRng rng(SampleRng::derive(42, 13));
  SampleBox box = SampleBox::uniform(n, -1.0, 1.0);
  std::vector<double> scratch, vals(n);
  int checked = 0;
  for (int k = 0; k < 40 && checked < 20; ++k) {
    Point p = draw_point(rng, J_.chart, box);
    std::vector<double> base(n);
    try {
      cross.eval(p.values(), scratch, vals);
      tape_.eval(p.values(), scratch, base);
    } catch (const DomainError&) {
      continue;
    }
    for (std::size_t j = 0; j < n; ++j) {
      if (std::fabs(vals[j]) > 1e-12 * (1.0 + std::fabs(base[j]))) {
        throw Error("hamiltonian field disagrees with its bracket definition");
      }
    }
    ++checked;
  }
}

Point Trajectory::point(std::size_t i) const {
  auto r = row(i);
  return Point(chart, std::vector<double>(r.begin(), r.end()));
}

Trajectory integrate_flow(const HamiltonianSystem& sys, const Point& x0, double t_end, double dt,
                          std::size_t max_steps) {
  const ChartPtr& chart = sys.structure().chart;
  if (*x0.chart() != *chart) throw ChartMismatch("initial point is not on the system's chart");
  if (dt <= 0.0) throw Error("flow step size must be positive");
  if (t_end < 0.0) throw Error("flow end time must be nonnegative");

  std::size_t n = chart->dimension();
  Trajectory traj;
  traj.chart = chart;

  std::size_t steps = 0;
  if (t_end > 0.0) {
    // land the last sample exactly on t_end (tiny slack absorbs cases where
    // t_end/dt is integral up to roundoff)
    steps = static_cast<std::size_t>(std::ceil(t_end / dt - 1e-9));
    if (steps == 0) steps = 1;
  }
  if (steps > max_steps) {
    throw StepCountExceeded("flow would take " + std::to_string(steps) +
                            " steps; cap is " + std::to_string(max_steps));
  }
  double h = steps ? t_end / static_cast<double>(steps) : 0.0;
  traj.dt = h;
  traj.times.reserve(steps + 1);
  traj.states.reserve((steps + 1) * n);

  const Tape& tape = sys.field_tape();
  std::vector<double> scratch;
  std::vector<double> x = x0.values();
  std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n);

  auto eval_field = [&](const std::vector<double>& at, std::vector<double>& out, double t) {
    try {
      tape.eval(at, scratch, out);
    } catch (const DomainError& e) {
      throw DomainError("at t=" + std::to_string(t) + ", " + core_message(e),
                        e.subexpression());
    }
  };

  traj.times.push_back(0.0);
  traj.states.insert(traj.states.end(), x.begin(), x.end());

  for (std::size_t s = 0; s < steps; ++s) {
    double t = static_cast<double>(s) * h;
    eval_field(x, k1, t);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * h * k1[i];
    eval_field(tmp, k2, t + 0.5 * h);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * h * k2[i];
    eval_field(tmp, k3, t + 0.5 * h);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + h * k3[i];
    eval_field(tmp, k4, t + h);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
      if (!std::isfinite(x[i])) {
        throw DomainError("at t=" + std::to_string(t + h) + ", state became non-finite",
                          sys.field().component(i).str_truncated());
      }
    }
    traj.times.push_back(static_cast<double>(s + 1) * h);
    traj.states.insert(traj.states.end(), x.begin(), x.end());
  }
  return traj;
}

double drift_along_flow(const Trajectory& traj, const Expression& I) {
  I.validate_over(*traj.chart);
  Tape tape({I}, *traj.chart);
  std::vector<double> scratch, val(1);
  double drift = 0.0, first = 0.0;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    tape.eval(traj.row(i), scratch, val);
    if (i == 0) {
      first = val[0];
    } else {
      drift = std::max(drift, std::fabs(val[0] - first));
    }
  }
  return drift;
}

}  // namespace jacobi
