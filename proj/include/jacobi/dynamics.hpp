#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "jacobi/evaluator.hpp"
#include "jacobi/structures.hpp"

namespace jacobi {

/// V^j = sum_k P^{kj} d_k H + H a^j - x^j sum_k a^k d_k H, the coordinate
/// components of f -> {H, f}.  Reduces to the usual Hamiltonian field when
/// a = 0.
VectorField hamiltonian_vector_field(const JacobiStructure& J, const Expression& H);

/// Structure plus Hamiltonian with the derived field compiled for stepping.
/// Construction cross-checks the explicit field formula against the bracket
/// {H, x^j} at seeded points; the two are independent assemblies of the same
/// object, so disagreement means a coding error, not bad input.
class HamiltonianSystem {
 public:
  HamiltonianSystem(JacobiStructure J, Expression H);

  const JacobiStructure& structure() const { return J_; }
  const Expression& hamiltonian() const { return H_; }
  const VectorField& field() const { return V_; }
  const Tape& field_tape() const { return tape_; }

 private:
  JacobiStructure J_;
  Expression H_;
  VectorField V_;
  Tape tape_;
};

/// Uniformly spaced samples of one integral curve.
struct Trajectory {
  ChartPtr chart;
  double dt = 0.0;  // actual step used
  std::string integrator = "rk4";
  std::vector<double> times;
  std::vector<double> states;  // row-major, times.size() rows

  std::size_t size() const { return times.size(); }
  std::span<const double> row(std::size_t i) const {
    return {states.data() + i * chart->dimension(), chart->dimension()};
  }
  Point point(std::size_t i) const;
};

/// Classical fixed-step fourth-order Runge-Kutta from x0.  The step count is
/// N = ceil(t_end / dt) and the actual step t_end / N, so the final sample
/// lands exactly on t_end; otherwise a period-return comparison would be
/// dominated by the overshoot of the last partial step.  t_end = 0 yields the
/// single sample x0.
Trajectory integrate_flow(const HamiltonianSystem& sys, const Point& x0, double t_end, double dt,
                          std::size_t max_steps = 4000000);

/// max over samples of |I(x(t)) - I(x(0))|; a diagnostic, not an assertion.
/// Conservation is only guaranteed in the a = 0 sector for I = H.
double drift_along_flow(const Trajectory& traj, const Expression& I);

}  // namespace jacobi
