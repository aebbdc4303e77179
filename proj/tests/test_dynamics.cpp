#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <string>
#include <vector>

#include "jacobi/dynamics.hpp"
#include "jacobi/errors.hpp"
#include "jacobi/parser.hpp"

#include "support.hpp"

using namespace jacobi;

namespace {

HamiltonianSystem oscillator() {
  JacobiStructure J = support::symplectic_plane();
  return HamiltonianSystem(J, parse_expr("(x1^2 + x2^2)/2", *J.chart));
}

}  // namespace

TEST_CASE("field assembly on the symplectic plane") {
  HamiltonianSystem sys = oscillator();
  // {H, x1} = -x2, {H, x2} = x1
  Point p(sys.structure().chart, {0.4, -1.1});
  CHECK(evaluate(sys.field().component(0), p) == doctest::Approx(1.1));
  CHECK(evaluate(sys.field().component(1), p) == doctest::Approx(0.4));
}

TEST_CASE("vector part contributes H a - x (a . dH) to the field") {
  // On R^1 with P = 0, a = d1 and H = x1^2 the field is
  // V = H a^1 - x1 (a^1 dH/dx1) = x1^2 - 2 x1^2 = -x1^2.
  JacobiStructure J = support::pure_vector(1);
  HamiltonianSystem sys(J, parse_expr("x1^2", *J.chart));
  Point p(J.chart, {3.0});
  CHECK(evaluate(sys.field().component(0), p) == doctest::Approx(-9.0));
}

TEST_CASE("oscillator returns to its start after one period") {
  HamiltonianSystem sys = oscillator();
  Point x0(sys.structure().chart, {1.0, 0.0});
  double period = 2 * M_PI;
  Trajectory traj = integrate_flow(sys, x0, period, 1e-3);

  REQUIRE(traj.size() > 1);
  CHECK(traj.times.back() == doctest::Approx(period).epsilon(1e-15));
  auto last = traj.row(traj.size() - 1);
  double err = std::hypot(last[0] - 1.0, last[1] - 0.0);
  CHECK(err <= 1e-6);

  // x1 sweeps the full diameter, so its drift diagnostic is exactly 2
  double swing = drift_along_flow(traj, parse_expr("x1", *sys.structure().chart));
  CHECK(swing == doctest::Approx(2.0).epsilon(1e-6));

  // the energy stays put to roundoff
  double e_drift = drift_along_flow(traj, sys.hamiltonian());
  CHECK(e_drift <= 1e-10);
}

TEST_CASE("step halving shows fourth order convergence") {
  HamiltonianSystem sys = oscillator();
  Point x0(sys.structure().chart, {1.0, 0.0});
  double period = 2 * M_PI;
  auto endpoint_error = [&](double dt) {
    Trajectory t = integrate_flow(sys, x0, period, dt);
    auto last = t.row(t.size() - 1);
    return std::hypot(last[0] - 1.0, last[1]);
  };
  // dt small enough for the asymptotic regime, large enough that roundoff
  // does not pollute the ratio
  double e1 = endpoint_error(1e-2);
  double e2 = endpoint_error(5e-3);
  CHECK(e1 / e2 > 8.0);
  CHECK(e1 / e2 < 32.0);
}

TEST_CASE("zero horizon produces the single starting sample") {
  HamiltonianSystem sys = oscillator();
  Point x0(sys.structure().chart, {0.25, 0.75});
  Trajectory traj = integrate_flow(sys, x0, 0.0, 0.1);
  REQUIRE(traj.size() == 1);
  CHECK(traj.times[0] == 0.0);
  CHECK(traj.row(0)[0] == 0.25);
  CHECK(traj.row(0)[1] == 0.75);
}

TEST_CASE("a critical point stays put") {
  HamiltonianSystem sys = oscillator();
  Point origin(sys.structure().chart, {0.0, 0.0});
  Trajectory traj = integrate_flow(sys, origin, 1.0, 0.05);
  for (std::size_t i = 0; i < traj.size(); ++i) {
    CHECK(traj.row(i)[0] == 0.0);
    CHECK(traj.row(i)[1] == 0.0);
  }
  CHECK(drift_along_flow(traj, parse_expr("7", *sys.structure().chart)) == 0.0);
}

TEST_CASE("the final step is shortened to land exactly on t_end") {
  HamiltonianSystem sys = oscillator();
  Point x0(sys.structure().chart, {1.0, 0.0});
  // 0.5 / 0.15 = 3.33 steps, so dt is squeezed to 0.125
  Trajectory traj = integrate_flow(sys, x0, 0.5, 0.15);
  CHECK(traj.size() == 5);
  CHECK(traj.dt == doctest::Approx(0.125));
  CHECK(traj.times.back() == 0.5);
}

TEST_CASE("flows on the contact fixture move along the vector part") {
  // H = 1: V = P dH + H a - x (a . dH) = a, straight drift in x3
  JacobiStructure J = support::contact_r3();
  HamiltonianSystem sys(J, parse_expr("1", *J.chart));
  Point x0(J.chart, {0.2, 0.3, 0.0});
  Trajectory traj = integrate_flow(sys, x0, 2.0, 0.01);
  auto last = traj.row(traj.size() - 1);
  CHECK(last[0] == doctest::Approx(0.2));
  CHECK(last[1] == doctest::Approx(0.3));
  CHECK(last[2] == doctest::Approx(2.0));
}

TEST_CASE("step cap and bad inputs raise typed errors") {
  HamiltonianSystem sys = oscillator();
  Point x0(sys.structure().chart, {1.0, 0.0});
  CHECK_THROWS_AS(integrate_flow(sys, x0, 1.0, 1e-3, 10), StepCountExceeded);
  CHECK_THROWS_AS(integrate_flow(sys, x0, 1.0, -0.1), Error);
  CHECK_THROWS_AS(integrate_flow(sys, x0, -1.0, 0.1), Error);

  auto other = make_chart({"u", "v"});
  CHECK_THROWS_AS(integrate_flow(sys, Point(other, {0.0, 0.0}), 1.0, 0.1), ChartMismatch);
}

TEST_CASE("domain failures during stepping report the time of the blowup") {
  // V^1 = -ln(x1): undefined left of zero, where the start point sits
  JacobiStructure J = support::symplectic_plane();
  HamiltonianSystem sys(J, parse_expr("x2*ln(x1)", *J.chart));
  Point bad(J.chart, {-1.0, 0.0});
  try {
    integrate_flow(sys, bad, 1.0, 0.1);
    FAIL("expected a domain error");
  } catch (const DomainError& e) {
    CHECK(std::string(e.what()).find("at t=") != std::string::npos);
  }
}
