#include "jacobi/report.hpp"

#include <cstdio>
#include <ctime>
#include <fstream>
#include <string>
#include <vector>

#include "jacobi/errors.hpp"
#include "jacobi/gauge.hpp"
#include "jacobi/recursion.hpp"
#include "jacobi/verify.hpp"

namespace jacobi {
namespace {

using nlohmann::ordered_json;

struct Effective {
  int samples = 0;
  std::uint64_t seed = 0;
  double tol = 0.0;
};

Effective effective_settings(const RunConfig& cfg, const RunOverrides& ov) {
  Effective e;
  e.samples = ov.samples.value_or(cfg.samples);
  e.seed = ov.seed.value_or(cfg.seed);
  e.tol = ov.tol.value_or(cfg.tol);
  return e;
}

std::string iso_timestamp() {
  std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

VerifyOptions verify_options(const RunConfig& cfg, const Effective& eff) {
  VerifyOptions o;
  o.samples = eff.samples;
  o.seed = eff.seed;
  o.tolerance = eff.tol;
  o.box = cfg.sample_box();
  return o;
}

ordered_json verification_json(const VerificationReport& r) {
  return ordered_json{{"eq1_max", r.eq1_max},
                      {"eq2_max", r.eq2_max},
                      {"cyclic_max", r.cyclic_max},
                      {"tensor_pass", r.tensor_pass},
                      {"cyclic_pass", r.cyclic_pass},
                      {"rank_min", r.rank_min},
                      {"rank_max", r.rank_max},
                      {"redraws", r.redraws},
                      {"pass", r.pass}};
}

ordered_json structure_json(const JacobiStructure& J) {
  std::size_t n = J.chart->dimension();
  ordered_json P = ordered_json::object();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      P[std::to_string(i + 1) + "," + std::to_string(j + 1)] = J.P.upper(i, j).str();
  ordered_json a = ordered_json::array();
  for (std::size_t k = 0; k < n; ++k) a.push_back(J.a.component(k).str());
  return ordered_json{{"P", std::move(P)}, {"a", std::move(a)}};
}

ordered_json constancy_json(const GaugeConstancy& c) {
  return ordered_json{{"value", c.constant}, {"method", c.method}};
}

ordered_json matrix_json(const std::vector<std::vector<double>>& m) {
  ordered_json out = ordered_json::array();
  for (const auto& row : m) out.push_back(row);
  return out;
}

const JacobiStructure& need_structure(const RunConfig& cfg, const std::string& cmd) {
  if (!cfg.structure)
    throw ConfigError("the " + cmd + " command needs a [structure] section", "structure");
  return *cfg.structure;
}

GaugeFunction need_gauge(const RunConfig& cfg, const std::string& cmd) {
  if (!cfg.phi) throw ConfigError("the " + cmd + " command needs a [gauge] section", "gauge.phi");
  return GaugeFunction{cfg.chart, *cfg.phi};
}

const Expression& need_hamiltonian(const RunConfig& cfg, const std::string& cmd) {
  if (!cfg.hamiltonian)
    throw ConfigError("the " + cmd + " command needs a [hamiltonian] section", "hamiltonian.H");
  return *cfg.hamiltonian;
}

bool run_verify(const RunConfig& cfg, const Effective& eff, const RunOverrides&,
                ordered_json& out) {
  const JacobiStructure& J = need_structure(cfg, "verify");
  ConsistencyReport c = consistency_check(J, verify_options(cfg, eff));
  out["structure"] = structure_json(J);
  ordered_json v = verification_json(c.report);
  v["consistent"] = c.consistent;
  out["verification"] = std::move(v);
  return c.report.pass;
}

bool run_gauge(const RunConfig& cfg, const Effective& eff, const RunOverrides&,
               ordered_json& out) {
  const JacobiStructure& J = need_structure(cfg, "gauge");
  GaugeFunction g = need_gauge(cfg, "gauge");
  GaugeConstancy c = detect_constant_gauge(g, eff.seed);
  JacobiStructure Jt = gauge_transform(J, g);
  VerificationReport v = verify_jacobi(Jt, verify_options(cfg, eff));
  out["phi"] = g.phi.str();
  out["constant"] = constancy_json(c);
  if (c.constant)
    out["note"] = "constant gauge: the transformation only rescales the structure";
  out["transformed"] = structure_json(Jt);
  out["verification"] = verification_json(v);
  return v.pass;
}

bool run_compat(const RunConfig& cfg, const Effective& eff, const RunOverrides&,
                ordered_json& out) {
  const JacobiStructure& J = need_structure(cfg, "compat");
  GaugeFunction g = need_gauge(cfg, "compat");
  JacobiStructure Jt = gauge_transform(J, g);
  CompatibilityReport r = check_compatibility(J, Jt, verify_options(cfg, eff));
  out["first"] = verification_json(r.first);
  out["second"] = verification_json(r.second);
  out["sum"] = verification_json(r.sum);
  out["compatible"] = r.pass;
  return r.pass;
}

bool run_iso(const RunConfig& cfg, const Effective& eff, const RunOverrides&, ordered_json& out) {
  const JacobiStructure& J = need_structure(cfg, "iso");
  GaugeFunction g = need_gauge(cfg, "iso");
  double residual = check_isomorphism(J, g, verify_options(cfg, eff));
  bool pass = residual <= eff.tol;
  out["phi"] = g.phi.str();
  out["residual"] = residual;
  out["tolerance"] = eff.tol;
  out["intertwines"] = pass;
  return pass;
}

bool run_flow(const RunConfig& cfg, const Effective&, const RunOverrides& ov, ordered_json& out) {
  const JacobiStructure& J = need_structure(cfg, "flow");
  const Expression& H = need_hamiltonian(cfg, "flow");
  if (!cfg.flow) throw ConfigError("the flow command needs a [flow] section", "flow");
  HamiltonianSystem sys(J, H);
  Point x0(cfg.chart, cfg.flow->x0);
  Trajectory traj = integrate_flow(sys, x0, cfg.flow->t_end, cfg.flow->dt);

  ordered_json field = ordered_json::array();
  for (std::size_t k = 0; k < cfg.chart->dimension(); ++k)
    field.push_back(sys.field().component(k).str());
  out["hamiltonian"] = H.str();
  out["field"] = std::move(field);
  out["integrator"] = traj.integrator;
  out["t_end"] = cfg.flow->t_end;
  out["dt_requested"] = cfg.flow->dt;
  out["dt_effective"] = traj.dt;
  out["steps"] = traj.size() == 0 ? 0 : traj.size() - 1;
  out["final_time"] = traj.times.back();
  auto last = traj.row(traj.size() - 1);
  out["final_state"] = std::vector<double>(last.begin(), last.end());
  ordered_json drifts = ordered_json::array();
  for (std::size_t i = 0; i < cfg.flow->invariants.size(); ++i)
    drifts.push_back(ordered_json{{"expression", cfg.flow->invariant_sources[i]},
                                  {"max_drift", drift_along_flow(traj, cfg.flow->invariants[i])}});
  out["drifts"] = std::move(drifts);
  if (!ov.csv_path.empty()) {
    write_trajectory_csv(traj, ov.csv_path);
    out["csv"] = ov.csv_path;
  }
  return true;
}

bool run_recurse(const RunConfig& cfg, const Effective& eff, const RunOverrides& ov,
                 ordered_json& out) {
  const JacobiStructure& J = need_structure(cfg, "recurse");
  GaugeFunction g = need_gauge(cfg, "recurse");
  const Expression& H = need_hamiltonian(cfg, "recurse");
  std::vector<Expression> basis = materialize_basis(cfg.basis, *cfg.chart, g.phi);

  RecursionOptions ro;
  ro.samples = eff.samples;
  ro.seed = eff.seed;
  ro.tol = eff.tol;
  ro.svd_cutoff = cfg.svd_cutoff;
  ro.max_steps = cfg.max_steps;
  ro.allow_constant_gauge = ov.allow_constant_gauge;
  ro.box = cfg.sample_box();
  ro.target_r = cfg.target_r;

  RecursionChain chain = run_recursion(J, g, H, basis, ro);

  ordered_json basis_j = ordered_json::array();
  for (const Expression& b : basis) basis_j.push_back(b.str());
  out["phi"] = g.phi.str();
  out["basis"] = std::move(basis_j);
  out["gauge_constant"] = constancy_json(chain.gauge_constancy);
  ordered_json integrals = ordered_json::array();
  for (const Expression& I : chain.integrals) integrals.push_back(I.str());
  out["integrals"] = std::move(integrals);
  out["chain_length"] = chain.integrals.size();
  ordered_json steps = ordered_json::array();
  for (const StepRecord& s : chain.steps) {
    steps.push_back(ordered_json{{"index", s.index},
                                 {"residual", s.residual},
                                 {"success", s.success},
                                 {"rank", s.rank},
                                 {"underdetermined", s.underdetermined},
                                 {"nullspace_dimension", s.nullspace.size()},
                                 {"coefficients", s.coefficients},
                                 {"nullspace", matrix_json(s.nullspace)}});
  }
  out["steps"] = std::move(steps);
  out["stop_reason"] = chain.stop_reason;
  out["involution"] = ordered_json{{"max_entry", chain.involution.max_entry},
                                   {"pass", chain.involution.pass},
                                   {"first", matrix_json(chain.involution.first)},
                                   {"second", matrix_json(chain.involution.second)}};
  out["independence_rank"] = chain.independence_rank;
  bool pass = chain.pass;
  if (chain.target_r) {
    bool met = chain.independence_rank >= *chain.target_r;
    out["target_r"] = *chain.target_r;
    out["target_met"] = met;
    pass = pass && met;
  }
  out["pass"] = pass;
  return pass;
}

const char* error_kind(const Error& e) {
  if (dynamic_cast<const SyntaxError*>(&e)) return "syntax";
  if (dynamic_cast<const UnknownIdentifier*>(&e)) return "unknown-identifier";
  if (dynamic_cast<const DomainError*>(&e)) return "domain";
  if (dynamic_cast<const ChartMismatch*>(&e)) return "chart-mismatch";
  if (dynamic_cast<const ConfigError*>(&e)) return "config";
  if (dynamic_cast<const EmptyBasis*>(&e)) return "empty-basis";
  if (dynamic_cast<const DegenerateSampling*>(&e)) return "degenerate-sampling";
  if (dynamic_cast<const StepCountExceeded*>(&e)) return "step-count-exceeded";
  if (dynamic_cast<const ConstantGaugeRefused*>(&e)) return "constant-gauge-refused";
  return "error";
}

}  // namespace

RunResult run_command(const std::string& command, const RunConfig& cfg,
                      const RunOverrides& overrides) {
  Effective eff = effective_settings(cfg, overrides);

  RunResult result;
  ordered_json& doc = result.report;
  doc["schema_version"] = 1;
  doc["tool"] = "jacobi";
  doc["tool_version"] = kToolVersion;
  doc["command"] = command;
  doc["timestamp"] = iso_timestamp();
  doc["config"] = ordered_json{{"path", cfg.path},
                               {"digest", cfg.digest},
                               {"samples", eff.samples},
                               {"seed", eff.seed},
                               {"tolerance", eff.tol},
                               {"box", {cfg.box_min, cfg.box_max}}};

  ordered_json section = ordered_json::object();
  try {
    bool pass = false;
    if (command == "verify")
      pass = run_verify(cfg, eff, overrides, section);
    else if (command == "gauge")
      pass = run_gauge(cfg, eff, overrides, section);
    else if (command == "compat")
      pass = run_compat(cfg, eff, overrides, section);
    else if (command == "iso")
      pass = run_iso(cfg, eff, overrides, section);
    else if (command == "flow")
      pass = run_flow(cfg, eff, overrides, section);
    else if (command == "recurse")
      pass = run_recurse(cfg, eff, overrides, section);
    else
      throw Error("unknown command '" + command + "'");
    result.pass = pass;
  } catch (const Error& e) {
    section["error"] = ordered_json{{"type", error_kind(e)}, {"message", e.what()}};
    result.pass = false;
  }
  doc["result"] = std::move(section);
  doc["pass"] = result.pass;
  return result;
}

void write_trajectory_csv(const Trajectory& traj, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write CSV file: " + path);
  std::size_t n = traj.chart->dimension();
  out << "t";
  for (std::size_t k = 0; k < n; ++k) out << "," << traj.chart->coordinate(k);
  out << "\n";
  char buf[32];
  for (std::size_t i = 0; i < traj.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", traj.times[i]);
    out << buf;
    auto row = traj.row(i);
    for (std::size_t k = 0; k < n; ++k) {
      std::snprintf(buf, sizeof buf, "%.17g", row[k]);
      out << "," << buf;
    }
    out << "\n";
  }
}

std::string json_text(const nlohmann::ordered_json& j) { return j.dump(2) + "\n"; }

}  // namespace jacobi
