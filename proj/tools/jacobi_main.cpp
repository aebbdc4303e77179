#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "jacobi/config.hpp"
#include "jacobi/errors.hpp"
#include "jacobi/report.hpp"

namespace {

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw jacobi::Error("cannot write report file: " + path);
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bracket structures defined by a bivector and a vector field: "
               "verification, conformal rescaling, flows, recursion chains"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_path;
  std::string csv_path;
  int samples = 0;
  std::uint64_t seed = 0;
  double tol = 0.0;
  bool allow_constant = false;

  const struct {
    const char* name;
    const char* help;
  } commands[] = {
      {"verify", "check the two structure equations and the cyclic bracket identity"},
      {"gauge", "apply the conformal rescaling and verify the result"},
      {"compat", "check that the structure and its rescaling are compatible"},
      {"iso", "check that f -> f e^{-phi} intertwines the two brackets"},
      {"flow", "integrate the Hamiltonian flow and report invariant drift"},
      {"recurse", "build the chain of integrals attached to the rescaling"},
  };
  for (const auto& c : commands) {
    CLI::App* sub = app.add_subcommand(c.name, c.help);
    sub->add_option("--config", config_path, "configuration file")->required();
    sub->add_option("--out", out_path, "also write the JSON report to this file");
    sub->add_option("--seed", seed, "override numeric.seed");
    sub->add_option("--samples", samples, "override numeric.samples");
    sub->add_option("--tol", tol, "override the pass tolerance");
    if (std::string(c.name) == "flow")
      sub->add_option("--csv", csv_path, "write the trajectory as CSV");
    if (std::string(c.name) == "recurse")
      sub->add_flag("--allow-constant-gauge", allow_constant,
                    "run the chain even when the gauge function is constant");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  CLI::App* sub = app.get_subcommands().front();
  jacobi::RunOverrides ov;
  if (sub->count("--seed")) ov.seed = seed;
  if (sub->count("--samples")) ov.samples = samples;
  if (sub->count("--tol")) ov.tol = tol;
  ov.allow_constant_gauge = allow_constant;
  ov.csv_path = csv_path;

  try {
    jacobi::RunConfig cfg = jacobi::load_config(config_path);
    jacobi::RunResult result = jacobi::run_command(sub->get_name(), cfg, ov);
    std::string text = jacobi::json_text(result.report);
    std::fputs(text.c_str(), stdout);
    if (!out_path.empty()) write_text(out_path, text);
    return result.pass ? 0 : 1;
  } catch (const jacobi::Error& e) {
    nlohmann::ordered_json doc;
    doc["schema_version"] = 1;
    doc["tool"] = "jacobi";
    doc["tool_version"] = jacobi::kToolVersion;
    doc["command"] = sub->get_name();
    doc["result"] = {{"error", {{"type", "config"}, {"message", e.what()}}}};
    doc["pass"] = false;
    std::string text = jacobi::json_text(doc);
    std::fputs(text.c_str(), stdout);
    if (!out_path.empty()) write_text(out_path, text);
    return 1;
  }
}
