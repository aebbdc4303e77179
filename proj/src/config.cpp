#include "jacobi/config.hpp"

#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "jacobi/errors.hpp"
#include "jacobi/parser.hpp"

namespace jacobi {
namespace {

struct Value {
  enum class Kind { Number, String, Bool, Array };
  Kind kind = Kind::Number;
  double num = 0.0;
  std::string str;
  bool flag = false;
  std::vector<Value> items;
  std::string raw;  // scalar source text, kept for exact integer parses
};

struct Entry {
  std::string section;
  std::string key;
  Value value;
  int line = 0;
  std::string path() const { return section + "." + key; }
};

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Removes a trailing comment, honouring quoted strings.
std::string strip_comment(const std::string& s) {
  bool quoted = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '"') quoted = !quoted;
    else if (!quoted && (s[i] == '#' || s[i] == ';')) return s.substr(0, i);
  }
  return s;
}

bool parse_number(const std::string& text, double* out) {
  if (text.empty()) return false;
  char c = text[0];
  if (!std::isdigit(static_cast<unsigned char>(c)) && c != '-' && c != '+' && c != '.')
    return false;  // keeps strtod from accepting inf/nan spellings
  char* end = nullptr;
  double d = std::strtod(text.c_str(), &end);
  if (end != text.c_str() + text.size() || !std::isfinite(d)) return false;
  *out = d;
  return true;
}

Value parse_scalar(const std::string& text, int line, const std::string& path) {
  Value v;
  v.raw = text;
  if (text.size() >= 2 && text.front() == '"' && text.back() == '"') {
    std::string inner = text.substr(1, text.size() - 2);
    if (inner.find('"') != std::string::npos)
      throw ConfigError("string value contains an embedded quote", path, line);
    v.kind = Value::Kind::String;
    v.str = inner;
    return v;
  }
  if (text == "true" || text == "false") {
    v.kind = Value::Kind::Bool;
    v.flag = (text == "true");
    return v;
  }
  if (parse_number(text, &v.num)) {
    v.kind = Value::Kind::Number;
    return v;
  }
  throw ConfigError("cannot parse value '" + text + "'", path, line);
}

Value parse_value(const std::string& text, int line, const std::string& path) {
  if (!text.empty() && text.front() == '[') {
    if (text.back() != ']')
      throw ConfigError("unterminated array (arrays must close on the same line)", path, line);
    Value v;
    v.kind = Value::Kind::Array;
    std::string body = text.substr(1, text.size() - 2);
    std::string item;
    bool quoted = false;
    bool any = false;
    for (char c : body) {
      if (c == '"') quoted = !quoted;
      if (c == ',' && !quoted) {
        v.items.push_back(parse_scalar(trim(item), line, path));
        item.clear();
        any = true;
      } else {
        item += c;
      }
    }
    if (quoted) throw ConfigError("unterminated string in array", path, line);
    std::string last = trim(item);
    if (!last.empty())
      v.items.push_back(parse_scalar(last, line, path));
    else if (any)
      throw ConfigError("trailing comma in array", path, line);
    return v;
  }
  return parse_scalar(text, line, path);
}

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> k = {
      {"manifold", {"dimension", "coordinates"}},
      {"structure", {"a"}},  // plus the P."i,j" pattern, matched separately
      {"gauge", {"phi"}},
      {"hamiltonian", {"H"}},
      {"recursion",
       {"basis", "monomial_degree", "exp_multiplier_range", "max_steps", "tol", "target_r"}},
      {"numeric", {"samples", "seed", "box_min", "box_max", "svd_cutoff"}},
      {"flow", {"x0", "t_end", "dt", "invariants"}},
  };
  return k;
}

// Matches P."i,j" and extracts the 1-based pair.
bool parse_p_key(const std::string& key, int* i, int* j) {
  if (key.size() < 7 || key.compare(0, 3, "P.\"") != 0 || key.back() != '"') return false;
  std::string inner = key.substr(3, key.size() - 4);
  int a = 0, b = 0;
  char extra = 0;
  if (std::sscanf(inner.c_str(), " %d , %d %c", &a, &b, &extra) != 2) return false;
  *i = a;
  *j = b;
  return true;
}

class Loader {
 public:
  explicit Loader(const std::string& path) : path_(path) { read_and_parse(); }

  RunConfig build() {
    RunConfig cfg;
    cfg.path = path_;
    cfg.digest = digest_;
    build_manifold(cfg);
    build_structure(cfg);
    build_scalars(cfg);
    build_recursion(cfg);
    build_numeric(cfg);
    build_flow(cfg);
    return cfg;
  }

 private:
  void read_and_parse() {
    std::ifstream in(path_, std::ios::binary);
    if (!in) throw ConfigError("cannot open file: " + path_);
    std::ostringstream buf;
    buf << in.rdbuf();
    std::string bytes = buf.str();

    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
      h ^= c;
      h *= 1099511628211ull;
    }
    char hex[17];
    std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(h));
    digest_ = hex;

    std::istringstream lines(bytes);
    std::string raw;
    int line_no = 0;
    std::string section;
    while (std::getline(lines, raw)) {
      ++line_no;
      std::string line = trim(strip_comment(raw));
      if (line.empty()) continue;
      if (line.front() == '[') {
        if (line.back() != ']')
          throw ConfigError("malformed section header", "", line_no);
        section = trim(line.substr(1, line.size() - 2));
        if (known_keys().find(section) == known_keys().end())
          throw ConfigError("unknown section [" + section + "]", "", line_no);
        sections_.insert(section);
        continue;
      }
      std::size_t eq = find_assignment(line);
      if (eq == std::string::npos)
        throw ConfigError("expected 'key = value'", "", line_no);
      std::string key = trim(line.substr(0, eq));
      std::string val = trim(line.substr(eq + 1));
      if (section.empty())
        throw ConfigError("key '" + key + "' appears before any [section]", "", line_no);
      if (key.empty() || val.empty())
        throw ConfigError("expected 'key = value'", "", line_no);
      validate_key(section, key, line_no);
      Entry e;
      e.section = section;
      e.key = key;
      e.line = line_no;
      e.value = parse_value(val, line_no, section + "." + key);
      for (const Entry& prev : entries_)
        if (prev.section == section && prev.key == key)
          throw ConfigError("duplicate key (first set on line " + std::to_string(prev.line) + ")",
                            e.path(), line_no);
      entries_.push_back(std::move(e));
    }
  }

  // First '=' outside quotes; keys like P."1,2" contain no '='.
  static std::size_t find_assignment(const std::string& line) {
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '"') quoted = !quoted;
      else if (line[i] == '=' && !quoted) return i;
    }
    return std::string::npos;
  }

  void validate_key(const std::string& section, const std::string& key, int line_no) {
    const auto& allowed = known_keys().at(section);
    if (allowed.count(key)) return;
    if (section == "structure") {
      int i = 0, j = 0;
      if (parse_p_key(key, &i, &j)) return;
      if (key == "P" || key.compare(0, 2, "P.") == 0)
        throw ConfigError("bivector entries are written P.\"i,j\" with 1-based indices",
                          section + "." + key, line_no);
    }
    throw ConfigError("unknown key", section + "." + key, line_no);
  }

  const Entry* find(const std::string& section, const std::string& key) const {
    for (const Entry& e : entries_)
      if (e.section == section && e.key == key) return &e;
    return nullptr;
  }

  const Entry& require(const std::string& section, const std::string& key) const {
    const Entry* e = find(section, key);
    if (!e) throw ConfigError("missing required key", section + "." + key);
    return *e;
  }

  static long long to_int(const Entry& e, long long lo, long long hi) {
    if (e.value.kind != Value::Kind::Number)
      throw ConfigError("expected an integer", e.path(), e.line);
    double d = e.value.num;
    if (d != std::floor(d) || std::fabs(d) > 9.0e15)
      throw ConfigError("expected an integer", e.path(), e.line);
    long long v = static_cast<long long>(d);
    if (v < lo || v > hi)
      throw ConfigError("value " + std::to_string(v) + " outside [" + std::to_string(lo) + ", " +
                            std::to_string(hi) + "]",
                        e.path(), e.line);
    return v;
  }

  static double to_double(const Entry& e) {
    if (e.value.kind != Value::Kind::Number)
      throw ConfigError("expected a number", e.path(), e.line);
    return e.value.num;
  }

  static std::uint64_t to_seed(const Entry& e) {
    const std::string& raw = e.value.raw;
    bool digits = !raw.empty();
    for (char c : raw)
      if (!std::isdigit(static_cast<unsigned char>(c))) digits = false;
    if (digits) return std::strtoull(raw.c_str(), nullptr, 10);  // full 64-bit range
    if (e.value.kind == Value::Kind::Number && e.value.num >= 0 &&
        e.value.num == std::floor(e.value.num) && e.value.num <= 9.0e15)
      return static_cast<std::uint64_t>(e.value.num);
    throw ConfigError("expected a non-negative integer seed", e.path(), e.line);
  }

  Expression to_expression(const Value& v, const std::string& path, int line,
                           const RunConfig& cfg) const {
    if (v.kind == Value::Kind::String) {
      try {
        return simplify(parse_expr(v.str, *cfg.chart));
      } catch (const ConfigError&) {
        throw;
      } catch (const Error& err) {
        throw ConfigError(std::string(err.what()) + " in expression '" + v.str + "'", path, line);
      }
    }
    if (v.kind == Value::Kind::Number) {
      if (v.num == std::floor(v.num) && std::fabs(v.num) <= 9.0e15)
        return Expression::integer(static_cast<long long>(v.num));
      return Expression::real(v.num);
    }
    throw ConfigError("expected an expression string", path, line);
  }

  std::vector<Expression> to_expression_array(const Entry& e, const RunConfig& cfg,
                                              std::vector<std::string>* sources = nullptr) const {
    if (e.value.kind != Value::Kind::Array)
      throw ConfigError("expected an array", e.path(), e.line);
    std::vector<Expression> out;
    for (const Value& item : e.value.items) {
      out.push_back(to_expression(item, e.path(), e.line, cfg));
      if (sources) sources->push_back(item.kind == Value::Kind::String ? item.str : item.raw);
    }
    return out;
  }

  void build_manifold(RunConfig& cfg) const {
    if (!sections_.count("manifold")) throw ConfigError("missing [manifold] section");
    const Entry& dim = require("manifold", "dimension");
    long long n = to_int(dim, 1, 16);
    const Entry& coords = require("manifold", "coordinates");
    if (coords.value.kind != Value::Kind::Array)
      throw ConfigError("expected an array of coordinate names", coords.path(), coords.line);
    std::vector<std::string> names;
    for (const Value& item : coords.value.items) {
      if (item.kind != Value::Kind::String)
        throw ConfigError("coordinate names must be quoted strings", coords.path(), coords.line);
      names.push_back(item.str);
    }
    if (static_cast<long long>(names.size()) != n)
      throw ConfigError("dimension is " + std::to_string(n) + " but " +
                            std::to_string(names.size()) + " coordinates are listed",
                        coords.path(), coords.line);
    try {
      cfg.chart = make_chart(std::move(names));
    } catch (const Error& err) {
      throw ConfigError(err.what(), coords.path(), coords.line);
    }
  }

  void build_structure(RunConfig& cfg) const {
    if (!sections_.count("structure")) return;
    JacobiStructure J(cfg.chart);
    std::size_t n = cfg.chart->dimension();
    for (const Entry& e : entries_) {
      if (e.section != "structure" || e.key == "a") continue;
      int i = 0, j = 0;
      parse_p_key(e.key, &i, &j);
      if (i < 1 || j < 1 || static_cast<std::size_t>(i) > n || static_cast<std::size_t>(j) > n)
        throw ConfigError("index outside 1.." + std::to_string(n), e.path(), e.line);
      if (i >= j)
        throw ConfigError("only strictly upper entries may be set (need i < j); the lower "
                          "triangle and diagonal follow from antisymmetry",
                          e.path(), e.line);
      J.P.set_upper(static_cast<std::size_t>(i - 1), static_cast<std::size_t>(j - 1),
                    to_expression(e.value, e.path(), e.line, cfg));
    }
    if (const Entry* a = find("structure", "a")) {
      std::vector<Expression> comps = to_expression_array(*a, cfg);
      if (comps.size() != n)
        throw ConfigError("vector field needs " + std::to_string(n) + " components, got " +
                              std::to_string(comps.size()),
                          a->path(), a->line);
      for (std::size_t k = 0; k < n; ++k) J.a.set(k, comps[k]);
    }
    cfg.structure = std::move(J);
  }

  void build_scalars(RunConfig& cfg) const {
    if (sections_.count("gauge")) {
      const Entry& e = require("gauge", "phi");
      cfg.phi = to_expression(e.value, e.path(), e.line, cfg);
    }
    if (sections_.count("hamiltonian")) {
      const Entry& e = require("hamiltonian", "H");
      cfg.hamiltonian = to_expression(e.value, e.path(), e.line, cfg);
    }
  }

  void build_recursion(RunConfig& cfg) const {
    if (!sections_.count("recursion")) return;
    const Entry* basis = find("recursion", "basis");
    const Entry* degree = find("recursion", "monomial_degree");
    const Entry* range = find("recursion", "exp_multiplier_range");
    if (basis && (degree || range))
      throw ConfigError("an explicit basis excludes the generator settings "
                        "monomial_degree / exp_multiplier_range",
                        basis->path(), basis->line);
    if (basis) cfg.basis.explicit_basis = to_expression_array(*basis, cfg);
    if (degree) cfg.basis.monomial_degree = static_cast<int>(to_int(*degree, 0, 12));
    if (range) cfg.basis.exp_multiplier_range = static_cast<int>(to_int(*range, 0, 8));
    if (const Entry* e = find("recursion", "max_steps"))
      cfg.max_steps = static_cast<int>(to_int(*e, 1, 64));
    if (const Entry* e = find("recursion", "tol")) {
      cfg.tol = to_double(*e);
      if (cfg.tol <= 0) throw ConfigError("tolerance must be positive", e->path(), e->line);
    }
    if (const Entry* e = find("recursion", "target_r"))
      cfg.target_r = static_cast<int>(to_int(*e, 1, 64));
  }

  void build_numeric(RunConfig& cfg) const {
    if (!sections_.count("numeric")) return;
    if (const Entry* e = find("numeric", "samples"))
      cfg.samples = static_cast<int>(to_int(*e, 1, 1000000));
    if (const Entry* e = find("numeric", "seed")) cfg.seed = to_seed(*e);
    if (const Entry* e = find("numeric", "box_min")) cfg.box_min = to_double(*e);
    if (const Entry* e = find("numeric", "box_max")) cfg.box_max = to_double(*e);
    if (cfg.box_min >= cfg.box_max)
      throw ConfigError("box_min must be below box_max", "numeric.box_min");
    if (const Entry* e = find("numeric", "svd_cutoff")) {
      cfg.svd_cutoff = to_double(*e);
      if (cfg.svd_cutoff <= 0 || cfg.svd_cutoff >= 1)
        throw ConfigError("svd_cutoff must lie in (0, 1)", e->path(), e->line);
    }
  }

  void build_flow(RunConfig& cfg) const {
    if (!sections_.count("flow")) return;
    FlowConfig flow;
    const Entry& x0 = require("flow", "x0");
    if (x0.value.kind != Value::Kind::Array)
      throw ConfigError("expected an array of numbers", x0.path(), x0.line);
    for (const Value& item : x0.value.items) {
      if (item.kind != Value::Kind::Number)
        throw ConfigError("initial state entries must be numbers", x0.path(), x0.line);
      flow.x0.push_back(item.num);
    }
    if (flow.x0.size() != cfg.chart->dimension())
      throw ConfigError("initial state needs " + std::to_string(cfg.chart->dimension()) +
                            " entries, got " + std::to_string(flow.x0.size()),
                        x0.path(), x0.line);
    flow.t_end = to_double(require("flow", "t_end"));
    if (flow.t_end < 0) throw ConfigError("t_end must be non-negative", "flow.t_end");
    flow.dt = to_double(require("flow", "dt"));
    if (flow.dt <= 0) throw ConfigError("dt must be positive", "flow.dt");
    if (const Entry* inv = find("flow", "invariants"))
      flow.invariants = to_expression_array(*inv, cfg, &flow.invariant_sources);
    cfg.flow = std::move(flow);
  }

  std::string path_;
  std::string digest_;
  std::set<std::string> sections_;
  std::vector<Entry> entries_;
};

}  // namespace

RunConfig load_config(const std::string& path) { return Loader(path).build(); }

}  // namespace jacobi
