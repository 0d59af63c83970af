#include "vmfbs/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <istream>
#include <ostream>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

#include "vmfbs/errors.hpp"
#include "vmfbs/prox.hpp"
#include "vmfbs/smooth.hpp"

namespace vmfbs {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

// Object view that rejects keys outside an allowed set.
class Obj {
 public:
  Obj(const json& j, std::string where, std::initializer_list<const char*> allowed)
      : j_(j), where_(std::move(where)) {
    if (!j.is_object()) throw ConfigError(where_ + ": expected an object");
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [key, _] : j.items()) {
      if (!ok.count(key)) throw ConfigError(where_ + ": unknown key '" + key + "'");
    }
  }

  bool has(const char* key) const { return j_.contains(key); }
  const json& at(const char* key) const {
    if (!has(key)) throw ConfigError(where_ + ": missing key '" + key + "'");
    return j_.at(key);
  }
  std::string path(const char* key) const { return where_ + "." + key; }

  double number(const char* key, double fallback) const {
    return has(key) ? as_number(j_.at(key), path(key)) : fallback;
  }
  std::optional<double> opt_number(const char* key) const {
    if (!has(key)) return std::nullopt;
    return as_number(j_.at(key), path(key));
  }
  std::size_t count(const char* key, std::size_t fallback) const {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_number_integer() || v.get<long long>() < 0) {
      throw ConfigError(path(key) + ": expected a non-negative integer");
    }
    return static_cast<std::size_t>(v.get<long long>());
  }
  bool flag(const char* key, bool fallback) const {
    if (!has(key)) return fallback;
    if (!j_.at(key).is_boolean()) throw ConfigError(path(key) + ": expected true or false");
    return j_.at(key).get<bool>();
  }
  std::string text(const char* key) const {
    const json& v = at(key);
    if (!v.is_string()) throw ConfigError(path(key) + ": expected a string");
    return v.get<std::string>();
  }
  std::string text(const char* key, const std::string& fallback) const {
    return has(key) ? text(key) : fallback;
  }

  static double as_number(const json& v, const std::string& where) {
    if (v.is_number()) return v.get<double>();
    if (v.is_null()) return kInf;
    if (v.is_string()) {
      const std::string s = v.get<std::string>();
      if (s == "inf" || s == "+inf") return kInf;
      if (s == "-inf") return -kInf;
    }
    throw ConfigError(where + ": expected a number");
  }

 private:
  const json& j_;
  std::string where_;
};

Vector as_vector(const json& v, const std::string& where) {
  if (!v.is_array()) throw ConfigError(where + ": expected an array of numbers");
  Vector out;
  out.reserve(v.size());
  for (const auto& e : v) {
    if (!e.is_number()) throw ConfigError(where + ": expected an array of numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

// Number broadcast to n coordinates, or an array of length n.
Vector per_coordinate(const json& v, std::size_t n, const std::string& where, bool lower = false) {
  if (v.is_array()) {
    Vector out;
    for (const auto& e : v) {
      const double x = Obj::as_number(e, where);
      out.push_back(e.is_null() && lower ? -kInf : x);
    }
    if (out.size() != n) {
      throw ConfigError(where + ": expected " + std::to_string(n) + " entries, got " +
                        std::to_string(out.size()));
    }
    return out;
  }
  const double x = Obj::as_number(v, where);
  return Vector(n, v.is_null() && lower ? -kInf : x);
}

fs::path resolve(const fs::path& base, const std::string& p) {
  const fs::path path(p);
  return path.is_absolute() ? path : base / path;
}

struct SmoothData {
  std::optional<LinearMap> a;
  Vector b;
};

struct Built {
  std::shared_ptr<const SmoothTerm> f;
  std::size_t n = 0;
  bool kl = false;
};

Built build_smooth(const json& problem, const fs::path& base, std::optional<std::uint64_t> seed) {
  Obj p(problem, "problem", {"smooth", "random", "regularizer", "x0", "regime"});
  Obj s(p.at("smooth"), "problem.smooth", {"type", "p", "A", "A_file", "b", "b_file"});
  const std::string type = s.text("type");
  if (type != "quadratic" && type != "pnorm" && type != "kl") {
    throw ConfigError("problem.smooth.type: expected quadratic, pnorm or kl, got '" + type + "'");
  }
  const bool kl = type == "kl";

  std::optional<LinearMap> a;
  Vector b;
  if (p.has("random")) {
    if (s.has("A") || s.has("A_file") || s.has("b") || s.has("b_file")) {
      throw ConfigError("problem: give either random or explicit A/b, not both");
    }
    Obj r(p.at("random"), "problem.random", {"rows", "cols", "seed"});
    const std::size_t m = r.count("rows", 0), n = r.count("cols", 0);
    if (m == 0 || n == 0) throw ConfigError("problem.random: rows and cols must be >= 1");
    std::mt19937_64 rng(seed.value_or(r.count("seed", 0)));
    std::vector<double> data(m * n);
    if (kl) {
      std::uniform_real_distribution<double> u(0.0, 1.0);
      for (double& v : data) v = u(rng);
      a.emplace(m, n, std::move(data));
      Vector truth(n);
      for (double& v : truth) v = u(rng);
      b = a->apply(truth);
      for (double& v : b) v += 0.1 * u(rng) + 1e-3;
    } else {
      std::normal_distribution<double> g(0.0, 1.0);
      const double scale = 1.0 / std::sqrt(static_cast<double>(m));
      for (double& v : data) v = g(rng) * scale;
      a.emplace(m, n, std::move(data));
      b.resize(m);
      for (double& v : b) v = g(rng);
    }
  } else {
    if (s.has("A") == s.has("A_file")) throw ConfigError("problem.smooth: give exactly one of A, A_file");
    if (s.has("b") == s.has("b_file")) throw ConfigError("problem.smooth: give exactly one of b, b_file");
    if (s.has("b")) {
      b = as_vector(s.at("b"), s.path("b"));
    } else {
      for (const auto& row : read_numeric_file(resolve(base, s.text("b_file")))) {
        b.insert(b.end(), row.begin(), row.end());
      }
    }
    if (s.has("A_file")) {
      a = LinearMap::from_rows(read_numeric_file(resolve(base, s.text("A_file"))));
    } else if (s.at("A").is_string()) {
      if (s.text("A") != "identity") throw ConfigError("problem.smooth.A: only \"identity\" is a named matrix");
      a = LinearMap::identity(b.size());
    } else {
      const json& rows = s.at("A");
      if (!rows.is_array()) throw ConfigError("problem.smooth.A: expected an array of rows");
      std::vector<Vector> r;
      for (const auto& row : rows) r.push_back(as_vector(row, s.path("A")));
      a = LinearMap::from_rows(r);
    }
  }
  if (a->rows() != b.size()) {
    throw ConfigError("problem.smooth: A has " + std::to_string(a->rows()) + " rows but b has " +
                      std::to_string(b.size()) + " entries");
  }
  Built out;
  out.n = a->cols();
  out.kl = kl;
  if (kl) {
    if (s.has("p")) throw ConfigError("problem.smooth: p applies to pnorm only");
    out.f = std::make_shared<KLDivergence>(std::move(*a), std::move(b));
  } else if (type == "quadratic") {
    if (s.has("p")) throw ConfigError("problem.smooth: p applies to pnorm only");
    out.f = std::make_shared<PNormResidual>(std::move(*a), std::move(b), 2.0);
  } else {
    out.f = std::make_shared<PNormResidual>(std::move(*a), std::move(b), s.number("p", 2.0));
  }
  return out;
}

struct SeparableParts {
  Vector l1, lo, hi;
};

void add_separable(const json& j, std::size_t n, const std::string& where, SeparableParts& acc) {
  Obj t(j, where, {"type", "weight", "l1", "lo", "hi"});
  const std::string type = t.text("type");
  auto merge_l1 = [&](const json& v, const char* key) {
    const Vector w = per_coordinate(v, n, where + "." + key);
    for (std::size_t i = 0; i < n; ++i) acc.l1[i] += w[i];
  };
  auto merge_box = [&]() {
    if (t.has("lo")) {
      const Vector lo = per_coordinate(t.at("lo"), n, t.path("lo"), true);
      for (std::size_t i = 0; i < n; ++i) acc.lo[i] = std::max(acc.lo[i], lo[i]);
    }
    if (t.has("hi")) {
      const Vector hi = per_coordinate(t.at("hi"), n, t.path("hi"));
      for (std::size_t i = 0; i < n; ++i) acc.hi[i] = std::min(acc.hi[i], hi[i]);
    }
  };
  if (type == "l1") {
    if (t.has("l1") || t.has("lo") || t.has("hi")) throw ConfigError(where + ": l1 takes only weight");
    merge_l1(t.at("weight"), "weight");
  } else if (type == "box") {
    if (t.has("l1") || t.has("weight")) throw ConfigError(where + ": box takes only lo and hi");
    merge_box();
  } else if (type == "separable") {
    if (t.has("weight")) throw ConfigError(where + ": separable uses l1, lo, hi");
    if (t.has("l1")) merge_l1(t.at("l1"), "l1");
    merge_box();
  } else if (type == "zero") {
    if (t.has("weight") || t.has("l1") || t.has("lo") || t.has("hi")) {
      throw ConfigError(where + ": zero takes no parameters");
    }
  } else {
    throw ConfigError(where + ".type: '" + type + "' is not a separable term");
  }
}

std::shared_ptr<const ProxTerm> build_regularizer(const json& j, std::size_t n) {
  const std::string where = "problem.regularizer";
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  const std::string type = j.contains("type") && j.at("type").is_string()
                               ? j.at("type").get<std::string>()
                               : throw ConfigError(where + ": missing string key 'type'");
  if (type == "tv1d") {
    Obj t(j, where, {"type", "weight", "lo", "hi"});
    const double w = t.number("weight", 1.0);
    const double lo = t.has("lo") && t.at("lo").is_null() ? -kInf : t.number("lo", -kInf);
    const double hi = t.number("hi", kInf);
    return std::make_shared<TotalVariation1D>(n, w, lo, hi);
  }
  SeparableParts acc{Vector(n, 0.0), Vector(n, -kInf), Vector(n, kInf)};
  if (type == "sum") {
    Obj t(j, where, {"type", "terms"});
    const json& terms = t.at("terms");
    if (!terms.is_array() || terms.empty()) throw ConfigError(where + ".terms: expected a non-empty array");
    for (std::size_t i = 0; i < terms.size(); ++i) {
      add_separable(terms[i], n, where + ".terms[" + std::to_string(i) + "]", acc);
    }
  } else {
    add_separable(j, n, where, acc);
  }
  return std::make_shared<SeparableTerm>(std::move(acc.l1), std::move(acc.lo), std::move(acc.hi));
}

MetricRegime parse_regime(const std::string& s, const std::string& where) {
  if (s == "constant") return MetricRegime::constant;
  if (s == "near_monotone") return MetricRegime::near_monotone;
  if (s == "summable_spread") return MetricRegime::summable_spread;
  throw ConfigError(where + ": regime must be constant, near_monotone or summable_spread");
}

std::shared_ptr<const MetricSchedule> build_metric(const json& j, std::size_t n) {
  const std::string where = "solver.metric";
  if (!j.is_object() || !j.contains("type") || !j.at("type").is_string()) {
    throw ConfigError(where + ": expected an object with a string 'type'");
  }
  const std::string type = j.at("type").get<std::string>();
  if (type == "identity") {
    Obj m(j, where, {"type"});
    return ConstantSchedule::identity(n);
  }
  if (type == "constant") {
    Obj m(j, where, {"type", "weights"});
    return std::make_shared<ConstantSchedule>(per_coordinate(m.at("weights"), n, m.path("weights")));
  }
  if (type == "table") {
    Obj m(j, where, {"type", "rows", "regime"});
    const json& rows = m.at("rows");
    if (!rows.is_array() || rows.empty()) throw ConfigError(m.path("rows") + ": expected a non-empty array");
    std::vector<Vector> table;
    for (const auto& r : rows) table.push_back(per_coordinate(r, n, m.path("rows")));
    return std::make_shared<TableSchedule>(std::move(table),
                                           parse_regime(m.text("regime", "near_monotone"), m.path("regime")));
  }
  if (type == "geometric") {
    // w_k = base + spread ratio^k
    Obj m(j, where, {"type", "base", "spread", "ratio", "regime"});
    const Vector base = per_coordinate(m.at("base"), n, m.path("base"));
    const Vector spread = per_coordinate(m.at("spread"), n, m.path("spread"));
    const double ratio = m.number("ratio", 0.5);
    if (!(ratio >= 0.0 && ratio < 1.0)) throw ConfigError(m.path("ratio") + ": expected a value in [0, 1)");
    double lo = kInf, hi = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      lo = std::min({lo, base[i], base[i] + spread[i]});
      hi = std::max({hi, base[i], base[i] + spread[i]});
    }
    bool scalar = true;
    for (std::size_t i = 1; i < n; ++i) scalar = scalar && base[i] == base[0] && spread[i] == spread[0];
    auto fn = [base, spread, ratio](std::size_t k) {
      Vector w(base.size());
      const double r = std::pow(ratio, static_cast<double>(k));
      for (std::size_t i = 0; i < w.size(); ++i) w[i] = base[i] + spread[i] * r;
      return w;
    };
    return std::make_shared<FunctionSchedule>(fn, lo, hi,
                                              parse_regime(m.text("regime", "summable_spread"), m.path("regime")),
                                              scalar);
  }
  if (type == "bb") {
    Obj m(j, where, {"type", "nu", "mu", "eta0"});
    return std::make_shared<SafeguardedBBSchedule>(n, m.number("nu", 1e-3), m.number("mu", 1e3),
                                                   m.number("eta0", 1.0));
  }
  throw ConfigError(where + ".type: expected identity, constant, table, geometric or bb");
}

ParameterSchedule build_parameter(const json& v, const std::string& where) {
  if (v.is_number()) {
    const double c = v.get<double>();
    return [c](std::size_t) { return c; };
  }
  const Vector values = as_vector(v, where);
  if (values.empty()) throw ConfigError(where + ": expected a non-empty array");
  return [values](std::size_t k) { return values[std::min(k, values.size() - 1)]; };
}

void build_solver(const json& j, std::size_t n, SolverConfig& c) {
  Obj s(j, "solver",
        {"rule", "delta", "theta", "gamma_bar", "lambda_bar", "sigma", "beta", "gamma", "lambda",
         "gamma_schedule", "lambda_schedule", "metric", "max_iter", "max_backtracks", "warm_start",
         "tol_fixed_point", "tol_stall", "stall_window", "lipschitz"});
  LineSearchConfig& ls = c.linesearch;
  if (s.has("rule")) {
    const auto r = parse_rule(s.text("rule"));
    if (!r) throw ConfigError("solver.rule: unknown rule '" + s.text("rule") + "'");
    ls.rule = *r;
  }
  ls.delta = s.number("delta", ls.delta);
  ls.theta = s.number("theta", ls.theta);
  ls.gamma_bar = s.number("gamma_bar", ls.gamma_bar);
  ls.lambda_bar = s.number("lambda_bar", ls.lambda_bar);
  ls.sigma = s.number("sigma", ls.sigma);
  ls.beta = s.number("beta", ls.beta);
  ls.fixed_gamma = s.opt_number("gamma");
  ls.fixed_lambda = s.opt_number("lambda");
  ls.max_backtracks = static_cast<int>(s.count("max_backtracks", static_cast<std::size_t>(ls.max_backtracks)));
  ls.warm_start = s.flag("warm_start", ls.warm_start);
  ls.tol_fixed_point = s.number("tol_fixed_point", ls.tol_fixed_point);
  if (s.has("gamma_schedule")) c.gamma_schedule = build_parameter(s.at("gamma_schedule"), s.path("gamma_schedule"));
  if (s.has("lambda_schedule")) c.lambda_schedule = build_parameter(s.at("lambda_schedule"), s.path("lambda_schedule"));
  if (s.has("metric")) c.metrics = build_metric(s.at("metric"), n);
  c.max_iterations = s.count("max_iter", c.max_iterations);
  c.tol_objective_stall = s.number("tol_stall", c.tol_objective_stall);
  c.stall_window = s.count("stall_window", c.stall_window);
  c.lipschitz = s.opt_number("lipschitz");
  if (c.max_iterations == 0) throw ConfigError("solver.max_iter must be >= 1");
  ls.validate();
}

}  // namespace

std::vector<Vector> read_numeric_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open data file " + path.string());
  std::vector<Vector> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ss(line);
    Vector row;
    std::string tok;
    while (ss >> tok) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(tok, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != tok.size()) {
        throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": not a number: " + tok);
      }
      row.push_back(v);
    }
    if (!row.empty()) rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ConfigError("data file " + path.string() + " holds no numbers");
  return rows;
}

double read_scalar_file(const fs::path& path) { return read_numeric_file(path).front().front(); }

Experiment parse_experiment(const std::string& text, const fs::path& base,
                            std::optional<std::uint64_t> seed) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("spec is not valid JSON: ") + e.what());
  }
  Obj top(root, "spec", {"problem", "solver", "output"});
  const json& pj = top.at("problem");
  Built sm = build_smooth(pj, base, seed);
  Obj p(pj, "problem", {"smooth", "random", "regularizer", "x0", "regime"});
  std::shared_ptr<const ProxTerm> g =
      p.has("regularizer") ? build_regularizer(p.at("regularizer"), sm.n)
                           : std::make_shared<SeparableTerm>(SeparableTerm::zero(sm.n));
  std::optional<DomainRegime> regime;
  if (p.has("regime")) {
    const std::string r = p.text("regime");
    if (r == "standard") regime = DomainRegime::standard;
    else if (r == "general") regime = DomainRegime::general;
    else throw ConfigError("problem.regime: expected standard or general");
  }

  Experiment ex;
  try {
    ex.problem = std::make_shared<CompositeProblem>(sm.f, g, regime);
  } catch (const UsageError& e) {
    throw ConfigError(std::string("problem: ") + e.what());
  }
  if (p.has("x0")) {
    ex.x0 = per_coordinate(p.at("x0"), sm.n, p.path("x0"));
  } else {
    ex.x0.assign(sm.n, sm.kl ? 1.0 : 0.0);
  }
  if (top.has("solver")) build_solver(top.at("solver"), sm.n, ex.solver);
  if (top.has("output")) {
    Obj o(top.at("output"), "output", {"trace", "checks", "fstar", "compare_tol"});
    if (o.has("trace")) ex.trace_path = resolve(base, o.text("trace"));
    if (o.has("fstar")) ex.fstar_path = resolve(base, o.text("fstar"));
    ex.solver.record_checks = o.flag("checks", true);
    ex.compare_tol = o.number("compare_tol", ex.compare_tol);
  }
  return ex;
}

Experiment load_experiment(const fs::path& spec_path, std::optional<std::uint64_t> seed) {
  std::ifstream in(spec_path);
  if (!in) throw ConfigError("cannot open spec " + spec_path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_experiment(ss.str(), spec_path.parent_path(), seed);
}

std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<TraceRow> trace_rows(const SolveResult& result) {
  std::vector<TraceRow> rows;
  rows.reserve(result.trace.size());
  for (const auto& r : result.trace) {
    rows.push_back({r.k, r.F, r.gamma, r.lambda, r.backtracks, r.step_norm, r.check_max_residual});
  }
  return rows;
}

void write_trace_csv(std::ostream& out, const SolveResult& result) {
  out << kTraceHeader << '\n';
  for (const auto& r : trace_rows(result)) {
    out << r.k << ',' << format_real(r.F) << ',' << format_real(r.gamma) << ','
        << format_real(r.lambda) << ',' << r.backtracks << ',' << format_real(r.step_norm) << ','
        << format_real(r.check_max_residual) << '\n';
  }
}

std::vector<TraceRow> read_trace_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kTraceHeader) throw ConfigError("trace: unexpected header");
  std::vector<TraceRow> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 7) throw ConfigError("trace line " + std::to_string(lineno) + ": expected 7 fields");
    try {
      TraceRow r;
      r.k = std::stoul(cells[0]);
      r.F = std::stod(cells[1]);
      r.gamma = std::stod(cells[2]);
      r.lambda = std::stod(cells[3]);
      r.backtracks = std::stoi(cells[4]);
      r.step_norm = std::stod(cells[5]);
      r.check_max_residual = std::stod(cells[6]);
      rows.push_back(r);
    } catch (const std::exception&) {
      throw ConfigError("trace line " + std::to_string(lineno) + ": malformed number");
    }
  }
  return rows;
}

std::vector<CompareRow> run_compare(const Experiment& ex, const std::vector<Rule>& rules,
                                    std::optional<double> F_ref) {
  struct Run {
    CompareRow row;
    std::vector<double> F;
  };
  std::vector<std::future<Run>> jobs;
  for (Rule rule : rules) {
    jobs.push_back(std::async(std::launch::async, [&ex, rule] {
      Run run;
      run.row.rule = rule;
      SolverConfig cfg = ex.solver;
      cfg.linesearch.rule = rule;
      cfg.record_checks = false;
      try {
        const SolveResult res = solve(*ex.problem, ex.x0, cfg);
        run.row.ok = res.termination != Termination::search_failure;
        run.row.termination = res.termination == Termination::search_failure
                                  ? to_string(res.termination) + ": " + res.message
                                  : to_string(res.termination);
        run.row.iterations = res.trace.size();
        run.row.F_final = res.F_final;
        run.row.evals = res.evals;
        double m = kInf;
        for (const auto& r : res.trace) m = std::min(m, searches_gamma(rule) ? r.gamma : r.lambda);
        run.row.min_searched = m;
        run.F = res.objective_values();
      } catch (const std::exception& e) {
        run.row.ok = false;
        run.row.termination = std::string("error: ") + e.what();
      }
      return run;
    }));
  }
  std::vector<Run> runs;
  for (auto& j : jobs) runs.push_back(j.get());

  double ref = kInf;
  if (F_ref) {
    ref = *F_ref;
  } else {
    for (const auto& r : runs) if (r.row.ok) ref = std::min(ref, r.row.F_final);
  }
  std::vector<CompareRow> out;
  for (auto& r : runs) {
    if (r.row.ok && std::isfinite(ref)) {
      for (std::size_t k = 0; k < r.F.size(); ++k) {
        if (r.F[k] - ref <= ex.compare_tol * (1.0 + std::abs(ref))) {
          r.row.iterations_to_tol = k;
          break;
        }
      }
    }
    out.push_back(std::move(r.row));
  }
  return out;
}

void write_compare_csv(std::ostream& out, const std::vector<CompareRow>& rows) {
  out << "rule,status,iterations,iterations_to_tol,F_final,f_evals,grad_evals,prox_evals,min_searched\n";
  for (const auto& r : rows) {
    std::string status = r.termination;
    std::replace(status.begin(), status.end(), ',', ';');
    std::replace(status.begin(), status.end(), '\n', ' ');
    out << to_string(r.rule) << ',' << status << ',' << r.iterations << ','
        << (r.iterations_to_tol ? std::to_string(*r.iterations_to_tol) : std::string()) << ','
        << (r.ok ? format_real(r.F_final) : std::string()) << ',' << r.evals.f << ','
        << r.evals.grad << ',' << r.evals.prox << ','
        << (r.ok ? format_real(r.min_searched) : std::string()) << '\n';
  }
}

}  // namespace vmfbs
