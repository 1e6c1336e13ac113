#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "adapt/adapt.hpp"

namespace adaptsolve {

namespace {

using json = nlohmann::json;
using adapt::Error;
using adapt::ErrorKind;
using adapt::IterationTrace;
using adapt::ScalarFunction;
using adapt::SolverConfig;

constexpr double kVerifyTol = 1e-10;
constexpr double kPoleGap = 1e-9;

// Bad input: reported with exit status 2.
struct ParseFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// The solver did not produce a root: exit status 3.
struct SolveFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string kind;
  std::string file;
  std::string method;
  std::optional<int> root;
  std::optional<double> tol;
  std::optional<int> max_iters;
  std::string trace;
  bool verify = false;
  unsigned jobs = 1;
  std::string range;
  int samples = 200;
  std::optional<double> fit_point;
};

struct Instance {
  std::string kind;
  json payload;
  json options;
};

// ---------------------------------------------------------------------------
// Instance files.

Instance load_instance(const std::string& path, const std::string& expected_kind) {
  std::ifstream in(path);
  if (!in) throw ParseFailure("cannot open instance file '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseFailure(path + ": " + e.what());
  }
  if (!doc.is_object()) throw ParseFailure(path + ": top level must be an object");
  if (!doc.contains("kind") || !doc["kind"].is_string()) {
    throw ParseFailure(path + ": field 'kind' must be a string");
  }
  if (!doc.contains("payload") || !doc["payload"].is_object()) {
    throw ParseFailure(path + ": field 'payload' must be an object");
  }
  Instance inst{doc["kind"].get<std::string>(), doc["payload"], json::object()};
  if (doc.contains("options")) {
    if (!doc["options"].is_object()) throw ParseFailure(path + ": field 'options' must be an object");
    inst.options = doc["options"];
  }
  if (inst.kind != expected_kind) {
    throw ParseFailure(path + ": instance kind is '" + inst.kind + "', command asked for '" +
                       expected_kind + "'");
  }
  return inst;
}

double number_field(const json& obj, const std::string& name) {
  if (!obj.contains(name) || !obj[name].is_number()) {
    throw ParseFailure("payload." + name + ": expected a number");
  }
  return obj[name].get<double>();
}

int integer_field(const json& obj, const std::string& name) {
  if (!obj.contains(name) || !obj[name].is_number_integer()) {
    throw ParseFailure("payload." + name + ": expected an integer");
  }
  return obj[name].get<int>();
}

std::vector<double> array_field(const json& obj, const std::string& name) {
  if (!obj.contains(name) || !obj[name].is_array()) {
    throw ParseFailure("payload." + name + ": expected an array of numbers");
  }
  std::vector<double> out;
  for (std::size_t j = 0; j < obj[name].size(); ++j) {
    const json& v = obj[name][j];
    if (!v.is_number()) {
      throw ParseFailure("payload." + name + "[" + std::to_string(j) + "]: expected a number");
    }
    out.push_back(v.get<double>());
  }
  return out;
}

// Library constructors validate their invariants; at this stage a failure is
// an input error.
template <class Build>
auto build_problem(Build&& build) {
  try {
    return build();
  } catch (const Error& e) {
    throw ParseFailure(std::string("payload: ") + e.what());
  }
}

adapt::secular::SecularProblem secular_problem(const json& payload) {
  auto b = array_field(payload, "b");
  auto d = array_field(payload, "d");
  return build_problem([&] { return adapt::secular::SecularProblem(b, d); });
}

adapt::knapsack::KnapsackDual knapsack_problem(const json& payload) {
  auto alpha = array_field(payload, "alpha");
  auto beta = array_field(payload, "beta");
  const double K = number_field(payload, "K");
  return build_problem([&] { return adapt::knapsack::KnapsackDual(alpha, beta, K); });
}

adapt::pellet::Trinomial trinomial_problem(const json& payload) {
  adapt::pellet::Trinomial t{number_field(payload, "a"), number_field(payload, "b"),
                             number_field(payload, "c"), integer_field(payload, "n"),
                             integer_field(payload, "k")};
  build_problem([&] {
    t.validate();
    return 0;
  });
  return t;
}

struct PelletInput {
  std::vector<double> moduli;
  std::size_t ell;
};

PelletInput pellet_problem(const json& payload) {
  PelletInput in{array_field(payload, "moduli"), 0};
  const int ell = integer_field(payload, "ell");
  if (ell < 0) throw ParseFailure("payload.ell: must be non-negative");
  in.ell = static_cast<std::size_t>(ell);
  return in;
}

SolverConfig make_config(const Instance& inst, const Options& opt) {
  SolverConfig cfg;
  const json& o = inst.options;
  auto read = [&](const char* name, double& target) {
    if (!o.contains(name)) return;
    if (!o[name].is_number()) throw ParseFailure(std::string("options.") + name + ": expected a number");
    target = o[name].get<double>();
  };
  read("tol", cfg.f_tol);
  read("step_tol", cfg.step_tol);
  read("inner_tol", cfg.inner_tol);
  if (o.contains("max_iters")) {
    if (!o["max_iters"].is_number_integer()) throw ParseFailure("options.max_iters: expected an integer");
    cfg.max_iters = o["max_iters"].get<int>();
  }
  if (opt.tol) cfg.f_tol = *opt.tol;
  if (opt.max_iters) cfg.max_iters = *opt.max_iters;
  try {
    cfg.validate();
  } catch (const Error& e) {
    throw ParseFailure(e.what());
  }
  return cfg;
}

std::string method_name(const Instance& inst, const Options& opt, const std::vector<std::string>& allowed) {
  std::string m = allowed.front();
  if (inst.options.contains("method")) {
    if (!inst.options["method"].is_string()) throw ParseFailure("options.method: expected a string");
    m = inst.options["method"].get<std::string>();
  }
  if (!opt.method.empty()) m = opt.method;
  if (std::find(allowed.begin(), allowed.end(), m) == allowed.end()) {
    std::string list;
    for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
    throw ParseFailure("unknown method '" + m + "' for " + inst.kind + " (expected one of: " + list + ")");
  }
  return m;
}

adapt::secular::Method secular_method(const std::string& name) {
  if (name == "transformed") return adapt::secular::Method::Transformed;
  if (name == "newton-on-F") return adapt::secular::Method::NewtonOnF;
  return adapt::secular::Method::Bns;
}

const std::vector<std::string> kSecularMethods{"bns", "transformed", "newton-on-F"};
const std::vector<std::string> kKnapsackMethods{"newton-lf"};
const std::vector<std::string> kTrinomialMethods{"inside"};
const std::vector<std::string> kPelletMethods{"scan"};

// ---------------------------------------------------------------------------
// Solve.

struct Row {
  int index;  // one-based
  double root;
  std::size_t iterations;
  std::string termination;
  bool converged;
  // Iterates in the caller's variable: (x, f(x)).
  std::vector<std::pair<double, double>> trace;
  std::optional<adapt::oracle::RootReport> report;
};

std::vector<std::pair<double, double>> points(const IterationTrace& t) {
  std::vector<std::pair<double, double>> out;
  for (const auto& p : t.iterates) out.emplace_back(p.x, p.fx);
  return out;
}

Row make_row(int index, std::optional<double> root, const IterationTrace& t) {
  Row r;
  r.index = index;
  r.converged = t.converged() && root.has_value();
  r.root = root.value_or(std::numeric_limits<double>::quiet_NaN());
  r.iterations = t.steps();
  r.termination = adapt::to_string(t.termination);
  r.trace = points(t);
  return r;
}

std::vector<Row> solve_secular(const Instance& inst, const Options& opt) {
  using namespace adapt::secular;
  const SecularProblem p = secular_problem(inst.payload);
  const SolverConfig cfg = make_config(inst, opt);
  const Method method = secular_method(method_name(inst, opt, kSecularMethods));
  if (p.size() < 2) throw ParseFailure("payload: interior roots need at least two poles");
  std::vector<SecularRoot> roots;
  if (opt.root) {
    if (*opt.root < 1 || static_cast<std::size_t>(*opt.root) > p.interior_roots()) {
      throw ParseFailure("--root must lie in 1.." + std::to_string(p.interior_roots()));
    }
    try {
      roots.push_back(solve_root(p, static_cast<std::size_t>(*opt.root - 1), method, cfg));
    } catch (const Error& e) {
      throw SolveFailure(e.what());
    }
  } else {
    roots = solve_all_roots(p, method, cfg, opt.jobs);
  }
  std::vector<Row> rows;
  for (const SecularRoot& r : roots) {
    Row row = make_row(static_cast<int>(r.index) + 1, r.root(), r.native);
    row.trace = points(r.unshifted());
    if (opt.verify && row.converged) {
      ScalarFunction f;
      f.eval = [&p](double x) { return eval_f(p, x); };
      const double lo = p.d()[r.index];
      const double hi = p.d()[r.index + 1];
      row.report = adapt::oracle::verify_root(f, row.root, adapt::oracle::Bracket{std::nextafter(lo, hi), std::nextafter(hi, lo)},
                                              kVerifyTol);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<Row> solve_knapsack(const Instance& inst, const Options& opt) {
  using namespace adapt::knapsack;
  const KnapsackDual p = knapsack_problem(inst.payload);
  const SolverConfig cfg = make_config(inst, opt);
  method_name(inst, opt, kKnapsackMethods);
  if (opt.root && *opt.root != 1) throw ParseFailure("--root: a knapsack instance has a single root");
  IterationTrace t;
  try {
    t = solve(p, cfg);
  } catch (const Error& e) {
    throw SolveFailure(e.what());
  }
  Row row = make_row(1, t.root, t);
  if (opt.verify && row.converged) {
    row.report = adapt::oracle::verify_root(dual_function(p, cfg), row.root, adapt::Interval{0.0, p.gamma()},
                                            kVerifyTol);
  }
  return {row};
}

double trinomial_root_bound(const adapt::pellet::Trinomial& t) {
  return 1.0 + std::max(t.b, t.c) / t.a;
}

std::vector<Row> solve_trinomial(const Instance& inst, const Options& opt) {
  using namespace adapt::pellet;
  const Trinomial t = trinomial_problem(inst.payload);
  const SolverConfig cfg = make_config(inst, opt);
  method_name(inst, opt, kTrinomialMethods);
  RadiiPair radii;
  try {
    radii = solve_radii(t, cfg);
  } catch (const Error& e) {
    throw SolveFailure(e.what());
  }
  std::vector<Row> rows;
  const std::pair<double, const IterationTrace*> parts[] = {{radii.r1, &radii.trace_lower},
                                                             {radii.r2, &radii.trace_upper}};
  int index = 1;
  for (const auto& [r, tr] : parts) {
    Row row = make_row(index++, r, *tr);
    for (auto& [x, fx] : row.trace) {
      x = to_x(x, t.k);
      fx = eval_f(t, x);
    }
    if (radii.near_degenerate) row.termination = "NearDegenerate";
    rows.push_back(std::move(row));
  }
  if (opt.root) {
    if (*opt.root < 1 || *opt.root > 2) throw ParseFailure("--root must be 1 or 2 for a trinomial");
    rows = {rows[static_cast<std::size_t>(*opt.root - 1)]};
  }
  if (opt.verify) {
    ScalarFunction f;
    f.eval = [t](double x) { return eval_f(t, x); };
    for (Row& row : rows) {
      row.report = adapt::oracle::verify_root(f, row.root, adapt::Interval{0.0, trinomial_root_bound(t)},
                                              kVerifyTol);
    }
  }
  return rows;
}

double pellet_q(const PelletInput& in, double z) {
  adapt::CompensatedSum s;
  for (std::size_t j = 0; j < in.moduli.size(); ++j) {
    const double term = in.moduli[j] * std::pow(z, static_cast<double>(j));
    s += j == in.ell ? -term : term;
  }
  return s.value();
}

std::vector<Row> solve_pellet(const Instance& inst, const Options& opt, std::ostream& out) {
  const PelletInput in = pellet_problem(inst.payload);
  method_name(inst, opt, kPelletMethods);
  if (!opt.trace.empty()) throw ParseFailure("--trace: pellet radii are found by scanning, not iteration");
  std::optional<adapt::pellet::PelletRadii> radii;
  try {
    radii = adapt::pellet::pellet_radii_general(in.moduli, in.ell);
  } catch (const Error& e) {
    throw ParseFailure(std::string("payload: ") + e.what());
  }
  if (!radii) {
    out << "# q has no two positive roots; no Pellet annulus\n";
    return {};
  }
  std::vector<Row> rows;
  int index = 1;
  for (double r : {radii->rho1, radii->rho2}) {
    Row row;
    row.index = index++;
    row.root = r;
    row.iterations = 0;
    row.termination = adapt::to_string(adapt::Termination::Converged);
    row.converged = true;
    rows.push_back(row);
  }
  if (opt.verify) {
    ScalarFunction q;
    q.eval = [&in](double z) { return pellet_q(in, z); };
    double top = 0.0;
    std::size_t high = in.moduli.size() - 1;
    while (in.moduli[high] == 0.0) --high;
    for (std::size_t j = 0; j < high; ++j) top = std::max(top, in.moduli[j]);
    const double bound = 1.0 + top / in.moduli[high];
    for (Row& row : rows) {
      row.report = adapt::oracle::verify_root(q, row.root, adapt::Interval{0.0, bound}, kVerifyTol);
    }
  }
  return rows;
}

std::string trace_path(const std::string& base, int index, bool suffix) {
  if (!suffix) return base;
  const std::size_t slash = base.find_last_of('/');
  const std::size_t dot = base.find_last_of('.');
  const std::string tag = "_" + std::to_string(index);
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) return base + tag;
  return base.substr(0, dot) + tag + base.substr(dot);
}

void write_trace(const std::string& path, const Row& row) {
  std::ofstream f(path);
  if (!f) throw ParseFailure("--trace: cannot write '" + path + "'");
  f << "iter,x,f_x\n";
  for (std::size_t k = 0; k < row.trace.size(); ++k) {
    f << k << ',' << format_double(row.trace[k].first) << ',' << format_double(row.trace[k].second) << '\n';
  }
}

int cmd_solve(const Options& opt, std::ostream& out) {
  const Instance inst = load_instance(opt.file, opt.kind);
  std::vector<Row> rows;
  if (inst.kind == "secular") {
    rows = solve_secular(inst, opt);
  } else if (inst.kind == "knapsack") {
    rows = solve_knapsack(inst, opt);
  } else if (inst.kind == "trinomial") {
    rows = solve_trinomial(inst, opt);
  } else {
    rows = solve_pellet(inst, opt, out);
  }

  out << "# index root iterations termination";
  if (opt.verify) out << " oracle abs_error rel_error";
  out << '\n';
  bool all_converged = true;
  bool all_agree = true;
  for (const Row& row : rows) {
    out << row.index << ' ' << format_double(row.root) << ' ' << row.iterations << ' ' << row.termination;
    if (row.report) {
      out << ' ' << format_double(row.report->oracle) << ' ' << format_double(row.report->abs_error) << ' '
          << format_double(row.report->rel_error);
      all_agree = all_agree && row.report->agrees;
    } else if (opt.verify) {
      out << " - - -";
    }
    out << '\n';
    all_converged = all_converged && row.converged;
  }
  if (!opt.trace.empty()) {
    for (const Row& row : rows) write_trace(trace_path(opt.trace, row.index, rows.size() > 1), row);
  }
  if (!all_converged) return kNotConverged;
  if (!all_agree) return kVerifyMismatch;
  return kOk;
}

// ---------------------------------------------------------------------------
// Samples.

std::pair<double, double> parse_range(const std::string& text) {
  const std::size_t colon = text.find(':');
  if (colon == std::string::npos) throw ParseFailure("--range: expected lo:hi");
  double lo = 0.0;
  double hi = 0.0;
  auto parse = [](const std::string& s, double& v) {
    const char* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, v);
    return ec == std::errc() && ptr == end;
  };
  if (!parse(text.substr(0, colon), lo) || !parse(text.substr(colon + 1), hi)) {
    throw ParseFailure("--range: expected lo:hi with decimal numbers");
  }
  if (!(lo < hi)) throw ParseFailure("--range: need lo < hi");
  return {lo, hi};
}

// One CSV row per sample: x, f_x and, when a model is given, g_x and n_x.
// Cells that cannot be evaluated are left empty.
struct SampleModel {
  std::function<double(double)> f;
  std::function<bool(double)> skip;
  std::function<double(double)> g;
  std::function<double(double)> n;
};

void emit_rows(std::ostream& out, const SampleModel& m, double lo, double hi, int samples) {
  const bool with_model = static_cast<bool>(m.g);
  out << (with_model ? "x,f_x,g_x,n_x\n" : "x,f_x\n");
  auto cell = [](const std::function<double(double)>& fn, double x) -> std::string {
    try {
      const double v = fn(x);
      return std::isfinite(v) ? format_double(v) : std::string();
    } catch (const Error&) {
      return {};
    }
  };
  for (int k = 0; k <= samples; ++k) {
    const double x = k == samples ? hi : lo + (hi - lo) * (static_cast<double>(k) / samples);
    if (m.skip && m.skip(x)) continue;
    const std::string fx = cell(m.f, x);
    if (fx.empty()) continue;
    out << format_double(x) << ',' << fx;
    if (with_model) out << ',' << cell(m.g, x) << ',' << cell(m.n, x);
    out << '\n';
  }
}

int cmd_samples(const Options& opt, std::ostream& out) {
  const auto [lo, hi] = parse_range(opt.range);
  if (opt.samples < 2) throw ParseFailure("--samples must be at least 2");
  const Instance inst = load_instance(opt.file, opt.kind);
  const SolverConfig cfg = make_config(inst, opt);
  const std::optional<double> X = opt.fit_point;
  std::ostringstream buffer;

  if (inst.kind == "secular") {
    using namespace adapt::secular;
    const SecularProblem p = secular_problem(inst.payload);
    const Method method = secular_method(method_name(inst, opt, kSecularMethods));
    SampleModel m;
    m.f = [&p](double x) { return eval_f(p, x); };
    m.skip = [&p](double x) {
      return std::any_of(p.d().begin(), p.d().end(), [x](double d) { return std::abs(x - d) <= kPoleGap; });
    };
    std::optional<ShiftedTask> task;
    if (X) {
      std::size_t index = 0;
      if (opt.root) {
        if (*opt.root < 1 || static_cast<std::size_t>(*opt.root) >= p.size()) {
          throw ParseFailure("--root must lie in 1.." + std::to_string(p.interior_roots()));
        }
        index = static_cast<std::size_t>(*opt.root - 1);
      } else {
        const auto it = std::upper_bound(p.d().begin(), p.d().end(), *X);
        if (it == p.d().begin() || it == p.d().end()) {
          throw ParseFailure("--fit-point must lie strictly between two poles");
        }
        index = static_cast<std::size_t>(it - p.d().begin()) - 1;
      }
      if (!(*X > p.d()[index] && *X < p.d()[index + 1])) {
        throw ParseFailure("--fit-point must lie inside root interval " + std::to_string(index + 1));
      }
      task = make_task(p, index);
      const double origin = task->origin;
      const double xbar = *X - origin;
      double slope = 0.0;
      for (std::size_t j = 0; j < p.size(); ++j) {
        const double gap = p.d()[j] - *X;
        slope += p.b()[j] / (gap * gap);
      }
      const double fX = eval_f(p, *X);
      m.n = [fX, slope, X](double x) { return fX + slope * (x - *X); };
      if (method == Method::Bns) {
        const BnsApproximant g = fit_bns(p, *task, xbar);
        m.g = [g, origin](double x) { return g(x - origin); };
      } else if (method == Method::Transformed) {
        const TransformedApproximant g = fit_transformed(p, *task, 1.0 / xbar);
        m.g = [g, origin](double x) { return g(1.0 / (x - origin)); };
      } else {
        const double zbar = 1.0 / xbar;
        const TransformedValues v = eval_transformed(p, *task, zbar);
        m.g = [v, zbar, origin](double x) { return v.F + v.dF * (1.0 / (x - origin) - zbar); };
      }
    }
    emit_rows(buffer, m, lo, hi, opt.samples);
  } else if (inst.kind == "knapsack") {
    using namespace adapt::knapsack;
    const KnapsackDual p = knapsack_problem(inst.payload);
    method_name(inst, opt, kKnapsackMethods);
    SampleModel m;
    m.f = [&p, cfg](double x) { return eval_f(p, x, cfg); };
    m.skip = [&p](double x) { return !(x > 0.0 && x < p.gamma()); };
    if (X) {
      if (!(*X > 0.0 && *X < p.gamma())) throw ParseFailure("--fit-point must lie in (0, gamma)");
      const ConvexifiedValues lf = eval_Lf(p, *X, cfg);
      const DualValues fv = eval_dual(p, *X, cfg);
      const double bmax = p.beta_max();
      // Newton's model of L f, read back as a model of f.
      m.g = [lf, bmax, X](double x) { return (lf.value + lf.derivative * (x - *X)) / (1.0 - bmax * x); };
      m.n = [fv, X](double x) { return fv.f + fv.df * (x - *X); };
    }
    emit_rows(buffer, m, lo, hi, opt.samples);
  } else if (inst.kind == "trinomial") {
    using namespace adapt::pellet;
    const Trinomial t = trinomial_problem(inst.payload);
    method_name(inst, opt, kTrinomialMethods);
    SampleModel m;
    m.f = [t](double x) { return eval_f(t, x); };
    if (X) {
      if (!(*X > 0.0)) throw ParseFailure("--fit-point must be positive");
      const TrinomialApproximant g = fit_trinomial(t, std::pow(*X, t.k));
      const int k = t.k;
      m.g = [g, k](double x) {
        if (!(x > 0.0)) return std::numeric_limits<double>::quiet_NaN();
        const double z = std::pow(x, k);
        return std::abs(z - g.beta) <= kPoleGap ? std::numeric_limits<double>::quiet_NaN() : g(z);
      };
      const double fX = eval_f(t, *X);
      const double slope = t.n * t.a * std::pow(*X, t.n - 1) - t.k * t.b * std::pow(*X, t.k - 1);
      m.n = [fX, slope, X](double x) { return fX + slope * (x - *X); };
    }
    emit_rows(buffer, m, lo, hi, opt.samples);
  } else {
    const PelletInput in = pellet_problem(inst.payload);
    method_name(inst, opt, kPelletMethods);
    if (X) throw ParseFailure("--fit-point: no approximant is fitted for pellet instances");
    SampleModel m;
    m.f = [&in](double z) { return pellet_q(in, z); };
    emit_rows(buffer, m, lo, hi, opt.samples);
  }
  out << buffer.str();
  return kOk;
}

// ---------------------------------------------------------------------------
// Compare.

std::string outcome(const IterationTrace& t) {
  return t.converged() ? std::to_string(t.steps()) : adapt::to_string(t.termination);
}

int cmd_compare(const Options& opt, std::ostream& out) {
  const Instance inst = load_instance(opt.file, opt.kind);
  const SolverConfig cfg = make_config(inst, opt);
  if (!opt.method.empty()) throw ParseFailure("--method: compare runs every method");

  if (inst.kind == "secular") {
    using namespace adapt::secular;
    const SecularProblem p = secular_problem(inst.payload);
    if (p.size() < 2) throw ParseFailure("payload: interior roots need at least two poles");
    std::size_t first = 0;
    std::size_t last = p.interior_roots();
    if (opt.root) {
      if (*opt.root < 1 || static_cast<std::size_t>(*opt.root) > p.interior_roots()) {
        throw ParseFailure("--root must lie in 1.." + std::to_string(p.interior_roots()));
      }
      first = static_cast<std::size_t>(*opt.root - 1);
      last = first + 1;
    }
    out << "# index bns transformed newton-on-F newton-on-f\n";
    for (std::size_t i = first; i < last; ++i) {
      out << i + 1;
      for (Method m : {Method::Bns, Method::Transformed, Method::NewtonOnF}) {
        try {
          out << ' ' << outcome(solve_root(p, i, m, cfg).native);
        } catch (const Error&) {
          out << " Breakdown";
        }
      }
      // Plain Newton on f from the Bns starting point.
      const ShiftedTask task = make_task(p, i);
      const ScalarFunction f = shifted_function(p, task);
      out << ' ' << outcome(adapt::newton_method(f, bns_initial_point(p, task), cfg)) << '\n';
    }
    return kOk;
  }
  if (inst.kind == "knapsack") {
    using namespace adapt::knapsack;
    const KnapsackDual p = knapsack_problem(inst.payload);
    out << "# index newton-lf newton-f\n";
    IterationTrace convex;
    try {
      convex = solve(p, cfg);
    } catch (const Error& e) {
      throw SolveFailure(e.what());
    }
    const IterationTrace plain = adapt::newton_method(dual_function(p, cfg), initial_point(p), cfg);
    out << "1 " << outcome(convex) << ' ' << outcome(plain) << '\n';
    return kOk;
  }
  if (inst.kind == "trinomial") {
    using namespace adapt::pellet;
    const Trinomial t = trinomial_problem(inst.payload);
    RadiiPair radii;
    try {
      radii = solve_radii(t, cfg);
    } catch (const Error& e) {
      throw SolveFailure(e.what());
    }
    // Newton on F starts from the first inside iterate (F'(z0) = 0).
    out << "# index inside newton-on-F\n";
    const ScalarFunction F = transformed_function(t);
    int index = 1;
    for (const IterationTrace* tr : {&radii.trace_lower, &radii.trace_upper}) {
      out << index++ << ' ' << outcome(*tr) << ' ';
      if (tr->iterates.size() < 2) {
        out << "-\n";
        continue;
      }
      const IterationTrace newton = adapt::newton_method(F, tr->iterates[1].x, cfg);
      if (newton.converged()) {
        out << newton.steps() + 1 << '\n';
      } else {
        out << adapt::to_string(newton.termination) << '\n';
      }
    }
    return kOk;
  }
  throw ParseFailure("compare: pellet radii have a single method");
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::scientific);
  std::string s(buf, ptr);
  // to_chars pads the exponent to two digits.
  const std::size_t e = s.find('e');
  if (e != std::string::npos) {
    std::size_t digits = e + 1;
    if (s[digits] == '+' || s[digits] == '-') {
      if (s[digits] == '+') {
        s.erase(digits, 1);
      } else {
        ++digits;
      }
    }
    while (digits + 1 < s.size() && s[digits] == '0') s.erase(digits, 1);
  }
  return s;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Adaptive-approximation root solvers", "adaptsolve"};
  app.require_subcommand(1);
  Options opt;

  const std::vector<std::string> kinds{"secular", "knapsack", "trinomial", "pellet"};
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("kind", opt.kind, "Problem kind")->required()->check(CLI::IsMember(kinds));
    sub->add_option("file", opt.file, "Instance file (JSON)")->required();
    sub->add_option("--tol", opt.tol, "Residual tolerance (relative to the problem scale)")
        ->check(CLI::NonNegativeNumber);
    sub->add_option("--max-iters", opt.max_iters, "Iteration cap")->check(CLI::PositiveNumber);
    sub->add_option("--root", opt.root, "Root index, starting at 1");
  };

  CLI::App* solve = app.add_subcommand("solve", "Solve an instance and print its roots");
  add_common(solve);
  solve->add_option("--method", opt.method, "Method (secular: bns, transformed, newton-on-F)");
  solve->add_option("--trace", opt.trace, "Write iterates as CSV (iter,x,f_x); _i is appended per root");
  solve->add_flag("--verify", opt.verify, "Compare every root with the bisection oracle");
  solve->add_option("--jobs", opt.jobs, "Threads for secular roots")->check(CLI::PositiveNumber);

  CLI::App* samples = app.add_subcommand("samples", "Print CSV samples of f and its models");
  add_common(samples);
  samples->add_option("--method", opt.method, "Approximant family for g_x");
  samples->add_option("--range", opt.range, "Sample interval lo:hi")->required();
  samples->add_option("--samples", opt.samples, "Number of subintervals (N+1 points)");
  samples->add_option("--fit-point", opt.fit_point, "Point at which g and the tangent are fitted");

  CLI::App* compare = app.add_subcommand("compare", "Iteration counts of every method");
  add_common(compare);
  compare->add_option("--method", opt.method, "Not accepted; compare runs every method");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kParseError;
  }

  try {
    if (solve->parsed()) return cmd_solve(opt, out);
    if (samples->parsed()) return cmd_samples(opt, out);
    return cmd_compare(opt, out);
  } catch (const ParseFailure& e) {
    err << "error: " << e.what() << '\n';
    return kParseError;
  } catch (const SolveFailure& e) {
    err << "error: " << e.what() << '\n';
    return kNotConverged;
  } catch (const Error& e) {
    err << "error: " << adapt::to_string(e.kind()) << ": " << e.what() << '\n';
    return kNotConverged;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kInternal;
  }
}

}  // namespace adaptsolve
