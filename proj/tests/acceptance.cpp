// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "adapt/adapt.hpp"
#include "cli.hpp"

using namespace adapt;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::string detail;
  // First few violations, for the log.
  std::vector<std::string> notes;

  void require(bool ok, const std::string& what) {
    if (ok) return;
    pass = false;
    if (notes.size() < 5) notes.push_back(what);
  }
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double relerr(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

// ---------------------------------------------------------------------------
// Oracles.

double secular_oracle(const secular::SecularProblem& p, std::size_t i) {
  ScalarFunction f;
  f.eval = [&p](double x) { return secular::eval_f(p, x); };
  const double lo = p.d()[i];
  const double hi = p.d()[i + 1];
  return oracle::bisect(f, {std::nextafter(lo, hi), std::nextafter(hi, lo)}, 0.0).root;
}

double knapsack_oracle(const knapsack::KnapsackDual& p, const SolverConfig& cfg) {
  ScalarFunction f;
  f.eval = [&](double x) { return knapsack::eval_f(p, x, cfg); };
  const double x0 = knapsack::initial_point(p);
  return oracle::bisect(f, {0.5 * x0, std::nextafter(p.gamma(), 0.0)}, 0.0).root;
}

std::pair<double, double> trinomial_oracle(const pellet::Trinomial& t) {
  ScalarFunction f;
  f.eval = [t](double x) { return pellet::eval_f(t, x); };
  const double x0 = std::pow(pellet::applicability(t).z0, 1.0 / t.k);
  double lo = x0;
  while (pellet::eval_f(t, lo) < 0.0) lo *= 0.5;
  double hi = x0;
  while (pellet::eval_f(t, hi) < 0.0) hi *= 2.0;
  return {oracle::bisect(f, {lo, x0}, 0.0).root, oracle::bisect(f, {x0, hi}, 0.0).root};
}

// Roots of F(z) = a z^{n/k} - b z + c, bisected in z.
std::pair<double, double> trinomial_oracle_z(const pellet::Trinomial& t) {
  ScalarFunction F;
  F.eval = [t](double z) { return pellet::eval_F(t, z); };
  const double z0 = pellet::applicability(t).z0;
  double lo = z0;
  while (pellet::eval_F(t, lo) < 0.0) lo *= 0.5;
  double hi = z0;
  while (pellet::eval_F(t, hi) < 0.0) hi *= 2.0;
  return {oracle::bisect(F, {lo, z0}, 0.0).root, oracle::bisect(F, {z0, hi}, 0.0).root};
}

// ---------------------------------------------------------------------------
// Random instances.

secular::SecularProblem random_secular(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> ud(0.0, 10.0);
  std::uniform_real_distribution<double> ub(1e-3, 1.0);
  std::vector<double> d(n);
  std::vector<double> b(n);
  for (;;) {
    for (auto& v : d) v = ud(rng);
    std::sort(d.begin(), d.end());
    if (std::adjacent_find(d.begin(), d.end()) == d.end()) break;
  }
  for (auto& v : b) v = ub(rng);
  return {b, d};
}

knapsack::KnapsackDual random_knapsack(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> un(1, 32);
  std::uniform_real_distribution<double> ua(0.1, 2.0);
  std::uniform_real_distribution<double> ub(0.2, 5.0);
  std::uniform_real_distribution<double> uk(0.05, 3.0);
  const int n = un(rng);
  std::vector<double> a(n);
  std::vector<double> b(n);
  for (int j = 0; j < n; ++j) {
    a[j] = ua(rng);
    b[j] = ub(rng);
  }
  const double limit = knapsack::check_feasible(knapsack::KnapsackDual(a, b, 1.0), SolverConfig{}).limit;
  return {a, b, limit + uk(rng)};
}

pellet::Trinomial random_trinomial(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> ulog(-3.0, 3.0);
  std::uniform_int_distribution<int> un(3, 64);
  for (;;) {
    pellet::Trinomial t{std::pow(10.0, ulog(rng)), std::pow(10.0, ulog(rng)), std::pow(10.0, ulog(rng)), un(rng), 1};
    t.k = std::uniform_int_distribution<int>(1, t.n - 1)(rng);
    // Tangent cases are reported as a double point, and z = x^k must stay
    // representable; the upper root is at most e z0.
    const pellet::Applicability app = pellet::applicability(t);
    if (app.applicable && !app.near_degenerate && app.z0 < 1e300) return t;
  }
}

// Errors from the asymptotic regime: decreasing, above rounding noise and
// within 1% of the root.
std::vector<double> asymptotic_errors(const std::vector<double>& xs, double root) {
  const double floor = 1e-14 * std::abs(root);
  std::vector<double> e;
  for (double x : xs) {
    const double err = std::abs(x - root);
    if (!(err > floor) || (!e.empty() && !(err < e.back()))) break;
    e.push_back(err);
  }
  std::erase_if(e, [&](double err) { return err > 1e-2 * std::abs(root); });
  return e;
}

// Runs to stagnation so the order estimate sees the whole error sequence.
SolverConfig exhaustive() {
  SolverConfig cfg;
  cfg.f_tol = 0.0;
  cfg.step_tol = 1e-300;
  cfg.max_iters = 1000;
  return cfg;
}

// ---------------------------------------------------------------------------
// Criteria.

Outcome criterion1() {
  Outcome o;
  ScalarFunction f;
  f.eval = [](double x) { return x * x - 2.0; };
  f.deriv1 = [](double x) { return 2.0 * x; };
  f.deriv2 = [](double) { return 2.0; };
  const double root = std::sqrt(2.0);
  const SolverConfig cfg = exhaustive();
  const double qn = estimate_order(newton_method(f, 1.5, cfg), root).q;
  const double qs = estimate_order(secant_method(f, 1.5, 1.4, cfg), root).q;
  const double qh = estimate_order(halley_method(f, 1.5, cfg), root).q;
  o.require(qn >= 1.8 && qn <= 2.2, "newton q outside [1.8, 2.2]");
  o.require(qs >= 1.5 && qs <= 1.75, "secant q outside [1.5, 1.75]");
  o.require(qh >= 2.7 && qh <= 3.3, "halley q outside [2.7, 3.3]");
  o.detail = "newton q=" + fmt("%.3f", qn) + " secant q=" + fmt("%.3f", qs) + " halley q=" + fmt("%.3f", qh);
  return o;
}

Outcome criterion2() {
  Outcome o;
  std::mt19937_64 rng(20240601);
  std::uniform_int_distribution<int> un(4, 128);
  const SolverConfig cfg;
  std::size_t roots = 0;
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const secular::SecularProblem p = random_secular(rng, static_cast<std::size_t>(un(rng)));
    for (std::size_t i = 0; i + 1 < p.size(); ++i) {
      const double oracle_root = secular_oracle(p, i);
      const double right = p.d()[i + 1] - p.d()[i];
      for (secular::Method m : {secular::Method::Bns, secular::Method::Transformed}) {
        const std::string tag = std::string(secular::to_string(m)) + " instance " + std::to_string(trial) +
                                " root " + std::to_string(i);
        const secular::SecularRoot r = secular::solve_root(p, i, m, cfg);
        o.require(r.converged(), tag + ": not converged");
        if (!r.converged()) continue;
        const double err = relerr(*r.root(), oracle_root);
        worst = std::max(worst, err);
        o.require(err <= 1e-10, tag + ": oracle rel err " + fmt("%.3g", err));
        for (const auto& pt : r.shifted.iterates) {
          o.require(pt.x > 0.0 && pt.x < right, tag + ": iterate outside (0, d_{i+1})");
        }
        if (m == secular::Method::Bns) {
          const auto xs = r.shifted.xs();
          for (std::size_t k = 1; k < xs.size(); ++k) o.require(xs[k] > xs[k - 1], tag + ": not increasing");
        }
      }
      ++roots;
    }
  }
  o.detail = std::to_string(roots) + " roots x 2 methods, worst rel err " + fmt("%.2e", worst);
  return o;
}

Outcome criterion3() {
  Outcome o;
  std::mt19937_64 rng(31);
  std::uniform_int_distribution<int> un(3, 40);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  double worst_g = INFINITY;
  double worst_G = INFINITY;
  for (int fit = 0; fit < 50; ++fit) {
    const secular::SecularProblem p = random_secular(rng, static_cast<std::size_t>(un(rng)));
    const std::size_t i = std::uniform_int_distribution<std::size_t>(0, p.size() - 2)(rng);
    const secular::ShiftedTask task = secular::make_task(p, i);
    const double xroot = secular_oracle(p, i) - task.origin;

    // Bns: fitted left of the root, compared on (xbar, d_{i+1}).
    const double xbar = xroot * (0.05 + 0.9 * u01(rng));
    const secular::BnsApproximant g = secular::fit_bns(p, task, xbar);
    for (int k = 1; k <= 64; ++k) {
      const double x = xbar + (task.right - xbar) * k / 65.0;
      const secular::SplitValues v = secular::eval_split(p, task, x);
      const double slack = (g(x) - v.f) / v.scale;
      worst_g = std::min(worst_g, slack);
      o.require(slack >= -1e-10, "bns fit " + std::to_string(fit) + ": g < f");
    }

    // Transformed: fitted anywhere right of the pole; the tangent lies below
    // the convex F on both sides of the root.
    const double pole = secular::transformed_pole(task);
    const double zroot = 1.0 / xroot;
    const double zbar = pole + (zroot - pole) * (0.1 + 3.0 * u01(rng));
    const secular::TransformedApproximant G = secular::fit_transformed(p, task, zbar);
    for (int k = 1; k <= 64; ++k) {
      const double z = pole + 3.0 * (zroot - pole) * k / 64.0;
      const secular::TransformedValues v = secular::eval_transformed(p, task, z);
      const double slack = (v.F - G(z)) / v.scale;
      worst_G = std::min(worst_G, slack);
      o.require(slack >= -1e-10, "transformed fit " + std::to_string(fit) + ": G > F");
    }
  }
  o.detail = "50 fits per method, 64 points each; min slack/scale g-f " + fmt("%.2e", worst_g) + ", F-G " +
             fmt("%.2e", worst_G);
  return o;
}

Outcome criterion4() {
  Outcome o;
  const secular::SecularProblem p({2.0 + 1e-6, 1e-10, 1e-3}, {0.0, 1.0, 1.001});
  const secular::ShiftedTask task = secular::make_task(p, 0);
  const double root = secular_oracle(p, 0);
  o.require(1.0 - root <= 1e-6 * 1.0, "root is not within 1e-6 gap of the right pole");
  SolverConfig five;
  five.max_iters = 5;
  const ScalarFunction f = secular::shifted_function(p, task);
  const IterationTrace newton = newton_method(f, secular::bns_initial_point(p, task), five);
  o.require(newton.termination == Termination::LeftDomain, "plain Newton stayed inside (0, d_{i+1})");
  std::string counts;
  for (secular::Method m : {secular::Method::Bns, secular::Method::Transformed}) {
    const secular::SecularRoot r = secular::solve_root(p, 0, m, SolverConfig{});
    o.require(r.converged() && r.native.steps() <= 25, std::string(secular::to_string(m)) + " failed");
    o.require(r.converged() && relerr(*r.root(), root) <= 1e-10, "root mismatch");
    counts += std::string(" ") + secular::to_string(m) + "=" + std::to_string(r.native.steps());
  }
  o.detail = "root " + fmt("%.10g", root) + " (1 - root = " + fmt("%.3g", 1.0 - root) + "); newton " +
             to_string(newton.termination) + " after " + std::to_string(newton.steps()) + " steps;" + counts;
  return o;
}

Outcome criterion5() {
  Outcome o;
  std::mt19937_64 rng(555);
  const SolverConfig cfg;
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const knapsack::KnapsackDual p = random_knapsack(rng);
    const std::string tag = "instance " + std::to_string(trial);
    for (int k = 1; k <= 50; ++k) {
      const double x = p.gamma() * k / 51.0;
      const double h = 1e-3 * std::min(x, p.gamma() - x);
      const double second = knapsack::eval_Lf(p, x + h, cfg).value - 2.0 * knapsack::eval_Lf(p, x, cfg).value +
                            knapsack::eval_Lf(p, x - h, cfg).value;
      o.require(second >= -1e-8 * knapsack::eval_dual(p, x, cfg, false).scale, tag + ": Lf not convex");
    }
    const IterationTrace t = knapsack::solve(p, cfg);
    o.require(t.converged(), tag + ": not converged");
    if (!t.converged()) continue;
    const double oracle_root = knapsack_oracle(p, cfg);
    const double err = relerr(*t.root, oracle_root);
    worst = std::max(worst, err);
    o.require(err <= 1e-10, tag + ": oracle rel err " + fmt("%.3g", err));
    const auto xs = t.xs();
    for (std::size_t k = 1; k < xs.size(); ++k) o.require(xs[k] > xs[k - 1], tag + ": not increasing");
    o.require(knapsack::initial_point(p) <= *t.root, tag + ": x0 right of the root");
  }
  std::uniform_real_distribution<double> u(0.01, 0.99);
  double worst_inv = 0.0;
  for (int k = 0; k < 100; ++k) {
    const double x = u(rng);
    const double d = std::abs(knapsack::h_eval(knapsack::phi_eval(x, cfg).y) - x);
    worst_inv = std::max(worst_inv, d);
    o.require(d <= 1e-12, "inner round trip at " + fmt("%.6f", x));
  }
  o.detail = "100 instances, worst rel err " + fmt("%.2e", worst) + ", worst |h(phi(x)) - x| " + fmt("%.2e", worst_inv);
  return o;
}

Outcome criterion6() {
  Outcome o;
  const SolverConfig cfg;
  const pellet::RadiiPair cubic = pellet::solve_radii({1, 3, 1, 3, 1}, cfg);
  const double r1 = 2.0 * std::cos(80.0 * std::numbers::pi / 180.0);
  const double r2 = 2.0 * std::cos(40.0 * std::numbers::pi / 180.0);
  o.require(std::abs(cubic.r1 - r1) <= 1e-10 && std::abs(cubic.r2 - r2) <= 1e-10, "cubic radii");

  std::mt19937_64 rng(666);
  double worst = 0.0;
  double worst_d = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const pellet::Trinomial t = random_trinomial(rng);
    const std::string tag = "trinomial " + std::to_string(trial);
    const pellet::RadiiPair r = pellet::solve_radii(t, cfg);
    const auto [o1, o2] = trinomial_oracle(t);
    const double err = std::max(relerr(r.r1, o1), relerr(r.r2, o2));
    worst = std::max(worst, err);
    o.require(err <= 1e-10, tag + ": oracle rel err " + fmt("%.3g", err));
    for (const IterationTrace* tr : {&r.trace_lower, &r.trace_upper}) {
      for (const auto& pt : tr->iterates) {
        o.require(pt.fx <= cfg.f_tol * pellet::F_scale(t, pt.x), tag + ": iterate with F(z) > f_tol");
      }
    }
    const double z0 = pellet::applicability(t).z0;
    const double dscale = t.ratio() * t.a * pellet::power_ratio(z0, t.n, t.k) / z0 + t.b;
    const double d = std::abs(pellet::eval_dF(t, z0)) / dscale;
    worst_d = std::max(worst_d, d);
    o.require(d <= 1e-10, tag + ": F'(z0) != 0");
  }
  o.detail = "cubic (" + fmt("%.12f", cubic.r1) + ", " + fmt("%.12f", cubic.r2) + "); 100 random, worst rel err " +
             fmt("%.2e", worst) + ", worst |F'(z0)|/scale " + fmt("%.2e", worst_d);
  return o;
}

Outcome criterion7() {
  Outcome o;
  const SolverConfig cfg = exhaustive();
  // Traces that reach rounding noise within two steps of entering the
  // asymptotic regime carry no measurable order and are only counted.
  struct Tally {
    const char* name;
    int measured = 0;
    int too_fast = 0;
    double min_q = INFINITY;
  };
  std::vector<Tally> tally{{"bns"}, {"transformed"}, {"knapsack"}, {"pellet"}};
  constexpr int kWanted = 10;
  constexpr int kMaxDraws = 500;
  auto record = [&](std::size_t slot, const std::vector<double>& xs, double root, const std::string& tag) {
    Tally& t = tally[slot];
    if (t.measured >= kWanted) return;
    const std::vector<double> errs = asymptotic_errors(xs, root);
    if (errs.size() < 3) {
      ++t.too_fast;
      return;
    }
    ++t.measured;
    const double q = estimate_order(errs, root).q;
    t.min_q = std::min(t.min_q, q);
    if (q < 1.7) {
      std::string seq;
      for (double e : errs) seq += " " + fmt("%.2e", e / std::abs(root));
      o.require(false, tag + ": q = " + fmt("%.3f", q) + ", rel errors" + seq);
    }
  };

  // Secular: roots at least 10% of the gap away from both poles, started
  // near the left pole.
  std::mt19937_64 rng(77);
  for (int draw = 0; draw < kMaxDraws && (tally[0].measured < kWanted || tally[1].measured < kWanted); ++draw) {
    const secular::SecularProblem p = random_secular(rng, 8);
    for (std::size_t i = 0; i + 1 < p.size(); ++i) {
      const double lo = p.d()[i];
      const double gap = p.d()[i + 1] - lo;
      const double root = secular_oracle(p, i);
      const double pos = (root - lo) / gap;
      if (pos < 0.1 || pos > 0.9) continue;
      const double start = lo + 0.02 * gap;
      const std::string tag = "secular draw " + std::to_string(draw) + " root " + std::to_string(i);
      record(0, secular::solve_root(p, i, secular::Method::Bns, cfg, start).unshifted().xs(), root, tag + " bns");
      record(1, secular::solve_root(p, i, secular::Method::Transformed, cfg, start).unshifted().xs(), root,
             tag + " transformed");
    }
  }

  // Knapsack: roots at most 90% of the way to gamma.
  for (int draw = 0; draw < kMaxDraws && tally[2].measured < kWanted; ++draw) {
    const knapsack::KnapsackDual p = random_knapsack(rng);
    const double root = knapsack_oracle(p, SolverConfig{});
    if (root > 0.9 * p.gamma()) continue;
    record(2, knapsack::solve(p, cfg).xs(), root, "knapsack draw " + std::to_string(draw));
  }

  // Pellet: both branches in z, radii at least 10% apart. Driven directly:
  // with f_tol = 0 the run ends in a step refused at F(z) >= 0, which
  // solve_radii would report as Breakdown.
  for (int draw = 0; draw < kMaxDraws && tally[3].measured < kWanted; ++draw) {
    const pellet::Trinomial t = random_trinomial(rng);
    const auto [o1, o2] = trinomial_oracle_z(t);
    if (std::pow(o2 / o1, 1.0 / t.k) < 1.1) continue;
    const ScalarFunction F = pellet::transformed_function(t);
    const double z0 = pellet::applicability(t).z0;
    for (pellet::Branch br : {pellet::Branch::Lower, pellet::Branch::Upper}) {
      const IterationTrace tr =
          iterate([&](double z, double) { return pellet::trinomial_step(t, z, br); }, F, z0, cfg);
      const bool lower = br == pellet::Branch::Lower;
      record(3, tr.xs(), lower ? o1 : o2, std::string("pellet draw ") + std::to_string(draw) + (lower ? " lower" : " upper"));
    }
  }

  for (const Tally& t : tally) {
    o.require(t.measured >= kWanted, std::string(t.name) + ": only " + std::to_string(t.measured) + " measurable traces");
    o.detail += std::string(t.name) + " min q=" + fmt("%.3f", t.min_q) + " (" + std::to_string(t.measured) +
                " traces, " + std::to_string(t.too_fast) + " too fast) ";
  }
  return o;
}

Outcome criterion8(const std::string& fixtures) {
  Outcome o;
  const auto dir = std::filesystem::temp_directory_path() / "adapt_acceptance";
  std::filesystem::create_directories(dir);
  const std::vector<std::pair<std::string, std::string>> cases{
      {"secular", "secular_n2.json"}, {"secular", "secular_n6.json"}, {"knapsack", "knapsack.json"},
      {"trinomial", "trinomial.json"}, {"pellet", "pellet.json"}};
  double worst = 0.0;
  for (const auto& [kind, file] : cases) {
    std::vector<std::string> args{"solve", kind, fixtures + "/" + file, "--verify"};
    const std::string trace = (dir / (file + ".csv")).string();
    if (kind == "secular") {
      args.insert(args.end(), {"--method", "bns", "--trace", trace});
    }
    std::ostringstream out;
    std::ostringstream err;
    const int code = adaptsolve::run(args, out, err);
    o.require(code == 0, file + ": exit " + std::to_string(code) + " " + err.str());
    std::istringstream lines(out.str());
    std::string line;
    int rows = 0;
    while (std::getline(lines, line)) {
      if (line.empty() || line[0] == '#') continue;
      ++rows;
      const double rel = std::stod(line.substr(line.find_last_of(' ') + 1));
      worst = std::max(worst, rel);
      o.require(rel <= 1e-10, file + ": oracle rel err " + fmt("%.3g", rel));
    }
    o.require(rows > 0, file + ": no root lines");
    if (kind == "secular") {
      // One file per root when there are several.
      std::vector<std::string> paths;
      for (int i = 1; i <= rows; ++i) {
        paths.push_back(rows == 1 ? trace : (dir / (file + "_" + std::to_string(i) + ".csv")).string());
      }
      for (const std::string& path : paths) {
        std::ifstream in(path);
        o.require(static_cast<bool>(in), path + ": missing");
        std::string header;
        std::getline(in, header);
        o.require(header == "iter,x,f_x", path + ": bad header");
        double prev = -INFINITY;
        while (std::getline(in, line)) {
          const std::size_t a = line.find(',');
          const std::size_t b = line.find(',', a + 1);
          const double x = std::stod(line.substr(a + 1, b - a - 1));
          o.require(x > prev, path + ": x column not increasing");
          prev = x;
        }
      }
    }
  }
  o.detail = std::to_string(cases.size()) + " fixtures, worst oracle rel err " + fmt("%.2e", worst);
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  const std::string fixtures = argc > 1 ? argv[1] : ADAPT_FIXTURE_DIR;
  struct Criterion {
    int id;
    const char* name;
    double budget_s;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "classic-method orders", 0.1, criterion1},
      {2, "secular correctness", 5.0, criterion2},
      {3, "domination inequalities", 1e9, criterion3},
      {4, "Newton-failure witness", 0.1, criterion4},
      {5, "knapsack", 5.0, criterion5},
      {6, "Pellet radii", 1e9, criterion6},
      {7, "convergence orders >= 1.7", 1e9, criterion7},
      {8, "end-to-end CLI", 1e9, [&] { return criterion8(fixtures); }},
  };
  const auto suite_start = Clock::now();
  int failures = 0;
  for (const Criterion& c : criteria) {
    const auto start = Clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.notes.push_back(std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(Clock::now() - start).count();
    if (c.budget_s < 1e9 && secs >= c.budget_s) {
      o.pass = false;
      o.notes.push_back("runtime " + fmt("%.3f", secs) + " s over budget " + fmt("%.1f", c.budget_s) + " s");
    }
    std::printf("%s criterion %d (%s): %s [%.3f s]\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), secs);
    for (const std::string& n : o.notes) std::printf("    %s\n", n.c_str());
    failures += o.pass ? 0 : 1;
  }
  const double total = std::chrono::duration<double>(Clock::now() - suite_start).count();
  std::printf("acceptance: %d/%zu criteria passed in %.3f s\n", static_cast<int>(criteria.size()) - failures,
              criteria.size(), total);
  return failures == 0 ? 0 : 1;
}
