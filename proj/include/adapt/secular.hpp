#pragma once

// Interior roots of the secular function
//
//   f(x) = 1 + sum_j b_j / (d_j - x),   b_j > 0,  d_1 < ... < d_n,
//
// which has exactly one root in each interval (d_k, d_{k+1}). Two rational
// methods are provided, both with monotone iterates confined to the interval:
//
//  * Bns: the poles left of the interval are modelled by alpha/(beta - x) and
//    those right of it by gamma + delta/(d_{k+1} - x), each matched in value
//    and slope. The model dominates f, so from a point with f < 0 its root
//    lands between the point and the root of f.
//  * Transformed: with x = 1/z the function F(z) = f(1/z) is convex and
//    decreasing on (1/d_{k+1}, inf). F minus its nearest pole term is
//    replaced by its tangent; the model is dominated by F.
//
// Everything is computed with the origin moved to d_k. Root indices are
// zero-based: root k lies in (d[k], d[k+1]).

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "adapt/core.hpp"

namespace adapt::secular {

class SecularProblem {
 public:
  SecularProblem(std::vector<double> b, std::vector<double> d) : b_(std::move(b)), d_(std::move(d)) {
    if (b_.size() != d_.size()) {
      throw Error(ErrorKind::InvalidArgument, "b and d must have the same length");
    }
    if (b_.empty()) {
      throw Error(ErrorKind::InvalidArgument, "secular problem needs at least one pole");
    }
    for (std::size_t j = 0; j < b_.size(); ++j) {
      if (!(b_[j] > 0.0) || !std::isfinite(b_[j])) {
        throw Error(ErrorKind::InvalidArgument,
                    "b[j] must be positive (b[" + std::to_string(j) + "] = " +
                        std::to_string(b_[j]) + ")");
      }
      if (!std::isfinite(d_[j])) {
        throw Error(ErrorKind::InvalidArgument, "d[j] must be finite (j = " + std::to_string(j) + ")");
      }
      if (j > 0 && !(d_[j] > d_[j - 1])) {
        throw Error(ErrorKind::InvalidArgument,
                    "d must be strictly increasing (d[" + std::to_string(j - 1) + "] >= d[" +
                        std::to_string(j) + "])");
      }
    }
  }

  const std::vector<double>& b() const { return b_; }
  const std::vector<double>& d() const { return d_; }
  std::size_t size() const { return b_.size(); }
  std::size_t interior_roots() const { return b_.size() - 1; }

 private:
  std::vector<double> b_;
  std::vector<double> d_;
};

/// f at x in the caller's frame.
inline double eval_f(const SecularProblem& p, double x) {
  CompensatedSum sum(1.0);
  for (std::size_t j = 0; j < p.size(); ++j) {
    const double gap = p.d()[j] - x;
    if (gap == 0.0) {
      throw Error(ErrorKind::PoleHit, "secular eval_f: x coincides with pole d[" + std::to_string(j) + "]");
    }
    sum += p.b()[j] / gap;
  }
  return sum.value();
}

/// The frame with origin at d[index]: poles shifted[j] = d[j] - d[index], so
/// shifted[index] == 0 and the target interval is (0, right).
struct ShiftedTask {
  std::size_t index;
  double origin;
  std::vector<double> shifted;
  double right;
};

inline ShiftedTask make_task(const SecularProblem& p, std::size_t index) {
  if (p.size() < 2) {
    throw Error(ErrorKind::PreconditionViolated, "interior roots need at least two poles");
  }
  if (index + 1 >= p.size()) {
    throw Error(ErrorKind::PreconditionViolated,
                "root index " + std::to_string(index) + " is not interior (the root beyond the last pole is not handled)");
  }
  ShiftedTask task{index, p.d()[index], {}, 0.0};
  task.shifted.reserve(p.size());
  for (double dj : p.d()) task.shifted.push_back(dj - task.origin);
  task.shifted[index] = 0.0;
  task.right = task.shifted[index + 1];
  return task;
}

// ---------------------------------------------------------------------------
// Shifted-frame evaluation, split at the interval: f = 1 + f1 + f2 with f1
// over poles j <= index and f2 over poles j > index.

struct SplitValues {
  double f;
  double f1;
  double df1;
  double f2;
  double df2;
  double scale;  // 1 + sum |b_j / (d_j - x)|
};

inline SplitValues eval_split(const SecularProblem& p, const ShiftedTask& task, double x) {
  CompensatedSum f1, df1, f2, df2, total(1.0);
  double scale = 1.0;
  for (std::size_t j = 0; j < p.size(); ++j) {
    const double gap = task.shifted[j] - x;
    if (gap == 0.0) {
      throw Error(ErrorKind::PoleHit, "secular: x coincides with pole d[" + std::to_string(j) + "]");
    }
    const double term = p.b()[j] / gap;
    const double dterm = term / gap;
    if (j <= task.index) {
      f1 += term;
      df1 += dterm;
    } else {
      f2 += term;
      df2 += dterm;
    }
    total += term;
    scale += std::abs(term);
  }
  return {total.value(), f1.value(), df1.value(), f2.value(), df2.value(), scale};
}

/// f in the shifted frame, on (0, right), with both derivatives.
inline ScalarFunction shifted_function(const SecularProblem& p, const ShiftedTask& task) {
  ScalarFunction fn;
  fn.eval = [&p, &task](double x) { return eval_split(p, task, x).f; };
  fn.deriv1 = [&p, &task](double x) {
    CompensatedSum s;
    for (std::size_t j = 0; j < p.size(); ++j) {
      const double gap = task.shifted[j] - x;
      s += p.b()[j] / (gap * gap);
    }
    return s.value();
  };
  fn.deriv2 = [&p, &task](double x) {
    CompensatedSum s;
    for (std::size_t j = 0; j < p.size(); ++j) {
      const double gap = task.shifted[j] - x;
      s += 2.0 * p.b()[j] / (gap * gap * gap);
    }
    return s.value();
  };
  fn.scale = [&p, &task](double x) { return eval_split(p, task, x).scale; };
  fn.domain = {0.0, task.right};
  return fn;
}

// ---------------------------------------------------------------------------
// Bns method.

/// g(x) = 1 + alpha/(beta - x) + gamma + delta/(right_pole - x).
struct BnsApproximant {
  double alpha;
  double beta;
  double gamma;
  double delta;
  double right_pole;

  double operator()(double x) const {
    return 1.0 + alpha / (beta - x) + gamma + delta / (right_pole - x);
  }
};

inline BnsApproximant fit_bns(const SecularProblem& p, const ShiftedTask& task, double xbar) {
  if (!(xbar > 0.0 && xbar < task.right)) {
    throw Error(ErrorKind::PreconditionViolated, "fit_bns: xbar outside (0, right)");
  }
  const SplitValues v = eval_split(p, task, xbar);
  // beta = sum_{j<=k} b_j d_j / (d_j - xbar)^2 / f1'(xbar); every d_j <= 0.
  CompensatedSum weighted;
  for (std::size_t j = 0; j < task.index; ++j) {
    const double gap = task.shifted[j] - xbar;
    weighted += p.b()[j] * task.shifted[j] / (gap * gap);
  }
  const double beta = weighted.value() / v.df1;
  const double alpha = v.f1 * v.f1 / v.df1;
  const double to_pole = task.right - xbar;
  const double delta = to_pole * to_pole * v.df2;
  const double gamma = v.f2 - to_pole * v.df2;
  return {alpha, beta, gamma, delta, task.right};
}

/// One Bns step from xbar (shifted frame, f(xbar) < 0). Returns the root of
/// the fitted model inside (xbar, right).
inline double bns_step(const SecularProblem& p, const ShiftedTask& task, double xbar) {
  if (!(xbar > 0.0 && xbar < task.right)) {
    throw Error(ErrorKind::PreconditionViolated, "bns_step: xbar outside (0, right)");
  }
  const SplitValues v = eval_split(p, task, xbar);
  if (!(v.f < 0.0)) {
    throw Error(ErrorKind::PreconditionViolated, "bns_step: requires f(xbar) < 0");
  }
  // Solve for the correction t = x - xbar. With u = beta - xbar and
  // w = right - xbar the model's numerator is
  //   (1 + gamma)(u - t)(w - t) + alpha (w - t) + delta (u - t),
  // whose constant term is u w f(xbar).
  const double u = v.f1 / v.df1;
  const double w = task.right - xbar;
  const double one_plus_gamma = 1.0 + (v.f2 - w * v.df2);
  const double a2 = one_plus_gamma;
  const double a1 = -v.f * (u + w) + w * (v.f1 + u * v.df2);
  const double a0 = u * w * v.f;

  std::vector<double> candidates;
  if (a2 == 0.0) {
    if (a1 == 0.0) throw Error(ErrorKind::Breakdown, "bns_step: degenerate model");
    candidates.push_back(-a0 / a1);
  } else {
    try {
      const auto [r1, r2] = solve_quadratic_stable(a2, a1, a0);
      candidates = {r1, r2};
    } catch (const Error& e) {
      throw Error(ErrorKind::Breakdown, std::string("bns_step: ") + e.what());
    }
  }
  std::vector<double> inside;
  for (double t : candidates) {
    if (t >= 0.0 && t < w) inside.push_back(t);
  }
  if (inside.size() == 2 && inside[0] != inside[1]) {
    throw Error(ErrorKind::Breakdown, "bns_step: both model roots inside the interval");
  }
  if (inside.empty()) {
    throw Error(ErrorKind::Breakdown, "bns_step: model root outside the interval");
  }
  return xbar + inside.front();
}

/// Root in (0, right) of the increasing bound
///   c0 - b_k/x + b_{k+1}/(right - x),  c0 = 1 + sum_{j != k,k+1} b_j/(d_j - right),
/// which dominates f; hence f(x0) <= 0.
inline double bns_initial_point(const SecularProblem& p, const ShiftedTask& task) {
  const std::size_t k = task.index;
  const double R = task.right;
  CompensatedSum c(1.0);
  for (std::size_t j = 0; j < p.size(); ++j) {
    if (j == k || j == k + 1) continue;
    c += p.b()[j] / (task.shifted[j] - R);
  }
  const double c0 = c.value();
  const double bk = p.b()[k];
  const double bk1 = p.b()[k + 1];
  // c0 x (R - x) - b_k (R - x) + b_{k+1} x = 0
  if (c0 == 0.0) return bk * R / (bk + bk1);
  std::pair<double, double> roots;
  try {
    roots = solve_quadratic_stable(-c0, c0 * R + bk + bk1, -bk * R);
  } catch (const Error& e) {
    throw Error(ErrorKind::Breakdown, std::string("bns_initial_point: ") + e.what());
  }
  const bool first = roots.first > 0.0 && roots.first < R;
  const bool second = roots.second > 0.0 && roots.second < R;
  if (first && second && roots.first != roots.second) {
    throw Error(ErrorKind::Breakdown, "bns_initial_point: both roots inside the interval");
  }
  if (first) return roots.first;
  if (second) return roots.second;
  throw Error(ErrorKind::Breakdown, "bns_initial_point: no root inside the interval");
}

// ---------------------------------------------------------------------------
// Transformed method, in z = 1/x (shifted frame). With w_j = b_j/d_j^2 and
// p_j = 1/d_j:
//
//   F(z) = 1 + sum_{j != k} b_j/d_j - b_k z + sum_{j != k} w_j/(z - p_j).
//
// The retained pole is p = 1/d_{k+1}; F1 is F without that pole term.

struct TransformedValues {
  double F;
  double F1;
  double dF;
  double dF1;
  double scale;
};

inline double transformed_pole(const ShiftedTask& task) { return 1.0 / task.right; }

inline TransformedValues eval_transformed(const SecularProblem& p, const ShiftedTask& task, double z) {
  const std::size_t k = task.index;
  CompensatedSum F1(1.0);
  CompensatedSum dF1(-p.b()[k]);
  double scale = 1.0 + p.b()[k] * std::abs(z);
  F1 += -p.b()[k] * z;
  double retained = 0.0;
  double dretained = 0.0;
  for (std::size_t j = 0; j < p.size(); ++j) {
    if (j == k) continue;
    const double dj = task.shifted[j];
    const double weight = p.b()[j] / (dj * dj);
    const double gap = z - 1.0 / dj;
    if (gap == 0.0) {
      throw Error(ErrorKind::PoleHit, "secular eval_F: z coincides with pole 1/d[" + std::to_string(j) + "]");
    }
    const double constant = p.b()[j] / dj;
    const double term = weight / gap;
    const double dterm = -term / gap;
    scale += std::abs(constant) + std::abs(term);
    F1 += constant;
    if (j == k + 1) {
      retained = term;
      dretained = dterm;
    } else {
      F1 += term;
      dF1 += dterm;
    }
  }
  CompensatedSum F(F1.value());
  F += retained;
  return {F.value(), F1.value(), dF1.value() + dretained, dF1.value(), scale};
}

/// F(z) = f(1/z) in the shifted frame, from the expanded form.
inline double eval_F(const SecularProblem& p, const ShiftedTask& task, double z) {
  return eval_transformed(p, task, z).F;
}

inline ScalarFunction transformed_function(const SecularProblem& p, const ShiftedTask& task) {
  ScalarFunction fn;
  fn.eval = [&p, &task](double z) { return eval_transformed(p, task, z).F; };
  fn.deriv1 = [&p, &task](double z) { return eval_transformed(p, task, z).dF; };
  fn.deriv2 = [&p, &task](double z) {
    CompensatedSum s;
    for (std::size_t j = 0; j < p.size(); ++j) {
      if (j == task.index) continue;
      const double dj = task.shifted[j];
      const double gap = z - 1.0 / dj;
      s += 2.0 * p.b()[j] / (dj * dj) / (gap * gap * gap);
    }
    return s.value();
  };
  fn.scale = [&p, &task](double z) { return eval_transformed(p, task, z).scale; };
  fn.domain = {transformed_pole(task), std::numeric_limits<double>::infinity()};
  return fn;
}

/// G(z) = a_lin + b_lin z + pole_weight / (z - pole_loc).
struct TransformedApproximant {
  double a_lin;
  double b_lin;
  double pole_weight;
  double pole_loc;

  double operator()(double z) const { return a_lin + b_lin * z + pole_weight / (z - pole_loc); }
};

inline TransformedApproximant fit_transformed(const SecularProblem& p, const ShiftedTask& task,
                                              double zbar) {
  const double pole = transformed_pole(task);
  if (!(zbar > pole)) {
    throw Error(ErrorKind::PreconditionViolated, "fit_transformed: zbar must exceed 1/d_{k+1}");
  }
  const TransformedValues v = eval_transformed(p, task, zbar);
  const double r = task.right;
  return {v.F1 - v.dF1 * zbar, v.dF1, p.b()[task.index + 1] / (r * r), pole};
}

/// One transformed step from zbar > 1/d_{k+1}; returns the root of G in
/// (1/d_{k+1}, inf).
inline double transformed_step(const SecularProblem& p, const ShiftedTask& task, double zbar) {
  const double pole = transformed_pole(task);
  if (!(zbar > pole)) {
    throw Error(ErrorKind::PreconditionViolated, "transformed_step: zbar must exceed 1/d_{k+1}");
  }
  const TransformedValues v = eval_transformed(p, task, zbar);
  const double slope = v.dF1;
  if (!(slope < 0.0)) {
    throw Error(ErrorKind::Breakdown, "transformed_step: tangent slope is not negative");
  }
  // In s = z - zbar with e = zbar - pole:
  //   (e + s)(F1 + slope s) + weight = slope s^2 + (F1 + slope e) s + e F.
  const double e = zbar - pole;
  std::pair<double, double> roots;
  try {
    roots = solve_quadratic_stable(slope, v.F1 + slope * e, e * v.F);
  } catch (const Error& err) {
    throw Error(ErrorKind::Breakdown, std::string("transformed_step: ") + err.what());
  }
  const bool first = roots.first > -e;
  const bool second = roots.second > -e;
  if (first && second && roots.first != roots.second) {
    throw Error(ErrorKind::Breakdown, "transformed_step: both model roots right of the pole");
  }
  if (!first && !second) {
    throw Error(ErrorKind::Breakdown, "transformed_step: no model root right of the pole");
  }
  return zbar + (second ? roots.second : roots.first);
}

struct TransformedBrackets {
  double lower;  // root of a function dominated by F: lower <= root of F
  double upper;  // root of a function dominating F: upper >= root of F
};

/// Roots of c - b_k z + w/(z - pole) for the two constants c; each is the
/// positive root s of -b_k s^2 + (c - b_k pole) s + w in s = z - pole.
inline TransformedBrackets transformed_brackets(const SecularProblem& p, const ShiftedTask& task) {
  const std::size_t k = task.index;
  const double pole = transformed_pole(task);
  const double r = task.right;
  const double weight = p.b()[k + 1] / (r * r);
  CompensatedSum lower_c(1.0);
  for (std::size_t j = 0; j < p.size(); ++j) {
    if (j != k) lower_c += p.b()[j] / task.shifted[j];
  }
  CompensatedSum upper_c(lower_c.value());
  for (std::size_t j = 0; j < p.size(); ++j) {
    if (j == k || j == k + 1) continue;
    const double dj = task.shifted[j];
    upper_c += p.b()[j] / (dj * dj) / (pole - 1.0 / dj);
  }
  const double bk = p.b()[k];
  auto solve = [&](double c) {
    try {
      const auto [s1, s2] = solve_quadratic_stable(-bk, c - bk * pole, weight);
      const double s = std::max(s1, s2);
      if (!(s > 0.0)) throw Error(ErrorKind::Breakdown, "no root right of the pole");
      return pole + s;
    } catch (const Error& e) {
      throw Error(ErrorKind::Breakdown, std::string("transformed_brackets: ") + e.what());
    }
  };
  return {solve(lower_c.value()), solve(upper_c.value())};
}

inline double transformed_initial_point(const SecularProblem& p, const ShiftedTask& task) {
  const TransformedBrackets br = transformed_brackets(p, task);
  return 0.5 * (br.lower + br.upper);
}

// ---------------------------------------------------------------------------
// Drivers.

enum class Method { Bns, Transformed, NewtonOnF };

inline const char* to_string(Method m) {
  switch (m) {
    case Method::Bns: return "bns";
    case Method::Transformed: return "transformed";
    case Method::NewtonOnF: return "newton-on-F";
  }
  return "unknown";
}

struct SecularRoot {
  std::size_t index = 0;
  Method method = Method::Bns;
  double origin = 0.0;
  // Iterates in the method's own variable: shifted x for Bns, z = 1/x for
  // the transformed methods.
  IterationTrace native;
  // The same iterates as shifted x with f values.
  IterationTrace shifted;

  bool converged() const { return native.converged(); }
  std::optional<double> root() const {
    if (!shifted.root) return std::nullopt;
    return origin + *shifted.root;
  }
  /// Iterates in the caller's frame.
  IterationTrace unshifted() const {
    IterationTrace t = shifted;
    for (auto& pt : t.iterates) pt.x += origin;
    if (t.root) t.root = origin + *t.root;
    if (t.escaped) t.escaped = origin + *t.escaped;
    return t;
  }
};

namespace detail {

inline IterationTrace to_shifted(const IterationTrace& z_trace) {
  IterationTrace t = z_trace;
  for (auto& pt : t.iterates) pt.x = 1.0 / pt.x;
  if (t.root) t.root = 1.0 / *t.root;
  if (t.escaped) t.escaped = 1.0 / *t.escaped;
  return t;
}

// Moves x0 left until f(x0) < 0 unless x0 already satisfies the residual test.
inline double ensure_negative(const ScalarFunction& f, double x0, double right, const SolverConfig& cfg) {
  double nudge = 1e-12 * right;
  for (int attempt = 0; attempt < 64; ++attempt) {
    const double fx = f(x0);
    if (fx < 0.0 || std::abs(fx) <= cfg.f_tol * f.residual_scale(x0)) return x0;
    double moved = x0 - nudge;
    if (!(moved > 0.0)) moved = 0.5 * x0;
    x0 = moved;
    nudge *= 2.0;
  }
  return x0;
}

}  // namespace detail

/// Solves for root `index` (zero-based). `start`, when given, replaces the
/// derived starting point; it is in the caller's frame and must lie in
/// (d[index], d[index+1]).
inline SecularRoot solve_root(const SecularProblem& p, std::size_t index, Method method,
                              const SolverConfig& cfg, std::optional<double> start = std::nullopt) {
  const ShiftedTask task = make_task(p, index);
  SecularRoot out;
  out.index = index;
  out.method = method;
  out.origin = task.origin;
  if (start && !(*start > p.d()[index] && *start < p.d()[index + 1])) {
    throw Error(ErrorKind::PreconditionViolated, "solve_root: start outside the root's interval");
  }

  if (method == Method::Bns) {
    const ScalarFunction f = shifted_function(p, task);
    double x0 = start ? *start - task.origin : bns_initial_point(p, task);
    x0 = detail::ensure_negative(f, x0, task.right, cfg);
    out.native = iterate([&](double x, double) { return bns_step(p, task, x); }, f, x0, cfg);
    out.shifted = out.native;
  } else {
    const ScalarFunction F = transformed_function(p, task);
    const double z0 = start ? 1.0 / (*start - task.origin) : transformed_initial_point(p, task);
    if (method == Method::Transformed) {
      out.native = iterate([&](double z, double) { return transformed_step(p, task, z); }, F, z0, cfg);
    } else {
      out.native = newton_method(F, z0, cfg);
    }
    out.shifted = detail::to_shifted(out.native);
  }

  // The root lies strictly inside the interval; keep it there after
  // un-shifting.
  if (out.shifted.root) {
    const double lo = p.d()[index];
    const double hi = p.d()[index + 1];
    double x = task.origin + *out.shifted.root;
    if (x <= lo) x = std::nextafter(lo, hi);
    if (x >= hi) x = std::nextafter(hi, lo);
    out.shifted.root = x - task.origin;
  }
  return out;
}

/// All n-1 interior roots, ordered by index. With jobs > 1 independent roots
/// are solved on that many threads.
inline std::vector<SecularRoot> solve_all_roots(const SecularProblem& p, Method method,
                                                const SolverConfig& cfg, unsigned jobs = 1) {
  if (p.size() < 2) {
    throw Error(ErrorKind::PreconditionViolated, "interior roots need at least two poles");
  }
  cfg.validate();
  const std::size_t count = p.interior_roots();
  std::vector<SecularRoot> roots(count);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        roots[i] = solve_root(p, i, method, cfg);
      } catch (const Error& e) {
        roots[i].index = i;
        roots[i].method = method;
        roots[i].origin = p.d()[i];
        roots[i].native.termination = Termination::Breakdown;
        roots[i].native.message = e.what();
        roots[i].shifted = roots[i].native;
      }
    }
  };
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(count)));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(jobs);
    for (unsigned t = 0; t < jobs; ++t) pool.emplace_back(worker);
  }
  return roots;
}

}  // namespace adapt::secular
