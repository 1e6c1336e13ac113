#pragma once

// Generic machinery shared by every solver in the library: error type,
// scalar function wrapper, one-point steps, the iteration driver, order
// estimation and a cancellation-free quadratic solver.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace adapt {

enum class ErrorKind {
  InvalidArgument,
  Breakdown,
  PreconditionViolated,
  PoleHit,
  DomainError,
  Overflow,
  InsufficientData,
  NoRealRoots,
  DegenerateLinear,
  Infeasible,
  NotApplicable,
  InvalidBracket,
  NoRootFound,
  DegenerateInput,
  MaxIters,
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::Breakdown: return "Breakdown";
    case ErrorKind::PreconditionViolated: return "PreconditionViolated";
    case ErrorKind::PoleHit: return "PoleHit";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::Overflow: return "Overflow";
    case ErrorKind::InsufficientData: return "InsufficientData";
    case ErrorKind::NoRealRoots: return "NoRealRoots";
    case ErrorKind::DegenerateLinear: return "DegenerateLinear";
    case ErrorKind::Infeasible: return "Infeasible";
    case ErrorKind::NotApplicable: return "NotApplicable";
    case ErrorKind::InvalidBracket: return "InvalidBracket";
    case ErrorKind::NoRootFound: return "NoRootFound";
    case ErrorKind::DegenerateInput: return "DegenerateInput";
    case ErrorKind::MaxIters: return "MaxIters";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Neumaier's variant of Kahan summation; also correct when an added term
/// is larger in magnitude than the running sum.
class CompensatedSum {
 public:
  CompensatedSum() = default;
  explicit CompensatedSum(double init) : sum_(init) {}

  CompensatedSum& operator+=(double value) {
    const double t = sum_ + value;
    if (!std::isfinite(t)) {
      // Overflow or an infinite term: the compensation is meaningless.
      sum_ = t;
      compensation_ = 0.0;
      return *this;
    }
    if (std::abs(sum_) >= std::abs(value)) {
      compensation_ += (sum_ - t) + value;
    } else {
      compensation_ += (value - t) + sum_;
    }
    sum_ = t;
    return *this;
  }

  double value() const { return std::isfinite(sum_) ? sum_ + compensation_ : sum_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

/// Open interval (lo, hi); either end may be infinite.
struct Interval {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();

  bool contains(double x) const { return x > lo && x < hi; }
};

using RealMap = std::function<double(double)>;

/// A real function of one variable with optional analytic derivatives.
///
/// `scale`, when set, returns the magnitude against which residuals at x are
/// measured (typically the sum of absolute values of the terms of f). The
/// driver's residual test is |f(x)| <= f_tol * scale(x); without it the
/// test is absolute.
struct ScalarFunction {
  RealMap eval;
  RealMap deriv1;
  RealMap deriv2;
  Interval domain;
  RealMap scale;

  double operator()(double x) const { return eval(x); }
  bool has_deriv1() const { return static_cast<bool>(deriv1); }
  bool has_deriv2() const { return static_cast<bool>(deriv2); }
  double residual_scale(double x) const { return scale ? scale(x) : 1.0; }
};

struct SolverConfig {
  double f_tol = 1e-13;
  double step_tol = 1e-14;
  int max_iters = 500;
  // Tolerance of nested solves; 0 lets the solver derive it from f_tol.
  double inner_tol = 0.0;

  void validate() const {
    if (!(f_tol >= 0.0) || !(step_tol >= 0.0) || !(inner_tol >= 0.0)) {
      throw Error(ErrorKind::InvalidArgument, "tolerances must be non-negative");
    }
    if (f_tol == 0.0 && step_tol == 0.0) {
      throw Error(ErrorKind::InvalidArgument, "f_tol and step_tol cannot both be zero");
    }
    if (max_iters < 1) {
      throw Error(ErrorKind::InvalidArgument, "max_iters must be at least 1");
    }
  }
};

enum class Termination { Converged, MaxIters, LeftDomain, Breakdown };

inline const char* to_string(Termination t) {
  switch (t) {
    case Termination::Converged: return "Converged";
    case Termination::MaxIters: return "MaxIters";
    case Termination::LeftDomain: return "LeftDomain";
    case Termination::Breakdown: return "Breakdown";
  }
  return "Unknown";
}

struct IteratePoint {
  double x;
  double fx;
};

struct IterationTrace {
  std::vector<IteratePoint> iterates;
  Termination termination = Termination::MaxIters;
  std::optional<double> root;
  // The rejected value when termination == LeftDomain.
  std::optional<double> escaped;
  // Diagnostic text when termination == Breakdown.
  std::string message;

  bool converged() const { return termination == Termination::Converged; }
  // Number of steps taken (iterates after the starting point).
  std::size_t steps() const { return iterates.empty() ? 0 : iterates.size() - 1; }

  std::vector<double> xs() const {
    std::vector<double> out;
    out.reserve(iterates.size());
    for (const auto& p : iterates) out.push_back(p.x);
    return out;
  }
};

// ---------------------------------------------------------------------------
// One-point steps. Each is the root of a simple model of f built at x.

/// Root of the tangent line at x.
inline double newton_step(const ScalarFunction& f, double x) {
  if (!f.has_deriv1()) {
    throw Error(ErrorKind::Breakdown, "newton_step: derivative unavailable");
  }
  const double fx = f(x);
  const double d1 = f.deriv1(x);
  if (d1 == 0.0 || !std::isfinite(d1)) {
    throw Error(ErrorKind::Breakdown, "newton_step: zero derivative");
  }
  if (fx == 0.0) return x;
  return x - fx / d1;
}

/// Root of the chord through (x, f(x)) and (y, f(y)).
inline double secant_step(const ScalarFunction& f, double x, double y) {
  if (x == y) {
    throw Error(ErrorKind::Breakdown, "secant_step: coincident points");
  }
  const double fx = f(x);
  const double fy = f(y);
  if (fx == fy) {
    throw Error(ErrorKind::Breakdown, "secant_step: equal function values");
  }
  return x - fx * (x - y) / (fx - fy);
}

/// Root of the osculating hyperbola alpha + beta/(x - gamma) at x.
inline double halley_step(const ScalarFunction& f, double x) {
  if (!f.has_deriv1() || !f.has_deriv2()) {
    throw Error(ErrorKind::Breakdown, "halley_step: derivatives unavailable");
  }
  const double fx = f(x);
  const double d1 = f.deriv1(x);
  const double d2 = f.deriv2(x);
  const double denom = 2.0 * d1 * d1 - fx * d2;
  if (denom == 0.0 || !std::isfinite(denom)) {
    throw Error(ErrorKind::Breakdown, "halley_step: zero denominator");
  }
  if (fx == 0.0) return x;
  return x - 2.0 * fx * d1 / denom;
}

// ---------------------------------------------------------------------------
// Iteration driver.

/// Applies `step(x, fx)` repeatedly from x0.
///
/// Stops with Converged when |f(x_k)| <= f_tol * scale(x_k) or
/// |x_k - x_{k-1}| <= step_tol * (1 + |x_k|). A step that returns the current
/// point exactly counts as convergence and is not recorded twice. An iterate
/// that is non-finite or outside the open domain ends the run with
/// LeftDomain; it is kept in `escaped`, never in `iterates`. Breakdown or
/// PreconditionViolated errors thrown by the stepper are recorded as
/// Breakdown.
template <class Stepper>
IterationTrace iterate(Stepper&& step, const ScalarFunction& f, double x0,
                       const SolverConfig& cfg) {
  cfg.validate();
  if (!f.domain.contains(x0)) {
    throw Error(ErrorKind::PreconditionViolated, "iterate: x0 outside domain");
  }
  IterationTrace trace;
  auto residual_ok = [&](double x, double fx) {
    return std::abs(fx) <= cfg.f_tol * f.residual_scale(x);
  };

  double x = x0;
  double fx = f(x);
  trace.iterates.push_back({x, fx});
  if (residual_ok(x, fx)) {
    trace.termination = Termination::Converged;
    trace.root = x;
    return trace;
  }

  for (int k = 0; k < cfg.max_iters; ++k) {
    double next;
    try {
      next = step(x, fx);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::Breakdown && e.kind() != ErrorKind::PreconditionViolated) {
        throw;
      }
      trace.termination = Termination::Breakdown;
      trace.message = e.what();
      return trace;
    }
    if (!std::isfinite(next) || !f.domain.contains(next)) {
      trace.termination = Termination::LeftDomain;
      trace.escaped = next;
      return trace;
    }
    if (next == x) {
      trace.termination = Termination::Converged;
      trace.root = x;
      return trace;
    }
    const double fnext = f(next);
    trace.iterates.push_back({next, fnext});
    const bool small_step = std::abs(next - x) <= cfg.step_tol * (1.0 + std::abs(next));
    x = next;
    fx = fnext;
    if (residual_ok(x, fx) || small_step) {
      trace.termination = Termination::Converged;
      trace.root = x;
      return trace;
    }
  }
  trace.termination = Termination::MaxIters;
  return trace;
}

inline IterationTrace newton_method(const ScalarFunction& f, double x0, const SolverConfig& cfg) {
  return iterate([&](double x, double) { return newton_step(f, x); }, f, x0, cfg);
}

inline IterationTrace halley_method(const ScalarFunction& f, double x0, const SolverConfig& cfg) {
  return iterate([&](double x, double) { return halley_step(f, x); }, f, x0, cfg);
}

/// Secant iteration seeded with two points; both appear in the trace.
inline IterationTrace secant_method(const ScalarFunction& f, double x0, double x1,
                                    const SolverConfig& cfg) {
  double prev = x0;
  double fprev = f(x0);
  auto step = [&](double x, double fx) {
    if (x == prev || fx == fprev) {
      throw Error(ErrorKind::Breakdown, "secant_step: degenerate chord");
    }
    const double next = x - fx * (x - prev) / (fx - fprev);
    prev = x;
    fprev = fx;
    return next;
  };
  IterationTrace trace = iterate(step, f, x1, cfg);
  trace.iterates.insert(trace.iterates.begin(), {x0, f(x0)});
  return trace;
}

// ---------------------------------------------------------------------------
// Convergence order.

struct OrderEstimate {
  double q = 0.0;
  int samples_used = 0;
};

/// Estimates q in e_{k+1} ~ C e_k^q from the errors of the trace against a
/// reference root. Each sample is log(e_{k+1}/e_k) / log(e_k/e_{k-1}); the
/// median of the samples is reported. Errors at or below 1e-14 |root| are
/// rounding noise and end the usable sequence, as does the first error that
/// fails to decrease.
inline OrderEstimate estimate_order(std::span<const double> errors_in, double reference_root) {
  const double floor = 1e-14 * std::abs(reference_root);
  std::vector<double> errors;
  for (double e : errors_in) {
    e = std::abs(e);
    if (!(e > floor) || !std::isfinite(e)) break;
    if (!errors.empty() && !(e < errors.back())) break;
    errors.push_back(e);
  }
  if (errors.size() < 3) {
    throw Error(ErrorKind::InsufficientData,
                "estimate_order: need at least three decreasing errors above rounding noise");
  }
  std::vector<double> samples;
  for (std::size_t k = 1; k + 1 < errors.size(); ++k) {
    const double num = std::log(errors[k + 1] / errors[k]);
    const double den = std::log(errors[k] / errors[k - 1]);
    samples.push_back(num / den);
  }
  std::sort(samples.begin(), samples.end());
  const std::size_t m = samples.size();
  const double median = m % 2 == 1 ? samples[m / 2] : 0.5 * (samples[m / 2 - 1] + samples[m / 2]);
  if (!(median > 0.0)) {
    throw Error(ErrorKind::InsufficientData, "estimate_order: non-positive order estimate");
  }
  return {median, static_cast<int>(m)};
}

inline OrderEstimate estimate_order(const IterationTrace& trace, double reference_root) {
  std::vector<double> errors;
  errors.reserve(trace.iterates.size());
  for (const auto& p : trace.iterates) errors.push_back(p.x - reference_root);
  return estimate_order(std::span<const double>(errors), reference_root);
}

// ---------------------------------------------------------------------------
// Quadratics.

/// Roots of a2 x^2 + a1 x + a0 in ascending order, computed without
/// subtractive cancellation: the larger-magnitude root comes from
/// -(a1 + sign(a1) sqrt(D)) / 2 and its companion from the product of roots.
/// The discriminant is formed with an fma correction term.
inline std::pair<double, double> solve_quadratic_stable(double a2, double a1, double a0) {
  if (a2 == 0.0) {
    throw Error(ErrorKind::DegenerateLinear, "solve_quadratic_stable: leading coefficient is zero");
  }
  const double w = 4.0 * a2 * a0;
  const double w_err = std::fma(4.0 * a2, a0, -w);
  double disc = std::fma(a1, a1, -w) - w_err;
  if (disc < 0.0) {
    throw Error(ErrorKind::NoRealRoots, "solve_quadratic_stable: negative discriminant");
  }
  const double s = std::sqrt(disc);
  const double q = -0.5 * (a1 + std::copysign(s, a1));
  double r1;
  double r2;
  if (q == 0.0) {
    // a1 == 0 and disc == 0, hence a0 == 0.
    r1 = 0.0;
    r2 = 0.0;
  } else {
    r1 = q / a2;
    r2 = a0 / q;
  }
  if (r1 > r2) std::swap(r1, r2);
  return {r1, r2};
}

}  // namespace adapt
