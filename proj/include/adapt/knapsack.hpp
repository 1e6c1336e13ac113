#pragma once

// The knapsack dual equation
//
//   f(x) = sum_j alpha_j phi(beta_j x) - K = 0   on (0, gamma),
//   gamma = min_j 1/beta_j,
//
// where phi is the inverse of h(y) = 1 - (1 + 1/y) exp(-1/y). f is
// decreasing but neither convex nor concave; multiplying by
// L(x) = 1 - x/gamma makes L f convex on (0, gamma) with the same root there,
// so Newton on L f from a point left of the root climbs monotonically to it.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "adapt/core.hpp"

namespace adapt::knapsack {

namespace detail {

// 1 - (1 + z) exp(-z) for z >= 0, accurate for small z.
inline double one_minus_tail(double z) {
  if (z < 1.0) {
    // sum_{m>=2} (-1)^m (m - 1) z^m / m!
    double term = z * z / 2.0;  // z^m / m! at m = 2
    double sum = term;
    for (int m = 3; m < 40; ++m) {
      term *= z / m;
      const double add = ((m % 2 == 0) ? 1.0 : -1.0) * (m - 1) * term;
      sum += add;
      if (std::abs(add) <= 1e-18 * sum) break;
    }
    return sum;
  }
  return -std::expm1(-z) - z * std::exp(-z);
}

// (1 + z) exp(-z), the complement of one_minus_tail.
inline double tail(double z) { return (1.0 + z) * std::exp(-z); }

}  // namespace detail

/// h(x) = 1 - (1 + 1/x) exp(-1/x) on (0, inf); decreasing from 1 to 0.
inline double h_eval(double x) {
  if (!(x > 0.0)) {
    throw Error(ErrorKind::DomainError, "h_eval: x must be positive");
  }
  return detail::one_minus_tail(1.0 / x);
}

/// Derivative of h: -x^-3 exp(-1/x).
inline double h_derivative(double x) {
  if (!(x > 0.0)) {
    throw Error(ErrorKind::DomainError, "h_derivative: x must be positive");
  }
  return -std::exp(-1.0 / x) / (x * x * x);
}

struct PhiValue {
  double y;
  double residual;  // |h(y) - x|
};

/// phi(x) = h^{-1}(x). `complement` must equal 1 - x; callers that can form
/// it without cancellation (x = beta t near 1) pass it in.
///
/// With y = 1/z the equation h(y) = x reads p(z) = 1 - (1 + z) e^{-z} - x = 0,
/// increasing in z. Halley runs from z = 1 inside a sign bracket; a step that
/// leaves the bracket is replaced by its midpoint, and after 50 Halley steps
/// the solve finishes by bisection.
inline PhiValue phi_eval(double x, double complement, double inner_tol) {
  if (!(x > 0.0 && x < 1.0)) {
    throw Error(ErrorKind::DomainError, "phi_eval: x must lie in (0, 1)");
  }
  const bool upper = x > 0.5;
  auto p = [&](double z) {
    return upper ? complement - detail::tail(z) : detail::one_minus_tail(z) - x;
  };

  double lo = 0.0;
  double hi = 1.0;
  if (x <= 1e-8) {
    // p(z) ~ z^2/2 - x near 0.
    const double guess = std::sqrt(2.0 * x);
    lo = 0.5 * guess;
    hi = 2.0 * guess;
    if (!(p(lo) < 0.0)) lo = 0.0;
  }
  while (!(p(hi) > 0.0)) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e6) throw Error(ErrorKind::MaxIters, "phi_eval: bracket search failed");
  }

  constexpr double kEps = std::numeric_limits<double>::epsilon();
  double z = (lo < 1.0 && 1.0 < hi) ? 1.0 : 0.5 * (lo + hi);
  double pz = p(z);
  bool done = pz == 0.0;
  for (int it = 0; it < 50 && !done; ++it) {
    if (pz < 0.0) {
      lo = z;
    } else {
      hi = z;
    }
    const double ez = std::exp(-z);
    const double d1 = z * ez;
    const double d2 = (1.0 - z) * ez;
    const double denom = 2.0 * d1 * d1 - pz * d2;
    double next = denom != 0.0 ? z - 2.0 * pz * d1 / denom : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    const double step = std::abs(next - z);
    z = next;
    pz = p(z);
    done = pz == 0.0 || step <= 4.0 * kEps * z;
  }
  for (int it = 0; !done; ++it) {
    if (it > 2200) throw Error(ErrorKind::MaxIters, "phi_eval: inner solve did not converge");
    if (pz < 0.0) {
      lo = z;
    } else {
      hi = z;
    }
    z = 0.5 * (lo + hi);
    pz = p(z);
    done = pz == 0.0 || hi - lo <= 4.0 * kEps * z;
  }
  // The solve runs to stagnation; a residual above both the requested
  // tolerance and the rounding level of p means it went wrong.
  const double residual = std::abs(pz);
  const double rounding = 16.0 * kEps * std::max(x, complement);
  if (residual > inner_tol && residual > rounding) {
    throw Error(ErrorKind::MaxIters, "phi_eval: residual " + std::to_string(residual) +
                                         " above tolerance");
  }
  return {1.0 / z, residual};
}

inline PhiValue phi_eval(double x, const SolverConfig& cfg) {
  return phi_eval(x, 1.0 - x, cfg.inner_tol);
}

/// (phi', phi'') at the point whose image is y: (-y^3 e^{1/y}, y^4 (3y-1) e^{2/y}).
inline std::pair<double, double> phi_derivatives(double y) {
  if (!(y > 0.0)) {
    throw Error(ErrorKind::DomainError, "phi_derivatives: y must be positive");
  }
  const double e1 = std::exp(1.0 / y);
  const double e2 = std::exp(2.0 / y);
  if (!std::isfinite(e1) || !std::isfinite(e2)) {
    throw Error(ErrorKind::Overflow, "phi_derivatives: exp(2/y) overflows for y = " + std::to_string(y));
  }
  const double y2 = y * y;
  return {-y2 * y * e1, y2 * y2 * (3.0 * y - 1.0) * e2};
}

// ---------------------------------------------------------------------------

class KnapsackDual {
 public:
  KnapsackDual(std::vector<double> alpha, std::vector<double> beta, double K)
      : alpha_(std::move(alpha)), beta_(std::move(beta)), K_(K) {
    if (alpha_.size() != beta_.size()) {
      throw Error(ErrorKind::InvalidArgument, "alpha and beta must have the same length");
    }
    if (alpha_.empty()) {
      throw Error(ErrorKind::InvalidArgument, "knapsack dual needs at least one term");
    }
    for (std::size_t j = 0; j < alpha_.size(); ++j) {
      if (!(alpha_[j] > 0.0) || !std::isfinite(alpha_[j])) {
        throw Error(ErrorKind::InvalidArgument, "alpha[j] must be positive (j = " + std::to_string(j) + ")");
      }
      if (!(beta_[j] > 0.0) || !std::isfinite(beta_[j])) {
        throw Error(ErrorKind::InvalidArgument, "beta[j] must be positive (j = " + std::to_string(j) + ")");
      }
      beta_max_ = std::max(beta_max_, beta_[j]);
      alpha_sum_ += alpha_[j];
    }
    if (!(K_ > 0.0) || !std::isfinite(K_)) {
      throw Error(ErrorKind::InvalidArgument, "K must be positive");
    }
  }

  const std::vector<double>& alpha() const { return alpha_; }
  const std::vector<double>& beta() const { return beta_; }
  double K() const { return K_; }
  std::size_t size() const { return alpha_.size(); }
  double beta_max() const { return beta_max_; }
  double gamma() const { return 1.0 / beta_max_; }
  double alpha_sum() const { return alpha_sum_; }

 private:
  std::vector<double> alpha_;
  std::vector<double> beta_;
  double K_;
  double beta_max_ = 0.0;
  double alpha_sum_ = 0.0;
};

/// Residual target of the inner inverse solves: cfg.inner_tol when set,
/// else f_tol / (10 sum alpha).
inline double inner_tolerance(const KnapsackDual& p, const SolverConfig& cfg) {
  return cfg.inner_tol > 0.0 ? cfg.inner_tol : cfg.f_tol / (10.0 * p.alpha_sum());
}

struct DualValues {
  double f;
  double df;
  double scale;  // sum alpha_j phi(beta_j x) + K
};

inline DualValues eval_dual(const KnapsackDual& p, double x, const SolverConfig& cfg,
                            bool with_derivative = true) {
  if (!(x > 0.0 && x * p.beta_max() < 1.0)) {
    throw Error(ErrorKind::DomainError, "knapsack: x must lie in (0, gamma)");
  }
  const double tol = inner_tolerance(p, cfg);
  CompensatedSum sum(-p.K());
  CompensatedSum dsum;
  double scale = p.K();
  for (std::size_t j = 0; j < p.size(); ++j) {
    const double bj = p.beta()[j];
    const double t = bj * x;
    const double s = std::fma(-bj, x, 1.0);
    const double y = phi_eval(t, s, tol).y;
    const double term = p.alpha()[j] * y;
    sum += term;
    scale += term;
    if (with_derivative) {
      // phi'(t) = -y^3 e^{1/y} with e^{1/y} = (y + 1) / (y (1 - t)).
      dsum += -p.alpha()[j] * bj * y * y * (y + 1.0) / s;
    }
  }
  return {sum.value(), dsum.value(), scale};
}

inline double eval_f(const KnapsackDual& p, double x, const SolverConfig& cfg) {
  return eval_dual(p, x, cfg, false).f;
}

struct ConvexifiedValues {
  double value;       // L(x) f(x)
  double derivative;  // L'(x) f(x) + L(x) f'(x)
};

/// L f and its derivative with L(x) = 1 - x/gamma.
inline ConvexifiedValues eval_Lf(const KnapsackDual& p, double x, const SolverConfig& cfg) {
  const DualValues v = eval_dual(p, x, cfg);
  const double L = std::fma(-p.beta_max(), x, 1.0);
  return {L * v.f, -p.beta_max() * v.f + L * v.df};
}

inline ScalarFunction dual_function(const KnapsackDual& p, const SolverConfig& cfg) {
  ScalarFunction fn;
  fn.eval = [&p, cfg](double x) { return eval_dual(p, x, cfg, false).f; };
  fn.deriv1 = [&p, cfg](double x) { return eval_dual(p, x, cfg).df; };
  fn.scale = [&p, cfg](double x) { return eval_dual(p, x, cfg, false).scale; };
  fn.domain = {0.0, p.gamma()};
  return fn;
}

inline ScalarFunction convexified_function(const KnapsackDual& p, const SolverConfig& cfg) {
  ScalarFunction fn;
  fn.eval = [&p, cfg](double x) { return eval_Lf(p, x, cfg).value; };
  fn.deriv1 = [&p, cfg](double x) { return eval_Lf(p, x, cfg).derivative; };
  fn.scale = [&p, cfg](double x) { return eval_dual(p, x, cfg, false).scale; };
  fn.domain = {0.0, p.gamma()};
  return fn;
}

struct Feasibility {
  bool feasible;
  double limit;   // lim_{x -> gamma-} f(x) + K
  double margin;  // K - limit
};

/// The root exists in (0, gamma) iff K exceeds sum_{beta_j < beta_max}
/// alpha_j phi(beta_j gamma); terms with beta_j = beta_max vanish at gamma.
inline Feasibility check_feasible(const KnapsackDual& p, const SolverConfig& cfg) {
  const double tol = inner_tolerance(p, cfg);
  CompensatedSum limit;
  for (std::size_t j = 0; j < p.size(); ++j) {
    const double bj = p.beta()[j];
    if (!(bj < p.beta_max())) continue;
    const double t = bj / p.beta_max();
    const double s = (p.beta_max() - bj) / p.beta_max();
    limit += p.alpha()[j] * phi_eval(t, s, tol).y;
  }
  const double lim = limit.value();
  return {p.K() > lim, lim, p.K() - lim};
}

/// gamma h(K / sum alpha): the root of sum_j alpha_j phi(x/gamma) - K, which
/// f dominates, so the point lies left of the root of f.
inline double initial_point(const KnapsackDual& p) {
  return p.gamma() * h_eval(p.K() / p.alpha_sum());
}

/// Newton on L f from initial_point(); the trace records x with f(x).
inline IterationTrace solve(const KnapsackDual& p, const SolverConfig& cfg) {
  cfg.validate();
  const Feasibility feas = check_feasible(p, cfg);
  if (!feas.feasible) {
    throw Error(ErrorKind::Infeasible,
                "knapsack: K must exceed lim f + K at gamma (" + std::to_string(feas.limit) + ")");
  }
  const ScalarFunction f = dual_function(p, cfg);
  auto step = [&](double x, double) {
    const ConvexifiedValues v = eval_Lf(p, x, cfg);
    if (!(v.derivative < 0.0)) {
      throw Error(ErrorKind::Breakdown, "knapsack: (L f)' is not negative");
    }
    return x - v.value / v.derivative;
  };
  return iterate(step, f, initial_point(p), cfg);
}

}  // namespace adapt::knapsack
