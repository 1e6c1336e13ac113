#pragma once

// Positive roots r1 < r2 of the trinomial f(x) = a x^n - b x^k + c, computed
// from inside [r1, r2].
//
// In z = x^k the equation becomes F(z) = a z^{n/k} - b z + c. The power
// z^{n/k} is replaced by R(z) = alpha/(beta - z), matched in value and slope
// at the current point; R dominates z^{n/k}, so G = a R - b z + c dominates F
// and the two roots of G bracket nothing outside [r1^k, r2^k]. Iterating the
// smaller root walks down to r1^k, the larger one up to r2^k.
//
// pellet_radii_general treats an arbitrary modulus polynomial by scanning and
// bisection.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "adapt/core.hpp"
#include "adapt/oracle.hpp"

namespace adapt::pellet {

struct Trinomial {
  double a;
  double b;
  double c;
  int n;
  int k;

  void validate() const {
    for (double v : {a, b, c}) {
      if (!(v > 0.0) || !std::isfinite(v)) {
        throw Error(ErrorKind::InvalidArgument, "trinomial coefficients a, b, c must be positive");
      }
    }
    if (n < 3) {
      throw Error(ErrorKind::InvalidArgument, "trinomial degree n must be at least 3");
    }
    if (k < 1 || k > n - 1) {
      throw Error(ErrorKind::InvalidArgument, "trinomial exponent k must satisfy 1 <= k <= n-1");
    }
  }

  double ratio() const { return static_cast<double>(n) / k; }
};

/// z^{n/k} for z > 0. The integer part of the exponent is exact; the
/// fractional power z^{r/k} gets one Newton polish on v^k = z^r.
inline double power_ratio(double z, int n, int k) {
  const int whole = n / k;
  const int rem = n % k;
  double out = std::pow(z, whole);
  if (rem == 0) return out;
  double v = std::pow(z, static_cast<double>(rem) / k);
  const double target = std::pow(z, rem);
  const double vk1 = std::pow(v, k - 1);
  if (vk1 > 0.0 && std::isfinite(vk1) && std::isfinite(target)) {
    v -= (vk1 * v - target) / (k * vk1);
  }
  return out * v;
}

inline double eval_F(const Trinomial& t, double z) {
  return t.a * power_ratio(z, t.n, t.k) - t.b * z + t.c;
}

inline double eval_dF(const Trinomial& t, double z) {
  return t.ratio() * t.a * power_ratio(z, t.n, t.k) / z - t.b;
}

inline double F_scale(const Trinomial& t, double z) {
  return t.a * power_ratio(z, t.n, t.k) + t.b * std::abs(z) + t.c;
}

/// f(x) = a x^n - b x^k + c.
inline double eval_f(const Trinomial& t, double x) {
  return t.a * std::pow(x, t.n) - t.b * std::pow(x, t.k) + t.c;
}

inline ScalarFunction transformed_function(const Trinomial& t) {
  ScalarFunction fn;
  fn.eval = [t](double z) { return eval_F(t, z); };
  fn.deriv1 = [t](double z) { return eval_dF(t, z); };
  fn.scale = [t](double z) { return F_scale(t, z); };
  fn.domain = {0.0, std::numeric_limits<double>::infinity()};
  return fn;
}

struct Applicability {
  double z0;       // minimizer of F
  double F_z0;
  bool applicable;  // F(z0) < 0: two positive roots
  bool near_degenerate;
};

inline Applicability applicability(const Trinomial& t) {
  t.validate();
  const double z0 = std::pow(t.k * t.b / (t.n * t.a), static_cast<double>(t.k) / (t.n - t.k));
  // At the minimizer a z0^{n/k} = (k/n) b z0, which gives F(z0) without
  // evaluating the power; z0 may overflow while the sign is still known.
  const double q = static_cast<double>(t.k) / t.n;
  const double Fz0 = std::isfinite(z0) ? t.c - (1.0 - q) * t.b * z0 : -z0;
  const bool applicable = Fz0 < 0.0;
  const bool near = applicable && std::abs(Fz0) <= 1e-12 * ((1.0 + q) * t.b * z0 + t.c);
  return {z0, Fz0, applicable, near};
}

enum class Branch { Lower, Upper };

/// G(z) = a alpha/(beta - z) - b z + c.
struct TrinomialApproximant {
  double a;
  double b;
  double c;
  double alpha;
  double beta;

  double operator()(double z) const { return a * alpha / (beta - z) - b * z + c; }
};

inline TrinomialApproximant fit_trinomial(const Trinomial& t, double zbar) {
  if (!(zbar > 0.0)) {
    throw Error(ErrorKind::PreconditionViolated, "fit_trinomial: zbar must be positive");
  }
  const double q = static_cast<double>(t.k) / t.n;
  return {t.a, t.b, t.c, q * zbar * power_ratio(zbar, t.n, t.k), (1.0 + q) * zbar};
}

/// One step from zbar with F(zbar) < 0: the smaller (Lower) or larger
/// (Upper) root of G, both inside (0, beta).
inline double trinomial_step(const Trinomial& t, double zbar, Branch branch) {
  if (!(zbar > 0.0)) {
    throw Error(ErrorKind::PreconditionViolated, "trinomial_step: zbar must be positive");
  }
  const double Fz = eval_F(t, zbar);
  if (!(Fz < 0.0)) {
    throw Error(ErrorKind::PreconditionViolated, "trinomial_step: requires F(zbar) < 0");
  }
  // In s = z - zbar with e = beta - zbar = (k/n) zbar, clearing beta - z gives
  //   b s^2 - (c - b zbar + b e) s + e F(zbar) = 0.
  // With s = zbar u and a division by zbar the coefficients stay finite even
  // when e F(zbar) would overflow:
  //   b zbar u^2 - (c - b zbar + b e) u + (k/n) F(zbar) = 0.
  // A power-of-two rescale keeps the discriminant in range.
  const double q = static_cast<double>(t.k) / t.n;
  const double e = q * zbar;
  double a2 = t.b * zbar;
  double a1 = -(t.c - t.b * zbar + t.b * e);
  double a0 = q * Fz;
  const int shift = -std::ilogb(std::max({a2, std::abs(a1), std::abs(a0)}));
  a2 = std::ldexp(a2, shift);
  a1 = std::ldexp(a1, shift);
  a0 = std::ldexp(a0, shift);
  std::pair<double, double> roots;
  try {
    roots = solve_quadratic_stable(a2, a1, a0);
  } catch (const Error& err) {
    throw Error(ErrorKind::Breakdown, std::string("trinomial_step: ") + err.what());
  }
  const double u = branch == Branch::Lower ? roots.first : roots.second;
  if (branch == Branch::Upper || u > -0.5) return zbar + zbar * u;

  // A long step down loses digits in zbar (1 + u). In w = z / zbar the
  // coefficients are sums of positive terms and the small root is accurate:
  //   b zbar w^2 - (b (1+q) zbar + c) w + (a q zbar^{n/k} + c (1+q)) = 0.
  double c2 = t.b * zbar;
  double c1 = -(t.b * (1.0 + q) * zbar + t.c);
  double c0 = t.a * q * power_ratio(zbar, t.n, t.k) + t.c * (1.0 + q);
  const int wshift = -std::ilogb(std::max({c2, std::abs(c1), c0}));
  c2 = std::ldexp(c2, wshift);
  c1 = std::ldexp(c1, wshift);
  c0 = std::ldexp(c0, wshift);
  try {
    return zbar * solve_quadratic_stable(c2, c1, c0).first;
  } catch (const Error& err) {
    throw Error(ErrorKind::Breakdown, std::string("trinomial_step: ") + err.what());
  }
}

struct RadiiPair {
  double r1 = 0.0;
  double r2 = 0.0;
  // Iterates in z = x^k with F values.
  IterationTrace trace_lower;
  IterationTrace trace_upper;
  bool near_degenerate = false;
};

/// x = z^{1/k}, polished by one Newton step on x^k = z.
inline double to_x(double z, int k) {
  if (k == 1) return z;
  double x = std::pow(z, 1.0 / k);
  const double xk1 = std::pow(x, k - 1);
  if (xk1 > 0.0 && std::isfinite(xk1)) x -= (xk1 * x - z) / (k * xk1);
  return x;
}

inline RadiiPair solve_radii(const Trinomial& t, const SolverConfig& cfg) {
  cfg.validate();
  const Applicability app = applicability(t);
  if (!app.applicable) {
    throw Error(ErrorKind::NotApplicable, "trinomial has no two positive roots (F(z0) >= 0)");
  }
  if (!std::isfinite(app.z0)) {
    throw Error(ErrorKind::Overflow, "trinomial: z = x^k overflows at the minimizer");
  }
  RadiiPair out;
  if (app.near_degenerate) {
    out.near_degenerate = true;
    out.r1 = out.r2 = to_x(app.z0, t.k);
    out.trace_lower.iterates.push_back({app.z0, app.F_z0});
    out.trace_lower.termination = Termination::Converged;
    out.trace_lower.root = app.z0;
    out.trace_upper = out.trace_lower;
    return out;
  }
  const ScalarFunction F = transformed_function(t);
  out.trace_lower = iterate([&](double z, double) { return trinomial_step(t, z, Branch::Lower); }, F,
                            app.z0, cfg);
  out.trace_upper = iterate([&](double z, double) { return trinomial_step(t, z, Branch::Upper); }, F,
                            app.z0, cfg);
  if (!out.trace_lower.converged() || !out.trace_upper.converged()) {
    const IterationTrace& bad = out.trace_lower.converged() ? out.trace_upper : out.trace_lower;
    ErrorKind kind = ErrorKind::Breakdown;
    if (bad.termination == Termination::MaxIters) kind = ErrorKind::MaxIters;
    if (bad.escaped && std::isinf(*bad.escaped)) kind = ErrorKind::Overflow;
    throw Error(kind,
                std::string("solve_radii: ") + to_string(bad.termination) +
                    (bad.message.empty() ? "" : ": " + bad.message));
  }
  out.r1 = to_x(*out.trace_lower.root, t.k);
  out.r2 = to_x(*out.trace_upper.root, t.k);
  return out;
}

// ---------------------------------------------------------------------------

struct PelletRadii {
  double rho1;
  double rho2;
};

/// Positive roots of q(z) = sum_{j != ell} m_j z^j - m_ell z^ell, where
/// moduli[j] = |a_j| is the modulus of the coefficient of z^j. Empty when q
/// has no two positive roots.
inline std::optional<PelletRadii> pellet_radii_general(const std::vector<double>& moduli, std::size_t ell) {
  if (moduli.size() < 3) {
    throw Error(ErrorKind::InvalidArgument, "pellet: polynomial degree must be at least 2");
  }
  bool any = false;
  for (double m : moduli) {
    if (!(m >= 0.0) || !std::isfinite(m)) {
      throw Error(ErrorKind::InvalidArgument, "pellet: coefficient moduli must be non-negative");
    }
    any = any || m > 0.0;
  }
  if (!any) throw Error(ErrorKind::DegenerateInput, "pellet: all coefficients are zero");
  const std::size_t degree = moduli.size() - 1;
  if (ell < 1 || ell > degree - 1) {
    throw Error(ErrorKind::InvalidArgument, "pellet: ell must satisfy 1 <= ell <= degree-1");
  }
  if (moduli[ell] == 0.0) {
    throw Error(ErrorKind::InvalidArgument, "pellet: coefficient of degree ell must be nonzero");
  }
  std::size_t low = 0;
  while (moduli[low] == 0.0) ++low;
  std::size_t high = degree;
  while (moduli[high] == 0.0) --high;
  // q needs positive terms on both sides of ell to turn positive again.
  if (low == ell || high == ell) return std::nullopt;

  // Q(z) = q(z) / z^ell is convex on (0, inf), so q < 0 on one interval.
  auto Q = [&moduli, ell, low, high](double z) {
    CompensatedSum s(-moduli[ell]);
    for (std::size_t j = low; j <= high; ++j) {
      if (j == ell || moduli[j] == 0.0) continue;
      s += moduli[j] * std::pow(z, static_cast<double>(j) - static_cast<double>(ell));
    }
    return s.value();
  };
  // Positive roots lie inside the Cauchy bounds of q and of its reversal.
  double max_below_top = 0.0;
  for (std::size_t j = low; j < high; ++j) max_below_top = std::max(max_below_top, moduli[j]);
  double max_above_low = 0.0;
  for (std::size_t j = low + 1; j <= high; ++j) max_above_low = std::max(max_above_low, moduli[j]);
  const double upper = 1.0 + max_below_top / moduli[high];
  const double lower = moduli[low] / (moduli[low] + max_above_low);

  ScalarFunction in_log;
  in_log.eval = [&Q](double u) { return Q(std::exp(u)); };
  ScalarFunction in_z;
  in_z.eval = Q;

  for (int samples = 64; samples <= (1 << 16); samples *= 2) {
    const oracle::ScanResult scan = oracle::bracket_scan(in_log, std::log(lower), std::log(upper), samples);
    std::vector<double> roots(scan.exact_roots.begin(), scan.exact_roots.end());
    for (double& u : roots) u = std::exp(u);
    for (const oracle::Bracket& br : scan.brackets) {
      const double zl = std::exp(br.lo);
      const double zh = std::exp(br.hi);
      if (!(zl < zh)) continue;
      roots.push_back(oracle::bisect(in_z, {zl, zh}, 0.0).root);
    }
    std::sort(roots.begin(), roots.end());
    if (roots.size() >= 2) return PelletRadii{roots.front(), roots.back()};
  }
  return std::nullopt;
}

}  // namespace adapt::pellet
