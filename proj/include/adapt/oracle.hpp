#pragma once

// Brute-force ground truth: sign-change scanning and plain bisection. Nothing
// here calls into the specialized solvers, and bisection never takes a
// secant or interpolation shortcut.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "adapt/core.hpp"

namespace adapt::oracle {

struct Bracket {
  double lo;
  double hi;
};

struct ScanResult {
  // Adjacent sample pairs with a sign change that bisect down to a zero.
  std::vector<Bracket> brackets;
  // Sample points at which f(x) == 0 exactly.
  std::vector<double> exact_roots;
  // Sample points whose evaluation failed or returned a non-finite value.
  std::vector<double> skipped;
  // Sign changes that turned out to straddle a pole rather than a zero.
  std::vector<Bracket> discontinuities;
};

struct BisectionResult {
  double root;
  int steps;
  double width;
};

namespace detail {

inline std::optional<double> try_eval(const ScalarFunction& f, double x) {
  try {
    const double v = f(x);
    if (!std::isfinite(v)) return std::nullopt;
    return v;
  } catch (const Error&) {
    return std::nullopt;
  }
}

inline int sign(double v) { return (v > 0.0) - (v < 0.0); }

inline double checked_eval(const ScalarFunction& f, double x) {
  const double v = f(x);
  if (std::isnan(v)) {
    throw Error(ErrorKind::InvalidBracket, "bisect: function value is NaN at " + std::to_string(x));
  }
  return v;
}

}  // namespace detail

/// Bisection on a bracket with opposite, nonzero end signs. Stops once the
/// width is <= tol or the midpoint is no longer representable strictly inside
/// the bracket (tol = 0 therefore runs to full precision).
inline BisectionResult bisect(const ScalarFunction& f, Bracket br, double tol) {
  if (!(br.lo < br.hi)) {
    throw Error(ErrorKind::InvalidBracket, "bisect: need lo < hi");
  }
  const double flo = detail::checked_eval(f, br.lo);
  const double fhi = detail::checked_eval(f, br.hi);
  const int slo = detail::sign(flo);
  const int shi = detail::sign(fhi);
  if (slo == 0) return {br.lo, 0, 0.0};
  if (shi == 0) return {br.hi, 0, 0.0};
  if (slo == shi) {
    throw Error(ErrorKind::InvalidBracket, "bisect: end values have the same sign");
  }
  double lo = br.lo;
  double hi = br.hi;
  int steps = 0;
  while (hi - lo > tol) {
    const double mid = lo + 0.5 * (hi - lo);
    if (!(mid > lo && mid < hi)) break;
    ++steps;
    const int sm = detail::sign(detail::checked_eval(f, mid));
    if (sm == 0) return {mid, steps, 0.0};
    if (sm == slo) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return {lo + 0.5 * (hi - lo), steps, hi - lo};
}

/// Samples f at samples+1 equispaced points of [lo, hi] and reports every
/// adjacent sign change. An endpoint that cannot be evaluated (a pole at the
/// boundary of an open domain) is retried at the nearest interior double.
/// Each sign change is bisected; if |f| at the limit point exceeds both end
/// values the pair straddles a pole and is filed under `discontinuities`.
inline ScanResult bracket_scan(const ScalarFunction& f, double lo, double hi, int samples) {
  if (!(lo < hi) || samples < 2) {
    throw Error(ErrorKind::InvalidArgument, "bracket_scan: need lo < hi and samples >= 2");
  }
  ScanResult out;
  struct Sample {
    double x;
    double fx;
  };
  std::vector<Sample> valid;
  valid.reserve(static_cast<std::size_t>(samples) + 1);
  const double width = hi - lo;
  for (int k = 0; k <= samples; ++k) {
    double x = k == samples ? hi : lo + width * (static_cast<double>(k) / samples);
    auto v = detail::try_eval(f, x);
    if (!v && (k == 0 || k == samples)) {
      const double inward = std::nextafter(x, k == 0 ? hi : lo);
      if (auto w = detail::try_eval(f, inward)) {
        x = inward;
        v = w;
      }
    }
    if (!v) {
      out.skipped.push_back(x);
      continue;
    }
    if (*v == 0.0) out.exact_roots.push_back(x);
    valid.push_back({x, *v});
  }
  for (std::size_t k = 1; k < valid.size(); ++k) {
    const Sample& a = valid[k - 1];
    const Sample& b = valid[k];
    if (a.fx == 0.0 || b.fx == 0.0) continue;
    if (detail::sign(a.fx) == detail::sign(b.fx)) continue;
    const Bracket br{a.x, b.x};
    bool is_root = true;
    try {
      const BisectionResult r = bisect(f, br, 0.0);
      const auto at = detail::try_eval(f, r.root);
      is_root = at && std::abs(*at) <= std::min(std::abs(a.fx), std::abs(b.fx));
    } catch (const Error&) {
      is_root = false;
    }
    (is_root ? out.brackets : out.discontinuities).push_back(br);
  }
  return out;
}

struct RootReport {
  double claimed;
  double oracle;
  double abs_error;
  double rel_error;
  bool agrees;
};

inline RootReport make_report(double claimed, double oracle_root, double rel_tol) {
  const double abs_err = std::abs(claimed - oracle_root);
  const double denom = std::abs(oracle_root);
  const double rel_err = denom > 0.0 ? abs_err / denom : abs_err;
  return {claimed, oracle_root, abs_err, rel_err, rel_err <= rel_tol};
}

/// Compares a claimed root against bisection on a known bracket.
inline RootReport verify_root(const ScalarFunction& f, double claimed, Bracket br,
                              double rel_tol = 1e-10) {
  const BisectionResult r = bisect(f, br, 0.0);
  return make_report(claimed, r.root, rel_tol);
}

/// Compares a claimed root against the oracle root nearest to it in
/// (lo, hi). Scanning starts at 64 samples and doubles up to 2^16.
inline RootReport verify_root(const ScalarFunction& f, double claimed, Interval interval,
                              double rel_tol = 1e-10) {
  if (!(claimed >= interval.lo && claimed <= interval.hi)) {
    throw Error(ErrorKind::InvalidArgument, "verify_root: claimed root outside interval");
  }
  constexpr int kFirst = 64;
  constexpr int kLast = 1 << 16;
  for (int samples = kFirst; samples <= kLast; samples *= 2) {
    const ScanResult scan = bracket_scan(f, interval.lo, interval.hi, samples);
    std::optional<double> best;
    auto consider = [&](double root) {
      if (!best || std::abs(root - claimed) < std::abs(*best - claimed)) best = root;
    };
    for (double x : scan.exact_roots) consider(x);
    for (const Bracket& br : scan.brackets) consider(bisect(f, br, 0.0).root);
    if (best) return make_report(claimed, *best, rel_tol);
  }
  throw Error(ErrorKind::NoRootFound, "verify_root: no sign change found at 2^16 samples");
}

}  // namespace adapt::oracle
