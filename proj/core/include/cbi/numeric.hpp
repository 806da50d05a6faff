#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

// Small numeric helpers shared by the optimizers.
namespace cbi::num {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

inline double logit(double p) { return std::log(p) - std::log1p(-p); }

inline double inv_logit(double u) {
  if (u >= 0) return 1.0 / (1.0 + std::exp(-u));
  const double e = std::exp(u);
  return e / (1.0 + e);
}

// log(exp(a) + exp(b)) without overflow; -inf aware.
inline double log_add(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  if (a < b) std::swap(a, b);
  return a + std::log1p(std::exp(b - a));
}

inline double log_sum_exp(const std::vector<double>& v) {
  double acc = kNegInf;
  for (double a : v) acc = log_add(acc, a);
  return acc;
}

struct Extremum {
  double arg = 0.0;
  double value = kNegInf;
};

// Golden-section maximization of a unimodal f on [lo, hi]; tol is absolute.
template <class F>
Extremum golden_max(F&& f, double lo, double hi, double tol = 1e-10) {
  constexpr double g = 0.6180339887498949;
  double a = lo, b = hi;
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = f(c), fd = f(d);
  int guard = 0;
  while (b - a > tol && guard++ < 300) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = f(d);
    }
  }
  return fc >= fd ? Extremum{c, fc} : Extremum{d, fd};
}

// Coarse scan to bracket the best cell, then golden refinement. Endpoints are
// always evaluated so boundary maxima are never lost.
template <class F>
Extremum scan_max(F&& f, double lo, double hi, int cells = 48, double tol = 1e-10) {
  Extremum best{lo, f(lo)};
  int best_k = 0;
  const double h = (hi - lo) / cells;
  for (int k = 1; k <= cells; ++k) {
    const double t = k == cells ? hi : lo + k * h;
    const double v = f(t);
    if (v > best.value) {
      best = {t, v};
      best_k = k;
    }
  }
  if (best.value == kNegInf) return best;
  const double a = lo + std::max(0, best_k - 1) * h;
  const double b = std::min(hi, lo + (best_k + 1) * h);
  Extremum gm = golden_max(f, a, b, tol);
  return gm.value > best.value ? gm : best;
}

// Maximize f(x) over x in [a, b] with 0 <= a < b <= 1, searching in logit
// coordinates so that peaks at extreme scale are resolved.
template <class F>
Extremum maximize_unit_segment(F&& f, double a, double b, double tol = 1e-10) {
  Extremum best{a, f(a)};
  if (!(b > a)) return best;
  if (const double fb = f(b); fb > best.value) best = {b, fb};
  const double lo = a > 0 ? std::max(logit(a), -700.0) : -700.0;
  const double hi = b < 1 ? std::min(logit(b), 37.0) : 37.0;
  if (!(hi > lo)) return best;
  auto g = [&](double u) { return f(std::clamp(inv_logit(u), a, b)); };
  Extremum e = scan_max(g, lo, hi, 64, tol);
  e.arg = std::clamp(inv_logit(e.arg), a, b);
  if (e.value > best.value) best = e;
  return best;
}

}  // namespace cbi::num
