#include "cbi/klotz.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "cbi/numeric.hpp"

namespace cbi {

using num::kNegInf;

const char* to_string(Outcome o) { return o == Outcome::Success ? "S" : "F"; }

double lambda_floor(double x) {
  if (x <= 0.5) return 0.0;
  return (2.0 * x - 1.0) / x;
}

bool region_contains(KlotzPoint p) {
  const double x = p.x, l = p.lambda;
  if (!(x >= 0.0 && x <= 1.0 && l >= 0.0 && l <= 1.0)) return false;
  if (x <= 0.5) return true;
  // lambda*x >= 2x - 1, evaluated with a single rounding (1 - 2x is exact here)
  return std::fma(l, x, 1.0 - 2.0 * x) >= 0.0;
}

KlotzPoint project_to_region(KlotzPoint p) {
  p.x = std::clamp(p.x, 0.0, 1.0);
  p.lambda = std::clamp(p.lambda, lambda_floor(p.x), 1.0);
  while (!region_contains(p) && p.lambda < 1.0) p.lambda = std::nextafter(p.lambda, 2.0);
  return p;
}

double correlation_coefficient(KlotzPoint p) {
  if (!region_contains(p)) throw DomainError("correlation_coefficient: point outside region");
  if (p.x == 1.0) return 1.0;
  return (p.lambda - p.x) / (1.0 - p.x);
}

YPoint to_y(KlotzPoint p) {
  if (p.x >= 1.0) return {p.lambda, p.lambda >= 1.0 ? 0.0 : 1.0};
  return {p.lambda, (1.0 - p.lambda) * p.x / (1.0 - p.x)};
}

KlotzPoint from_y(YPoint q) {
  const double den = q.y + (1.0 - q.lambda);
  if (den <= 0.0) return {1.0, 1.0};
  return {q.y / den, q.lambda};
}

namespace {

bool counts_ok(std::int64_t n, std::int64_t s, std::int64_t r, Outcome f, Outcome l) {
  ObservationSummary o{n, s, r, f, l};
  try {
    (void)transitions_from_summary(o);
    return true;
  } catch (const InconsistentSummary&) {
    return false;
  }
}

}  // namespace

ObservationSummary make_summary(std::int64_t n, std::int64_t s, std::int64_t r) {
  ObservationSummary o{n, s, r, Outcome::Success, Outcome::Success, true, true};
  if (n == 0 || s == 0) return o;
  if (s == n) {
    o.first = o.last = Outcome::Failure;
    return o;
  }
  constexpr std::array<std::pair<Outcome, Outcome>, 4> order{{
      {Outcome::Success, Outcome::Success},
      {Outcome::Success, Outcome::Failure},
      {Outcome::Failure, Outcome::Success},
      {Outcome::Failure, Outcome::Failure},
  }};
  for (auto [f, l] : order) {
    if (counts_ok(n, s, r, f, l)) {
      o.first = f;
      o.last = l;
      return o;
    }
  }
  throw InconsistentSummary("no first/last outcome is consistent with n=" + std::to_string(n) +
                            ", s=" + std::to_string(s) + ", r=" + std::to_string(r));
}

void validate(const ObservationSummary& o) {
  auto fail = [&](const std::string& why) { throw InconsistentSummary(why + " (" + describe(o) + ")"); };
  if (o.n < 0) fail("n must be nonnegative");
  if (o.s < 0 || o.s > o.n) fail("s must lie in [0, n]");
  if (o.s == 0 && o.r != 0) fail("r must be 0 when s = 0");
  if (o.s >= 1 && (o.r < 0 || o.r >= o.s)) fail("r must lie in [0, s)");
  if (o.n == 0) return;
  if (o.s == 0 && (o.first != Outcome::Success || o.last != Outcome::Success))
    fail("a failure-free run starts and ends with a success");
  if (o.s == o.n && (o.first != Outcome::Failure || o.last != Outcome::Failure || o.r != o.n - 1))
    fail("an all-failure run has first = last = F and r = n - 1");
}

TransitionCounts transitions_from_summary(const ObservationSummary& o) {
  validate(o);
  TransitionCounts t;
  t.first = o.first;
  if (o.n == 0) {
    t.empty = true;
    return t;
  }
  const auto n = o.n, s = o.s, r = o.r;
  const bool f0 = o.first == Outcome::Failure, f1 = o.last == Outcome::Failure;
  if (f0 && f1) {
    t.alpha = s - r - 1, t.beta = n - 2 * s + r + 1, t.gamma = r, t.delta = s - r - 1;
  } else if (!f0 && f1) {
    t.alpha = s - r, t.beta = n - 2 * s + r, t.gamma = r, t.delta = s - r - 1;
  } else if (!f0 && !f1) {
    t.alpha = s - r, t.beta = n - 2 * s + r - 1, t.gamma = r, t.delta = s - r;
  } else {
    t.alpha = s - r - 1, t.beta = n - 2 * s + r, t.gamma = r, t.delta = s - r;
  }
  if (t.alpha < 0 || t.beta < 0 || t.gamma < 0 || t.delta < 0) {
    std::ostringstream m;
    m << "negative transition count (alpha=" << t.alpha << ", beta=" << t.beta << ", gamma=" << t.gamma
      << ", delta=" << t.delta << ") for " << describe(o);
    throw InconsistentSummary(m.str());
  }
  return t;
}

namespace {

// k * v with the 0 * (-inf) = 0 convention.
inline double term(std::int64_t k, double v) { return k == 0 ? 0.0 : static_cast<double>(k) * v; }

double loglik(KlotzPoint p, const TransitionCounts& t, bool strict) {
  if (!region_contains(p)) throw DomainError("likelihood: point outside region");
  if (t.empty) return 0.0;
  const double x = p.x, l = p.lambda;
  if (x == 1.0) {
    if (t.first == Outcome::Success || t.delta > 0) return kNegInf;
    if (strict) throw IllDefinedError("likelihood is not well-defined at (1,1) for an all-failure run");
    return 0.0;  // L = x * lambda^gamma there, continuous with value 1
  }
  const double lx = std::log(x);
  const double l1x = std::log1p(-x);
  double acc = t.first == Outcome::Failure ? lx : l1x;
  if (t.alpha) acc += term(t.alpha, std::log1p(-l) + lx - l1x);
  if (t.beta) {
    const double arg = (2.0 - l) * x;
    acc += term(t.beta, (arg >= 1.0 ? kNegInf : std::log1p(-arg)) - l1x);
  }
  if (t.gamma) acc += term(t.gamma, std::log(l));
  if (t.delta) acc += term(t.delta, std::log1p(-l));
  return acc;
}

// (lambda, y) form with separately supplied complements for accuracy near 1.
double loglik_ly(double l, double one_minus_l, double y, double one_minus_y, const TransitionCounts& t) {
  if (t.empty) return 0.0;
  const double den = y + one_minus_l;
  if (den <= 0.0) return t.first == Outcome::Failure && t.delta == 0 ? 0.0 : kNegInf;
  double acc = std::log(t.first == Outcome::Failure ? y : one_minus_l) - std::log(den);
  acc += term(t.alpha, std::log(y));
  acc += term(t.beta, std::log(one_minus_y));
  acc += term(t.gamma, std::log(l));
  acc += term(t.delta, std::log(one_minus_l));
  return acc;
}

}  // namespace

double log_likelihood(KlotzPoint p, const TransitionCounts& t) { return loglik(p, t, true); }

double log_likelihood_ext(KlotzPoint p, const TransitionCounts& t) { return loglik(p, t, false); }

double likelihood(KlotzPoint p, const TransitionCounts& t) { return std::exp(log_likelihood(p, t)); }

double log_likelihood_y(YPoint q, const TransitionCounts& t) {
  if (!(q.lambda >= 0 && q.lambda <= 1 && q.y >= 0 && q.y <= 1))
    throw DomainError("likelihood: (lambda, y) outside the unit square");
  return loglik_ly(q.lambda, 1.0 - q.lambda, q.y, 1.0 - q.y, t);
}

double diagonal_mode(const TransitionCounts& t) {
  if (t.empty) return 0.0;
  const double a = static_cast<double>(t.alpha), b = static_cast<double>(t.beta);
  const double g = static_cast<double>(t.gamma), d = static_cast<double>(t.delta);
  const double den = 1.0 + a + g + b + d;
  return t.first == Outcome::Failure ? (1.0 + a + g) / den : (a + g) / den;
}

KlotzPoint likelihood_argmax(const TransitionCounts& t) {
  if (t.empty) return {0.0, 0.0};
  if (t.first == Outcome::Failure && t.beta == 0 && t.delta == 0) return {1.0, 1.0};

  // Profile over lambda (logit scale) of the inner maximum over y (logit scale).
  auto inner = [&](double u) {
    const double l = num::inv_logit(u), ol = num::inv_logit(-u);
    auto f = [&](double v) { return loglik_ly(l, ol, num::inv_logit(v), num::inv_logit(-v), t); };
    num::Extremum e = num::scan_max(f, -700.0, 700.0, 64, 1e-10);
    // y = 0 and y = 1 exactly
    if (const double f0 = loglik_ly(l, ol, 0.0, 1.0, t); f0 > e.value) e = {-1e300, f0};
    if (const double f1 = loglik_ly(l, ol, 1.0, 0.0, t); f1 > e.value) e = {1e300, f1};
    return e;
  };
  num::Extremum outer = num::scan_max([&](double u) { return inner(u).value; }, -700.0, 700.0, 64, 1e-10);
  const double ustar = outer.arg;
  const num::Extremum in = inner(ustar);
  const double l = num::inv_logit(ustar), ol = num::inv_logit(-ustar);
  const double y = in.arg >= 1e299 ? 1.0 : in.arg <= -1e299 ? 0.0 : num::inv_logit(in.arg);
  const double den = y + ol;
  KlotzPoint best = project_to_region({den > 0 ? y / den : 1.0, l});
  double best_v = log_likelihood_ext(best, t);

  auto consider = [&](KlotzPoint p) {
    p = project_to_region(p);
    const double v = log_likelihood_ext(p, t);
    if (v > best_v) {
      best = p;
      best_v = v;
    }
  };
  // boundary pieces the (lambda, y) chart collapses or may miss
  consider({0.0, 0.0});
  const double dm = diagonal_mode(t);
  consider({dm, dm});
  consider({0.5, 0.0});
  auto edge = [&](auto param, double a, double b) {
    num::Extremum e = num::maximize_unit_segment([&](double s) { return log_likelihood_ext(project_to_region(param(s)), t); }, a, b);
    consider(param(e.arg));
  };
  edge([](double x) { return KlotzPoint{x, 1.0}; }, 0.0, 1.0);
  edge([](double x) { return KlotzPoint{x, 0.0}; }, 0.0, 0.5);
  edge([](double x) { return KlotzPoint{x, lambda_floor(x)}; }, 0.5, 1.0);
  edge([](double l) { return KlotzPoint{0.0, l}; }, 0.0, 1.0);
  return best;
}

std::string describe(const ObservationSummary& o) {
  std::ostringstream m;
  m << "n=" << o.n << ", s=" << o.s << ", r=" << o.r << ", first=" << to_string(o.first)
    << ", last=" << to_string(o.last);
  return m.str();
}

}  // namespace cbi
