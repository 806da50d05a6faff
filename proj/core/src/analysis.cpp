#include "cbi/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <thread>

namespace cbi {

const char* to_string(Axis a) {
  switch (a) {
    case Axis::N: return "n";
    case Axis::B: return "b";
    case Axis::Epsilon: return "epsilon";
    case Axis::Theta: return "theta";
    case Axis::Phi1: return "phi1";
    case Axis::Phi2: return "phi2";
    case Axis::S: return "s";
    case Axis::R: return "r";
  }
  return "?";
}

const char* to_string(Method m) {
  switch (m) {
    case Method::Univariate: return "Univariate";
    case Method::KlotzCBI: return "KlotzCBI";
    case Method::BetaBI: return "BetaBI";
    case Method::StrongPK5: return "StrongPK5";
    case Method::WeakPK6: return "WeakPK6";
  }
  return "?";
}

std::optional<Axis> parse_axis(const std::string& s) {
  for (Axis a : {Axis::N, Axis::B, Axis::Epsilon, Axis::Theta, Axis::Phi1, Axis::Phi2, Axis::S, Axis::R})
    if (s == to_string(a)) return a;
  return std::nullopt;
}

std::optional<Method> parse_method(const std::string& s) {
  for (Method m : {Method::Univariate, Method::KlotzCBI, Method::BetaBI, Method::StrongPK5, Method::WeakPK6})
    if (s == to_string(m)) return m;
  return std::nullopt;
}

void SweepSpec::validate() const {
  for (std::size_t i = 1; i < values.size(); ++i)
    if (!(values[i] > values[i - 1])) throw ConstraintError("sweep values must be strictly increasing");
  const bool integral = axis == Axis::N || axis == Axis::S || axis == Axis::R;
  for (double v : values) {
    if (!std::isfinite(v)) throw ConstraintError("sweep values must be finite");
    if (integral && (v < 0 || v != std::floor(v) || v > 9.0e15))
      throw ConstraintError(std::string("sweep over ") + to_string(axis) + " needs nonnegative integers");
  }
}

Instance instance_at(const SweepSpec& spec, double v) {
  Instance in{spec.pk, spec.obs, spec.b};
  const auto k = static_cast<std::int64_t>(v);
  auto rebuild = [&](std::int64_t n, std::int64_t s, std::int64_t r, bool keep_ends) {
    if (keep_ends && !spec.obs.first_defaulted && !spec.obs.last_defaulted) {
      in.obs.n = n, in.obs.s = s, in.obs.r = r;
      validate(in.obs);
    } else {
      in.obs = make_summary(n, s, r);
    }
  };
  switch (spec.axis) {
    case Axis::N: rebuild(k, spec.obs.s, spec.obs.r, true); break;
    case Axis::S: rebuild(spec.obs.n, k, spec.obs.r, false); break;
    case Axis::R: rebuild(spec.obs.n, spec.obs.s, k, false); break;
    case Axis::B: in.b = v; break;
    case Axis::Epsilon: in.pk.epsilon = v; break;
    case Axis::Theta: in.pk.theta = v; break;
    case Axis::Phi1: in.pk.phi1 = v; break;
    case Axis::Phi2: in.pk.phi2 = v; break;
  }
  return in;
}

AssessmentResult method_confidence(Method m, const PriorKnowledge& pk_in, const ObservationSummary& obs, double b,
                                   double beta_alpha_shape) {
  PriorKnowledge pk = pk_in;
  switch (m) {
    case Method::Univariate: return univariate_confidence(pk, obs, b);
    case Method::BetaBI: {
      const BetaFit f = beta_baseline_fit(beta_alpha_shape, pk, obs, b);
      AssessmentResult r;
      r.confidence = f.confidence;
      std::ostringstream tag;
      tag.precision(17);
      tag << "BetaBI/alpha=" << f.alpha << ",beta=" << f.beta;
      r.regime = tag.str();
      return r;
    }
    case Method::KlotzCBI: pk.independence_belief = IndependenceBelief::None; break;
    case Method::StrongPK5: pk.independence_belief = IndependenceBelief::Strong; break;
    case Method::WeakPK6: pk.independence_belief = IndependenceBelief::Weak; break;
  }
  return conservative_confidence(pk, obs, b);
}

std::vector<CurveRow> curve(const SweepSpec& spec, int jobs) {
  spec.validate();
  std::vector<CurveRow> rows(spec.values.size());
  auto one = [&](std::size_t i) {
    CurveRow& row = rows[i];
    row.value = spec.values[i];
    try {
      const Instance in = instance_at(spec, row.value);
      row.obs = in.obs;
      row.b = in.b;
      const AssessmentResult r = method_confidence(spec.method, in.pk, in.obs, in.b, spec.beta_alpha_shape);
      row.confidence = r.confidence;
      row.regime = r.regime;
    } catch (const std::exception& e) {
      row.confidence = std::numeric_limits<double>::quiet_NaN();
      row.error = e.what();
    }
  };
  if (jobs <= 1 || rows.size() < 2) {
    for (std::size_t i = 0; i < rows.size(); ++i) one(i);
  } else {
    std::vector<std::thread> pool;
    const std::size_t nj = std::min<std::size_t>(jobs, rows.size());
    for (std::size_t j = 0; j < nj; ++j)
      pool.emplace_back([&, j] {
        for (std::size_t i = j; i < rows.size(); i += nj) one(i);
      });
    for (auto& t : pool) t.join();
  }
  return rows;
}

namespace {

// log Gamma(z + a) - log Gamma(z) for large z, without cancellation.
double log_gamma_ratio(double z, double a) {
  auto series = [](double w) {
    const double w2 = w * w;
    return 1.0 / (12.0 * w) - 1.0 / (360.0 * w * w2) + 1.0 / (1260.0 * w * w2 * w2);
  };
  return (z - 0.5) * std::log1p(a / z) + a * std::log(z + a) - a + series(z + a) - series(z);
}

double log_beta(double a, double b) {
  if (a > b) std::swap(a, b);
  if (b >= 10.0) return std::lgamma(a) - log_gamma_ratio(b, a);
  return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

// Modified Lentz evaluation of the incomplete beta continued fraction.
double beta_cf(double x, double a, double b) {
  constexpr double tiny = 1e-300, eps = 1e-15;
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0, d = 1.0 - qab * x / qap;
  if (std::fabs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 5'000'000; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < eps) return h;
  }
  throw std::runtime_error("incomplete beta continued fraction did not converge");
}

}  // namespace

double incomplete_beta(double x, double a, double b) {
  if (!(a > 0 && b > 0)) throw std::domain_error("incomplete_beta: shapes must be positive");
  if (!(x >= 0 && x <= 1)) throw std::domain_error("incomplete_beta: x outside [0, 1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double lfront = a * std::log(x) + b * std::log1p(-x) - log_beta(a, b);
  if (x < (a + 1.0) / (a + b + 2.0)) return std::exp(lfront) * beta_cf(x, a, b) / a;
  return 1.0 - std::exp(lfront) * beta_cf(1.0 - x, b, a) / b;
}

BetaFit fit_beta(double alpha_shape, double epsilon, double theta) {
  if (!(alpha_shape > 0)) throw FitError("Beta shape alpha must be positive");
  if (!(theta > 0 && theta < 1)) throw FitError("Beta fit needs 0 < theta < 1");
  if (!(epsilon > 0 && epsilon < 1)) throw FitError("Beta fit needs 0 < epsilon < 1 (a Beta prior has no atom at 0)");
  auto q = [&](double lb) { return incomplete_beta(epsilon, alpha_shape, std::exp(lb)); };
  // I_eps(alpha, beta) increases with beta
  double lo = -40.0, hi = 60.0;
  if (q(lo) > theta || q(hi) < theta) throw FitError("theta is not reachable for this alpha and epsilon");
  while (hi - lo > 1e-13 * std::max(1.0, std::fabs(hi))) {
    const double mid = 0.5 * (lo + hi);
    (q(mid) < theta ? lo : hi) = mid;
  }
  return BetaFit{alpha_shape, std::exp(0.5 * (lo + hi)), 0.0};
}

BetaFit beta_baseline_fit(double alpha_shape, const PriorKnowledge& pk, const ObservationSummary& obs, double b) {
  validate(obs);
  BetaFit f = fit_beta(alpha_shape, pk.epsilon, pk.theta);
  // conjugate update; failures enter the first shape
  const double a = f.alpha + static_cast<double>(obs.s);
  const double bb = f.beta + static_cast<double>(obs.n - obs.s);
  f.confidence = incomplete_beta(b, a, bb);
  return f;
}

double beta_baseline(double alpha_shape, const PriorKnowledge& pk, const ObservationSummary& obs, double b) {
  return beta_baseline_fit(alpha_shape, pk, obs, b).confidence;
}

BoundResult confidence_bound(const PriorKnowledge& pk, const ObservationSummary& obs, double target, Method method) {
  if (!(target > 0 && target < 1)) throw NoBound("target confidence must lie strictly between 0 and 1");
  auto eval = [&](double b) { return method_confidence(method, pk, obs, b); };
  double lo = pk.epsilon > 0 ? pk.epsilon * (1 + 1e-12) : 1e-300;
  double hi = std::nextafter(0.5, 0.0);

  // bisection relies on monotonicity; check it on a log grid first
  double prev = -1.0;
  for (int i = 0; i <= 24; ++i) {
    const double b = std::clamp(std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * i / 24.0), lo, hi);
    const double c = eval(b).confidence;
    if (c < prev - 1e-9) throw std::runtime_error("confidence is not monotone in b; bisection is unsafe");
    prev = std::max(prev, c);
  }
  if (eval(hi).confidence < target) throw NoBound("target confidence is not reached for any b below 1/2");
  if (eval(lo).confidence >= target) {
    const AssessmentResult r = eval(lo);
    return {lo, r.confidence, r.regime};
  }
  while (hi / lo - 1.0 > 1e-6) {
    const double mid = std::clamp(std::sqrt(lo) * std::sqrt(hi), lo, hi);
    (eval(mid).confidence >= target ? hi : lo) = mid;
  }
  const AssessmentResult r = eval(hi);
  return {hi, r.confidence, r.regime};
}

Asymptote asymptote(const PriorKnowledge& pk, double b) {
  const double th = pk.theta, f2 = pk.phi2;
  if (pk.epsilon > 0) {
    if (f2 > 0) return {0.0, true};
    return {1.0, false};
  }
  if (f2 >= 1 - th) return {th / (th + (1 - b) * (1 - th)), false};
  return {th / (th + (1 - b) * f2), false};
}

}  // namespace cbi
