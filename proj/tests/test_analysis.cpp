#include <cmath>

#include "cbi/analysis.hpp"
#include "cbi/worst_case.hpp"
#include "doctest.h"

using namespace cbi;

TEST_CASE("incomplete beta") {
  CHECK(incomplete_beta(0.5, 1, 1) == doctest::Approx(0.5));
  CHECK(incomplete_beta(0.3, 2, 1) == doctest::Approx(0.09));
  CHECK(incomplete_beta(0.3, 1, 3) == doctest::Approx(1 - std::pow(0.7, 3)));
  CHECK(incomplete_beta(0.2, 2.5, 3.5) + incomplete_beta(0.8, 3.5, 2.5) == doctest::Approx(1.0));
  // large second shape
  CHECK(incomplete_beta(1e-4, 1, 1e5) == doctest::Approx(1 - std::pow(1 - 1e-4, 1e5)).epsilon(1e-9));
  CHECK_THROWS_AS(incomplete_beta(0.5, 0, 1), std::domain_error);
}

TEST_CASE("beta baseline") {
  const PriorKnowledge pk{0, 1e-5, 0.75, 0.8, 0.15};
  const BetaFit f = fit_beta(0.03, pk.epsilon, pk.theta);
  CHECK(incomplete_beta(pk.epsilon, f.alpha, f.beta) == doctest::Approx(0.75).epsilon(1e-9));
  double prev = 0;
  for (std::int64_t n : {0, 100, 10000, 1000000}) {
    const double c = beta_baseline(0.03, pk, make_summary(n, 0, 0), 1e-4);
    CHECK(c >= prev);
    prev = c;
  }
  CHECK(prev > 0.99);
  CHECK_THROWS_AS(fit_beta(0.03, 0.0, 0.7), FitError);
  CHECK_THROWS_AS(fit_beta(-1, 1e-5, 0.7), FitError);
}

TEST_CASE("confidence bound") {
  const PriorKnowledge pk{0, 0, 0.7, 0, 0};
  const auto obs = make_summary(100000, 0, 0);
  const BoundResult r = confidence_bound(pk, obs, 0.99, Method::Univariate);
  CHECK(r.confidence >= 0.99);
  CHECK(r.b == doctest::Approx(-std::log(0.3 / 0.7 / 99) / 1e5).epsilon(1e-4));
  CHECK(method_confidence(Method::Univariate, pk, obs, r.b * (1 - 1e-5)).confidence < 0.99);
  CHECK_THROWS_AS(confidence_bound(pk, obs, 1.0, Method::Univariate), NoBound);
  CHECK_THROWS_AS(confidence_bound({0, 0, 0.7, 0.75, 0.1}, obs, 0.95, Method::KlotzCBI), NoBound);
}

TEST_CASE("asymptotes") {
  CHECK(asymptote({0, 0, 0.7, 0.75, 0.2}, 1e-4).value == doctest::Approx(0.7 / (0.7 + 0.9999 * 0.2)));
  CHECK(asymptote({0, 0, 0.7, 0.75, 0.2}, 1e-4).value == doctest::Approx(0.7778).epsilon(1e-4));
  CHECK(asymptote({0, 0, 0.7, 0.0, 0.5}, 1e-4).value == doctest::Approx(0.7 / (0.7 + 0.9999 * 0.3)));
  CHECK(asymptote({0, 1e-5, 0.7, 0.75, 0.0}, 1e-4).value == 1.0);
  CHECK(asymptote({0, 1e-5, 0.7, 0.75, 0.1}, 1e-4).zero_limit);
}

TEST_CASE("sweeps") {
  SweepSpec s;
  s.pk = {0, 1e-5, 0.75, 0.8, 0.15};
  s.obs = make_summary(1000, 0, 0);
  CHECK(curve(s).empty());

  s.values = {10, 100, 1000};
  const auto rows = curve(s, 2);
  REQUIRE(rows.size() == 3);
  for (const auto& r : rows) {
    CHECK(r.error.empty());
    CHECK(r.obs.n == static_cast<std::int64_t>(r.value));
  }

  s.values = {3, 2};
  CHECK_THROWS_AS(curve(s), ConstraintError);
  s.values = {1.5};
  CHECK_THROWS_AS(curve(s), ConstraintError);

  // infeasible rows are reported, not thrown
  s.axis = Axis::Phi2;
  s.values = {0.1, 0.3};
  const auto bad = curve(s);
  CHECK(bad[0].error.empty());
  CHECK_FALSE(bad[1].error.empty());
  CHECK(std::isnan(bad[1].confidence));
}

TEST_CASE("phi1 sweep is flat once phi1 reaches theta") {
  SweepSpec s;
  s.pk = {0, 1e-5, 0.75, 0.0, 0.15};
  s.obs = make_summary(20000, 0, 0);
  s.axis = Axis::Phi1;
  s.values = {0.75, 0.78, 0.8, 0.85};
  const auto rows = curve(s);
  for (const auto& r : rows) CHECK(r.confidence == doctest::Approx(rows[0].confidence).epsilon(1e-12));
}

TEST_CASE("method ordering on the first example") {
  const PriorKnowledge pk{0, 1e-5, 0.75, 0.8, 0.15};
  const double b = 1e-4;
  for (std::int64_t n : {1000, 10000, 100000}) {
    const auto obs = make_summary(n, 0, 0);
    const double k = method_confidence(Method::KlotzCBI, pk, obs, b).confidence;
    const double u = method_confidence(Method::Univariate, pk, obs, b).confidence;
    const double beta = method_confidence(Method::BetaBI, pk, obs, b).confidence;
    CAPTURE(n);
    CHECK(k <= u + 1e-12);
    CHECK(u <= beta + 1e-12);
  }
  // the dependence-aware curve peaks and then falls back
  double peak = 0, last = 0;
  for (double n = 10; n <= 1e8; n *= 1.5) {
    last = method_confidence(Method::KlotzCBI, pk, make_summary(static_cast<std::int64_t>(n), 0, 0), b).confidence;
    peak = std::max(peak, last);
  }
  CHECK(peak == doctest::Approx(0.79).epsilon(0.01));
  CHECK(last < 0.1);
}

TEST_CASE("axis and method names round trip") {
  for (Axis a : {Axis::N, Axis::B, Axis::Epsilon, Axis::Theta, Axis::Phi1, Axis::Phi2, Axis::S, Axis::R})
    CHECK(parse_axis(to_string(a)) == a);
  for (Method m : {Method::Univariate, Method::KlotzCBI, Method::BetaBI, Method::StrongPK5, Method::WeakPK6})
    CHECK(parse_method(to_string(m)) == m);
  CHECK_FALSE(parse_axis("lambda"));
}
