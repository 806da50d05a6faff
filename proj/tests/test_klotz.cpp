#include <cmath>
#include <random>
#include <vector>

#include "cbi/klotz.hpp"
#include "doctest.h"

using namespace cbi;

namespace {

// Likelihood of an explicit sequence via the chain's transition probabilities.
double sequence_prob(const std::vector<Outcome>& seq, KlotzPoint p) {
  const double x = p.x, l = p.lambda;
  const double y = x < 1 ? (1 - l) * x / (1 - x) : 0.0;  // P(F | S)
  double pr = seq[0] == Outcome::Failure ? x : 1 - x;
  for (std::size_t i = 1; i < seq.size(); ++i) {
    const bool pf = seq[i - 1] == Outcome::Failure, f = seq[i] == Outcome::Failure;
    pr *= pf ? (f ? l : 1 - l) : (f ? y : 1 - y);
  }
  return pr;
}

ObservationSummary summary_of(const std::vector<Outcome>& seq) {
  ObservationSummary o;
  o.n = static_cast<std::int64_t>(seq.size());
  for (std::size_t i = 0; i < seq.size(); ++i) {
    if (seq[i] != Outcome::Failure) continue;
    ++o.s;
    if (i > 0 && seq[i - 1] == Outcome::Failure) ++o.r;
  }
  o.first = seq.front();
  o.last = seq.back();
  return o;
}

TransitionCounts tc(std::int64_t a, std::int64_t b, std::int64_t g, std::int64_t d, Outcome first) {
  TransitionCounts t;
  t.alpha = a, t.beta = b, t.gamma = g, t.delta = d, t.first = first;
  return t;
}

}  // namespace

TEST_CASE("region membership") {
  CHECK(region_contains({0.5, 0.0}));
  CHECK_FALSE(region_contains({0.8, 0.5}));
  CHECK(region_contains({0.0, 0.7}));
  CHECK(region_contains({0.8, 0.7500001}));
  CHECK(region_contains(project_to_region({0.8, 0.75})));
  CHECK_FALSE(region_contains({-0.1, 0.5}));
  CHECK_FALSE(region_contains({0.3, 1.0000001}));
  CHECK(region_contains({1.0, 1.0}));
  CHECK_FALSE(region_contains({1.0, 0.999}));
  CHECK(lambda_floor(0.0) == 0.0);
  CHECK(lambda_floor(0.8) == doctest::Approx(0.75));
  // envelope points survive projection
  for (double x = 0.5; x <= 1.0; x += 0.0137) CHECK(region_contains(project_to_region({x, lambda_floor(x)})));
}

TEST_CASE("correlation coefficient") {
  CHECK(correlation_coefficient({0.3, 0.3}) == 0.0);
  CHECK(correlation_coefficient({1.0, 1.0}) == 1.0);
  CHECK(correlation_coefficient({0.0, 1.0}) == 1.0);
  CHECK(correlation_coefficient({0.2, 0.5}) > 0);
  CHECK(correlation_coefficient({0.2, 0.1}) < 0);
  CHECK_THROWS_AS(correlation_coefficient({0.8, 0.1}), DomainError);
}

TEST_CASE("y coordinates round trip") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0, 1);
  for (int i = 0; i < 1000; ++i) {
    const double x = u(rng) * 0.999;
    const double l = lambda_floor(x) + (1 - lambda_floor(x)) * u(rng);
    const YPoint q = to_y({x, l});
    CHECK(q.y >= 0);
    CHECK(q.y <= 1 + 1e-15);
    const KlotzPoint p = from_y(q);
    CHECK(p.x == doctest::Approx(x).epsilon(1e-12));
    CHECK(p.lambda == l);
  }
}

TEST_CASE("transition counts") {
  auto t = transitions_from_summary({10, 3, 1, Outcome::Failure, Outcome::Failure});
  CHECK(t.alpha == 1);
  CHECK(t.beta == 6);
  CHECK(t.gamma == 1);
  CHECK(t.delta == 1);
  t = transitions_from_summary({5, 0, 0, Outcome::Success, Outcome::Success});
  CHECK((t.alpha == 0 && t.beta == 4 && t.gamma == 0 && t.delta == 0));
  t = transitions_from_summary({8, 2, 0, Outcome::Success, Outcome::Failure});
  CHECK((t.alpha == 2 && t.beta == 4 && t.gamma == 0 && t.delta == 1));
  CHECK(t.n() == 8);

  CHECK_THROWS_AS(transitions_from_summary({5, 0, 0, Outcome::Failure, Outcome::Success}), InconsistentSummary);
  CHECK_THROWS_AS(transitions_from_summary({5, 2, 2, Outcome::Success, Outcome::Success}), InconsistentSummary);
  CHECK_THROWS_AS(transitions_from_summary({3, 3, 1, Outcome::Failure, Outcome::Failure}), InconsistentSummary);
  CHECK_THROWS_AS(transitions_from_summary({4, 5, 0, Outcome::Success, Outcome::Success}), InconsistentSummary);

  CHECK(transitions_from_summary({0, 0, 0}).empty);
}

TEST_CASE("summary defaults") {
  auto o = make_summary(10, 0, 0);
  CHECK(o.first == Outcome::Success);
  CHECK(o.last == Outcome::Success);
  CHECK(o.first_defaulted);
  o = make_summary(10, 3, 1);
  CHECK(o.first == Outcome::Success);
  CHECK(o.last == Outcome::Success);
  o = make_summary(3, 2, 0);  // only F S F fits
  CHECK_NOTHROW(transitions_from_summary(o));
  o = make_summary(4, 4, 3);
  CHECK(o.first == Outcome::Failure);
  CHECK(o.last == Outcome::Failure);
  CHECK_THROWS_AS(make_summary(4, 3, 0), InconsistentSummary);  // three isolated failures need 5 runs
}

TEST_CASE("likelihood values") {
  CHECK(log_likelihood({0.1, 0.1}, tc(0, 2, 0, 0, Outcome::Success)) == doctest::Approx(3 * std::log(0.9)));
  CHECK(log_likelihood({0.5, 1.0}, tc(0, 0, 2, 0, Outcome::Failure)) == doctest::Approx(std::log(0.5)));
  CHECK(log_likelihood({0.0, 0.0}, tc(0, 99, 0, 0, Outcome::Success)) == 0.0);

  const double b = 1e-4;
  for (std::int64_t n : {1, 10, 1000, 1000000}) {
    const auto t = transitions_from_summary(make_summary(n, 0, 0));
    CHECK(likelihood({b, 1.0}, t) == doctest::Approx(1 - b).epsilon(1e-14));
    CHECK(likelihood({b, b}, t) == doctest::Approx(std::pow(1 - b, static_cast<double>(n))).epsilon(1e-12));
    const double e = 1e-5;
    CHECK(likelihood({e, 0.0}, t) ==
          doctest::Approx((1 - e) * std::pow(1 - e / (1 - e), static_cast<double>(n - 1))).epsilon(1e-12));
  }
}

TEST_CASE("likelihood zeros and errors") {
  const auto t = tc(1, 3, 0, 1, Outcome::Success);
  CHECK(log_likelihood({0.3, 1.0}, t) == -INFINITY);  // lambda = 1 with delta > 0
  CHECK(log_likelihood({0.0, 0.2}, t) == -INFINITY);  // x = 0 with alpha > 0
  CHECK(log_likelihood({0.0, 0.2}, tc(0, 0, 0, 0, Outcome::Failure)) == -INFINITY);
  CHECK_THROWS_AS(log_likelihood({0.9, 0.1}, t), DomainError);
  CHECK_THROWS_AS(log_likelihood({1.0, 1.0}, tc(0, 0, 3, 0, Outcome::Failure)), IllDefinedError);
  CHECK(log_likelihood_ext({1.0, 1.0}, tc(0, 0, 3, 0, Outcome::Failure)) == 0.0);
  CHECK(log_likelihood({1.0, 1.0}, tc(0, 3, 0, 0, Outcome::Success)) == -INFINITY);
}

TEST_CASE("likelihood forms agree") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0, 1);
  for (int i = 0; i < 500; ++i) {
    const auto n = static_cast<std::int64_t>(2 + u(rng) * 200);
    const auto s = static_cast<std::int64_t>(u(rng) * n / 3);
    const auto r = s > 0 ? static_cast<std::int64_t>(u(rng) * s) : 0;
    ObservationSummary o;
    try {
      o = make_summary(n, s, r);
    } catch (const InconsistentSummary&) {
      continue;
    }
    const auto t = transitions_from_summary(o);
    const double x = 0.01 + 0.97 * u(rng);
    const double l = lambda_floor(x) + (1 - lambda_floor(x)) * (0.001 + 0.998 * u(rng));
    const double a = log_likelihood({x, l}, t), b = log_likelihood_y(to_y({x, l}), t);
    if (std::isfinite(a)) CHECK(std::fabs(a - b) <= 1e-10 * std::max(1.0, std::fabs(a)));
  }
}

TEST_CASE("exhaustive sequences match and sum to one") {
  const KlotzPoint pts[] = {{0.3, 0.3}, {0.2, 0.7}, {0.6, 0.4}, {0.45, 0.05}, {0.9, 0.95}};
  for (int n = 1; n <= 12; ++n) {
    for (const auto& p : pts) {
      double total = 0;
      for (std::uint32_t m = 0; m < (1u << n); ++m) {
        std::vector<Outcome> seq(n);
        for (int i = 0; i < n; ++i) seq[i] = (m >> i) & 1 ? Outcome::Failure : Outcome::Success;
        const double direct = sequence_prob(seq, p);
        const double model = likelihood(p, transitions_from_summary(summary_of(seq)));
        CHECK(std::fabs(direct - model) <= 1e-12 * direct + 1e-300);
        total += model;
      }
      CHECK(total == doctest::Approx(1.0).epsilon(1e-10));
    }
  }
}

TEST_CASE("diagonal mode") {
  CHECK(diagonal_mode(tc(1, 6, 1, 1, Outcome::Failure)) == doctest::Approx(0.3));
  CHECK(diagonal_mode(tc(0, 99, 0, 0, Outcome::Success)) == 0.0);
  const auto t = tc(2, 4, 0, 1, Outcome::Success);
  CHECK(diagonal_mode(t) == doctest::Approx(0.25));
  double best = -INFINITY, arg = 0;
  for (int i = 0; i <= 10000; ++i) {
    const double x = i / 10000.0 * 0.5;
    const double v = log_likelihood({x, x}, t);
    if (v > best) best = v, arg = x;
  }
  CHECK(arg == doctest::Approx(0.25).epsilon(1e-3));
}

TEST_CASE("likelihood argmax beats a dense grid") {
  const TransitionCounts cases[] = {tc(1, 6, 1, 1, Outcome::Failure), tc(2, 4, 0, 1, Outcome::Success),
                                    tc(3, 40, 5, 3, Outcome::Success), tc(0, 20, 0, 0, Outcome::Success),
                                    tc(0, 0, 6, 0, Outcome::Failure), tc(4, 2, 1, 4, Outcome::Failure)};
  for (const auto& t : cases) {
    const KlotzPoint m = likelihood_argmax(t);
    REQUIRE(region_contains(m));
    const double lm = log_likelihood_ext(m, t);
    double best = -INFINITY;
    KlotzPoint arg{};
    for (int i = 0; i <= 500; ++i)
      for (int j = 0; j <= 500; ++j) {
        const KlotzPoint p{i / 500.0, j / 500.0};
        if (!region_contains(p)) continue;
        const double v = log_likelihood_ext(p, t);
        if (v > best) best = v, arg = p;
      }
    CHECK(lm >= best - 1e-12);
    if (t.gamma + t.delta > 0 && t.alpha + t.beta > 0) {
      CHECK(std::fabs(m.x - arg.x) <= 2e-3);
      CHECK(std::fabs(m.lambda - arg.lambda) <= 2e-3);
    }
  }
  const KlotzPoint all_fail = likelihood_argmax(tc(0, 0, 6, 0, Outcome::Failure));
  CHECK(all_fail.lambda == 1.0);
}

TEST_CASE("unimodal along lines") {
  const auto t = tc(3, 40, 5, 3, Outcome::Success);
  auto count_peaks = [&](auto f) {
    std::vector<double> v;
    for (int i = 1; i < 1000; ++i) v.push_back(f(i / 1000.0));
    int peaks = 0;
    for (std::size_t i = 1; i + 1 < v.size(); ++i)
      if (v[i] > v[i - 1] + 1e-12 && v[i] > v[i + 1] + 1e-12) ++peaks;
    return peaks;
  };
  for (double c : {0.05, 0.2, 0.45}) CHECK(count_peaks([&](double l) { return log_likelihood({c, l}, t); }) <= 1);
  for (double c : {0.1, 0.5, 0.9})
    CHECK(count_peaks([&](double x) {
            return region_contains({x, c}) ? log_likelihood({x, c}, t) : -INFINITY;
          }) <= 1);
  CHECK(count_peaks([&](double x) { return log_likelihood({x, x}, t); }) <= 1);
}
