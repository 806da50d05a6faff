#include <cmath>
#include <random>

#include "cbi/analysis.hpp"
#include "cbi/worst_case.hpp"
#include "doctest.h"

using namespace cbi;

namespace {

// Random prior meeting the constraints with equality, built cell by cell.
DiscretePrior random_feasible(const PriorKnowledge& pk, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0, 1);
  const double th = pk.theta, f1 = pk.phi1, f2 = pk.phi2, mid = 1 - f1 - f2;
  double a, c, d;
  for (int tries = 0;; ++tries) {
    if (tries > 1000) return {};  // no exact prior exists (epsilon = 0 with phi1 > 1 - theta)
    // with epsilon = 0 the x <= epsilon cells sit at x = 0, where nothing is below the diagonal
    a = pk.epsilon > 0 ? u(rng) * std::min(th, f1) : 0.0;
    c = u(rng) * std::min(th - a, f2);
    d = th - a - c;
    if (d <= mid + 1e-15) break;
  }
  const double cells[6] = {a, d, c, f1 - a, mid - d, f2 - c};
  DiscretePrior p;
  for (int cell = 0; cell < 6; ++cell) {
    if (cells[cell] <= 0) continue;
    const int k = 1 + static_cast<int>(u(rng) * 3);
    for (int i = 0; i < k; ++i) {
      const bool eps = cell < 3;
      double x;
      if (eps) {
        x = pk.p_l + (pk.epsilon - pk.p_l) * u(rng);
      } else {
        // spread x over several decades above epsilon
        x = std::min(0.999, std::max(pk.epsilon, 1e-7) * std::pow(10.0, 0.01 + 5 * u(rng)));
        if (x <= pk.epsilon) x = std::nextafter(pk.epsilon, 1.0);
      }
      double l = x;
      const int side = cell % 3;
      if (side == 0) l = lambda_floor(x) + (x - lambda_floor(x)) * u(rng) * 0.999;
      if (side == 2) l = x + (1 - x) * (0.001 + 0.999 * u(rng));
      p.support.push_back({project_to_region({x, l}), cells[cell] / k});
      if (side == 0 && !(p.support.back().point.lambda < x)) p.support.back().point.lambda = 0.5 * x;
    }
  }
  return p;
}

}  // namespace

TEST_CASE("univariate prior and confidence") {
  const PriorKnowledge pk{0, 1e-5, 0.7, 0, 0};
  const auto p = univariate_worst_prior(pk, 1e-4);
  REQUIRE(p.support.size() == 2);
  CHECK(p.support[1].x_side == XSide::FromRight);
  const auto r = univariate_confidence(pk, make_summary(10000, 0, 0), 1e-4);
  const double num = 0.7 * std::pow(1 - 1e-5, 10000.0);
  CHECK(r.confidence == doctest::Approx(num / (num + 0.3 * std::pow(1 - 1e-4, 10000.0))).epsilon(1e-12));
}

TEST_CASE("no observations leave the prior mass theta") {
  for (double f1 : {0.0, 0.3, 0.8})
    for (double f2 : {0.0, 0.1}) {
      const PriorKnowledge pk{0, 1e-5, 0.75, f1, f2};
      CHECK(conservative_confidence(pk, make_summary(0, 0, 0), 1e-4).confidence == doctest::Approx(0.75).epsilon(1e-12));
    }
}

TEST_CASE("zero-confidence regimes") {
  const double b = 1e-3;
  {
    const PriorKnowledge pk{0, 1e-4, 0.6, 0.6, 0.1};
    const auto r = conservative_confidence(pk, make_summary(1000, 3, 1), b);
    CHECK(r.confidence == 0.0);
    CHECK(r.regime.find("zero-confidence") != std::string::npos);
  }
  {
    const PriorKnowledge pk{0, 1e-4, 0.3, 0.1, 0.4};
    const auto r = conservative_confidence(pk, make_summary(1000, 3, 0), b);
    CHECK(r.confidence == 0.0);
    CHECK(r.regime.find("zero-confidence") != std::string::npos);
  }
}

TEST_CASE("regime tags") {
  const double b = 1e-4;
  CHECK(classify({0, 1e-5, 0.75, 0.8, 0.15}, make_summary(10, 0, 0), b).tag() == "NoFailures/phi1>=theta");
  CHECK(classify({0, 1e-5, 0.75, 0.1, 0.3}, make_summary(10, 0, 0), b).tag() == "NoFailures/phi2>=1-theta");
  CHECK(classify({0, 1e-5, 0.75, 0.1, 0.1}, make_summary(10, 0, 0), b).tag() == "NoFailures/phi1<theta,phi2<1-theta");
  CHECK(classify({0, 1e-5, 0.5, 0.5, 0.5}, make_summary(10, 0, 0), b).tag() == "NoFailures/phi1>=theta&phi2>=1-theta");
  CHECK(classify({0, 1e-5, 0.75, 0.1, 0.1}, make_summary(10, 2, 1), b).theorem == Theorem::WithFailures);
}

TEST_CASE("independence beliefs outside their conditions are unsupported") {
  PriorKnowledge pk{0, 1e-5, 0.75, 0.1, 0.1, IndependenceBelief::Strong};
  CHECK_THROWS_AS(conservative_confidence(pk, make_summary(100, 0, 0), 1e-4), UnsupportedRegime);
  pk.independence_belief = IndependenceBelief::Weak;
  CHECK_THROWS_AS(conservative_confidence(pk, make_summary(100, 0, 0), 1e-4), UnsupportedRegime);
  pk = {0, 1e-5, 0.7, 0.7, 0.2, IndependenceBelief::Weak};
  CHECK_THROWS_AS(conservative_confidence(pk, make_summary(100, 2, 0), 1e-4), UnsupportedRegime);
}

TEST_CASE("independence beliefs never lower the confidence") {
  for (std::int64_t n : {10, 1000, 100000, 10000000}) {
    PriorKnowledge pk{0, 1e-5, 0.75, 0.8, 0.15};
    const auto obs = make_summary(n, 0, 0);
    const double base = conservative_confidence(pk, obs, 1e-4).confidence;
    pk.independence_belief = IndependenceBelief::Strong;
    const auto s = conservative_confidence(pk, obs, 1e-4);
    CHECK(s.confidence >= base - 1e-12);
    CHECK(validate_prior(s.prior, pk).empty());

    PriorKnowledge w{0, 1e-5, 0.7, 0.7, 0.2, IndependenceBelief::Weak};
    const double wbase = conservative_confidence({0, 1e-5, 0.7, 0.7, 0.2}, obs, 1e-4).confidence;
    const auto wr = conservative_confidence(w, obs, 1e-4);
    CHECK(wr.confidence >= wbase - 1e-12);
    CHECK(validate_prior(wr.prior, w).empty());
  }
}

TEST_CASE("reduces to the univariate result without dependence mass") {
  const PriorKnowledge pk{0, 1e-5, 0.7, 0, 0};
  for (std::int64_t n : {1, 50, 5000, 500000}) {
    const auto obs = make_summary(n, 0, 0);
    CHECK(conservative_confidence(pk, obs, 1e-4).confidence ==
          doctest::Approx(univariate_confidence(pk, obs, 1e-4).confidence).epsilon(1e-10));
  }
}

TEST_CASE("failure-free asymptote with epsilon = 0") {
  const PriorKnowledge pk{0, 0, 0.7, 0.75, 0.1};
  const double b = 1e-4;
  const Asymptote a = asymptote(pk, b);
  CHECK(a.value == doctest::Approx(0.7 / (0.7 + 0.9999 * 0.1)));
  const double c = conservative_confidence(pk, make_summary(1'000'000'000, 0, 0), b).confidence;
  CHECK(c == doctest::Approx(a.value).epsilon(1e-6));
  // and the curve approaches it from below
  CHECK(conservative_confidence(pk, make_summary(100000, 0, 0), b).confidence < a.value);
}

TEST_CASE("confidence is monotone in b") {
  const PriorKnowledge pk{0, 1e-5, 0.75, 0.8, 0.15};
  for (auto obs : {make_summary(10000, 0, 0), make_summary(10000, 2, 0)}) {
    double prev = 0;
    for (double b = 2e-5; b < 0.45; b *= 1.7) {
      const double c = conservative_confidence(pk, obs, b).confidence;
      CHECK(c >= prev - 1e-12);
      prev = c;
    }
  }
}

TEST_CASE("closed form is never above a random feasible prior") {
  std::mt19937_64 rng(20240611);
  const PriorKnowledge pks[] = {
      {0, 1e-5, 0.75, 0.8, 0.15},
      {0, 1e-4, 0.6, 0.2, 0.1},
      {0, 1e-3, 0.5, 0.1, 0.45},
      {1e-6, 1e-4, 0.8, 0.1, 0.05},
      {0, 0, 0.7, 0.75, 0.1},
  };
  const ObservationSummary obs[] = {make_summary(1000, 0, 0), make_summary(20000, 0, 0), make_summary(2000, 2, 0),
                                    make_summary(5000, 4, 2), make_summary(300, 1, 0)};
  int checked = 0;
  for (const auto& pk : pks) {
    const double b = std::max(10 * pk.epsilon, 1e-4);
    for (const auto& o : obs) {
      const auto w = conservative_confidence(pk, o, b);
      CHECK(validate_prior(w.prior, pk).empty());
      for (int k = 0; k < 40; ++k) {
        const DiscretePrior p = random_feasible(pk, rng);
        if (p.support.empty()) break;
        REQUIRE(validate_prior(p, pk, 1e-9).empty());
        const auto r = posterior_confidence(p, o, b);
        if (r.degenerate) continue;
        CHECK(w.confidence <= r.confidence + 1e-9);
        ++checked;
      }
    }
  }
  CHECK(checked > 400);
}

TEST_CASE("cell extrema bracket their cells") {
  const PriorKnowledge pk{0, 1e-5, 0.75, 0.8, 0.15};
  const auto t = transitions_from_summary(make_summary(1000, 0, 0));
  const CellExtrema c = cell_extrema(pk, 1e-4, t);
  CHECK(c.eps_diag.point.x <= pk.epsilon);
  CHECK(c.rest_diag.point.x >= 1e-4);
  CHECK(c.l_rest_diag <= c.l_rest_above + 1e-12);
  CHECK(c.l_eps_diag == doctest::Approx(log_likelihood({1e-5, 1e-5}, t)));
}
