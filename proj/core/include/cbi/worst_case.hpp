#pragma once

#include <string>

#include "cbi/prior.hpp"

namespace cbi {

enum class Theorem { Univariate, NoFailures, WithFailures, StrongIndependence, WeakIndependence };

const char* to_string(Theorem t);

struct ScenarioRegime {
  Theorem theorem = Theorem::Univariate;
  std::string branch;

  std::string tag() const { return std::string(to_string(theorem)) + "/" + branch; }
};

class UnsupportedRegime : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct WorstCasePrior {
  DiscretePrior prior;
  ScenarioRegime regime;
};

/// Two diagonal points: theta at (eps, eps), 1 - theta at (b, b) from the right.
DiscretePrior univariate_worst_prior(const PriorKnowledge& pk, double b);

DiscretePrior no_failure_worst_prior(const PriorKnowledge& pk, double b, std::int64_t n);
DiscretePrior with_failure_worst_prior(const PriorKnowledge& pk, double b, const ObservationSummary& obs);
DiscretePrior independence_belief_worst_prior(const PriorKnowledge& pk, double b, std::int64_t n);

/// Regime classification for (pk, obs, b) without building the prior.
ScenarioRegime classify(const PriorKnowledge& pk, const ObservationSummary& obs, double b);

WorstCasePrior worst_case_prior(const PriorKnowledge& pk, const ObservationSummary& obs, double b);

AssessmentResult conservative_confidence(const PriorKnowledge& pk, const ObservationSummary& obs, double b);

/// Confidence from the univariate worst-case prior (independence assumed).
AssessmentResult univariate_confidence(const PriorKnowledge& pk, const ObservationSummary& obs, double b);

// Extremal points of the six prior cells: {x <= eps, x > eps} crossed with
// {below, on, above} the diagonal. Infima for the eps side, suprema over
// x >= b for the other. Exposed for tests and the benchmark.
struct CellExtrema {
  SupportPoint eps_below, eps_diag, eps_above;
  SupportPoint rest_below, rest_diag, rest_above;
  double l_eps_below, l_eps_diag, l_eps_above;  // log-likelihoods
  double l_rest_below, l_rest_diag, l_rest_above;
  bool pl_dominates = false;  // L(p_l, p_l) <= L(eps, eps) picked (p_l, p_l)
};

CellExtrema cell_extrema(const PriorKnowledge& pk, double b, const TransitionCounts& t);

}  // namespace cbi
