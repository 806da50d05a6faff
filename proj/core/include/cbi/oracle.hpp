#pragma once

#include <vector>

#include "cbi/prior.hpp"

namespace cbi {

struct GridSpec {
  int resolution = 201;   // points per axis
  int refine_rounds = 2;  // local refinement passes around the chosen support
  bool side_padding = true;

  void validate() const;
};

// The seven subsets of the support region the constraints distinguish.
enum class Group { BelowLowerBound, EpsBelow, EpsDiag, EpsAbove, RestBelow, RestDiag, RestAbove };

const char* to_string(Group g);

Group group_of(const SupportPoint& sp, const PriorKnowledge& pk);

struct Candidate {
  SupportPoint point;  // mass unused
  Group group;
};

std::vector<Candidate> grid_candidates(const PriorKnowledge& pk, double b, const GridSpec& spec);

struct OracleResult {
  double confidence = 0.0;
  DiscretePrior prior;
  double resolution_bound = 0.0;
  double certificate = 0.0;  // auxiliary objective at the optimum over the denominator
  std::vector<double> round_values;  // value after the base grid and each refinement
  std::size_t candidates = 0;
};

/// Brute-force infimum of the posterior confidence over priors supported on
/// the candidate grid. jobs > 1 parallelizes likelihood evaluation.
OracleResult infimum(const PriorKnowledge& pk, const ObservationSummary& obs, double b, const GridSpec& spec = {},
                     int jobs = 1);

}  // namespace cbi
