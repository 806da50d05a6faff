#pragma once

#include <string>
#include <vector>

#include "cbi/klotz.hpp"

namespace cbi {

enum class IndependenceBelief { None, Strong, Weak };

const char* to_string(IndependenceBelief b);

class ConstraintError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct PriorKnowledge {
  double p_l = 0.0;      // P(X >= p_l) = 1
  double epsilon = 0.0;  // P(X <= epsilon) = theta
  double theta = 0.0;
  double phi1 = 0.0;  // P(Lambda < X)
  double phi2 = 0.0;  // P(Lambda > X)
  IndependenceBelief independence_belief = IndependenceBelief::None;

  /// Throws ConstraintError on an infeasible parameter set.
  void validate() const;
  /// Also checks epsilon < b < 1/2.
  void validate_claim(double b) const;
};

enum class XSide { Exact, FromLeft, FromRight };
enum class LambdaSide { Exact, FromAbove, FromBelow };

const char* to_string(XSide s);
const char* to_string(LambdaSide s);

struct SupportPoint {
  KlotzPoint point;
  double mass = 0.0;
  XSide x_side = XSide::Exact;
  LambdaSide lambda_side = LambdaSide::Exact;
};

enum class DiagonalSide { Below, On, Above };

// Classification helpers; all honour the side tags.
DiagonalSide diagonal_side(const SupportPoint& sp);
bool within_epsilon(const SupportPoint& sp, double epsilon);
bool below_claim(const SupportPoint& sp, double b);
bool below_lower_bound(const SupportPoint& sp, double p_l);

struct DiscretePrior {
  std::vector<SupportPoint> support;

  double total_mass() const;
};

enum class Violation {
  MassNotNormalized,
  NegativeMass,
  OutOfRegion,
  ThetaViolated,
  Phi1Violated,
  Phi2Violated,
  LowerBoundViolated,
};

const char* to_string(Violation v);

std::vector<Violation> validate_prior(const DiscretePrior& prior, const PriorKnowledge& pk, double tol = 1e-9);

struct AssessmentResult {
  double confidence = 0.0;
  DiscretePrior prior;
  std::string regime;
  double log_numerator = 0.0;
  double log_denominator = 0.0;
  bool degenerate = false;  // every support likelihood was zero
};

AssessmentResult posterior_confidence(const DiscretePrior& prior, const ObservationSummary& obs, double b);
AssessmentResult posterior_confidence(const DiscretePrior& prior, const TransitionCounts& t, double b);

}  // namespace cbi
