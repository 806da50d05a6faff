#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cbi/worst_case.hpp"

namespace cbi {

enum class Axis { N, B, Epsilon, Theta, Phi1, Phi2, S, R };
enum class Method { Univariate, KlotzCBI, BetaBI, StrongPK5, WeakPK6 };

const char* to_string(Axis a);
const char* to_string(Method m);
std::optional<Axis> parse_axis(const std::string& s);
std::optional<Method> parse_method(const std::string& s);

struct SweepSpec {
  PriorKnowledge pk;
  ObservationSummary obs;  // template; the swept field is overwritten per row
  double b = 1e-4;
  Axis axis = Axis::N;
  std::vector<double> values;
  Method method = Method::KlotzCBI;
  double beta_alpha_shape = 0.03;  // only for BetaBI

  void validate() const;
};

struct CurveRow {
  double value = 0.0;
  double confidence = 0.0;
  std::string regime;
  std::string error;  // non-empty when this row failed
  ObservationSummary obs;
  double b = 0.0;
};

/// Instance for one axis value (pk, obs, b after substitution).
struct Instance {
  PriorKnowledge pk;
  ObservationSummary obs;
  double b;
};
Instance instance_at(const SweepSpec& spec, double value);

/// Confidence in b from the chosen method. Throws on invalid input.
AssessmentResult method_confidence(Method m, const PriorKnowledge& pk, const ObservationSummary& obs, double b,
                                   double beta_alpha_shape = 0.03);

std::vector<CurveRow> curve(const SweepSpec& spec, int jobs = 1);

/// Regularized incomplete beta I_x(a, b).
double incomplete_beta(double x, double a, double b);

class FitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct BetaFit {
  double alpha = 0.0;
  double beta = 0.0;  // fitted so that I_eps(alpha, beta) = theta
  double confidence = 0.0;
};

BetaFit fit_beta(double alpha_shape, double epsilon, double theta);

/// Posterior P(X <= b) after n failure-free runs under the fitted Beta prior.
double beta_baseline(double alpha_shape, const PriorKnowledge& pk, const ObservationSummary& obs, double b);
BetaFit beta_baseline_fit(double alpha_shape, const PriorKnowledge& pk, const ObservationSummary& obs, double b);

class NoBound : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct BoundResult {
  double b = 0.0;
  double confidence = 0.0;  // achieved at b
  std::string regime;
};

/// Least b in (eps, 1/2) whose confidence reaches the target.
BoundResult confidence_bound(const PriorKnowledge& pk, const ObservationSummary& obs, double target, Method method);

struct Asymptote {
  double value = 0.0;
  bool zero_limit = false;  // confidence eventually decays to 0
};

Asymptote asymptote(const PriorKnowledge& pk, double b);

}  // namespace cbi
