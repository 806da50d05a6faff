#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace cbi {

enum class Outcome { Success, Failure };

const char* to_string(Outcome o);

// Point in the support region: x is the stationary failure probability,
// lambda = P(failure | previous failure).
struct KlotzPoint {
  double x = 0.0;
  double lambda = 0.0;
};

// Alternative coordinates: y = (1 - lambda) x / (1 - x) = P(failure | previous success).
struct YPoint {
  double lambda = 0.0;
  double y = 0.0;
};

struct ObservationSummary {
  std::int64_t n = 0;
  std::int64_t s = 0;
  std::int64_t r = 0;
  Outcome first = Outcome::Success;
  Outcome last = Outcome::Success;
  // set when first/last were filled in by make_summary rather than given
  bool first_defaulted = false;
  bool last_defaulted = false;
};

struct TransitionCounts {
  std::int64_t alpha = 0;  // S -> F
  std::int64_t beta = 0;   // S -> S
  std::int64_t gamma = 0;  // F -> F
  std::int64_t delta = 0;  // F -> S
  Outcome first = Outcome::Success;
  // n = 0: no executions observed, the likelihood is identically 1
  bool empty = false;

  std::int64_t n() const { return empty ? 0 : alpha + beta + gamma + delta + 1; }
};

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Raised at (1,1) where the chain is not identifiable from the point.
class IllDefinedError : public DomainError {
 public:
  using DomainError::DomainError;
};

class InconsistentSummary : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Lower envelope of the region, max{0, (2x-1)/x}, taken as 0 at x = 0.
double lambda_floor(double x);

bool region_contains(KlotzPoint p);

/// Clamp a point that missed the region by rounding back onto it.
KlotzPoint project_to_region(KlotzPoint p);

double correlation_coefficient(KlotzPoint p);

YPoint to_y(KlotzPoint p);
KlotzPoint from_y(YPoint q);

/// Build a summary from (n, s, r) alone. first defaults to Success where
/// feasible; last is whichever outcome yields nonnegative transition counts.
ObservationSummary make_summary(std::int64_t n, std::int64_t s, std::int64_t r);

void validate(const ObservationSummary& obs);

TransitionCounts transitions_from_summary(const ObservationSummary& obs);

double log_likelihood(KlotzPoint p, const TransitionCounts& t);
double likelihood(KlotzPoint p, const TransitionCounts& t);

/// Same quantity evaluated through the (lambda, y) form.
double log_likelihood_y(YPoint q, const TransitionCounts& t);

/// Like log_likelihood but returns the continuous extension at (1,1)
/// instead of throwing. Used by optimizers that touch the corner.
double log_likelihood_ext(KlotzPoint p, const TransitionCounts& t);

double diagonal_mode(const TransitionCounts& t);

KlotzPoint likelihood_argmax(const TransitionCounts& t);

std::string describe(const ObservationSummary& obs);

}  // namespace cbi
