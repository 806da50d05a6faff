#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cbi/klotz.hpp"

namespace cbi {

// Name recorded in campaign metadata; the stream is std::mt19937_64 seeded
// through splitmix64, with uniforms taken from the top 53 bits.
inline constexpr const char* kGeneratorName = "mt19937_64/splitmix64-seed/u53";

struct CampaignTrace {
  std::vector<Outcome> outcomes;
  KlotzPoint ground_truth;
  std::uint64_t seed = 0;
  std::string generator = kGeneratorName;
};

struct SimulateOptions {
  bool allow_degenerate = false;  // permit (1,1): the all-failure chain
};

CampaignTrace simulate(KlotzPoint p, std::int64_t n, std::uint64_t seed, SimulateOptions opt = {});

/// Independent stream seeds derived from one master seed (for parallel traces).
std::uint64_t split_seed(std::uint64_t master, std::uint64_t index);

ObservationSummary summarize(const std::vector<Outcome>& outcomes);
inline ObservationSummary summarize(const CampaignTrace& t) { return summarize(t.outcomes); }

/// Direct transition counting on a sequence.
TransitionCounts count_transitions(const std::vector<Outcome>& outcomes);

struct Estimate {
  double x_hat = 0.0;
  double x_se = 0.0;
  std::optional<double> lambda_hat;  // undefined without failures before the last position
  double lambda_se = 0.0;
  std::int64_t executions = 0;
  std::int64_t failures = 0;
  std::int64_t transitions_from_failure = 0;
};

Estimate estimate(const std::vector<CampaignTrace>& traces);

}  // namespace cbi
