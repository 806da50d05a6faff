#include "cbi/simulator.hpp"

#include <cmath>
#include <array>
#include <random>

namespace cbi {

namespace {

std::uint64_t splitmix64(std::uint64_t& s) {
  std::uint64_t z = (s += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

class Stream {
 public:
  explicit Stream(std::uint64_t seed) {
    std::uint64_t s = seed;
    // explicit 32-bit halves keep seeding independent of byte order
    std::array<std::uint32_t, 8> init{};
    for (std::size_t i = 0; i < init.size(); i += 2) {
      const std::uint64_t v = splitmix64(s);
      init[i] = static_cast<std::uint32_t>(v);
      init[i + 1] = static_cast<std::uint32_t>(v >> 32);
    }
    std::seed_seq seq(init.begin(), init.end());
    eng_.seed(seq);
  }
  // uniform in [0, 1) from the top 53 bits; independent of library distributions
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 eng_;
};

}  // namespace

std::uint64_t split_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t s = master ^ (0xd1b54a32d192ed03ULL * (index + 1));
  return splitmix64(s);
}

CampaignTrace simulate(KlotzPoint p, std::int64_t n, std::uint64_t seed, SimulateOptions opt) {
  if (!region_contains(p)) throw DomainError("simulate: point outside region");
  if (n < 1) throw std::invalid_argument("simulate: n must be at least 1");
  const bool corner = p.x == 1.0;
  if (corner && !opt.allow_degenerate) throw IllDefinedError("simulate: (1,1) needs allow_degenerate");

  CampaignTrace t;
  t.ground_truth = p;
  t.seed = seed;
  t.outcomes.reserve(static_cast<std::size_t>(n));
  Stream rng(seed);
  // P(F | F) = lambda, P(F | S) = y = (1 - lambda) x / (1 - x)
  const double y = corner ? 0.0 : to_y(p).y;
  Outcome prev = rng.uniform() < p.x ? Outcome::Failure : Outcome::Success;
  t.outcomes.push_back(prev);
  for (std::int64_t i = 1; i < n; ++i) {
    const double pf = prev == Outcome::Failure ? p.lambda : y;
    prev = rng.uniform() < pf ? Outcome::Failure : Outcome::Success;
    t.outcomes.push_back(prev);
  }
  return t;
}

ObservationSummary summarize(const std::vector<Outcome>& o) {
  ObservationSummary s;
  s.n = static_cast<std::int64_t>(o.size());
  if (o.empty()) return s;
  s.first = o.front();
  s.last = o.back();
  for (std::size_t i = 0; i < o.size(); ++i) {
    if (o[i] != Outcome::Failure) continue;
    ++s.s;
    if (i > 0 && o[i - 1] == Outcome::Failure) ++s.r;
  }
  return s;
}

TransitionCounts count_transitions(const std::vector<Outcome>& o) {
  TransitionCounts t;
  if (o.empty()) {
    t.empty = true;
    return t;
  }
  t.first = o.front();
  for (std::size_t i = 1; i < o.size(); ++i) {
    const bool a = o[i - 1] == Outcome::Failure, b = o[i] == Outcome::Failure;
    if (!a && b) ++t.alpha;
    if (!a && !b) ++t.beta;
    if (a && b) ++t.gamma;
    if (a && !b) ++t.delta;
  }
  return t;
}

Estimate estimate(const std::vector<CampaignTrace>& traces) {
  Estimate e;
  std::int64_t ff = 0;
  for (const auto& tr : traces) {
    const auto& o = tr.outcomes;
    e.executions += static_cast<std::int64_t>(o.size());
    for (std::size_t i = 0; i < o.size(); ++i) {
      if (o[i] != Outcome::Failure) continue;
      ++e.failures;
      if (i + 1 < o.size()) {
        ++e.transitions_from_failure;
        if (o[i + 1] == Outcome::Failure) ++ff;
      }
    }
  }
  if (e.executions > 0) {
    e.x_hat = static_cast<double>(e.failures) / static_cast<double>(e.executions);
    e.x_se = std::sqrt(e.x_hat * (1 - e.x_hat) / static_cast<double>(e.executions));
  }
  if (e.transitions_from_failure > 0) {
    const double l = static_cast<double>(ff) / static_cast<double>(e.transitions_from_failure);
    e.lambda_hat = l;
    e.lambda_se = std::sqrt(l * (1 - l) / static_cast<double>(e.transitions_from_failure));
  }
  return e;
}

}  // namespace cbi
