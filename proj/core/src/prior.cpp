#include "cbi/prior.hpp"

#include <cmath>
#include <sstream>

#include "cbi/numeric.hpp"

namespace cbi {

const char* to_string(IndependenceBelief b) {
  switch (b) {
    case IndependenceBelief::Strong: return "strong";
    case IndependenceBelief::Weak: return "weak";
    default: return "none";
  }
}

const char* to_string(XSide s) {
  switch (s) {
    case XSide::FromLeft: return "from_left";
    case XSide::FromRight: return "from_right";
    default: return "exact";
  }
}

const char* to_string(LambdaSide s) {
  switch (s) {
    case LambdaSide::FromAbove: return "from_above";
    case LambdaSide::FromBelow: return "from_below";
    default: return "exact";
  }
}

const char* to_string(Violation v) {
  switch (v) {
    case Violation::MassNotNormalized: return "MassNotNormalized";
    case Violation::NegativeMass: return "NegativeMass";
    case Violation::OutOfRegion: return "OutOfRegion";
    case Violation::ThetaViolated: return "ThetaViolated";
    case Violation::Phi1Violated: return "Phi1Violated";
    case Violation::Phi2Violated: return "Phi2Violated";
    case Violation::LowerBoundViolated: return "LowerBoundViolated";
  }
  return "?";
}

namespace {
bool unit(double v) { return v >= 0.0 && v <= 1.0; }
}  // namespace

void PriorKnowledge::validate() const {
  std::ostringstream m;
  if (!unit(p_l) || !unit(epsilon) || !unit(theta) || !unit(phi1) || !unit(phi2))
    m << "all prior parameters must lie in [0, 1]";
  else if (p_l > epsilon)
    m << "p_l must not exceed epsilon";
  else if (epsilon >= 1.0)
    m << "epsilon must be below 1";
  else if (phi1 + phi2 > 1.0 + 1e-15)
    m << "phi1 + phi2 must not exceed 1";
  if (!m.str().empty()) throw ConstraintError(m.str());
}

void PriorKnowledge::validate_claim(double b) const {
  validate();
  if (!(b > epsilon)) throw ConstraintError("claim bound b must exceed epsilon");
  if (!(b < 0.5)) throw ConstraintError("claim bound b must be below 1/2");
}

DiagonalSide diagonal_side(const SupportPoint& sp) {
  const double x = sp.point.x, l = sp.point.lambda;
  if (l < x) return DiagonalSide::Below;
  if (l > x) return DiagonalSide::Above;
  switch (sp.lambda_side) {
    case LambdaSide::FromBelow: return DiagonalSide::Below;
    case LambdaSide::FromAbove: return DiagonalSide::Above;
    default: return DiagonalSide::On;
  }
}

bool within_epsilon(const SupportPoint& sp, double epsilon) {
  if (sp.point.x < epsilon) return true;
  return sp.point.x == epsilon && sp.x_side != XSide::FromRight;
}

bool below_claim(const SupportPoint& sp, double b) {
  if (sp.point.x < b) return true;
  return sp.point.x == b && sp.x_side != XSide::FromRight;
}

bool below_lower_bound(const SupportPoint& sp, double p_l) {
  if (sp.point.x < p_l) return true;
  return sp.point.x == p_l && sp.x_side == XSide::FromLeft;
}

double DiscretePrior::total_mass() const {
  double m = 0.0;
  for (const auto& sp : support) m += sp.mass;
  return m;
}

std::vector<Violation> validate_prior(const DiscretePrior& prior, const PriorKnowledge& pk, double tol) {
  std::vector<Violation> out;
  double total = 0, eps_mass = 0, below = 0, above = 0, under_pl = 0;
  bool negative = false, outside = false;
  for (const auto& sp : prior.support) {
    if (sp.mass < 0 || !std::isfinite(sp.mass)) negative = true;
    if (!region_contains(sp.point)) outside = true;
    total += sp.mass;
    if (within_epsilon(sp, pk.epsilon)) eps_mass += sp.mass;
    const auto d = diagonal_side(sp);
    if (d == DiagonalSide::Below) below += sp.mass;
    if (d == DiagonalSide::Above) above += sp.mass;
    if (below_lower_bound(sp, pk.p_l)) under_pl += sp.mass;
  }
  if (std::fabs(total - 1.0) > tol) out.push_back(Violation::MassNotNormalized);
  if (negative) out.push_back(Violation::NegativeMass);
  if (outside) out.push_back(Violation::OutOfRegion);
  if (std::fabs(eps_mass - pk.theta) > tol) out.push_back(Violation::ThetaViolated);
  if (std::fabs(below - pk.phi1) > tol) out.push_back(Violation::Phi1Violated);
  if (std::fabs(above - pk.phi2) > tol) out.push_back(Violation::Phi2Violated);
  if (under_pl > tol) out.push_back(Violation::LowerBoundViolated);
  return out;
}

AssessmentResult posterior_confidence(const DiscretePrior& prior, const ObservationSummary& obs, double b) {
  return posterior_confidence(prior, transitions_from_summary(obs), b);
}

AssessmentResult posterior_confidence(const DiscretePrior& prior, const TransitionCounts& t, double b) {
  double total = 0;
  for (const auto& sp : prior.support) {
    if (sp.mass < 0 || !std::isfinite(sp.mass)) throw ConstraintError("prior has a negative or non-finite mass");
    if (!region_contains(sp.point)) throw ConstraintError("prior support point outside the region");
    total += sp.mass;
  }
  if (std::fabs(total - 1.0) > 1e-9) throw ConstraintError("prior masses do not sum to 1");

  // numerator: x below the claim; rest: x at or above it
  double log_num = num::kNegInf, log_rest = num::kNegInf;
  for (const auto& sp : prior.support) {
    if (sp.mass == 0.0) continue;
    const double v = std::log(sp.mass) + log_likelihood_ext(sp.point, t);
    if (below_claim(sp, b))
      log_num = num::log_add(log_num, v);
    else
      log_rest = num::log_add(log_rest, v);
  }
  AssessmentResult res;
  res.prior = prior;
  res.log_numerator = log_num;
  res.log_denominator = num::log_add(log_num, log_rest);
  if (res.log_denominator == num::kNegInf) {
    res.confidence = 0.0;
    res.degenerate = true;
  } else if (log_num == num::kNegInf) {
    res.confidence = 0.0;
  } else {
    // 1 / (1 + rest/num) keeps full relative precision near both 0 and 1
    res.confidence = 1.0 / (1.0 + std::exp(log_rest - log_num));
  }
  return res;
}

}  // namespace cbi
