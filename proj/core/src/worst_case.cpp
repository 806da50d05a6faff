#include "cbi/worst_case.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>

#include "cbi/numeric.hpp"

namespace cbi {

using num::kNegInf;

const char* to_string(Theorem t) {
  switch (t) {
    case Theorem::Univariate: return "Univariate";
    case Theorem::NoFailures: return "NoFailures";
    case Theorem::WithFailures: return "WithFailures";
    case Theorem::StrongIndependence: return "StrongIndependence";
    case Theorem::WeakIndependence: return "WeakIndependence";
  }
  return "?";
}

namespace {

struct Cand {
  SupportPoint sp;
  double logl = kNegInf;
};

SupportPoint at(double x, double l, XSide xs = XSide::Exact, LambdaSide ls = LambdaSide::Exact) {
  return SupportPoint{KlotzPoint{x, l}, 0.0, xs, ls};
}

// On-diagonal limit points carry the side they are approached from.
SupportPoint tagged(double x, double l, XSide xs, LambdaSide side) {
  return at(x, l, xs, l == x ? side : LambdaSide::Exact);
}

Cand eval(const SupportPoint& sp, const TransitionCounts& t) { return Cand{sp, log_likelihood_ext(sp.point, t)}; }

// The first strictly better candidate wins, so list order breaks ties.
Cand pick_min(std::initializer_list<SupportPoint> pts, const TransitionCounts& t) {
  std::optional<Cand> best;
  for (const auto& sp : pts) {
    Cand c = eval(sp, t);
    if (!best || c.logl < best->logl) best = c;
  }
  return *best;
}

void keep_max(std::optional<Cand>& best, const SupportPoint& sp, const TransitionCounts& t) {
  Cand c = eval(sp, t);
  if (!best || c.logl > best->logl) best = c;
}

template <class P>
double segment_argmax(P param, double lo, double hi, const TransitionCounts& t) {
  return num::maximize_unit_segment([&](double s) { return log_likelihood_ext(project_to_region(param(s)), t); }, lo, hi).arg;
}

// A fixed (pre-placed) mass used by the independence-belief constructions.
struct Fixed {
  SupportPoint sp;
  double logl;
};

struct Lfp {
  double theta, phi1, phi2;
  double fixed_eps = 0.0;   // pre-placed diagonal mass inside x <= eps
  double fixed_rest = 0.0;  // pre-placed diagonal mass inside x > eps
  bool diag_free = true;    // false: no further diagonal mass allowed
};

struct LfpSolution {
  DiscretePrior prior;
  double confidence = 0.0;
  bool degenerate = false;
};

// Minimize the posterior over the mass polygon. Free variables are the masses a
// (eps cell, below diagonal) and p (eps cell, above); every other cell mass is
// affine in (a, p). The objective is linear-fractional so a vertex is optimal.
LfpSolution solve_lfp(const Lfp& q, const CellExtrema& c, const std::vector<Fixed>& fixed, double b) {
  struct Line {
    double ca, cp, k;  // ca*a + cp*p = k
  };
  const double s_hi = q.theta - q.fixed_eps;                       // a + p <= s_hi  (eps diag >= 0)
  const double s_lo = q.theta + q.phi1 + q.phi2 + q.fixed_rest - 1;  // a + p >= s_lo  (rest diag >= 0)
  const std::array<Line, 6> lines{{
      {1, 0, 0}, {0, 1, 0}, {1, 0, q.phi1}, {0, 1, q.phi2}, {1, 1, s_hi}, {1, 1, s_lo}}};

  constexpr double tol = 1e-12;
  auto masses = [&](double a, double p) {
    return std::array<double, 6>{a, q.theta - q.fixed_eps - a - p, p, q.phi1 - a, 1 - q.theta - q.phi1 - q.phi2 - q.fixed_rest + a + p,
                                 q.phi2 - p};
  };
  auto feasible = [&](const std::array<double, 6>& m) {
    for (double v : m)
      if (v < -tol) return false;
    if (!q.diag_free && (m[1] > tol || m[4] > tol)) return false;
    return true;
  };

  const std::array<SupportPoint, 6> pts{c.eps_below, c.eps_diag, c.eps_above, c.rest_below, c.rest_diag, c.rest_above};
  const std::array<double, 6> ll{c.l_eps_below, c.l_eps_diag, c.l_eps_above, c.l_rest_below, c.l_rest_diag, c.l_rest_above};

  std::optional<LfpSolution> best;
  std::optional<LfpSolution> degenerate;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    for (std::size_t j = i + 1; j < lines.size(); ++j) {
      const Line &u = lines[i], &v = lines[j];
      const double det = u.ca * v.cp - u.cp * v.ca;
      if (det == 0) continue;
      const double a = (u.k * v.cp - u.cp * v.k) / det;
      const double p = (u.ca * v.k - u.k * v.ca) / det;
      auto m = masses(a, p);
      if (!feasible(m)) continue;
      for (double& v2 : m) v2 = std::max(v2, 0.0);
      if (!q.diag_free) m[1] = m[4] = 0.0;

      double lnum = kNegInf, lrest = kNegInf;
      DiscretePrior prior;
      auto add = [&](const SupportPoint& sp, double mass, double logl) {
        if (mass <= 0) return;
        SupportPoint s = sp;
        s.mass = mass;
        prior.support.push_back(s);
        const double v3 = std::log(mass) + logl;
        if (below_claim(s, b))
          lnum = num::log_add(lnum, v3);
        else
          lrest = num::log_add(lrest, v3);
      };
      for (const auto& f : fixed) add(f.sp, f.sp.mass, f.logl);
      for (std::size_t k = 0; k < 6; ++k) add(pts[k], m[k], ll[k]);

      LfpSolution sol;
      sol.prior = std::move(prior);
      if (num::log_add(lnum, lrest) == kNegInf) {
        sol.degenerate = true;
        if (!degenerate) degenerate = sol;
        continue;
      }
      sol.confidence = lnum == kNegInf ? 0.0 : 1.0 / (1.0 + std::exp(lrest - lnum));
      if (!best || sol.confidence < best->confidence) best = std::move(sol);
    }
  }
  if (best) return *best;
  if (degenerate) return *degenerate;
  throw ConstraintError("prior constraints admit no feasible mass allocation");
}

std::string comparator_branch(const CellExtrema& c) {
  return c.pl_dominates ? "L(pl,pl)<L(eps,eps)" : "L(pl,pl)>=L(eps,eps)";
}

void check_inputs(const PriorKnowledge& pk, double b) { pk.validate_claim(b); }

bool strong_caption(const PriorKnowledge& pk) {
  return pk.phi1 + pk.phi2 >= 1 - pk.theta && pk.phi2 <= 1 - pk.theta;
}
bool weak_caption(const PriorKnowledge& pk) { return pk.phi1 + pk.phi2 >= pk.theta && pk.phi1 <= pk.theta; }

LfpSolution solve_general(const PriorKnowledge& pk, double b, const TransitionCounts& t) {
  const CellExtrema c = cell_extrema(pk, b, t);
  return solve_lfp(Lfp{pk.theta, pk.phi1, pk.phi2}, c, {}, b);
}

LfpSolution solve_belief(const PriorKnowledge& pk, double b, const TransitionCounts& t) {
  const CellExtrema c = cell_extrema(pk, b, t);
  Lfp q{pk.theta, pk.phi1, pk.phi2};
  q.diag_free = false;
  std::vector<Fixed> fixed;
  const double diag = std::max(0.0, 1.0 - pk.phi1 - pk.phi2);
  if (pk.independence_belief == IndependenceBelief::Strong) {
    // all independence mass where failure-free runs are most likely
    SupportPoint sp = at(pk.p_l, pk.p_l);
    sp.mass = diag;
    fixed.push_back({sp, log_likelihood_ext(sp.point, t)});
    q.fixed_eps = diag;
  } else {
    // as little as possible inside x <= eps; the rest pushed toward (1, 1)
    const double in_eps = std::max(0.0, pk.theta - pk.phi1 - pk.phi2);
    SupportPoint e = at(pk.epsilon, pk.epsilon);
    e.mass = in_eps;
    SupportPoint far = at(1.0, 1.0, XSide::FromLeft);
    far.mass = diag - in_eps;
    if (e.mass > 0) fixed.push_back({e, log_likelihood_ext(e.point, t)});
    if (far.mass > 0) fixed.push_back({far, log_likelihood_ext(far.point, t)});
    q.fixed_eps = in_eps;
    q.fixed_rest = diag - in_eps;
  }
  return solve_lfp(q, c, fixed, b);
}

AssessmentResult finish(const LfpSolution& s, const TransitionCounts& t, double b, const ScenarioRegime& r) {
  AssessmentResult res = posterior_confidence(s.prior, t, b);
  res.regime = r.tag();
  return res;
}

}  // namespace

CellExtrema cell_extrema(const PriorKnowledge& pk, double b, const TransitionCounts& t) {
  const double pl = pk.p_l, e = pk.epsilon;
  const LambdaSide below = LambdaSide::FromBelow, above = LambdaSide::FromAbove;
  const XSide ex = XSide::Exact, rb = XSide::FromRight;
  CellExtrema c{};

  // Infima over x <= eps: corners only, since the likelihood has no interior
  // minimum along vertical, horizontal or diagonal lines with x < 1/2.
  Cand am = pick_min({tagged(e, 0.0, ex, below), tagged(e, e, ex, below), tagged(pl, 0.0, ex, below),
                      tagged(pl, pl, ex, below)},
                     t);
  Cand ap = pick_min({tagged(e, e, ex, above), at(e, 1.0), tagged(pl, pl, ex, above), at(pl, 1.0)}, t);
  const Cand d_eps = eval(at(e, e), t), d_pl = eval(at(pl, pl), t);
  c.pl_dominates = d_pl.logl < d_eps.logl;
  const Cand a0 = c.pl_dominates ? d_pl : d_eps;

  // Suprema over x >= b of the x > eps cells; x = b is approached from the
  // right, where the claim indicator is 0.
  const KlotzPoint star = likelihood_argmax(t);
  const double xm = std::clamp(diagonal_mode(t), b, 1.0);
  auto xs = [&](double x) { return x == b ? rb : ex; };

  std::optional<Cand> bm, bp;
  if (star.x >= b && star.lambda <= star.x) keep_max(bm, tagged(star.x, star.lambda, xs(star.x), below), t);
  keep_max(bm, tagged(b, segment_argmax([&](double l) { return KlotzPoint{b, l}; }, 0.0, b, t), rb, below), t);
  keep_max(bm, tagged(xm, xm, xs(xm), below), t);
  {
    const double x = segment_argmax([](double x) { return KlotzPoint{x, 0.0}; }, b, 0.5, t);
    keep_max(bm, tagged(x, 0.0, xs(x), below), t);
  }
  if (t.beta == 0 || t.empty) {
    const double x = segment_argmax([](double x) { return KlotzPoint{x, lambda_floor(x)}; }, 0.5, 1.0, t);
    const KlotzPoint p = project_to_region({x, lambda_floor(x)});
    keep_max(bm, tagged(p.x, p.lambda, ex, below), t);
  }

  if (star.x >= b && star.lambda >= star.x) keep_max(bp, tagged(star.x, star.lambda, xs(star.x), above), t);
  keep_max(bp, tagged(b, segment_argmax([&](double l) { return KlotzPoint{b, l}; }, b, 1.0, t), rb, above), t);
  keep_max(bp, tagged(xm, xm, xs(xm), above), t);
  {
    const double x = segment_argmax([](double x) { return KlotzPoint{x, 1.0}; }, b, 1.0, t);
    keep_max(bp, tagged(x, 1.0, xs(x), above), t);
  }
  const Cand b0 = eval(at(xm, xm, xs(xm)), t);

  c.eps_below = am.sp, c.l_eps_below = am.logl;
  c.eps_diag = a0.sp, c.l_eps_diag = a0.logl;
  c.eps_above = ap.sp, c.l_eps_above = ap.logl;
  c.rest_below = bm->sp, c.l_rest_below = bm->logl;
  c.rest_diag = b0.sp, c.l_rest_diag = b0.logl;
  c.rest_above = bp->sp, c.l_rest_above = bp->logl;
  return c;
}

DiscretePrior univariate_worst_prior(const PriorKnowledge& pk, double b) {
  pk.validate();
  if (!(pk.epsilon < b)) throw ConstraintError("univariate prior needs epsilon < b");
  DiscretePrior d;
  if (pk.theta > 0) d.support.push_back({{pk.epsilon, pk.epsilon}, pk.theta});
  if (pk.theta < 1) d.support.push_back({{b, b}, 1.0 - pk.theta, XSide::FromRight});
  return d;
}

ScenarioRegime classify(const PriorKnowledge& pk, const ObservationSummary& obs, double b) {
  ScenarioRegime r;
  const double th = pk.theta, f1 = pk.phi1, f2 = pk.phi2;
  if (pk.independence_belief == IndependenceBelief::Strong) {
    r.theorem = Theorem::StrongIndependence;
    r.branch = "phi1+phi2>=1-theta,phi2<=1-theta";
    return r;
  }
  if (pk.independence_belief == IndependenceBelief::Weak) {
    r.theorem = Theorem::WeakIndependence;
    r.branch = "phi1+phi2>=theta,phi1<=theta";
    return r;
  }
  if (obs.s == 0) {
    r.theorem = Theorem::NoFailures;
    std::vector<std::string> hits;
    if (f1 >= th) hits.push_back("phi1>=theta");
    if (f2 >= 1 - th) hits.push_back("phi2>=1-theta");
    if (hits.empty()) hits.push_back("phi1<theta,phi2<1-theta");
    for (std::size_t i = 0; i < hits.size(); ++i) r.branch += (i ? "&" : "") + hits[i];
    return r;
  }
  r.theorem = Theorem::WithFailures;
  if (obs.r > 0) {
    if (f1 >= th) return r.branch = "r>0,phi1>=theta-zero-confidence", r;
    r.branch = f2 >= 1 - th ? "r>0,phi2>=1-theta" : "r>0,phi2<1-theta,phi1<theta";
  } else {
    if (f2 >= th) return r.branch = "r=0,phi2>=theta-zero-confidence", r;
    r.branch = f1 >= 1 - th ? "r=0,phi1>=1-theta" : "r=0,phi1<1-theta,phi2<theta";
  }
  const TransitionCounts t = transitions_from_summary(obs);
  const bool pl = log_likelihood_ext({pk.p_l, pk.p_l}, t) < log_likelihood_ext({pk.epsilon, pk.epsilon}, t);
  r.branch += pl ? ",L(pl,pl)<L(eps,eps)" : ",L(pl,pl)>=L(eps,eps)";
  (void)b;
  return r;
}

DiscretePrior no_failure_worst_prior(const PriorKnowledge& pk, double b, std::int64_t n) {
  check_inputs(pk, b);
  const ObservationSummary obs = make_summary(n, 0, 0);
  return solve_general(pk, b, transitions_from_summary(obs)).prior;
}

DiscretePrior with_failure_worst_prior(const PriorKnowledge& pk, double b, const ObservationSummary& obs) {
  check_inputs(pk, b);
  if (obs.s < 1) throw ConstraintError("with_failure_worst_prior needs at least one failure");
  return solve_general(pk, b, transitions_from_summary(obs)).prior;
}

DiscretePrior independence_belief_worst_prior(const PriorKnowledge& pk, double b, std::int64_t n) {
  check_inputs(pk, b);
  const auto belief = pk.independence_belief;
  if (belief == IndependenceBelief::None) throw UnsupportedRegime("no independence belief declared");
  if (belief == IndependenceBelief::Strong && !strong_caption(pk))
    throw UnsupportedRegime("strong independence belief needs phi1+phi2 >= 1-theta and phi2 <= 1-theta");
  if (belief == IndependenceBelief::Weak && !weak_caption(pk))
    throw UnsupportedRegime("weak independence belief needs phi1+phi2 >= theta and phi1 <= theta");
  const ObservationSummary obs = make_summary(n, 0, 0);
  return solve_belief(pk, b, transitions_from_summary(obs)).prior;
}

WorstCasePrior worst_case_prior(const PriorKnowledge& pk, const ObservationSummary& obs, double b) {
  check_inputs(pk, b);
  const TransitionCounts t = transitions_from_summary(obs);
  WorstCasePrior w;
  w.regime = classify(pk, obs, b);
  if (pk.independence_belief != IndependenceBelief::None) {
    if (obs.s != 0) throw UnsupportedRegime("independence beliefs are defined for failure-free runs only");
    w.prior = independence_belief_worst_prior(pk, b, obs.n);
  } else {
    w.prior = solve_general(pk, b, t).prior;
  }
  return w;
}

AssessmentResult conservative_confidence(const PriorKnowledge& pk, const ObservationSummary& obs, double b) {
  const WorstCasePrior w = worst_case_prior(pk, obs, b);
  AssessmentResult res = posterior_confidence(w.prior, obs, b);
  res.regime = w.regime.tag();
  return res;
}

AssessmentResult univariate_confidence(const PriorKnowledge& pk, const ObservationSummary& obs, double b) {
  check_inputs(pk, b);
  const TransitionCounts t = transitions_from_summary(obs);
  ScenarioRegime r{Theorem::Univariate, obs.s == 0 ? "failure-free" : "with-failures"};
  if (obs.s == 0) {
    AssessmentResult res = posterior_confidence(univariate_worst_prior(pk, b), t, b);
    res.regime = r.tag();
    return res;
  }
  // diagonal-only problem: the same cell optima with no off-diagonal mass
  PriorKnowledge diag = pk;
  diag.phi1 = diag.phi2 = 0;
  diag.independence_belief = IndependenceBelief::None;
  return finish(solve_general(diag, b, t), t, b, r);
}

}  // namespace cbi
