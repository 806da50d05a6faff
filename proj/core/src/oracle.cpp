#include "cbi/oracle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <thread>

#include "cbi/numeric.hpp"

namespace cbi {

using num::kNegInf;

void GridSpec::validate() const {
  if (resolution < 11) throw ConstraintError("grid resolution must be at least 11");
  if (refine_rounds < 0) throw ConstraintError("refine_rounds must be nonnegative");
}

const char* to_string(Group g) {
  switch (g) {
    case Group::BelowLowerBound: return "below_pl";
    case Group::EpsBelow: return "eps_below";
    case Group::EpsDiag: return "eps_diag";
    case Group::EpsAbove: return "eps_above";
    case Group::RestBelow: return "rest_below";
    case Group::RestDiag: return "rest_diag";
    case Group::RestAbove: return "rest_above";
  }
  return "?";
}

Group group_of(const SupportPoint& sp, const PriorKnowledge& pk) {
  if (below_lower_bound(sp, pk.p_l)) return Group::BelowLowerBound;
  const bool eps = within_epsilon(sp, pk.epsilon);
  switch (diagonal_side(sp)) {
    case DiagonalSide::Below: return eps ? Group::EpsBelow : Group::RestBelow;
    case DiagonalSide::Above: return eps ? Group::EpsAbove : Group::RestAbove;
    default: return eps ? Group::EpsDiag : Group::RestDiag;
  }
}

namespace {

std::vector<double> x_nodes(const PriorKnowledge& pk, double b, int res) {
  std::vector<double> xs;
  for (int i = 0; i < res; ++i) xs.push_back(static_cast<double>(i) / (res - 1));
  double smallest = b;
  for (double v : {pk.p_l, pk.epsilon})
    if (v > 0) smallest = std::min(smallest, v);
  const double lo = std::max(-15.0, std::floor(std::log10(smallest)) - 3.0);
  for (int i = 0; i < res; ++i) xs.push_back(std::pow(10.0, lo * (1.0 - static_cast<double>(i) / (res - 1))));
  for (int k = 1; k <= 12; ++k) xs.push_back(1.0 - std::pow(10.0, -k));
  for (double v : {0.0, pk.p_l, pk.epsilon, b, 0.5, 1.0}) xs.push_back(v);
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  return xs;
}

std::vector<double> lambda_nodes(double x, int res) {
  const double f = lambda_floor(x);
  std::vector<double> ls;
  for (int i = 0; i < res; ++i) ls.push_back(f + (1.0 - f) * i / (res - 1));
  for (int k = 1; k <= 12; ++k) {
    const double d = (1.0 - f) * std::pow(10.0, -k);
    ls.push_back(f + d);
    ls.push_back(1.0 - d);
  }
  // very close to the floor: infima that are approached only as lambda -> 0
  for (int k : {16, 24, 32, 48, 64, 100, 150, 200, 300}) ls.push_back(f + (1.0 - f) * std::pow(10.0, -k));
  if (x >= f) ls.push_back(x);
  ls.push_back(1.0);
  for (double& l : ls) l = project_to_region({x, l}).lambda;
  std::sort(ls.begin(), ls.end());
  ls.erase(std::unique(ls.begin(), ls.end()), ls.end());
  return ls;
}

void push(std::vector<Candidate>& out, const PriorKnowledge& pk, KlotzPoint p, XSide xs = XSide::Exact,
          LambdaSide ls = LambdaSide::Exact) {
  if (!region_contains(p)) return;
  SupportPoint sp{p, 0.0, xs, ls};
  out.push_back({sp, group_of(sp, pk)});
}

}  // namespace

std::vector<Candidate> grid_candidates(const PriorKnowledge& pk, double b, const GridSpec& spec) {
  spec.validate();
  std::vector<Candidate> out;
  for (double x : x_nodes(pk, b, spec.resolution)) {
    for (double l : lambda_nodes(x, spec.resolution)) push(out, pk, {x, l});
    if (spec.side_padding) {
      // limit points approaching the diagonal from either side
      push(out, pk, {x, x}, XSide::Exact, LambdaSide::FromBelow);
      if (x < 1.0) push(out, pk, {x, x}, XSide::Exact, LambdaSide::FromAbove);
    }
  }
  if (spec.side_padding) {
    for (double edge : {pk.epsilon, b}) {
      for (double l : lambda_nodes(edge, spec.resolution)) {
        push(out, pk, {edge, l}, XSide::FromRight);
        if (l == edge) {
          push(out, pk, {edge, l}, XSide::FromRight, LambdaSide::FromBelow);
          push(out, pk, {edge, l}, XSide::FromRight, LambdaSide::FromAbove);
        }
      }
    }
  }
  return out;
}

namespace {

constexpr int kGroups = 6;  // every group except BelowLowerBound

int slot(Group g) { return static_cast<int>(g) - 1; }

struct Scored {
  SupportPoint sp;
  int slot;
  double logl;
  bool ind;  // claim indicator
};

struct Stat {
  // indicator-1 points: smallest likelihood (finite preferred)
  int i1 = -1;
  double l1 = std::numeric_limits<double>::infinity();
  // indicator-0 points: largest likelihood
  int i0 = -1;
  double l0 = kNegInf;
};

struct Vertex {
  std::array<double, kGroups> m;
};

struct FixedMass {
  SupportPoint sp;
  double logl;
  bool ind;
};

class Solver {
 public:
  Solver(const PriorKnowledge& pk, const TransitionCounts& t, double b) : pk_(pk), t_(t), b_(b) {}

  void add(const std::vector<Candidate>& cs, int jobs) {
    const std::size_t base = pts_.size();
    pts_.resize(base + cs.size());
    auto work = [&](std::size_t lo, std::size_t hi) {
      for (std::size_t i = lo; i < hi; ++i) {
        const auto& c = cs[i];
        pts_[base + i] = Scored{c.point, c.group == Group::BelowLowerBound ? -1 : slot(c.group),
                                log_likelihood_ext(c.point.point, t_), below_claim(c.point, b_)};
      }
    };
    if (jobs <= 1 || cs.size() < 4096) {
      work(0, cs.size());
    } else {
      std::vector<std::thread> th;
      const std::size_t chunk = (cs.size() + jobs - 1) / jobs;
      for (int j = 0; j < jobs; ++j) {
        const std::size_t lo = j * chunk, hi = std::min(cs.size(), lo + chunk);
        if (lo < hi) th.emplace_back(work, lo, hi);
      }
      for (auto& x : th) x.join();
    }
  }

  void set_fixed(std::vector<FixedMass> f) { fixed_ = std::move(f); }
  void set_polygon(std::vector<Vertex> v) { verts_ = std::move(v); }
  std::size_t size() const { return pts_.size(); }

  struct Witness {
    int vertex = -1;
    std::array<int, kGroups> pick{};
    double value = 0.0;
    double aux = 0.0;  // scaled auxiliary objective at the c it was built for
    double den = 0.0;  // scaled denominator
  };

  Witness solve() {
    stats();
    double lo = 0.0, hi = 1.0;
    while (hi - lo > 1e-12) {
      const double mid = 0.5 * (lo + hi);
      if (best_at(mid).aux > 0)
        lo = mid;
      else
        hi = mid;
    }
    Witness w = best_at(hi);
    w.value = value(w);
    // Dinkelbach polish: re-solve at the achieved ratio until it stops falling
    for (int it = 0; it < 50; ++it) {
      Witness nw = best_at(w.value);
      nw.value = value(nw);
      if (!(nw.value < w.value)) {
        w.aux = nw.aux;
        w.den = nw.den;
        break;
      }
      w = nw;
    }
    return w;
  }

  DiscretePrior prior(const Witness& w) const {
    DiscretePrior d;
    for (const auto& f : fixed_)
      if (f.sp.mass > 0) d.support.push_back(f.sp);
    for (int g = 0; g < kGroups; ++g) {
      const double m = verts_[w.vertex].m[g];
      if (m <= 0) continue;
      SupportPoint sp = pts_[w.pick[g]].sp;
      sp.mass = m;
      d.support.push_back(sp);
    }
    return d;
  }

  const SupportPoint& point(int i) const { return pts_[i].sp; }

 private:
  void stats() {
    st_.fill(Stat{});
    top_ = kNegInf;
    for (const auto& f : fixed_) top_ = std::max(top_, f.logl);
    std::array<int, kGroups> first_inf1;
    first_inf1.fill(-1);
    for (std::size_t i = 0; i < pts_.size(); ++i) {
      const auto& p = pts_[i];
      if (p.slot < 0) continue;
      top_ = std::max(top_, p.logl);
      Stat& s = st_[p.slot];
      if (p.ind) {
        // -inf likelihoods only count when a group has nothing else
        if (p.logl == kNegInf) {
          if (first_inf1[p.slot] < 0) first_inf1[p.slot] = static_cast<int>(i);
        } else if (p.logl < s.l1) {
          s.l1 = p.logl;
          s.i1 = static_cast<int>(i);
        }
      } else if (s.i0 < 0 || p.logl > s.l0) {
        s.l0 = p.logl;
        s.i0 = static_cast<int>(i);
      }
    }
    for (int g = 0; g < kGroups; ++g)
      if (st_[g].i1 < 0 && first_inf1[g] >= 0) st_[g].i1 = first_inf1[g], st_[g].l1 = kNegInf;
    if (top_ == kNegInf) top_ = 0.0;
  }

  double w(double logl) const { return std::exp(logl - top_); }

  // Minimizer of sum m_i L_i (1_i - c) over vertices and per-group choices.
  Witness best_at(double c) const {
    std::array<double, kGroups> h;
    std::array<int, kGroups> pick;
    std::array<double, kGroups> hl;
    for (int g = 0; g < kGroups; ++g) {
      const Stat& s = st_[g];
      double v = std::numeric_limits<double>::infinity();
      int k = -1;
      double lv = 0;
      if (s.i1 >= 0) v = (1.0 - c) * w(s.l1), k = s.i1, lv = w(s.l1);
      if (s.i0 >= 0) {
        const double v0 = -c * w(s.l0);
        if (v0 < v) v = v0, k = s.i0, lv = w(s.l0);
      }
      h[g] = v, pick[g] = k, hl[g] = lv;
    }
    double fixed_aux = 0, fixed_den = 0;
    for (const auto& f : fixed_) {
      fixed_aux += f.sp.mass * w(f.logl) * ((f.ind ? 1.0 : 0.0) - c);
      fixed_den += f.sp.mass * w(f.logl);
    }
    Witness best;
    best.aux = std::numeric_limits<double>::infinity();
    for (std::size_t vi = 0; vi < verts_.size(); ++vi) {
      double aux = fixed_aux, den = fixed_den;
      bool ok = true;
      for (int g = 0; g < kGroups; ++g) {
        const double m = verts_[vi].m[g];
        if (m <= 0) continue;
        if (pick[g] < 0) {
          ok = false;
          break;
        }
        aux += m * h[g];
        den += m * hl[g];
      }
      if (ok && aux < best.aux) {
        best.aux = aux;
        best.den = den;
        best.vertex = static_cast<int>(vi);
        best.pick = pick;
      }
    }
    if (best.vertex < 0) throw ConstraintError("oracle grid has no candidates for a group with positive mass");
    return best;
  }

  double value(const Witness& w) const { return posterior_confidence(prior(w), t_, b_).confidence; }

  const PriorKnowledge& pk_;
  const TransitionCounts& t_;
  double b_;
  std::vector<Scored> pts_;
  std::vector<FixedMass> fixed_;
  std::vector<Vertex> verts_;
  std::array<Stat, kGroups> st_{};
  double top_ = 0.0;
};

// Vertices of the feasible mass polygon in (a, p) = (eps_below, eps_above).
std::vector<Vertex> polygon(const PriorKnowledge& pk, double fixed_eps, double fixed_rest, bool diag_free) {
  const double th = pk.theta, f1 = pk.phi1, f2 = pk.phi2;
  auto masses = [&](double a, double p) {
    return std::array<double, kGroups>{a, th - fixed_eps - a - p, p, f1 - a, 1 - th - f1 - f2 - fixed_rest + a + p, f2 - p};
  };
  // boundary lines ca*a + cp*p = k
  const std::array<std::array<double, 3>, 6> lines{{{1, 0, 0},
                                                    {0, 1, 0},
                                                    {1, 0, f1},
                                                    {0, 1, f2},
                                                    {1, 1, th - fixed_eps},
                                                    {1, 1, th + f1 + f2 + fixed_rest - 1}}};
  std::vector<Vertex> out;
  for (std::size_t i = 0; i < lines.size(); ++i)
    for (std::size_t j = i + 1; j < lines.size(); ++j) {
      const auto &u = lines[i], &v = lines[j];
      const double det = u[0] * v[1] - u[1] * v[0];
      if (det == 0) continue;
      const double a = (u[2] * v[1] - u[1] * v[2]) / det, p = (u[0] * v[2] - u[2] * v[0]) / det;
      auto m = masses(a, p);
      bool ok = true;
      for (double x : m) ok = ok && x >= -1e-12;
      if (!diag_free) ok = ok && m[1] <= 1e-12 && m[4] <= 1e-12;
      if (!ok) continue;
      for (double& x : m) x = std::max(0.0, x);
      if (!diag_free) m[1] = m[4] = 0.0;
      out.push_back({m});
    }
  if (out.empty()) throw ConstraintError("prior constraints are infeasible");
  return out;
}

// Local candidates around a chosen support point, finer each round.
std::vector<Candidate> refine_around(const SupportPoint& sp, const PriorKnowledge& pk, double b, int round) {
  std::vector<Candidate> out;
  constexpr int K = 8;
  const double h = 0.4 * std::pow(0.1, round - 1) / K;
  const double u = num::logit(sp.point.x), v = num::logit(sp.point.lambda);
  const bool on_diag = sp.point.lambda == sp.point.x;
  const bool fixed_x = sp.x_side != XSide::Exact;
  for (int i = -K; i <= K; ++i) {
    if (on_diag) {
      if (fixed_x) break;
      const double x = num::inv_logit(u + i * h);
      push(out, pk, {x, x}, XSide::Exact, sp.lambda_side);
      continue;
    }
    for (int j = -K; j <= K; ++j) {
      if (fixed_x && i != 0) continue;
      const double x = fixed_x ? sp.point.x : num::inv_logit(u + i * h);
      const double l = num::inv_logit(v + j * h);
      push(out, pk, project_to_region({x, l}), sp.x_side, LambdaSide::Exact);
      // the same lambdas on the boundary columns the optimum often sits on
      if (i == 0 && !fixed_x) {
        push(out, pk, project_to_region({b, l}), XSide::FromRight, LambdaSide::Exact);
        push(out, pk, project_to_region({pk.epsilon, l}), XSide::Exact, LambdaSide::Exact);
      }
    }
  }
  std::erase_if(out, [](const Candidate& c) { return c.group == Group::BelowLowerBound; });
  return out;
}

}  // namespace

OracleResult infimum(const PriorKnowledge& pk, const ObservationSummary& obs, double b, const GridSpec& spec,
                     int jobs) {
  pk.validate_claim(b);
  spec.validate();
  const TransitionCounts t = transitions_from_summary(obs);

  Solver solver(pk, t, b);
  std::vector<FixedMass> fixed;
  double fixed_eps = 0, fixed_rest = 0;
  bool diag_free = true;
  if (pk.independence_belief != IndependenceBelief::None) {
    // the diagonal allocation is pinned before the fractional program runs
    const double diag = std::max(0.0, 1 - pk.phi1 - pk.phi2);
    auto fix = [&](SupportPoint sp) { fixed.push_back({sp, log_likelihood_ext(sp.point, t), below_claim(sp, b)}); };
    if (pk.independence_belief == IndependenceBelief::Strong) {
      fix({{pk.p_l, pk.p_l}, diag});
      fixed_eps = diag;
    } else {
      const double in_eps = std::max(0.0, pk.theta - pk.phi1 - pk.phi2);
      if (in_eps > 0) fix({{pk.epsilon, pk.epsilon}, in_eps});
      if (diag - in_eps > 0) fix({{1.0, 1.0}, diag - in_eps, XSide::FromLeft});
      fixed_eps = in_eps;
      fixed_rest = diag - in_eps;
    }
    diag_free = false;
  }
  solver.set_fixed(fixed);
  solver.set_polygon(polygon(pk, fixed_eps, fixed_rest, diag_free));
  solver.add(grid_candidates(pk, b, spec), jobs);

  OracleResult res;
  auto w = solver.solve();
  auto best = w;
  res.round_values.push_back(w.value);
  double last_change = 1.0;  // no refinement: uninformative bound
  for (int round = 1; round <= spec.refine_rounds; ++round) {
    // recentre at this scale until the picks stop improving, then shrink
    const double start = best.value;
    for (int pass = 0; pass < 12; ++pass) {
      std::vector<Candidate> extra;
      for (int g : best.pick) {
        if (g < 0) continue;
        auto local = refine_around(solver.point(g), pk, b, round);
        extra.insert(extra.end(), local.begin(), local.end());
      }
      solver.add(extra, jobs);
      w = solver.solve();
      const double gain = best.value - w.value;
      if (gain > 0) best = w;
      if (!(gain > 1e-15 * std::max(1e-300, best.value))) break;
    }
    last_change = start - best.value;
    res.round_values.push_back(best.value);
  }
  res.confidence = best.value;
  res.prior = solver.prior(best);
  res.certificate = best.den > 0 ? best.aux / best.den : 0.0;
  res.resolution_bound = spec.refine_rounds == 0 ? 1.0 : last_change + 1e-12;
  res.candidates = solver.size();
  return res;
}

}  // namespace cbi
