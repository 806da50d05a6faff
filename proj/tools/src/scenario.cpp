#include "scenario.hpp"

#include <cmath>
#include <fstream>
#include <set>

namespace cbi::cli {

using nlohmann::json;

namespace {

// Walks one JSON object, remembering which keys were consumed so that
// leftovers can be reported as unknown fields.
class Obj {
 public:
  Obj(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ParseError(path_.empty() ? "/" : path_, "expected an object");
  }

  bool has(const std::string& k) const { return j_.contains(k); }
  std::string at(const std::string& k) const { return path_ + "/" + k; }

  const json* get(const std::string& k) {
    seen_.insert(k);
    auto it = j_.find(k);
    return it == j_.end() ? nullptr : &*it;
  }
  const json& need(const std::string& k) {
    const json* v = get(k);
    if (!v) throw ParseError(at(k), "required field is missing");
    return *v;
  }

  double num(const std::string& k, std::optional<double> dflt = std::nullopt) {
    const json* v = get(k);
    if (!v) {
      if (dflt) return *dflt;
      throw ParseError(at(k), "required field is missing");
    }
    if (!v->is_number()) throw ParseError(at(k), "expected a number");
    return v->get<double>();
  }

  std::int64_t integer(const std::string& k, std::optional<std::int64_t> dflt = std::nullopt) {
    const json* v = get(k);
    if (!v) {
      if (dflt) return *dflt;
      throw ParseError(at(k), "required field is missing");
    }
    if (v->is_number_integer()) return v->get<std::int64_t>();
    if (v->is_number_float()) {
      const double d = v->get<double>();
      if (d == std::floor(d) && std::fabs(d) < 9.0e15) return static_cast<std::int64_t>(d);
    }
    throw ParseError(at(k), "expected an integer");
  }

  std::optional<std::string> str(const std::string& k) {
    const json* v = get(k);
    if (!v) return std::nullopt;
    if (!v->is_string()) throw ParseError(at(k), "expected a string");
    return v->get<std::string>();
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) throw ParseError(at(it.key()), "unknown field");
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

Outcome outcome_of(const std::string& s, const std::string& path) {
  if (s == "S" || s == "success") return Outcome::Success;
  if (s == "F" || s == "failure") return Outcome::Failure;
  throw ParseError(path, "expected \"S\" or \"F\"");
}

IndependenceBelief belief_of(const std::string& s, const std::string& path) {
  if (s == "none") return IndependenceBelief::None;
  if (s == "strong") return IndependenceBelief::Strong;
  if (s == "weak") return IndependenceBelief::Weak;
  throw ParseError(path, "expected \"none\", \"strong\" or \"weak\"");
}

std::vector<double> sweep_values(const json& v, const std::string& path, bool integral) {
  std::vector<double> out;
  if (v.is_array()) {
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number()) throw ParseError(path + "/" + std::to_string(i), "expected a number");
      out.push_back(v[i].get<double>());
    }
    return out;
  }
  // generator form: {"from": a, "to": b, "count": k, "scale": "log" | "linear"}
  Obj g(v, path);
  const double from = g.num("from"), to = g.num("to");
  const std::int64_t count = g.integer("count");
  const std::string scale = g.str("scale").value_or("log");
  g.finish();
  if (count < 0) throw ParseError(path + "/count", "must be nonnegative");
  if (scale != "log" && scale != "linear") throw ParseError(path + "/scale", "expected \"log\" or \"linear\"");
  if (scale == "log" && !(from > 0 && to > 0)) throw ParseError(path, "log scale needs positive endpoints");
  for (std::int64_t i = 0; i < count; ++i) {
    const double t = count == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(count - 1);
    double x = scale == "log" ? std::exp(std::log(from) + t * (std::log(to) - std::log(from))) : from + t * (to - from);
    if (integral) x = std::round(x);
    if (!out.empty() && integral && x <= out.back()) continue;
    out.push_back(x);
  }
  return out;
}

}  // namespace

Scenario parse_scenario(const json& doc) {
  Scenario sc;
  Obj root(doc, "");

  if (const json* m = root.get("metadata")) {
    Obj o(*m, "/metadata");
    if (auto v = o.str("id")) sc.id = *v;
    if (auto v = o.str("description")) sc.description = *v;
    o.finish();
  }

  {
    Obj o(root.need("pk"), "/pk");
    sc.pk.p_l = o.num("p_l", 0.0);
    sc.pk.epsilon = o.num("epsilon");
    sc.pk.theta = o.num("theta");
    sc.pk.phi1 = o.num("phi1", 0.0);
    sc.pk.phi2 = o.num("phi2", 0.0);
    if (auto v = o.str("independence_belief")) sc.pk.independence_belief = belief_of(*v, "/pk/independence_belief");
    o.finish();
  }

  {
    Obj o(root.need("observation"), "/observation");
    const std::int64_t n = o.integer("n"), s = o.integer("s", 0), r = o.integer("r", 0);
    auto first = o.str("first"), last = o.str("last");
    o.finish();
    if (first && last) {
      sc.obs = ObservationSummary{n, s, r, outcome_of(*first, "/observation/first"),
                                  outcome_of(*last, "/observation/last")};
    } else {
      sc.obs = make_summary(n, s, r);
      // a single supplied end overrides the default; validation catches misfits
      if (first) sc.obs.first = outcome_of(*first, "/observation/first"), sc.obs.first_defaulted = false;
      if (last) sc.obs.last = outcome_of(*last, "/observation/last"), sc.obs.last_defaulted = false;
    }
  }

  if (const json* c = root.get("claim")) {
    Obj o(*c, "/claim");
    if (o.has("b")) sc.b = o.num("b");
    if (o.has("target_confidence")) sc.target_confidence = o.num("target_confidence");
    o.finish();
  }

  if (const json* s = root.get("sweep")) {
    Obj o(*s, "/sweep");
    SweepBlock sw;
    const auto axis = o.str("axis");
    if (!axis) throw ParseError("/sweep/axis", "required field is missing");
    auto a = parse_axis(*axis);
    if (!a) throw ParseError("/sweep/axis", "unknown axis \"" + *axis + "\"");
    sw.axis = *a;
    const bool integral = sw.axis == Axis::N || sw.axis == Axis::S || sw.axis == Axis::R;
    sw.values = sweep_values(o.need("values"), "/sweep/values", integral);
    if (const json* ms = o.get("methods")) {
      if (!ms->is_array()) throw ParseError("/sweep/methods", "expected an array");
      sw.methods.clear();
      for (std::size_t i = 0; i < ms->size(); ++i) {
        const std::string p = "/sweep/methods/" + std::to_string(i);
        if (!(*ms)[i].is_string()) throw ParseError(p, "expected a string");
        auto m = parse_method((*ms)[i].get<std::string>());
        if (!m) throw ParseError(p, "unknown method");
        sw.methods.push_back(*m);
      }
    }
    sw.beta_alpha = o.num("beta_alpha", 0.03);
    o.finish();
    sc.sweep = std::move(sw);
  }

  if (const json* g = root.get("oracle")) {
    Obj o(*g, "/oracle");
    sc.oracle.resolution = static_cast<int>(o.integer("resolution", 201));
    sc.oracle.refine_rounds = static_cast<int>(o.integer("refine_rounds", 2));
    o.finish();
  }

  root.finish();
  return sc;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("", "cannot open scenario file " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError("", std::string("invalid JSON: ") + e.what());
  }
  return parse_scenario(doc);
}

nlohmann::ordered_json observation_json(const ObservationSummary& o) {
  return nlohmann::ordered_json{{"n", o.n}, {"s", o.s}, {"r", o.r}, {"first", to_string(o.first)}, {"last", to_string(o.last)}};
}

nlohmann::ordered_json scenario_json(const Scenario& s) {
  using ojson = nlohmann::ordered_json;
  ojson j;
  j["metadata"] = {{"id", s.id}, {"description", s.description}};
  j["pk"] = {{"p_l", s.pk.p_l},
             {"epsilon", s.pk.epsilon},
             {"theta", s.pk.theta},
             {"phi1", s.pk.phi1},
             {"phi2", s.pk.phi2},
             {"independence_belief", to_string(s.pk.independence_belief)}};
  j["observation"] = observation_json(s.obs);
  if (s.b || s.target_confidence) {
    ojson c = ojson::object();
    if (s.b) c["b"] = *s.b;
    if (s.target_confidence) c["target_confidence"] = *s.target_confidence;
    j["claim"] = c;
  }
  if (s.sweep) {
    ojson ms = ojson::array();
    for (Method m : s.sweep->methods) ms.push_back(to_string(m));
    j["sweep"] = {{"axis", to_string(s.sweep->axis)},
                  {"values", s.sweep->values},
                  {"methods", ms},
                  {"beta_alpha", s.sweep->beta_alpha}};
  }
  j["oracle"] = {{"resolution", s.oracle.resolution}, {"refine_rounds", s.oracle.refine_rounds}};
  return j;
}

}  // namespace cbi::cli
