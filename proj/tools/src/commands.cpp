#include "commands.hpp"

#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <sstream>

#include "CLI11.hpp"
#include "campaign.hpp"
#include "cbi/version.hpp"
#include "format.hpp"
#include "scenario.hpp"

namespace cbi::cli {

using json = nlohmann::ordered_json;

namespace {

struct Options {
  std::string scenario;
  std::string out;
  std::string format = "json";
  std::string method;
  std::string campaign;
  int resolution = 0;  // 0: take from the scenario
  int refine = -1;
  int jobs = 1;
  bool corrupt_prior = false;
  double x = 0, lambda = 0;
  std::int64_t n = 0;
  std::uint64_t seed = 0;
};

class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : os_(&fallback) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
      if (!*file_) throw std::runtime_error("cannot open " + path + " for writing");
      os_ = file_.get();
    }
  }
  std::ostream& operator*() { return *os_; }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* os_;
};

json header(const Scenario& sc, const char* command) {
  return json{{"version", kVersion}, {"command", command}, {"scenario_id", sc.id}};
}

json echo_observation(const ObservationSummary& o) {
  json j = observation_json(o);
  j["first_defaulted"] = o.first_defaulted;
  j["last_defaulted"] = o.last_defaulted;
  return j;
}

json prior_json(const DiscretePrior& p, double b) {
  json a = json::array();
  for (const auto& sp : p.support)
    a.push_back({{"x", sp.point.x},
                 {"lambda", sp.point.lambda},
                 {"mass", sp.mass},
                 {"x_side", to_string(sp.x_side)},
                 {"lambda_side", to_string(sp.lambda_side)},
                 {"below_claim", below_claim(sp, b)}});
  return a;
}

double need_b(const Scenario& sc) {
  if (!sc.b) throw ConstraintError("scenario has no claim.b");
  return *sc.b;
}

Method default_method(const PriorKnowledge& pk) {
  switch (pk.independence_belief) {
    case IndependenceBelief::Strong: return Method::StrongPK5;
    case IndependenceBelief::Weak: return Method::WeakPK6;
    default: return Method::KlotzCBI;
  }
}

int cmd_assess(const Options& o, std::ostream& out) {
  const Scenario sc = load_scenario(o.scenario);
  const double b = need_b(sc);
  const AssessmentResult r = conservative_confidence(sc.pk, sc.obs, b);
  Sink sink(o.out, out);
  if (o.format == "csv") {
    *sink << "x,lambda,mass,x_side,lambda_side,below_claim\n";
    for (const auto& sp : r.prior.support)
      *sink << num17(sp.point.x) << "," << num17(sp.point.lambda) << "," << num17(sp.mass) << ","
            << to_string(sp.x_side) << "," << to_string(sp.lambda_side) << "," << (below_claim(sp, b) ? 1 : 0) << "\n";
    return kOk;
  }
  json j = header(sc, "assess");
  j["observation"] = echo_observation(sc.obs);
  j["b"] = b;
  j["confidence"] = r.confidence;
  j["regime"] = r.regime;
  j["log_numerator"] = r.log_numerator;
  j["log_denominator"] = r.log_denominator;
  j["degenerate"] = r.degenerate;
  j["prior"] = prior_json(r.prior, b);
  write_json(*sink, j);
  return kOk;
}

int cmd_sweep(const Options& o, std::ostream& out, std::ostream& err) {
  const Scenario sc = load_scenario(o.scenario);
  if (!sc.sweep) throw ConstraintError("scenario has no sweep block");
  const SweepBlock& sw = *sc.sweep;
  SweepSpec spec;
  spec.pk = sc.pk;
  spec.obs = sc.obs;
  spec.axis = sw.axis;
  spec.values = sw.values;
  spec.beta_alpha_shape = sw.beta_alpha;
  if (sw.axis != Axis::B) spec.b = need_b(sc);
  validate(sc.obs);
  spec.validate();

  struct Out {
    Method m;
    std::vector<CurveRow> rows;
  };
  std::vector<Out> all;
  for (Method m : sw.methods) {
    spec.method = m;
    all.push_back({m, curve(spec, o.jobs)});
  }

  std::size_t failed = 0;
  Sink sink(o.out, out);
  if (o.format == "csv") {
    *sink << "scenario_id,method,axis,value,n,s,r,b,confidence,regime\n";
    for (const auto& [m, rows] : all)
      for (const auto& row : rows) {
        failed += !row.error.empty();
        *sink << csv_field(sc.id) << "," << to_string(m) << "," << to_string(sw.axis) << "," << num17(row.value) << ","
              << row.obs.n << "," << row.obs.s << "," << row.obs.r << "," << num17(row.b) << ","
              << num17(row.confidence) << "," << csv_field(row.error.empty() ? row.regime : "error: " + row.error)
              << "\n";
      }
  } else {
    json j = header(sc, "sweep");
    j["axis"] = to_string(sw.axis);
    json rows = json::array();
    for (const auto& [m, rs] : all)
      for (const auto& row : rs) {
        failed += !row.error.empty();
        json r{{"method", to_string(m)}, {"value", row.value}, {"n", row.obs.n},   {"s", row.obs.s},
               {"r", row.obs.r},         {"b", row.b},         {"confidence", row.confidence}, {"regime", row.regime}};
        if (!row.error.empty()) r["error"] = row.error;
        rows.push_back(std::move(r));
      }
    j["rows"] = std::move(rows);
    write_json(*sink, j);
  }
  if (failed) err << "warning: " << failed << " sweep row(s) could not be evaluated\n";
  return kOk;
}

int cmd_bound(const Options& o, std::ostream& out) {
  const Scenario sc = load_scenario(o.scenario);
  if (!sc.target_confidence) throw ConstraintError("scenario has no claim.target_confidence");
  Method m = default_method(sc.pk);
  if (!o.method.empty()) {
    auto p = parse_method(o.method);
    if (!p) throw CLI::ValidationError("--method", "unknown method " + o.method);
    m = *p;
  }
  const BoundResult r = confidence_bound(sc.pk, sc.obs, *sc.target_confidence, m);
  Sink sink(o.out, out);
  json j = header(sc, "bound");
  j["observation"] = echo_observation(sc.obs);
  j["method"] = to_string(m);
  j["target_confidence"] = *sc.target_confidence;
  j["bound"] = r.b;
  j["confidence"] = r.confidence;
  j["regime"] = r.regime;
  write_json(*sink, j);
  return kOk;
}

int cmd_verify(const Options& o, std::ostream& out) {
  const Scenario sc = load_scenario(o.scenario);
  const double b = need_b(sc);
  GridSpec grid = sc.oracle;
  if (o.resolution > 0) grid.resolution = o.resolution;
  if (o.refine >= 0) grid.refine_rounds = o.refine;

  AssessmentResult closed = conservative_confidence(sc.pk, sc.obs, b);
  if (o.corrupt_prior && !closed.prior.support.empty()) {
    // test hook: break the closed-form prior so verification must fail
    for (auto& sp : closed.prior.support) sp.mass *= 0.9;
    closed.prior.support.push_back(SupportPoint{{0.45, 0.45}, 0.1});
    const std::string regime = closed.regime;
    closed = posterior_confidence(closed.prior, sc.obs, b);
    closed.regime = regime;
  }
  const auto violations = validate_prior(closed.prior, sc.pk);
  const OracleResult orc = infimum(sc.pk, sc.obs, b, grid, o.jobs);

  const double gap = std::fabs(closed.confidence - orc.confidence);
  const bool within = gap <= orc.resolution_bound;
  const bool conservative = closed.confidence <= orc.confidence + orc.resolution_bound;
  const bool ok = within && conservative && violations.empty();

  Sink sink(o.out, out);
  json j = header(sc, "verify");
  j["observation"] = echo_observation(sc.obs);
  j["b"] = b;
  j["regime"] = closed.regime;
  j["closed_form"] = closed.confidence;
  j["oracle"] = orc.confidence;
  j["gap"] = gap;
  j["resolution_bound"] = orc.resolution_bound;
  j["round_values"] = orc.round_values;
  j["grid"] = {{"resolution", grid.resolution}, {"refine_rounds", grid.refine_rounds}, {"candidates", orc.candidates}};
  json v = json::array();
  for (auto x : violations) v.push_back(to_string(x));
  j["prior_violations"] = v;
  j["within_bound"] = within;
  j["closed_form_not_above_oracle"] = conservative;
  j["ok"] = ok;
  j["closed_form_prior"] = prior_json(closed.prior, b);
  j["oracle_prior"] = prior_json(orc.prior, b);
  write_json(*sink, j);
  return ok ? kOk : kFailed;
}

int cmd_simulate(const Options& o, std::ostream& out) {
  const CampaignTrace t = simulate(KlotzPoint{o.x, o.lambda}, o.n, o.seed);
  Sink sink(o.out, out);
  write_campaign(*sink, t);
  return kOk;
}

int cmd_summarize(const Options& o, std::ostream& out) {
  const CampaignTrace t = load_campaign(o.campaign);
  const ObservationSummary obs = summarize(t);
  Sink sink(o.out, out);
  if (o.scenario.empty()) {
    write_json(*sink, json{{"observation", observation_json(obs)}});
  } else {
    Scenario sc = load_scenario(o.scenario);
    sc.obs = obs;
    write_json(*sink, scenario_json(sc));
  }
  return kOk;
}

json error_object(int code, const char* kind, const std::string& msg, const std::string* path = nullptr) {
  json e{{"exit_code", code}, {"kind", kind}, {"message", msg}};
  if (path) e["path"] = *path;
  return json{{"error", e}};
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Conservative reliability claims under dependent executions", "cbi"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  Options o;

  auto scenario_opt = [&](CLI::App* c) { c->add_option("--scenario", o.scenario, "scenario JSON file")->required(); };
  auto out_opt = [&](CLI::App* c) { c->add_option("--out", o.out, "write the report here instead of stdout"); };
  auto format_opt = [&](CLI::App* c) {
    c->add_option("--format", o.format, "output format")->check(CLI::IsMember({"csv", "json"}));
  };
  auto jobs_opt = [&](CLI::App* c) { c->add_option("--jobs", o.jobs, "worker threads")->check(CLI::Range(1, 256)); };

  auto* assess = app.add_subcommand("assess", "conservative confidence and worst-case prior for a scenario");
  scenario_opt(assess), out_opt(assess), format_opt(assess);

  auto* sweep = app.add_subcommand("sweep", "confidence curves along the scenario's sweep axis");
  scenario_opt(sweep), out_opt(sweep), jobs_opt(sweep);
  sweep->add_option("--format", o.format, "output format")->check(CLI::IsMember({"csv", "json"}))->default_str("csv");

  auto* bound = app.add_subcommand("bound", "smallest b reaching claim.target_confidence");
  scenario_opt(bound), out_opt(bound);
  bound->add_option("--method", o.method, "Univariate, KlotzCBI, BetaBI, StrongPK5 or WeakPK6");

  auto* verify = app.add_subcommand("verify", "compare the closed form with the brute-force oracle");
  scenario_opt(verify), out_opt(verify), jobs_opt(verify);
  verify->add_option("--resolution", o.resolution, "grid points per axis")->check(CLI::PositiveNumber);
  verify->add_option("--refine", o.refine, "local refinement rounds")->check(CLI::NonNegativeNumber);
  verify->add_flag("--corrupt-prior", o.corrupt_prior)->group("");  // test hook

  auto* sim = app.add_subcommand("simulate", "simulate a campaign from the dependence model");
  sim->add_option("--x", o.x, "failure probability")->required();
  sim->add_option("--lambda", o.lambda, "P(failure | previous failure)")->required();
  sim->add_option("--n", o.n, "executions")->required();
  sim->add_option("--seed", o.seed, "generator seed");
  out_opt(sim);

  auto* summ = app.add_subcommand("summarize", "turn a campaign file into a scenario observation block");
  summ->add_option("campaign,--campaign", o.campaign, "campaign file")->required();
  summ->add_option("--scenario", o.scenario, "template scenario; emit a complete scenario with the new observation");
  out_opt(summ);

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << "\n";
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    write_json(out, error_object(kParseError, "usage", e.what()));
    return kParseError;
  }

  try {
    if (assess->parsed()) return cmd_assess(o, out);
    if (sweep->parsed()) {
      if (sweep->count("--format") == 0) o.format = "csv";
      return cmd_sweep(o, out, err);
    }
    if (bound->parsed()) return cmd_bound(o, out);
    if (verify->parsed()) return cmd_verify(o, out);
    if (sim->parsed()) return cmd_simulate(o, out);
    if (summ->parsed()) return cmd_summarize(o, out);
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
    write_json(out, error_object(kParseError, "parse", e.what(), &e.path()));
    return kParseError;
  } catch (const UnsupportedRegime& e) {
    err << "unsupported regime: " << e.what() << "\n";
    write_json(out, error_object(kUnsupportedRegime, "unsupported_regime", e.what()));
    return kUnsupportedRegime;
  } catch (const NoBound& e) {
    err << "no bound: " << e.what() << "\n";
    write_json(out, error_object(kNoBound, "no_bound", e.what()));
    return kNoBound;
  } catch (const CLI::ValidationError& e) {
    err << e.what() << "\n";
    write_json(out, error_object(kParseError, "usage", e.what()));
    return kParseError;
  } catch (const FitError& e) {
    err << "validation error: " << e.what() << "\n";
    write_json(out, error_object(kValidationError, "validation", e.what()));
    return kValidationError;
  } catch (const std::invalid_argument& e) {  // ConstraintError, InconsistentSummary
    err << "validation error: " << e.what() << "\n";
    write_json(out, error_object(kValidationError, "validation", e.what()));
    return kValidationError;
  } catch (const std::domain_error& e) {  // DomainError
    err << "validation error: " << e.what() << "\n";
    write_json(out, error_object(kValidationError, "validation", e.what()));
    return kValidationError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    write_json(out, error_object(kFailed, "internal", e.what()));
    return kFailed;
  }
  return kFailed;
}

}  // namespace cbi::cli
