#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cbi/analysis.hpp"
#include "cbi/oracle.hpp"

#include "json.hpp"

namespace cbi::cli {

// Malformed or ill-typed input. `path` is a JSON pointer to the first bad field.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::string path, const std::string& what)
      : std::runtime_error(path.empty() ? what : path + ": " + what), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

struct SweepBlock {
  Axis axis = Axis::N;
  std::vector<double> values;
  std::vector<Method> methods{Method::KlotzCBI};
  double beta_alpha = 0.03;
};

struct Scenario {
  std::string id = "unnamed";
  std::string description;
  PriorKnowledge pk;
  ObservationSummary obs;
  std::optional<double> b;
  std::optional<double> target_confidence;
  std::optional<SweepBlock> sweep;
  GridSpec oracle;
};

Scenario parse_scenario(const nlohmann::json& doc);
Scenario load_scenario(const std::string& path);

// Observation block in the scenario schema, first/last always explicit.
nlohmann::ordered_json observation_json(const ObservationSummary& o);
nlohmann::ordered_json scenario_json(const Scenario& s);

}  // namespace cbi::cli
