#include "campaign.hpp"

#include <fstream>
#include <sstream>

#include "cbi/version.hpp"
#include "format.hpp"
#include "scenario.hpp"

namespace cbi::cli {

void write_campaign(std::ostream& out, const CampaignTrace& t) {
  out << "# cbi campaign\n";
  out << "version: " << kVersion << "\n";
  out << "generator: " << t.generator << "\n";
  out << "seed: " << t.seed << "\n";
  out << "x: " << num17(t.ground_truth.x) << "\n";
  out << "lambda: " << num17(t.ground_truth.lambda) << "\n";
  out << "n: " << t.outcomes.size() << "\n";
  out << "outcomes:\n";
  int on_line = 0;
  for (std::size_t i = 0; i < t.outcomes.size();) {
    std::size_t j = i;
    while (j < t.outcomes.size() && t.outcomes[j] == t.outcomes[i]) ++j;
    out << (on_line ? " " : "") << (j - i) << to_string(t.outcomes[i]);
    if (++on_line == 16) {
      out << "\n";
      on_line = 0;
    }
    i = j;
  }
  if (on_line) out << "\n";
}

CampaignTrace read_campaign(std::istream& in) {
  CampaignTrace t;
  std::string line;
  long long declared_n = -1;
  bool body = false;
  int lineno = 0;
  auto bad = [&](const std::string& why) {
    throw ParseError("line " + std::to_string(lineno), why);
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (!body) {
      const auto colon = line.find(':');
      if (colon == std::string::npos) bad("expected \"key: value\"");
      const std::string key = line.substr(0, colon);
      std::string val = line.substr(colon + 1);
      val.erase(0, val.find_first_not_of(' '));
      try {
        if (key == "outcomes") body = true;
        else if (key == "generator") t.generator = val;
        else if (key == "seed") t.seed = std::stoull(val);
        else if (key == "x") t.ground_truth.x = std::stod(val);
        else if (key == "lambda") t.ground_truth.lambda = std::stod(val);
        else if (key == "n") declared_n = std::stoll(val);
        else if (key != "version") bad("unknown header field \"" + key + "\"");
      } catch (const std::logic_error&) {
        bad("malformed value for \"" + key + "\"");
      }
      continue;
    }
    std::istringstream tokens(line);
    std::string tok;
    while (tokens >> tok) {
      const char c = tok.back();
      if ((c != 'S' && c != 'F') || tok.size() < 2) bad("bad run token \"" + tok + "\"");
      std::size_t used = 0;
      long long k = 0;
      try {
        k = std::stoll(tok.substr(0, tok.size() - 1), &used);
      } catch (const std::logic_error&) {
        bad("bad run token \"" + tok + "\"");
      }
      if (used != tok.size() - 1 || k <= 0) bad("bad run token \"" + tok + "\"");
      t.outcomes.insert(t.outcomes.end(), static_cast<std::size_t>(k), c == 'S' ? Outcome::Success : Outcome::Failure);
    }
  }
  if (!body) throw ParseError("", "campaign file has no outcomes section");
  if (declared_n >= 0 && static_cast<std::size_t>(declared_n) != t.outcomes.size())
    throw ParseError("n", "header says n=" + std::to_string(declared_n) + " but " + std::to_string(t.outcomes.size()) +
                              " outcomes follow");
  return t;
}

CampaignTrace load_campaign(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("", "cannot open campaign file " + path);
  return read_campaign(in);
}

}  // namespace cbi::cli
