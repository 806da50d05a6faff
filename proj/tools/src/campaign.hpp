#pragma once

#include <iosfwd>
#include <string>

#include "cbi/simulator.hpp"

namespace cbi::cli {

// Text campaign file: "key: value" header lines, then "outcomes:" followed by
// run-length tokens such as "12S 1F 30S".
void write_campaign(std::ostream& out, const CampaignTrace& t);
CampaignTrace read_campaign(std::istream& in);
CampaignTrace load_campaign(const std::string& path);

}  // namespace cbi::cli
