#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "gwshield/sim.hpp"

namespace gwshield::scenario {

// Scenario files are flat INI-style text: [section] headers with key = value
// lines, '#' comments. Sections: benign, flood (repeatable), qdtp, detector,
// aam, cost, sim. See the bundled files under scenarios/ for the full key
// reference.
//
// Overrides are "section.key=value" strings applied after parsing; a flood
// override applies to every [flood] section.
sim::Scenario load(std::istream& is, const std::string& source_name,
                   const std::vector<std::string>& overrides = {});
sim::Scenario load_file(const std::string& path,
                        const std::vector<std::string>& overrides = {});

}  // namespace gwshield::scenario
