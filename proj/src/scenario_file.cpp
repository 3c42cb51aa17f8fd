#include "gwshield/scenario_file.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>

#include "gwshield/errors.hpp"

namespace gwshield::scenario {

namespace {

struct Entry {
  std::string section;
  std::size_t instance = 0;  // flood sections repeat
  std::string key;
  std::string value;
  std::size_t line = 0;
};

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

bool known_section(const std::string& s) {
  return s == "benign" || s == "flood" || s == "qdtp" || s == "detector" || s == "aam" ||
         s == "cost" || s == "sim";
}

double parse_double(const Entry& e, const std::string& src) {
  try {
    std::size_t used = 0;
    double v = std::stod(e.value, &used);
    if (used != e.value.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw ParseError(src, e.line, "expected number for " + e.section + "." + e.key + ", got '" +
                                      e.value + "'");
  }
}

std::int64_t parse_i64(const Entry& e, const std::string& src) {
  std::int64_t v{};
  auto [ptr, ec] = std::from_chars(e.value.data(), e.value.data() + e.value.size(), v);
  if (ec != std::errc{} || ptr != e.value.data() + e.value.size())
    throw ParseError(src, e.line, "expected integer for " + e.section + "." + e.key + ", got '" +
                                      e.value + "'");
  return v;
}

std::uint64_t parse_u64(const Entry& e, const std::string& src) {
  std::uint64_t v{};
  auto [ptr, ec] = std::from_chars(e.value.data(), e.value.data() + e.value.size(), v);
  if (ec != std::errc{} || ptr != e.value.data() + e.value.size())
    throw ParseError(src, e.line, "expected unsigned integer for " + e.section + "." + e.key);
  return v;
}

bool parse_bool(const Entry& e, const std::string& src) {
  if (e.value == "true" || e.value == "1" || e.value == "yes") return true;
  if (e.value == "false" || e.value == "0" || e.value == "no") return false;
  throw ParseError(src, e.line, "expected true/false for " + e.section + "." + e.key);
}

Nanos ms_to_ns(double ms) { return static_cast<Nanos>(std::llround(ms * 1e6)); }
Nanos s_to_ns(double s) { return static_cast<Nanos>(std::llround(s * 1e9)); }

// "constant:N", "uniform:LO:HI" or "geometric:MEAN".
traffic::XDistribution parse_x(const Entry& e, const std::string& src) {
  std::vector<std::string> parts;
  std::stringstream ss(e.value);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(item);

  auto fail = [&]() -> traffic::XDistribution {
    throw ParseError(src, e.line,
                     "flood.x must be constant:N, uniform:LO:HI or geometric:MEAN, got '" +
                         e.value + "'");
  };

  try {
    if (parts.size() == 2 && parts[0] == "constant")
      return traffic::XDistribution::constant(std::stoll(parts[1]));
    if (parts.size() == 3 && parts[0] == "uniform")
      return traffic::XDistribution::uniform(std::stoll(parts[1]), std::stoll(parts[2]));
    if (parts.size() == 2 && parts[0] == "geometric")
      return traffic::XDistribution::geometric(std::stod(parts[1]));
  } catch (const std::exception&) {
    return fail();
  }
  return fail();
}

std::vector<Entry> parse_entries(std::istream& is, const std::string& src) {
  std::vector<Entry> entries;
  std::string section;
  std::size_t flood_instance = 0;
  bool seen_flood = false;

  std::string raw;
  std::size_t lineno = 0;
  while (std::getline(is, raw)) {
    ++lineno;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    std::string line = trim(raw);
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = trim(line.substr(0, hash));
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') throw ParseError(src, lineno, "unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (!known_section(section))
        throw ParseError(src, lineno, "unknown section [" + section + "]");
      if (section == "flood") {
        if (seen_flood) ++flood_instance;
        seen_flood = true;
      }
      continue;
    }

    std::size_t eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(src, lineno, "expected key = value");
    if (section.empty()) throw ParseError(src, lineno, "key outside any [section]");

    Entry e;
    e.section = section;
    e.instance = section == "flood" ? flood_instance : 0;
    e.key = trim(line.substr(0, eq));
    e.value = trim(line.substr(eq + 1));
    if (e.key.empty()) throw ParseError(src, lineno, "empty key");
    e.line = lineno;
    entries.push_back(std::move(e));
  }
  return entries;
}

void apply_override(std::vector<Entry>& entries, const std::string& spec) {
  std::size_t eq = spec.find('=');
  std::size_t dot = spec.find('.');
  if (eq == std::string::npos || dot == std::string::npos || dot > eq)
    throw ConfigError("override must look like section.key=value, got '" + spec + "'");

  Entry e;
  e.section = trim(spec.substr(0, dot));
  e.key = trim(spec.substr(dot + 1, eq - dot - 1));
  e.value = trim(spec.substr(eq + 1));
  e.line = 0;
  if (!known_section(e.section)) throw ConfigError("override names unknown section '" + e.section + "'");

  // Replace every matching key (all flood instances); append when absent.
  bool replaced = false;
  std::size_t max_instance = 0;
  for (const Entry& x : entries)
    if (x.section == e.section) max_instance = std::max(max_instance, x.instance);
  for (Entry& x : entries) {
    if (x.section == e.section && x.key == e.key) {
      x.value = e.value;
      replaced = true;
    }
  }
  if (!replaced) {
    for (std::size_t inst = 0; inst <= max_instance; ++inst) {
      Entry copy = e;
      copy.instance = inst;
      entries.push_back(copy);
    }
  }
}

sim::Scenario build(const std::vector<Entry>& entries, const std::string& src) {
  sim::Scenario s;
  bool has_benign = false;
  bool has_qdtp = false;
  bool has_aam = false;
  std::size_t flood_count = 0;
  for (const Entry& e : entries) {
    if (e.section == "benign") has_benign = true;
    if (e.section == "qdtp") has_qdtp = true;
    if (e.section == "aam") has_aam = true;
    if (e.section == "flood") flood_count = std::max(flood_count, e.instance + 1);
  }

  if (has_benign) s.benign = traffic::BenignSourceConfig{};
  if (has_qdtp) s.shaper = qdtp::QdtpConfig{};
  if (has_aam) s.mitigation = aam::AamConfig{};
  s.floods.resize(flood_count);

  std::optional<int> aam_window;

  for (const Entry& e : entries) {
    auto unknown = [&]() {
      throw ParseError(src, e.line, "unknown key " + e.section + "." + e.key);
    };

    if (e.section == "benign") {
      if (e.key == "period_ms")
        s.benign->period = ms_to_ns(parse_double(e, src));
      else if (e.key == "source_count")
        s.benign->source_count = static_cast<int>(parse_i64(e, src));
      else if (e.key == "jitter_ms")
        s.benign->jitter = ms_to_ns(parse_double(e, src));
      else if (e.key == "process") {
        if (e.value == "periodic")
          s.benign->process = traffic::ArrivalProcess::Periodic;
        else if (e.value == "poisson")
          s.benign->process = traffic::ArrivalProcess::Poisson;
        else
          throw ParseError(src, e.line, "benign.process must be periodic or poisson");
      } else
        unknown();
    } else if (e.section == "flood") {
      traffic::FloodConfig& f = s.floods[e.instance];
      if (e.key == "start_s")
        f.start_time = s_to_ns(parse_double(e, src));
      else if (e.key == "x")
        f.x_distribution = parse_x(e, src);
      else if (e.key == "attack_fraction")
        f.attack_fraction_f = parse_double(e, src);
      else if (e.key == "rate_pps")
        f.attack_rate = parse_double(e, src);
      else if (e.key == "source_id")
        f.source_id = static_cast<std::uint32_t>(parse_u64(e, src));
      else
        unknown();
    } else if (e.section == "qdtp") {
      if (e.key == "d_ms")
        s.shaper->d_spacing = ms_to_ns(parse_double(e, src));
      else
        unknown();
    } else if (e.section == "detector") {
      if (e.key == "tpr")
        s.det.tpr = parse_double(e, src);
      else if (e.key == "tnr")
        s.det.tnr = parse_double(e, src);
      else if (e.key == "tau_ms")
        s.det.tau_inspect = ms_to_ns(parse_double(e, src));
      else if (e.key == "window")
        s.det.window_w = static_cast<int>(parse_i64(e, src));
      else if (e.key == "seed")
        s.det.seed = parse_u64(e, src);
      else
        unknown();
    } else if (e.section == "aam") {
      if (e.key == "m")
        s.mitigation->skip_m = static_cast<int>(parse_i64(e, src));
      else if (e.key == "adaptive")
        s.adaptive_m = parse_bool(e, src);
      else if (e.key == "window")
        aam_window = static_cast<int>(parse_i64(e, src));
      else
        unknown();
    } else if (e.section == "cost") {
      if (e.key == "alpha")
        s.cost_alpha = parse_double(e, src);
      else if (e.key == "beta")
        s.cost_beta = parse_double(e, src);
      else
        unknown();
    } else if (e.section == "sim") {
      if (e.key == "horizon_s")
        s.horizon = s_to_ns(parse_double(e, src));
      else if (e.key == "seed")
        s.seed = parse_u64(e, src);
      else if (e.key == "service_jitter")
        s.service_jitter = parse_double(e, src);
      else if (e.key == "flush")
        s.flush_residual = parse_bool(e, src);
      else
        unknown();
    }
  }

  if (s.mitigation) s.mitigation->window_w = aam_window.value_or(s.det.window_w);
  s.validate();
  return s;
}

}  // namespace

sim::Scenario load(std::istream& is, const std::string& source_name,
                   const std::vector<std::string>& overrides) {
  std::vector<Entry> entries = parse_entries(is, source_name);
  for (const std::string& o : overrides) apply_override(entries, o);
  return build(entries, source_name);
}

sim::Scenario load_file(const std::string& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario file '" + path + "'");
  return load(in, path, overrides);
}

}  // namespace gwshield::scenario
