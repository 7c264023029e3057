#include "ehcr/config_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <sstream>

#include <fmt/format.h>

namespace ehcr {

namespace {

// Applied when an [su.N] section leaves omega or theta out.
constexpr PolicyParams kDefaultPolicy{0.35, 0.2};

std::string join_issues(const std::vector<std::string>& issues) {
  std::string out;
  for (const auto& i : issues) out += (out.empty() ? "" : "\n") + i;
  return out;
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool parse_number(std::string_view s, double& out) {
  if (s == "inf" || s == "+inf" || s == "infinity") {
    out = std::numeric_limits<double>::infinity();
    return true;
  }
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc() && res.ptr == s.data() + s.size() && !std::isnan(out);
}

bool parse_integer(std::string_view s, int& out) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

bool parse_bool(std::string_view s, bool& out) {
  if (s == "true" || s == "1" || s == "yes") return out = true, true;
  if (s == "false" || s == "0" || s == "no") return out = false, true;
  return false;
}

enum class Kind { Real, Integer, Boolean };

struct Field {
  Kind kind;
  std::function<void*(RunConfig&, std::size_t)> target;
};

const std::map<std::string, Field, std::less<>>& system_fields() {
  static const std::map<std::string, Field, std::less<>> f{
      {"slot_duration", {Kind::Real, [](RunConfig& c, std::size_t) -> void* { return &c.system.slot_duration; }}},
      {"sensing_duration", {Kind::Real, [](RunConfig& c, std::size_t) -> void* { return &c.system.sensing_duration; }}},
      {"probing_duration", {Kind::Real, [](RunConfig& c, std::size_t) -> void* { return &c.system.probing_duration; }}},
      {"sampling_frequency", {Kind::Real, [](RunConfig& c, std::size_t) -> void* { return &c.system.sampling_frequency; }}},
      {"bandwidth", {Kind::Real, [](RunConfig& c, std::size_t) -> void* { return &c.system.bandwidth; }}},
      {"energy_unit", {Kind::Real, [](RunConfig& c, std::size_t) -> void* { return &c.system.energy_unit; }}},
      {"battery_cells", {Kind::Integer, [](RunConfig& c, std::size_t) -> void* { return &c.system.battery_cells; }}},
      {"probe_cells", {Kind::Integer, [](RunConfig& c, std::size_t) -> void* { return &c.system.probe_cells; }}},
      {"prior_idle", {Kind::Real, [](RunConfig& c, std::size_t) -> void* { return &c.system.prior_idle; }}},
      {"target_detection", {Kind::Real, [](RunConfig& c, std::size_t) -> void* { return &c.system.target_detection; }}},
      {"pu_power", {Kind::Real, [](RunConfig& c, std::size_t) -> void* { return &c.system.pu_power; }}},
      {"pu_ap_channel_var", {Kind::Real, [](RunConfig& c, std::size_t) -> void* { return &c.system.pu_ap_channel_var; }}},
      {"interference_cap", {Kind::Real, [](RunConfig& c, std::size_t) -> void* { return &c.system.interference_cap; }}},
      {"ideal_sensing", {Kind::Boolean, [](RunConfig& c, std::size_t) -> void* { return &c.system.ideal_sensing; }}},
  };
  return f;
}

const std::map<std::string, Field, std::less<>>& su_fields() {
  static const std::map<std::string, Field, std::less<>> f{
      {"su_ap_var", {Kind::Real, [](RunConfig& c, std::size_t n) -> void* { return &c.profiles[n].su_ap_var; }}},
      {"pu_su_var", {Kind::Real, [](RunConfig& c, std::size_t n) -> void* { return &c.profiles[n].pu_su_var; }}},
      {"su_pu_var", {Kind::Real, [](RunConfig& c, std::size_t n) -> void* { return &c.profiles[n].su_pu_var; }}},
      {"sensing_noise", {Kind::Real, [](RunConfig& c, std::size_t n) -> void* { return &c.profiles[n].sensing_noise; }}},
      {"ap_noise", {Kind::Real, [](RunConfig& c, std::size_t n) -> void* { return &c.profiles[n].ap_noise; }}},
      {"harvest_rate", {Kind::Real, [](RunConfig& c, std::size_t n) -> void* { return &c.profiles[n].harvest_rate; }}},
      {"omega", {Kind::Real, [](RunConfig& c, std::size_t n) -> void* { return &c.policies[n].omega; }}},
      {"theta", {Kind::Real, [](RunConfig& c, std::size_t n) -> void* { return &c.policies[n].theta; }}},
  };
  return f;
}

const std::map<std::string, Field, std::less<>>& search_fields() {
  static const std::map<std::string, Field, std::less<>> f{
      {"grid_omega", {Kind::Integer, [](RunConfig& c, std::size_t) -> void* { return &c.search.grid_omega; }}},
      {"grid_theta", {Kind::Integer, [](RunConfig& c, std::size_t) -> void* { return &c.search.grid_theta; }}},
      {"theta_min", {Kind::Real, [](RunConfig& c, std::size_t) -> void* { return &c.search.theta_min; }}},
      {"theta_max_factor", {Kind::Real, [](RunConfig& c, std::size_t) -> void* { return &c.search.theta_max_factor; }}},
      {"refine", {Kind::Integer, [](RunConfig& c, std::size_t) -> void* { return &c.search.refine_levels; }}},
      {"max_sweeps", {Kind::Integer, [](RunConfig& c, std::size_t) -> void* { return &c.search.max_sweeps; }}},
      {"tolerance", {Kind::Real, [](RunConfig& c, std::size_t) -> void* { return &c.search.tolerance; }}},
  };
  return f;
}

} // namespace

ConfigError::ConfigError(std::vector<std::string> issues) : std::runtime_error(join_issues(issues)), issues_(std::move(issues)) {}

std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return fmt::format("{}", v);
}

RunConfig parse_config(std::string_view text, const std::string& source) {
  RunConfig cfg;
  std::vector<std::string> issues;
  std::map<std::size_t, int> su_seen; // SU number -> line
  enum class Section { None, System, Su, Search } section = Section::None;
  std::size_t su = 0;
  std::map<std::string, int> seen_keys; // "section/key" -> line
  std::string section_name;

  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    auto error = [&](const std::string& msg) { issues.push_back(fmt::format("{}:{}: {}", source, line_no, msg)); };

    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') {
        error("unterminated section header");
        section = Section::None;
        continue;
      }
      section_name = std::string(trim(line.substr(1, line.size() - 2)));
      if (section_name == "system") {
        section = Section::System;
      } else if (section_name == "search") {
        section = Section::Search;
      } else if (section_name.starts_with("su.")) {
        int n = 0;
        if (!parse_integer(std::string_view(section_name).substr(3), n) || n < 1) {
          error(fmt::format("bad SU section [{}]; expected [su.N] with N >= 1", section_name));
          section = Section::None;
          continue;
        }
        if (su_seen.contains(static_cast<std::size_t>(n))) {
          error(fmt::format("duplicate section [{}] (first at line {})", section_name, su_seen[n]));
        }
        su_seen.emplace(static_cast<std::size_t>(n), line_no);
        su = static_cast<std::size_t>(n) - 1;
        if (cfg.profiles.size() <= su) {
          cfg.profiles.resize(su + 1);
          cfg.policies.resize(su + 1, kDefaultPolicy);
        }
        section = Section::Su;
      } else {
        error(fmt::format("unknown section [{}]", section_name));
        section = Section::None;
      }
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      error("expected 'key = value'");
      continue;
    }
    const std::string key(trim(line.substr(0, eq)));
    const auto value = trim(line.substr(eq + 1));
    if (section == Section::None) {
      error(fmt::format("key '{}' outside a known section", key));
      continue;
    }
    const auto& table = section == Section::System ? system_fields()
                        : section == Section::Su   ? su_fields()
                                                   : search_fields();
    const auto it = table.find(key);
    if (it == table.end()) {
      error(fmt::format("unknown key '{}' in [{}]", key, section_name));
      continue;
    }
    const std::string scope = section_name + "/" + key;
    if (const auto prev = seen_keys.find(scope); prev != seen_keys.end()) {
      error(fmt::format("duplicate key '{}' in [{}] (first at line {})", key, section_name, prev->second));
      continue;
    }
    seen_keys.emplace(scope, line_no);
    void* target = it->second.target(cfg, su);
    bool ok = false;
    switch (it->second.kind) {
      case Kind::Real: ok = parse_number(value, *static_cast<double*>(target)); break;
      case Kind::Integer: ok = parse_integer(value, *static_cast<int*>(target)); break;
      case Kind::Boolean: ok = parse_bool(value, *static_cast<bool*>(target)); break;
    }
    if (!ok) error(fmt::format("bad value '{}' for '{}'", value, key));
    if (ok && section == Section::Su && (key == "omega" || key == "theta")) {
      const auto& p = cfg.policies[su];
      if (key == "omega" && !(p.omega >= 0.0 && p.omega <= 1.0)) error("omega must lie in [0,1]");
      if (key == "theta" && !(p.theta >= 0.0 && std::isfinite(p.theta))) error("theta must be finite and >= 0");
    }
  }

  for (std::size_t n = 0; n < cfg.profiles.size(); ++n) {
    if (!su_seen.contains(n + 1)) issues.push_back(fmt::format("{}: missing section [su.{}]", source, n + 1));
  }
  if (cfg.profiles.empty()) issues.push_back(fmt::format("{}: no [su.N] sections", source));
  const auto& s = cfg.search;
  if (s.grid_omega < 1 || s.grid_theta < 1) issues.push_back(fmt::format("{}: search grids need >= 1 point", source));
  if (s.refine_levels < 0) issues.push_back(fmt::format("{}: refine must be >= 0", source));
  if (s.max_sweeps < 1) issues.push_back(fmt::format("{}: max_sweeps must be >= 1", source));
  if (!(s.theta_min > 0.0) || !(s.theta_max_factor > 0.0)) {
    issues.push_back(fmt::format("{}: theta_min and theta_max_factor must be > 0", source));
  }
  if (!issues.empty()) throw ConfigError(std::move(issues));
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError({fmt::format("{}: cannot open file", path.string())});
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path.string());
}

std::string format_config(const RunConfig& c) {
  const auto& s = c.system;
  std::string out = "[system]\n";
  auto real = [&](const char* k, double v) { out += fmt::format("{} = {}\n", k, format_double(v)); };
  auto integer = [&](const char* k, int v) { out += fmt::format("{} = {}\n", k, v); };
  real("slot_duration", s.slot_duration);
  real("sensing_duration", s.sensing_duration);
  real("probing_duration", s.probing_duration);
  real("sampling_frequency", s.sampling_frequency);
  real("bandwidth", s.bandwidth);
  real("energy_unit", s.energy_unit);
  integer("battery_cells", s.battery_cells);
  integer("probe_cells", s.probe_cells);
  real("prior_idle", s.prior_idle);
  real("target_detection", s.target_detection);
  real("pu_power", s.pu_power);
  real("pu_ap_channel_var", s.pu_ap_channel_var);
  real("interference_cap", s.interference_cap);
  out += fmt::format("ideal_sensing = {}\n", s.ideal_sensing);
  for (std::size_t n = 0; n < c.profiles.size(); ++n) {
    const auto& p = c.profiles[n];
    out += fmt::format("\n[su.{}]\n", n + 1);
    real("su_ap_var", p.su_ap_var);
    real("pu_su_var", p.pu_su_var);
    real("su_pu_var", p.su_pu_var);
    real("sensing_noise", p.sensing_noise);
    real("ap_noise", p.ap_noise);
    real("harvest_rate", p.harvest_rate);
    real("omega", c.policies[n].omega);
    real("theta", c.policies[n].theta);
  }
  out += "\n[search]\n";
  integer("grid_omega", c.search.grid_omega);
  integer("grid_theta", c.search.grid_theta);
  real("theta_min", c.search.theta_min);
  real("theta_max_factor", c.search.theta_max_factor);
  integer("refine", c.search.refine_levels);
  integer("max_sweeps", c.search.max_sweeps);
  real("tolerance", c.search.tolerance);
  return out;
}

} // namespace ehcr
