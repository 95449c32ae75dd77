#include "config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace turbofade::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <class T>
T parse_number(const std::string& text, const std::string& where) {
  T v{};
  const std::string t = trim(text);
  const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || p != t.data() + t.size() || t.empty()) {
    throw ConfigError(where + ": cannot parse '" + t + "'");
  }
  return v;
}

bool parse_bool(const std::string& text, const std::string& where) {
  const std::string t = trim(text);
  if (t == "true" || t == "yes" || t == "1") return true;
  if (t == "false" || t == "no" || t == "0") return false;
  throw ConfigError(where + ": expected true or false, got '" + t + "'");
}

using Setter = std::function<void(ExperimentConfig&, const std::string&, const std::string&)>;

template <class T>
Setter num(T ExperimentConfig::*field) {
  return [field](ExperimentConfig& c, const std::string& v, const std::string& w) {
    c.*field = parse_number<T>(v, w);
  };
}

template <class F>
Setter with(F f) {
  return [f](ExperimentConfig& c, const std::string& v, const std::string& w) { f(c, v, w); };
}

Setter grid(std::vector<double> ExperimentConfig::*field) {
  return [field](ExperimentConfig& c, const std::string& v, const std::string& w) {
    try {
      c.*field = parse_grid(v);
    } catch (const ConfigError& e) {
      throw ConfigError(w + ": " + e.what());
    }
  };
}

const std::map<std::string, std::map<std::string, Setter>>& schema() {
  using C = ExperimentConfig;
  static const std::map<std::string, std::map<std::string, Setter>> s = {
      {"run",
       {
           {"seed", num(&C::seed)},
           {"workers", num(&C::workers)},
           {"out", with([](C& c, const std::string& v, auto&) { c.out_dir = trim(v); })},
       }},
      {"code",
       {
           {"info_bits", num(&C::info_bits)},
           {"rate", num(&C::rate)},
           {"mother_rate", num(&C::mother_rate)},
           {"fading_blocks", num(&C::fading_blocks)},
           {"feedback", with([](C& c, const std::string& v, auto&) { c.rsc.feedback_octal = parse_octal(trim(v).c_str()); })},
           {"feedforward",
            with([](C& c, const std::string& v, auto&) { c.rsc.feedforward_octal = parse_octal(trim(v).c_str()); })},
           {"memory", with([](C& c, const std::string& v, auto& w) { c.rsc.memory = parse_number<int>(v, w); })},
           {"interleaver_seed", num(&C::interleaver_seed)},
           {"multiplexer", with([](C& c, const std::string& v, auto& w) {
              const std::string t = trim(v);
              if (t == "diagonal") {
                c.multiplexer = MultiplexerKind::kDiagonal;
              } else if (t == "sabotaged") {
                c.multiplexer = MultiplexerKind::kSabotaged;
              } else {
                throw ConfigError(w + ": expected diagonal or sabotaged");
              }
            })},
       }},
      {"profile",
       {
           {"id", with([](C& c, const std::string& v, auto&) { c.profiles.back().id = trim(v); })},
           {"degree", with([](C& c, const std::string& v, auto& w) {
              std::istringstream in(v);
              std::string d, f, extra;
              in >> d >> f;
              if (d.empty() || f.empty() || (in >> extra)) throw ConfigError(w + ": expected '<degree> <fraction>'");
              c.profiles.back().entries.push_back({parse_number<int>(d, w), parse_number<double>(f, w)});
            })},
       }},
      {"density_evolution",
       {
           {"max_llr", with([](C& c, const std::string& v, auto& w) { c.de.grid.max_llr = parse_number<double>(v, w); })},
           {"bins", with([](C& c, const std::string& v, auto& w) { c.de.grid.bins = parse_number<int>(v, w); })},
           {"window", with([](C& c, const std::string& v, auto& w) { c.de.window = parse_number<int>(v, w); })},
           {"guard", with([](C& c, const std::string& v, auto& w) { c.de.guard = parse_number<int>(v, w); })},
           {"samples", with([](C& c, const std::string& v, auto& w) { c.de.samples = parse_number<long long>(v, w); })},
           {"max_iters", with([](C& c, const std::string& v, auto& w) { c.de.max_iters = parse_number<int>(v, w); })},
           {"target", with([](C& c, const std::string& v, auto& w) { c.de.target = parse_number<double>(v, w); })},
           {"stall_window",
            with([](C& c, const std::string& v, auto& w) { c.de.stall_window = parse_number<int>(v, w); })},
           {"stall_improvement",
            with([](C& c, const std::string& v, auto& w) { c.de.stall_improvement = parse_number<double>(v, w); })},
       }},
      {"threshold",
       {
           {"lo_db", with([](C& c, const std::string& v, auto& w) { c.threshold.lo_db = parse_number<double>(v, w); })},
           {"hi_db", with([](C& c, const std::string& v, auto& w) { c.threshold.hi_db = parse_number<double>(v, w); })},
           {"precision_db",
            with([](C& c, const std::string& v, auto& w) { c.threshold.precision_db = parse_number<double>(v, w); })},
           {"max_hi_db",
            with([](C& c, const std::string& v, auto& w) { c.threshold.max_hi_db = parse_number<double>(v, w); })},
       }},
      {"evolve",
       {
           {"ebn0_db", num(&C::evolve_ebn0_db)},
           {"gains", grid(&C::evolve_gains)},
       }},
      {"boundary",
       {
           {"ebn0_db", grid(&C::boundary_ebn0_db)},
           {"rays", num(&C::boundary_rays)},
           {"rel_tol", num(&C::boundary_rel_tol)},
       }},
      {"outage",
       {
           {"ebn0_db", grid(&C::outage_ebn0_db)},
           {"samples", num(&C::outage_samples)},
       }},
      {"pdeo",
       {
           {"ebn0_db", grid(&C::pdeo_ebn0_db)},
           {"samples", with([](C& c, const std::string& v, auto& w) { c.pdeo.samples = parse_number<long long>(v, w); })},
           {"audit_samples",
            with([](C& c, const std::string& v, auto& w) { c.pdeo.audit_samples = parse_number<long long>(v, w); })},
           {"min_angle_deg",
            with([](C& c, const std::string& v, auto& w) { c.pdeo.min_angle_deg = parse_number<double>(v, w); })},
       }},
      {"simulate",
       {
           {"channel", with([](C& c, const std::string& v, auto& w) {
              const std::string t = trim(v);
              if (t == "awgn") {
                c.sim_channel = ChannelMode::kAwgn;
              } else if (t == "block_fading") {
                c.sim_channel = ChannelMode::kBlockFading;
              } else {
                throw ConfigError(w + ": expected awgn or block_fading");
              }
            })},
           {"ebn0_db", grid(&C::sim_ebn0_db)},
           {"min_word_errors",
            with([](C& c, const std::string& v, auto& w) { c.sim.stop.min_word_errors = parse_number<long long>(v, w); })},
           {"max_frames",
            with([](C& c, const std::string& v, auto& w) { c.sim.stop.max_frames = parse_number<long long>(v, w); })},
           {"max_iters",
            with([](C& c, const std::string& v, auto& w) { c.sim.decode.max_iters = parse_number<int>(v, w); })},
           {"early_stop",
            with([](C& c, const std::string& v, auto& w) { c.sim.decode.early_stop = parse_bool(v, w); })},
           {"stop_below_wer",
            with([](C& c, const std::string& v, auto& w) { c.sim.stop_below_wer = parse_number<double>(v, w); })},
       }},
      {"audit",
       {
           {"trials", num(&C::audit_trials)},
           {"max_iters",
            with([](C& c, const std::string& v, auto& w) { c.audit_decode.max_iters = parse_number<int>(v, w); })},
       }},
  };
  return s;
}

void validate(const ExperimentConfig& c) {
  if (c.profiles.empty()) throw ConfigError("config: at least one [profile] section is required");
  if (c.workers < 1) throw ConfigError("run.workers must be at least 1");
  if (c.info_bits < 2) throw ConfigError("code.info_bits must be at least 2");
  if (c.boundary_rays < 2) throw ConfigError("boundary.rays must be at least 2");
  if (c.boundary_rel_tol <= 0.0) throw ConfigError("boundary.rel_tol must be positive");
  if (c.outage_samples < 1) throw ConfigError("outage.samples must be positive");
  if (c.audit_trials < 1) throw ConfigError("audit.trials must be positive");
  if (c.evolve_gains.size() > 2) throw ConfigError("evolve.gains takes at most two values");
  std::set<std::string> ids;
  try {
    c.rsc.validate();
    c.de.validate();
    for (std::size_t k = 0; k < c.profiles.size(); ++k) {
      if (!ids.insert(c.profiles[k].id).second) throw ConfigError("duplicate profile id '" + c.profiles[k].id + "'");
      c.code_config(k);
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

}  // namespace

DegreeProfile ExperimentConfig::profile(std::size_t k) const { return validate_profile(profiles.at(k).entries); }

CodeConfig ExperimentConfig::code_config(std::size_t k) const {
  return derive_code_params(profile(k), mother_rate, rate, info_bits, fading_blocks);
}

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> out;
  const std::string t = trim(text);
  if (t.empty()) return out;
  if (t.find(':') != std::string::npos) {
    std::vector<double> parts;
    std::istringstream in(t);
    for (std::string p; std::getline(in, p, ':');) parts.push_back(parse_number<double>(p, "grid"));
    if (parts.size() != 3 || parts[1] <= 0.0 || parts[2] < parts[0]) {
      throw ConfigError("grid '" + t + "' must be start:step:stop with positive step");
    }
    const long n = std::lround(std::floor((parts[2] - parts[0]) / parts[1] + 1e-9));
    for (long i = 0; i <= n; ++i) out.push_back(parts[0] + static_cast<double>(i) * parts[1]);
    return out;
  }
  std::istringstream in(t);
  for (std::string p; std::getline(in, p, ',');) out.push_back(parse_number<double>(p, "grid"));
  return out;
}

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig c;
  c.source_text = text;
  const auto& s = schema();
  std::string section;
  std::istringstream in(text);
  int lineno = 0;
  for (std::string raw; std::getline(in, raw);) {
    ++lineno;
    const std::string line = trim(raw.substr(0, raw.find('#')));
    if (line.empty()) continue;
    const std::string where = "line " + std::to_string(lineno);
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where + ": unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (!s.count(section)) throw ConfigError(where + ": unknown section [" + section + "]");
      if (section == "profile") c.profiles.push_back({"profile" + std::to_string(c.profiles.size()), {}});
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + ": expected key = value");
    if (section.empty()) throw ConfigError(where + ": key outside a section");
    const std::string key = trim(line.substr(0, eq));
    const auto& keys = s.at(section);
    const auto it = keys.find(key);
    if (it == keys.end()) throw ConfigError(where + ": unknown key '" + key + "' in [" + section + "]");
    it->second(c, line.substr(eq + 1), where + " (" + section + "." + key + ")");
  }
  validate(c);
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot open config '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

std::string fnv1a_hex(const std::string& bytes) {
  uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace turbofade::cli
