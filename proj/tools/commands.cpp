#include "commands.hpp"

#include <bit>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>
#include <tuple>

#include <nlohmann/json.hpp>

#include "turbofade/channel.hpp"
#include "turbofade/rng.hpp"

#ifndef TURBOFADE_VERSION
#define TURBOFADE_VERSION "unknown"
#endif

namespace turbofade::cli {

namespace {

namespace fs = std::filesystem;

/// Output bundle of one command: CSV files plus a JSON sidecar.
class Outputs {
 public:
  Outputs(const ExperimentConfig& c, std::string command) : config_(c), command_(std::move(command)) {
    sidecar_["command"] = command_;
    sidecar_["config_hash"] = fnv1a_hex(c.source_text);
    sidecar_["seed"] = c.seed;
    sidecar_["version"] = TURBOFADE_VERSION;
    sidecar_["files"] = nlohmann::json::array();
  }

  /// '#' metadata header shared by every CSV of the command.
  std::string header() const {
    std::ostringstream os;
    os << "# command: " << command_ << '\n'
       << "# config_hash: " << fnv1a_hex(config_.source_text) << '\n'
       << "# seed: " << config_.seed << '\n'
       << "# version: " << TURBOFADE_VERSION << '\n';
    return os.str();
  }

  void write(const std::string& file, const std::string& body) {
    fs::create_directories(config_.out_dir);
    const fs::path p = fs::path(config_.out_dir) / file;
    std::ofstream f(p, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + p.string());
    f << body;
    sidecar_["files"].push_back(file);
  }

  nlohmann::json& sidecar() { return sidecar_; }

  void finish() {
    fs::create_directories(config_.out_dir);
    std::ofstream f(fs::path(config_.out_dir) / (command_ + ".json"), std::ios::binary);
    f << sidecar_.dump(2) << '\n';
  }

 private:
  const ExperimentConfig& config_;
  std::string command_;
  nlohmann::json sidecar_;
};

std::string profile_id(const ExperimentConfig& c, std::size_t k) { return c.profiles[k].id; }

const Trellis& trellis_of(const ExperimentConfig& c) {
  static std::map<std::tuple<unsigned, unsigned, int>, Trellis> cache;
  const auto key = std::make_tuple(c.rsc.feedback_octal, c.rsc.feedforward_octal, c.rsc.memory);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, Trellis(c.rsc)).first;
  return it->second;
}

DeConfig de_config(const ExperimentConfig& c) {
  DeConfig d = c.de;
  d.workers = c.workers;
  return d;
}

CodeInstance build(const ExperimentConfig& c, std::size_t k = 0) {
  return build_code(c.code_config(k), c.profile(k), trellis_of(c), c.interleaver_seed, c.multiplexer);
}

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

void cmd_params(const ExperimentConfig& c, std::ostream& log) {
  print_params(log, c);
  Outputs out(c, "params");
  std::ostringstream os;
  os << out.header();
  os << "profile_id,profile,average_degree,info_bits,interleaver_size,rate,mother_rate,rsc_rate,"
        "punctured_fraction,constituents,per_constituent_puncture,diversity\n";
  os << std::setprecision(10);
  for (std::size_t k = 0; k < c.profiles.size(); ++k) {
    const auto p = c.profile(k);
    const auto cc = c.code_config(k);
    os << profile_id(c, k) << ',' << '"' << p.label() << '"' << ',' << p.average_degree() << ',' << cc.info_bits
       << ',' << cc.interleaver_size << ',' << cc.rate << ',' << cc.mother_rate << ',' << cc.rsc_rate << ','
       << cc.punctured_fraction << ',' << cc.constituents << ',' << cc.per_constituent_puncture << ','
       << singleton_diversity(cc.fading_blocks, cc.rate).diversity << '\n';
  }
  out.write("params.csv", os.str());
  out.finish();
}

void cmd_threshold(const ExperimentConfig& c, std::ostream& log) {
  Outputs out(c, "threshold");
  std::ostringstream os, probes;
  os << out.header() << "profile_id,profile,threshold_db,bracket_lo_db,bracket_hi_db,probes\n";
  probes << out.header() << "profile_id,ebn0_db,converged,iterations\n";
  os << std::setprecision(10);
  probes << std::setprecision(10);
  for (std::size_t k = 0; k < c.profiles.size(); ++k) {
    const auto p = c.profile(k);
    const auto cc = c.code_config(k);
    const auto r = find_threshold(trellis_of(c), awgn_graph(p, cc.punctured_fraction), c.rate, de_config(c),
                                  derive_seed(c.seed, {1, k}), c.threshold);
    os << profile_id(c, k) << ",\"" << p.label() << "\"," << r.threshold_db << ',' << r.lo_db << ',' << r.hi_db
       << ',' << r.probes.size() << '\n';
    for (const auto& pr : r.probes) {
      probes << profile_id(c, k) << ',' << pr.ebn0_db << ',' << pr.converged << ',' << pr.iterations << '\n';
    }
    log << profile_id(c, k) << " (" << p.label() << "): threshold " << std::fixed << std::setprecision(3)
        << r.threshold_db << " dB\n"
        << std::defaultfloat;
  }
  out.write("threshold.csv", os.str());
  out.write("threshold_probes.csv", probes.str());
  out.finish();
}

void cmd_evolve(const ExperimentConfig& c, std::ostream& log) {
  const auto p = c.profile();
  const double nv = noise_variance_from_ebn0_db(c.evolve_ebn0_db, c.rate);
  DeGraph g;
  DeChannel ch;
  if (c.evolve_gains.empty()) {
    g = awgn_graph(p, c.code_config().punctured_fraction);
    ch = {{1.0}, nv};
  } else {
    require(c.evolve_gains.size() == 2, "evolve.gains needs one value per fading block");
    g = multiplexed_graph(p);
    ch = {c.evolve_gains, nv};
  }
  const auto t = evolve(trellis_of(c), g, ch, de_config(c), derive_seed(c.seed, {2}));
  Outputs out(c, "evolve");
  std::ostringstream os;
  os << out.header() << "# ebn0_db: " << c.evolve_ebn0_db << '\n';
  write_trajectory_csv(os, t);
  out.write("evolve.csv", os.str());
  out.sidecar()["converged"] = t.converged();
  out.sidecar()["iterations"] = t.iterations();
  out.finish();
  log << "evolve: " << (t.converged() ? "converged" : "did not converge") << " after " << t.iterations()
      << " iterations, P_b = " << t.iterates.back().error_probability << '\n';
}

std::vector<BoundaryPoint> boundary_for(const ExperimentConfig& c, std::size_t k, double ebn0_db,
                                        const std::vector<double>& angles, std::ostream& log) {
  DeoBoundaryOptions opt;
  opt.rel_tol = c.boundary_rel_tol;
  DeConfig de = de_config(c);
  opt.workers = 1;
  const auto r = deo_boundary(trellis_of(c), multiplexed_graph(c.profile(k)), c.rate, ebn0_db, angles, de,
                              derive_seed(c.seed, {3, k}), opt);
  for (const auto& w : r.warnings) log << "warning: " << profile_id(c, k) << ": " << w << '\n';
  return r.points;
}

void cmd_boundary(const ExperimentConfig& c, std::ostream& log) {
  require(c.fading_blocks == 2, "boundary requires code.fading_blocks = 2");
  const auto angles = default_ray_angles(c.boundary_rays);
  Outputs out(c, "boundary");
  std::string body = out.header();
  bool first = true;
  for (double db : c.boundary_ebn0_db) {
    const auto info = information_outage_boundary(c.rate, db, angles);
    std::vector<BoundaryRow> rows;
    for (std::size_t k = 0; k < c.profiles.size(); ++k) {
      rows.push_back({profile_id(c, k), boundary_for(c, k, db, angles, log)});
    }
    std::ostringstream os;
    write_boundary_csv(os, db, info, rows);
    std::string text = os.str();
    if (!first) text = text.substr(text.find('\n') + 1);
    body += text;
    first = false;
    log << "boundary at " << db << " dB: " << angles.size() << " rays x " << rows.size() << " ensembles\n";
  }
  out.write("boundary.csv", body);
  out.finish();
}

void cmd_pdeo(const ExperimentConfig& c, std::ostream& log) {
  require(c.fading_blocks == 2, "pdeo requires code.fading_blocks = 2");
  const auto angles = default_ray_angles(c.boundary_rays);
  const auto g = multiplexed_graph(c.profile());
  PdeoOptions opt = c.pdeo;
  opt.workers = c.workers;
  Outputs out(c, "pdeo");
  std::ostringstream os;
  os << out.header() << "ebn0_db,value,ci95,ci_low,ci_high,samples,cached,direct,audit_samples,audit_agreements\n";
  os << std::setprecision(10);
  for (double db : c.pdeo_ebn0_db) {
    const auto boundary = boundary_for(c, 0, db, angles, log);
    DeConfig de = c.de;
    de.workers = 1;
    const auto r = p_deo(trellis_of(c), g, c.rate, db, boundary, de, derive_seed(c.seed, {4}), opt);
    const auto& e = r.estimate;
    os << db << ',' << e.value << ',' << e.ci95 << ',' << e.lower << ',' << e.upper << ',' << e.samples << ','
       << r.cached << ',' << r.direct << ',' << r.audit_samples << ',' << r.audit_agreements << '\n';
    log << "P_DEO(" << db << " dB) = " << e.value << " +- " << e.ci95 << '\n';
  }
  out.write("pdeo.csv", os.str());
  out.finish();
}

void cmd_outage(const ExperimentConfig& c, std::ostream& log) {
  require(!c.outage_ebn0_db.empty(), "outage.ebn0_db must list at least one point");
  Outputs out(c, "outage");
  std::ostringstream os;
  os << out.header() << "# fading_blocks: " << c.fading_blocks << '\n'
     << "ebn0_db,value,ci95,ci_low,ci_high,samples\n";
  os << std::setprecision(10);
  for (double db : c.outage_ebn0_db) {
    const auto e = outage_probability_bpsk(c.rate, c.fading_blocks, db, c.outage_samples,
                                           derive_seed(c.seed, {5, std::bit_cast<uint64_t>(db)}), c.workers);
    os << db << ',' << e.value << ',' << e.ci95 << ',' << e.lower << ',' << e.upper << ',' << e.samples << '\n';
  }
  out.write("outage.csv", os.str());
  out.finish();
  log << "outage: " << c.outage_ebn0_db.size() << " points\n";
}

void cmd_simulate(const ExperimentConfig& c, std::ostream& log) {
  require(!c.sim_ebn0_db.empty(), "simulate.ebn0_db must list at least one point");
  const auto code = build(c);
  SimOptions opt = c.sim;
  opt.workers = c.workers;
  const auto t0 = std::chrono::steady_clock::now();
  const auto r = run_wer_sweep(code, c.sim_channel, c.sim_ebn0_db, derive_seed(c.seed, {6}), opt);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  Outputs out(c, "simulate");
  std::ostringstream os;
  os << out.header();
  write_sim_csv(os, r, {{"code_fingerprint", code_fingerprint(code)}, {"profile", code.profile.label()}});
  out.write("simulate.csv", os.str());
  out.sidecar()["code_fingerprint"] = code_fingerprint(code);
  out.finish();
  for (const auto& p : r.points) {
    log << p.ebn0_db << " dB: WER " << p.wer << " (" << p.word_errors << "/" << p.frames << ")\n";
  }
  log << "simulate: " << std::fixed << std::setprecision(1) << wall << " s\n" << std::defaultfloat;
}

void cmd_audit(const ExperimentConfig& c, std::ostream& log) {
  const auto code = build(c);
  const auto r = run_erasure_audit(code, c.audit_trials, derive_seed(c.seed, {7}), c.audit_decode, c.workers);
  Outputs out(c, "audit");
  std::ostringstream os;
  os << out.header() << "# code_fingerprint: " << code_fingerprint(code) << '\n'
     << "erased_block,trials,failures\n"
     << 0 << ',' << r.trials << ',' << r.failures[0] << '\n'
     << 1 << ',' << r.trials << ',' << r.failures[1] << '\n';
  std::ostringstream dumps;
  dumps << out.header() << "trial,erased_block,bit_errors,iterations,seed\n";
  for (const auto& d : r.dumps) {
    dumps << d.trial << ',' << d.erased_block << ',' << d.bit_errors << ',' << d.iterations << ',' << d.seed << '\n';
  }
  out.write("audit.csv", os.str());
  out.write("audit_failures.csv", dumps.str());
  out.sidecar()["code_fingerprint"] = code_fingerprint(code);
  out.sidecar()["passed"] = r.passed();
  out.finish();
  log << "audit: " << (r.passed() ? "PASS" : "FAIL") << " (" << r.failures[0] << " + " << r.failures[1]
      << " failures over " << r.trials << " trials per orientation)\n";
}

using Command = std::function<void(const ExperimentConfig&, std::ostream&)>;

const std::map<std::string, Command>& commands() {
  static const std::map<std::string, Command> m = {
      {"params", cmd_params},   {"threshold", cmd_threshold}, {"evolve", cmd_evolve},
      {"boundary", cmd_boundary}, {"pdeo", cmd_pdeo},         {"outage", cmd_outage},
      {"simulate", cmd_simulate}, {"audit", cmd_audit},
  };
  return m;
}

}  // namespace

ExperimentConfig apply_overrides(ExperimentConfig c, const RunOptions& o) {
  if (o.seed) c.seed = *o.seed;
  if (o.workers) {
    if (*o.workers < 1) throw ConfigError("--workers must be at least 1");
    c.workers = *o.workers;
  }
  if (o.out_dir) c.out_dir = *o.out_dir;
  return c;
}

void print_params(std::ostream& os, const ExperimentConfig& c) {
  for (std::size_t k = 0; k < c.profiles.size(); ++k) {
    const auto p = c.profile(k);
    const auto cc = c.code_config(k);
    os << "[" << profile_id(c, k) << "] " << p.label() << '\n'
       << std::fixed << std::setprecision(4)
       << "  average degree      " << p.average_degree() << '\n'
       << "  K, N                " << cc.info_bits << ", " << cc.interleaver_size << '\n'
       << "  R_c, rho_0, rho     " << cc.rate << ", " << cc.mother_rate << ", " << cc.rsc_rate << '\n'
       << "  f_p                 " << cc.punctured_fraction << '\n'
       << "  constituents        " << cc.constituents << '\n'
       << "  phi_p               " << cc.per_constituent_puncture << '\n'
       << "  diversity bound     " << singleton_diversity(cc.fading_blocks, cc.rate).diversity << '\n'
       << std::defaultfloat;
  }
}

bool is_command(const std::string& name) { return commands().count(name) > 0; }

void run_command(const std::string& name, const ExperimentConfig& c, bool dry_run, std::ostream& log) {
  const auto it = commands().find(name);
  if (it == commands().end()) throw ConfigError("unknown command '" + name + "'");
  if (dry_run) {
    print_params(log, c);
    log << "dry run: config valid, nothing computed\n";
    return;
  }
  it->second(c, log);
}

}  // namespace turbofade::cli
