#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "turbofade/turbo_codec.hpp"

namespace turbofade {
namespace {

constexpr const char* kFormat = "turbofade-code-v1";

std::string fnv1a_hex(const std::string& text) {
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

template <class T>
void write_list(std::ostream& os, const char* key, const std::vector<T>& values) {
  os << key;
  for (const auto& v : values) os << ' ' << static_cast<long long>(v);
  os << '\n';
}

}  // namespace

void write_code(std::ostream& os, const CodeInstance& code) {
  const auto& c = code.config;
  const auto& spec = code.trellis.spec();
  os << "format " << kFormat << '\n';
  os << "info_bits " << c.info_bits << '\n';
  os.precision(17);
  os << "rate " << c.rate << '\n';
  os << "mother_rate " << c.mother_rate << '\n';
  os << "fading_blocks " << c.fading_blocks << '\n';
  os << "rsc " << std::oct << spec.feedback_octal << ' ' << spec.feedforward_octal << std::dec << ' '
     << spec.memory << '\n';
  os << "seed " << code.seed << '\n';
  os << "spread " << code.interleaver.spread << '\n';
  os << "multiplexer " << (code.kind == MultiplexerKind::kDiagonal ? "diagonal" : "sabotaged") << '\n';
  for (const auto& e : code.profile.entries()) os << "profile " << e.degree << ' ' << e.fraction << '\n';
  os << "segments";
  for (const auto& s : code.mux.segments) os << ' ' << s.begin << ' ' << s.end;
  os << '\n';
  write_list(os, "degree_of", code.repeater.degree_of);
  write_list(os, "bit_at", code.bit_at);
  write_list(os, "parity_block", code.mux.parity_block);
  write_list(os, "systematic_block", code.mux.systematic_block);
  os << "end\n";
}

CodeInstance read_code(std::istream& is) {
  std::map<std::string, std::string> fields;
  std::vector<DegreeFraction> raw;
  std::string line;
  bool ended = false;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (line == "end") {
      ended = true;
      break;
    }
    const auto sp = line.find(' ');
    const std::string key = line.substr(0, sp);
    const std::string value = sp == std::string::npos ? "" : line.substr(sp + 1);
    if (key == "profile") {
      std::istringstream ps(value);
      DegreeFraction df;
      ps >> df.degree >> df.fraction;
      raw.push_back(df);
    } else {
      fields[key] = value;
    }
  }
  auto get = [&](const char* key) -> const std::string& {
    auto it = fields.find(key);
    if (it == fields.end()) throw std::invalid_argument(std::string("code file missing field ") + key);
    return it->second;
  };
  if (!ended) throw std::invalid_argument("code file truncated (no end marker)");
  if (get("format") != kFormat) throw std::invalid_argument("unknown code file format");

  RscSpec spec;
  {
    std::istringstream rs(get("rsc"));
    std::string fb, ff;
    rs >> fb >> ff >> spec.memory;
    spec.feedback_octal = parse_octal(fb.c_str());
    spec.feedforward_octal = parse_octal(ff.c_str());
  }
  const DegreeProfile profile = validate_profile(raw);
  const CodeConfig config =
      derive_code_params(profile, std::stod(get("mother_rate")), std::stod(get("rate")),
                         std::stoi(get("info_bits")), std::stoi(get("fading_blocks")));

  CodeInstance code{config, profile, Trellis(spec), {}, {}, {}, {}, MultiplexerKind::kDiagonal, 0};
  code.seed = std::stoull(get("seed"));
  code.interleaver.spread = std::stoi(get("spread"));
  code.kind = get("multiplexer") == "diagonal" ? MultiplexerKind::kDiagonal : MultiplexerKind::kSabotaged;

  auto read_ints = [&](const char* key) {
    std::vector<long long> out;
    std::istringstream ls(get(key));
    long long v;
    while (ls >> v) out.push_back(v);
    return out;
  };
  const int K = config.info_bits;
  for (long long d : read_ints("degree_of")) code.repeater.degree_of.push_back(static_cast<int>(d));
  for (long long b : read_ints("bit_at")) code.bit_at.push_back(static_cast<int>(b));
  for (long long p : read_ints("parity_block")) code.mux.parity_block.push_back(static_cast<int8_t>(p));
  for (long long s : read_ints("systematic_block")) {
    code.mux.systematic_block.push_back(static_cast<uint8_t>(s));
  }
  const auto seg = read_ints("segments");
  for (std::size_t i = 0; i + 1 < seg.size(); i += 2) {
    code.mux.segments.push_back({static_cast<int>(seg[i]), static_cast<int>(seg[i + 1])});
  }
  const int N = static_cast<int>(code.bit_at.size());
  if (static_cast<int>(code.repeater.degree_of.size()) != K ||
      static_cast<int>(code.mux.systematic_block.size()) != K ||
      static_cast<int>(code.mux.parity_block.size()) != N) {
    throw std::invalid_argument("code file tables have inconsistent lengths");
  }

  auto& rep = code.repeater;
  rep.edge_offset.assign(K + 1, 0);
  for (int b = 0; b < K; ++b) rep.edge_offset[b + 1] = rep.edge_offset[b] + rep.degree_of[b];
  if (rep.num_edges() != N) throw std::invalid_argument("code file degree table disagrees with bit_at");
  code.interleaver.forward.assign(N, -1);
  code.interleaver.inverse.assign(N, -1);
  std::vector<int> next_copy(K, 0);
  for (int p = 0; p < N; ++p) {
    const int b = code.bit_at[p];
    if (b < 0 || b >= K || next_copy[b] >= rep.degree_of[b]) {
      throw std::invalid_argument("code file bit_at table inconsistent with degrees");
    }
    const int e = rep.edge_offset[b] + next_copy[b]++;
    code.interleaver.forward[e] = p;
    code.interleaver.inverse[p] = e;
  }
  for (int b = 0; b < K; ++b) {
    code.mux.symbols.push_back({SymbolRole::kSystematic, b, code.mux.systematic_block[b]});
  }
  for (int p = 0; p < N; ++p) {
    if (code.mux.parity_block[p] >= 0) {
      code.mux.symbols.push_back({SymbolRole::kParity, p, static_cast<uint8_t>(code.mux.parity_block[p])});
    }
  }
  if (code.kind == MultiplexerKind::kDiagonal) {
    const auto violations = check_code_invariants(code);
    if (!violations.empty()) throw std::invalid_argument("code file: " + violations.front());
  }
  return code;
}

std::string code_fingerprint(const CodeInstance& code) {
  std::ostringstream os;
  write_code(os, code);
  return fnv1a_hex(os.str());
}

}  // namespace turbofade
