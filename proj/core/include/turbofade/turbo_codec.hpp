#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "turbofade/ensemble.hpp"
#include "turbofade/rsc_trellis.hpp"

namespace turbofade {

/// Which information bit feeds each interleaver edge and how many edges each
/// bit owns. Edges are numbered bit-major (repeater output order).
struct RepeaterLayout {
  std::vector<int> degree_of;    // per information bit
  std::vector<int> edge_offset;  // size K+1; edges of bit b are [offset[b], offset[b+1])

  int num_edges() const { return edge_offset.back(); }
};

/// Permutation from repeater output order to trellis positions.
struct Interleaver {
  std::vector<int> forward;  // edge -> trellis position
  std::vector<int> inverse;  // trellis position -> edge
  int spread = 0;            // S achieved by the construction
};

enum class SymbolRole : uint8_t { kSystematic, kParity };

struct TxSymbol {
  SymbolRole role;
  int index;      // information bit (systematic) or trellis position (parity)
  uint8_t block;  // fading block, 0-based
};

/// Contiguous trellis interval encoded as one terminated constituent.
struct Segment {
  int begin;
  int end;
  int size() const { return end - begin; }
};

struct MultiplexerMap {
  std::vector<TxSymbol> symbols;          // transmission order
  std::vector<int8_t> parity_block;       // per trellis position, -1 when punctured
  std::vector<uint8_t> systematic_block;  // per information bit
  std::vector<Segment> segments;          // segment 0 is "RSC 1"
};

enum class MultiplexerKind {
  kDiagonal,   // full-diversity h-pi-diagonal layout
  kSabotaged,  // RSC 1 parity on the same block as its systematic bit (negative control)
};

struct CodeInstance {
  CodeConfig config;
  DegreeProfile profile;
  Trellis trellis;
  RepeaterLayout repeater;
  Interleaver interleaver;
  MultiplexerMap mux;
  std::vector<int> bit_at;  // trellis position -> information bit
  MultiplexerKind kind = MultiplexerKind::kDiagonal;
  uint64_t seed = 0;

  int info_bits() const { return config.info_bits; }
  int frame_length() const { return static_cast<int>(mux.symbols.size()); }
  double realized_rate() const { return static_cast<double>(info_bits()) / frame_length(); }
};

/// Builds a code for n_c = 2, R_c = 1/2, rho_0 = 1/2. Throws
/// std::invalid_argument naming the violated constraint otherwise.
CodeInstance build_code(const CodeConfig& config, const DegreeProfile& profile, const Trellis& trellis,
                        uint64_t seed, MultiplexerKind kind = MultiplexerKind::kDiagonal);

/// Returns human-readable violations of the multiplexer/interleaver invariants.
std::vector<std::string> check_code_invariants(const CodeInstance& code);

struct TransmitFrame {
  std::vector<uint8_t> bits;
  std::vector<uint8_t> block;  // fading block per symbol
};

TransmitFrame encode_frame(const CodeInstance& code, std::span<const uint8_t> info);

struct DecodeOptions {
  int max_iters = 50;
  bool early_stop = true;
};

struct DecodeResult {
  std::vector<uint8_t> bits;
  std::vector<double> app;  // total a-posteriori LLR per information bit
  int iterations = 0;
  bool converged = false;
};

/// Iterative decoder over the segmented self-concatenated trellis. Segments
/// are processed in order, each seeing the freshest extrinsics of the others.
class TurboDecoder {
 public:
  explicit TurboDecoder(const CodeInstance& code) : code_(code) {}
  DecodeResult decode(std::span<const double> channel_llr, const DecodeOptions& options);

 private:
  const CodeInstance& code_;
  BcjrWorkspace ws_;
  std::vector<double> par_, ext_, total_, seg_sys_, seg_par_, seg_apr_, seg_out_;
};

DecodeResult decode_frame(const CodeInstance& code, std::span<const double> channel_llr,
                          const DecodeOptions& options = {});

/// Replayable text serialization (profile, seed, permutation, multiplexer table).
void write_code(std::ostream& os, const CodeInstance& code);
CodeInstance read_code(std::istream& is);
std::string code_fingerprint(const CodeInstance& code);

}  // namespace turbofade
