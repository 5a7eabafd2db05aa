#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace cfgx {

// Structured x86-64 instruction components. Optional members model the
// option flags: a component may only be read when its optional is engaged.
struct PrefixFields {
  int es = 0;    // extra-segment register selector, 0..6
  int osz = 0;   // operand-size override bit
  int asz = 0;   // address-size override bit
  int lock = 0;  // lock prefix bit
};

struct ModRmFields {
  int mod = 0;  // 0..3
  int reg = 0;  // 0..7
  int rm = 0;   // 0..7
};

struct SibFields {
  int scale = 0;  // 0..3
  int index = 0;  // 0..7
  int base = 0;   // 0..7
};

struct InstructionFields {
  int opcode = 0;  // 0..255, always present
  std::optional<PrefixFields> prefix;
  std::optional<ModRmFields> modrm;
  std::optional<SibFields> sib;
  std::optional<std::uint64_t> disp;
  std::optional<std::uint64_t> imm;
};

// Fixed segment layout of the 439-dim encoding:
//   option | prefix | opcode | modrm | sib | disp | imm
inline constexpr std::size_t kInstrDim = 439;
inline constexpr std::size_t kOptionOffset = 0;   // 5 presence bits
inline constexpr std::size_t kPrefixOffset = 5;   // 7-way es one-hot + 3 bits
inline constexpr std::size_t kOpcodeOffset = 15;  // 256-way one-hot
inline constexpr std::size_t kModRmOffset = 271;  // 4+8+8 one-hots
inline constexpr std::size_t kSibOffset = 291;    // 4+8+8 one-hots
inline constexpr std::size_t kDispOffset = 311;   // 64 little-endian bits
inline constexpr std::size_t kImmOffset = 375;    // 64 little-endian bits

enum class AggMode { mean, max };

// Binary 439-dim encoding of one instruction. Throws ValidationError when a
// field is outside its declared range.
std::vector<double> encode_instruction(const InstructionFields& f);

// Elementwise mean (default) or max over per-instruction encodings.
// Empty instruction list encodes as the zero vector.
std::vector<double> encode_node(std::span<const InstructionFields> instrs,
                                AggMode mode = AggMode::mean);

AggMode agg_mode_from_string(const std::string& s);

}  // namespace cfgx
