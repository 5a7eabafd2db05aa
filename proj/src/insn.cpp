#include "cfgx/insn.hpp"

#include <algorithm>

#include "cfgx/errors.hpp"

namespace cfgx {

namespace {

void require_range(const char* name, int v, int lo, int hi) {
  if (v < lo || v > hi)
    throw ValidationError("instruction field '" + std::string(name) + "' = " +
                          std::to_string(v) + " outside [" + std::to_string(lo) +
                          "," + std::to_string(hi) + "]");
}

void write_bits64(std::vector<double>& out, std::size_t offset, std::uint64_t v) {
  for (std::size_t b = 0; b < 64; ++b)
    out[offset + b] = static_cast<double>((v >> b) & 1ULL);
}

}  // namespace

std::vector<double> encode_instruction(const InstructionFields& f) {
  std::vector<double> out(kInstrDim, 0.0);

  require_range("opcode", f.opcode, 0, 255);
  out[kOpcodeOffset + static_cast<std::size_t>(f.opcode)] = 1.0;

  if (f.prefix) {
    out[kOptionOffset + 0] = 1.0;
    require_range("prefix.es", f.prefix->es, 0, 6);
    require_range("prefix.osz", f.prefix->osz, 0, 1);
    require_range("prefix.asz", f.prefix->asz, 0, 1);
    require_range("prefix.lock", f.prefix->lock, 0, 1);
    out[kPrefixOffset + static_cast<std::size_t>(f.prefix->es)] = 1.0;
    out[kPrefixOffset + 7] = f.prefix->osz;
    out[kPrefixOffset + 8] = f.prefix->asz;
    out[kPrefixOffset + 9] = f.prefix->lock;
  }
  if (f.modrm) {
    out[kOptionOffset + 1] = 1.0;
    require_range("modrm.mod", f.modrm->mod, 0, 3);
    require_range("modrm.reg", f.modrm->reg, 0, 7);
    require_range("modrm.rm", f.modrm->rm, 0, 7);
    out[kModRmOffset + static_cast<std::size_t>(f.modrm->mod)] = 1.0;
    out[kModRmOffset + 4 + static_cast<std::size_t>(f.modrm->reg)] = 1.0;
    out[kModRmOffset + 12 + static_cast<std::size_t>(f.modrm->rm)] = 1.0;
  }
  if (f.sib) {
    out[kOptionOffset + 2] = 1.0;
    require_range("sib.scale", f.sib->scale, 0, 3);
    require_range("sib.index", f.sib->index, 0, 7);
    require_range("sib.base", f.sib->base, 0, 7);
    out[kSibOffset + static_cast<std::size_t>(f.sib->scale)] = 1.0;
    out[kSibOffset + 4 + static_cast<std::size_t>(f.sib->index)] = 1.0;
    out[kSibOffset + 12 + static_cast<std::size_t>(f.sib->base)] = 1.0;
  }
  if (f.disp) {
    out[kOptionOffset + 3] = 1.0;
    write_bits64(out, kDispOffset, *f.disp);
  }
  if (f.imm) {
    out[kOptionOffset + 4] = 1.0;
    write_bits64(out, kImmOffset, *f.imm);
  }
  return out;
}

std::vector<double> encode_node(std::span<const InstructionFields> instrs,
                                AggMode mode) {
  std::vector<double> acc(kInstrDim, 0.0);
  if (instrs.empty()) return acc;
  for (const auto& ins : instrs) {
    std::vector<double> e = encode_instruction(ins);
    if (mode == AggMode::mean) {
      for (std::size_t i = 0; i < kInstrDim; ++i) acc[i] += e[i];
    } else {
      for (std::size_t i = 0; i < kInstrDim; ++i) acc[i] = std::max(acc[i], e[i]);
    }
  }
  if (mode == AggMode::mean) {
    double inv = 1.0 / static_cast<double>(instrs.size());
    for (double& v : acc) v *= inv;
  }
  return acc;
}

AggMode agg_mode_from_string(const std::string& s) {
  if (s == "mean") return AggMode::mean;
  if (s == "max") return AggMode::max;
  throw ValidationError("unknown aggregation mode '" + s + "' (mean|max)");
}

}  // namespace cfgx
