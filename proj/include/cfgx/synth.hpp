#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cfgx/graph.hpp"

namespace cfgx {

// Disjoint opcode pools: the classifier's feature signal couples with the
// planted structure through these.
inline constexpr std::array<int, 16> kBenignOpcodes = {
    0x01, 0x03, 0x29, 0x31, 0x39, 0x3B, 0x50, 0x58,
    0x74, 0x75, 0x85, 0x89, 0x8B, 0x8D, 0x90, 0xC3};
inline constexpr std::array<int, 12> kSuspiciousOpcodes = {
    0x0F, 0x6C, 0x6E, 0xCD, 0xCF, 0xE4, 0xE6, 0xEA, 0xEC, 0xF4, 0xFA, 0xFB};

struct SynthConfig {
  int base_nodes_min = 30;
  int base_nodes_max = 80;
  int motif_nodes = 6;
  double motif_density = 0.5;  // extra directed pair probability beyond the ring
  int noise_nodes_max = 2;     // scattered suspicious nodes per graph
  std::uint64_t seed = 0;
};

struct SynthDataset {
  std::vector<CFGraph> graphs;                     // benign then malicious
  std::map<std::string, std::vector<int>> truth;   // id -> planted edge indices
};

// Benign: random chain+branch digraph with benign-opcode blocks plus a few
// scattered suspicious blocks. Malicious: same base plus a densely wired
// motif of suspicious blocks. Planted (motif + attachment) edges are the
// ground-truth explanation.
SynthDataset gen_dataset(int n_per_class, const SynthConfig& cfg);

// ROC-AUC of scores against motif membership, midrank tie handling.
// Returns nullopt when the truth set is empty or covers every edge.
std::optional<double> motif_auc(const std::vector<double>& scores,
                                const std::vector<int>& truth_edges);

}  // namespace cfgx
