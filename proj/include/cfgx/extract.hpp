#pragma once

#include <vector>

#include "cfgx/graph.hpp"

namespace cfgx {

// k = max(1, round-half-up(percent * |E| / 100)), clamped to |E|.
// Throws on edgeless graphs.
int sparsity_to_k(const CFGraph& g, double percent);

// Top-k edges by score, ties broken by canonical edge index.
EdgeSelection tes(const CFGraph& g, const std::vector<double>& scores, int k);

struct GecResult {
  EdgeSelection edges;
  std::vector<int> nodes;  // V_selected, ascending
  int reseeds = 0;         // times growth stalled and restarted
};

// Greedy edge-wise composition: seed with the globally best edge, then
// repeatedly add the best unused edge touching the selected node set
// (direction ignored). A stalled component re-seeds with the globally best
// unused edge so k edges are always reached.
GecResult gec(const CFGraph& g, const std::vector<double>& scores, int k);

}  // namespace cfgx
