#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cfgx/insn.hpp"
#include "cfgx/tensor.hpp"

namespace cfgx {

struct NodeBlock {
  std::int64_t id = 0;
  std::vector<InstructionFields> instructions;
};

// Directed control-flow graph. Edges are pairs of node *indices*, kept in
// canonical order: sorted by (src,dst), duplicates dropped. Every edge-score
// or edge-rank vector in the toolkit aligns to this order. Immutable by
// convention after construction.
struct CFGraph {
  std::string id;
  int label = 0;  // 0 = benign, 1 = malware
  std::vector<NodeBlock> nodes;
  std::vector<std::pair<int, int>> edges;
  std::optional<Tensor> features;  // |V| x 64 node embeddings

  std::size_t num_nodes() const { return nodes.size(); }
  std::size_t num_edges() const { return edges.size(); }
};

// Set of indices into CFGraph.edges; stored sorted and unique.
struct EdgeSelection {
  std::vector<int> edge_indices;
  std::size_t size() const { return edge_indices.size(); }
};

EdgeSelection make_selection(std::vector<int> indices, std::size_t n_edges);

// Sorts + dedups edges (warning on duplicates) and validates the graph.
void canonicalize(CFGraph& g);
void validate_graph(const CFGraph& g);

CFGraph load_cfg(const std::string& bytes);
std::string save_cfg(const CFGraph& g);

// G_s: exactly the selected edges plus their incident nodes; feature rows
// copied; label preserved. Empty selection yields a 0-node, 0-edge graph.
CFGraph important_subgraph(const CFGraph& g, const EdgeSelection& sel);

// G - G_s: all nodes retained, selected edges removed.
CFGraph complement_graph(const CFGraph& g, const EdgeSelection& sel);

// DOT export; highlighted edges get a color attribute.
std::string to_dot(const CFGraph& g, const EdgeSelection* highlight = nullptr);

}  // namespace cfgx
