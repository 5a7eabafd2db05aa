#include "cfgx/extract.hpp"

#include <algorithm>
#include <cmath>

#include "cfgx/errors.hpp"

namespace cfgx {

int sparsity_to_k(const CFGraph& g, double percent) {
  std::size_t n = g.num_edges();
  if (n == 0)
    throw ValidationError("sparsity_to_k: graph '" + g.id + "' has no edges");
  if (percent < 0.0)
    throw ValidationError("sparsity_to_k: negative sparsity percent");
  int k = static_cast<int>(std::floor(percent * static_cast<double>(n) / 100.0 + 0.5));
  k = std::max(1, k);
  return std::min(k, static_cast<int>(n));
}

namespace {

int clamp_k(const char* who, int k, std::size_t n) {
  if (k > static_cast<int>(n)) {
    warn(std::string(who) + ": k=" + std::to_string(k) +
         " exceeds |E|=" + std::to_string(n) + ", clamping");
    return static_cast<int>(n);
  }
  if (k < 1) throw ValidationError(std::string(who) + ": k must be >= 1");
  return k;
}

std::vector<int> order_by_score(const std::vector<double>& scores) {
  std::vector<int> order(scores.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return a < b;
  });
  return order;
}

}  // namespace

EdgeSelection tes(const CFGraph& g, const std::vector<double>& scores, int k) {
  if (scores.size() != g.num_edges())
    throw ValidationError("tes: " + std::to_string(scores.size()) +
                          " scores for |E|=" + std::to_string(g.num_edges()));
  if (g.num_edges() == 0) {
    if (k != 0) throw ValidationError("tes: no edges to select from");
    return EdgeSelection{};
  }
  k = clamp_k("tes", k, g.num_edges());
  std::vector<int> order = order_by_score(scores);
  order.resize(k);
  return make_selection(std::move(order), g.num_edges());
}

GecResult gec(const CFGraph& g, const std::vector<double>& scores, int k) {
  if (scores.size() != g.num_edges())
    throw ValidationError("gec: " + std::to_string(scores.size()) +
                          " scores for |E|=" + std::to_string(g.num_edges()));
  if (g.num_edges() == 0) throw ValidationError("gec: graph has no edges");
  k = clamp_k("gec", k, g.num_edges());

  std::vector<int> order = order_by_score(scores);
  std::vector<char> used(g.num_edges(), 0);
  std::vector<char> in_nodes(g.num_nodes(), 0);
  GecResult res;

  auto take = [&](int e) {
    used[e] = 1;
    in_nodes[g.edges[e].first] = 1;
    in_nodes[g.edges[e].second] = 1;
    res.edges.edge_indices.push_back(e);
  };

  take(order[0]);
  while (static_cast<int>(res.edges.edge_indices.size()) < k) {
    int next = -1;
    for (int e : order) {
      if (used[e]) continue;
      if (in_nodes[g.edges[e].first] || in_nodes[g.edges[e].second]) {
        next = e;
        break;
      }
    }
    if (next < 0) {
      // component exhausted before reaching k: restart from the globally
      // best unused edge
      for (int e : order) {
        if (!used[e]) {
          next = e;
          break;
        }
      }
      ++res.reseeds;
    }
    take(next);
  }

  for (std::size_t i = 0; i < in_nodes.size(); ++i)
    if (in_nodes[i]) res.nodes.push_back(static_cast<int>(i));
  res.edges = make_selection(std::move(res.edges.edge_indices), g.num_edges());
  return res;
}

}  // namespace cfgx
