#include "cfgx/synth.hpp"

#include <algorithm>
#include <set>

#include "cfgx/errors.hpp"
#include "cfgx/rng.hpp"

namespace cfgx {

namespace {

InstructionFields random_instruction(Rng& rng, bool suspicious) {
  InstructionFields f;
  if (suspicious)
    f.opcode = kSuspiciousOpcodes[rng.below(kSuspiciousOpcodes.size())];
  else
    f.opcode = kBenignOpcodes[rng.below(kBenignOpcodes.size())];
  if (rng.chance(0.1))
    f.prefix = PrefixFields{rng.range(0, 6), rng.range(0, 1), rng.range(0, 1),
                            rng.range(0, 1)};
  if (rng.chance(0.5))
    f.modrm = ModRmFields{rng.range(0, 3), rng.range(0, 7), rng.range(0, 7)};
  if (rng.chance(0.25))
    f.sib = SibFields{rng.range(0, 3), rng.range(0, 7), rng.range(0, 7)};
  if (rng.chance(0.3)) f.disp = rng.below(1 << 16);
  if (rng.chance(0.3)) f.imm = rng.below(1 << 16);
  return f;
}

NodeBlock make_block(std::int64_t id, Rng& rng, bool suspicious) {
  NodeBlock nb;
  nb.id = id;
  int count = rng.range(2, 6);
  for (int i = 0; i < count; ++i)
    nb.instructions.push_back(random_instruction(rng, suspicious));
  return nb;
}

}  // namespace

SynthDataset gen_dataset(int n_per_class, const SynthConfig& cfg) {
  if (n_per_class < 1)
    throw ValidationError("gen_dataset: n_per_class must be >= 1");
  if (cfg.motif_nodes < 2)
    throw ValidationError("gen_dataset: motif_nodes must be >= 2");

  SynthDataset ds;
  for (int cls = 0; cls <= 1; ++cls) {
    for (int i = 0; i < n_per_class; ++i) {
      Rng rng(derive_seed(cfg.seed, cls ? "synth-mal" : "synth-ben",
                          static_cast<std::uint64_t>(i)));
      CFGraph g;
      g.label = cls;
      char idbuf[32];
      std::snprintf(idbuf, sizeof(idbuf), "syn-%c-%04d", cls ? 'm' : 'b', i);
      g.id = idbuf;

      int base = rng.range(cfg.base_nodes_min, cfg.base_nodes_max);
      for (int v = 0; v < base; ++v) g.nodes.push_back(make_block(v, rng, false));

      // a few scattered suspicious blocks in every graph, so feature mass
      // alone does not separate the classes
      int noise = rng.range(0, cfg.noise_nodes_max);
      for (int k = 0; k < noise; ++k) {
        int v = rng.range(0, base - 1);
        g.nodes[v] = make_block(v, rng, true);
      }

      std::set<std::pair<int, int>> edge_set;
      for (int v = 0; v + 1 < base; ++v) edge_set.insert({v, v + 1});
      for (int v = 0; v + 2 < base; ++v) {
        if (rng.chance(0.35)) {
          int to = v + 2 + static_cast<int>(rng.below(
                       std::min(8, base - 1 - (v + 2)) + 1));
          edge_set.insert({v, to});
        }
        if (v >= 1 && rng.chance(0.08)) {
          int back = std::max(0, v - 6);
          edge_set.insert({v, back + static_cast<int>(rng.below(v - back))});
        }
      }

      std::set<std::pair<int, int>> planted;
      if (cls == 1) {
        int m0 = base;
        for (int k = 0; k < cfg.motif_nodes; ++k)
          g.nodes.push_back(make_block(m0 + k, rng, true));
        for (int k = 0; k < cfg.motif_nodes; ++k)
          planted.insert({m0 + k, m0 + (k + 1) % cfg.motif_nodes});
        for (int a = 0; a < cfg.motif_nodes; ++a)
          for (int b = 0; b < cfg.motif_nodes; ++b)
            if (a != b && rng.chance(cfg.motif_density))
              planted.insert({m0 + a, m0 + b});
        // attachment edges in and out of the motif
        planted.insert({rng.range(0, base - 1), m0 + rng.range(0, cfg.motif_nodes - 1)});
        planted.insert({rng.range(0, base - 1), m0 + rng.range(0, cfg.motif_nodes - 1)});
        planted.insert({m0 + rng.range(0, cfg.motif_nodes - 1), rng.range(0, base - 1)});
        for (const auto& e : planted) edge_set.insert(e);
      }

      g.edges.assign(edge_set.begin(), edge_set.end());
      canonicalize(g);

      std::vector<int> truth_idx;
      for (std::size_t e = 0; e < g.edges.size(); ++e)
        if (planted.count(g.edges[e])) truth_idx.push_back(static_cast<int>(e));
      ds.truth[g.id] = std::move(truth_idx);
      ds.graphs.push_back(std::move(g));
    }
  }
  return ds;
}

std::optional<double> motif_auc(const std::vector<double>& scores,
                                const std::vector<int>& truth_edges) {
  std::size_t n = scores.size();
  std::vector<char> pos(n, 0);
  for (int e : truth_edges) {
    if (e < 0 || static_cast<std::size_t>(e) >= n)
      throw ValidationError("motif_auc: truth edge index out of range");
    pos[e] = 1;
  }
  std::size_t n_pos = 0;
  for (char c : pos) n_pos += c;
  if (n_pos == 0 || n_pos == n) return std::nullopt;

  // midrank AUC (Mann-Whitney)
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  std::vector<double> rank(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
    double mid = 0.5 * (static_cast<double>(i) + static_cast<double>(j)) + 1.0;
    for (std::size_t k = i; k <= j; ++k) rank[order[k]] = mid;
    i = j + 1;
  }
  double rank_sum = 0.0;
  for (std::size_t e = 0; e < n; ++e)
    if (pos[e]) rank_sum += rank[e];
  double np = static_cast<double>(n_pos), nn = static_cast<double>(n - n_pos);
  return (rank_sum - np * (np + 1.0) / 2.0) / (np * nn);
}

}  // namespace cfgx
