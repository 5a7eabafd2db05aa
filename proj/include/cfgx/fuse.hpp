#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "cfgx/graph.hpp"

namespace cfgx {

// Descending rank transform: rank 1 = highest score, ties broken by lower
// canonical edge index. Output is a permutation of 1..n.
std::vector<int> scores_to_ranks(const std::vector<double>& scores);

// Algorithm: per edge, d = |r1-r2|; if d <= tau (tau = T*n/100) take the
// conservative max rank, otherwise the rank from the more accurate
// explainer. Fused values may collide; ties are resolved downstream by
// mean(r1,r2) then edge index.
std::vector<int> rankfusion(const std::vector<int>& r1, const std::vector<int>& r2,
                            double acc1, double acc2, double threshold_percent);

// Total order over edges implied by the fused ranks + tie rule, expressed
// as scores (higher = more important) so TES/GEC can consume them.
std::vector<double> rankfusion_scores(const std::vector<int>& r1,
                                      const std::vector<int>& r2, double acc1,
                                      double acc2, double threshold_percent);

// Accuracy of one explainer across the sparsity grid.
struct SparsityAccuracy {
  std::string explainer;
  std::map<double, double> acc_by_sparsity;
};

// Two explainers with the highest mean accuracy over the grid; ties broken
// by accuracy at the smallest sparsity, then by name. Returns indices into
// the table, best first.
std::pair<std::size_t, std::size_t> select_top2(
    const std::vector<SparsityAccuracy>& table);

// Min-max normalize each input to [0,1] (constant vectors map to all-0.5),
// then average elementwise.
std::vector<double> mean_aggregate(const std::vector<double>& s1,
                                   const std::vector<double>& s2);

// Majority vote (2 of 3) among top-k sets; under/overfull results are
// balanced to exactly k by best mean rank.
EdgeSelection rank_vote(const std::vector<double>& s1, const std::vector<double>& s2,
                        const std::vector<double>& s3, int k);

}  // namespace cfgx
