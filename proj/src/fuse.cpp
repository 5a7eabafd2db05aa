#include "cfgx/fuse.hpp"

#include <algorithm>
#include <cmath>

#include "cfgx/errors.hpp"

namespace cfgx {

std::vector<int> scores_to_ranks(const std::vector<double>& scores) {
  for (double s : scores)
    if (!std::isfinite(s)) throw ValidationError("scores_to_ranks: non-finite score");
  std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return a < b;
  });
  std::vector<int> ranks(n);
  for (std::size_t pos = 0; pos < n; ++pos)
    ranks[order[pos]] = static_cast<int>(pos) + 1;
  return ranks;
}

std::vector<int> rankfusion(const std::vector<int>& r1, const std::vector<int>& r2,
                            double acc1, double acc2, double threshold_percent) {
  if (r1.size() != r2.size())
    throw ValidationError("rankfusion: rank vectors of length " +
                          std::to_string(r1.size()) + " vs " +
                          std::to_string(r2.size()));
  if (threshold_percent < 0.0 || threshold_percent > 100.0)
    throw ValidationError("rankfusion: threshold percent outside [0,100]");
  double n = static_cast<double>(r1.size());
  double tau = threshold_percent * n / 100.0;
  std::vector<int> fused(r1.size());
  for (std::size_t e = 0; e < r1.size(); ++e) {
    int d = std::abs(r1[e] - r2[e]);
    if (static_cast<double>(d) <= tau)
      fused[e] = std::max(r1[e], r2[e]);
    else
      fused[e] = acc1 >= acc2 ? r1[e] : r2[e];
  }
  return fused;
}

std::vector<double> rankfusion_scores(const std::vector<int>& r1,
                                      const std::vector<int>& r2, double acc1,
                                      double acc2, double threshold_percent) {
  std::vector<int> fused = rankfusion(r1, r2, acc1, acc2, threshold_percent);
  std::size_t n = fused.size();
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  // smaller fused value = more important; ties by mean(r1,r2), then index
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (fused[a] != fused[b]) return fused[a] < fused[b];
    double ma = 0.5 * (r1[a] + r2[a]), mb = 0.5 * (r1[b] + r2[b]);
    if (ma != mb) return ma < mb;
    return a < b;
  });
  std::vector<double> scores(n);
  for (std::size_t pos = 0; pos < n; ++pos)
    scores[order[pos]] = static_cast<double>(n - pos);
  return scores;
}

std::pair<std::size_t, std::size_t> select_top2(
    const std::vector<SparsityAccuracy>& table) {
  if (table.size() < 2)
    throw ValidationError("select_top2: need at least two explainers, got " +
                          std::to_string(table.size()));
  for (std::size_t i = 1; i < table.size(); ++i) {
    if (table[i].acc_by_sparsity.size() != table[0].acc_by_sparsity.size())
      throw ValidationError("select_top2: explainers cover different grids");
    auto it0 = table[0].acc_by_sparsity.begin();
    for (const auto& [sp, _] : table[i].acc_by_sparsity) {
      if (sp != it0->first)
        throw ValidationError("select_top2: explainers cover different grids");
      ++it0;
    }
  }
  auto mean_acc = [&](std::size_t i) {
    double s = 0.0;
    for (const auto& [_, a] : table[i].acc_by_sparsity) s += a;
    return s / static_cast<double>(table[i].acc_by_sparsity.size());
  };
  auto smallest_sp_acc = [&](std::size_t i) {
    return table[i].acc_by_sparsity.begin()->second;
  };
  std::vector<std::size_t> idx(table.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    double ma = mean_acc(a), mb = mean_acc(b);
    if (ma != mb) return ma > mb;
    double sa = smallest_sp_acc(a), sb = smallest_sp_acc(b);
    if (sa != sb) return sa > sb;
    return table[a].explainer < table[b].explainer;
  });
  return {idx[0], idx[1]};
}

namespace {

std::vector<double> minmax_norm(const std::vector<double>& s) {
  if (s.empty()) return {};
  double lo = *std::min_element(s.begin(), s.end());
  double hi = *std::max_element(s.begin(), s.end());
  std::vector<double> out(s.size());
  if (hi == lo) {
    std::fill(out.begin(), out.end(), 0.5);
  } else {
    for (std::size_t i = 0; i < s.size(); ++i) out[i] = (s[i] - lo) / (hi - lo);
  }
  return out;
}

}  // namespace

std::vector<double> mean_aggregate(const std::vector<double>& s1,
                                   const std::vector<double>& s2) {
  if (s1.size() != s2.size())
    throw ValidationError("mean_aggregate: score vectors of length " +
                          std::to_string(s1.size()) + " vs " +
                          std::to_string(s2.size()));
  std::vector<double> a = minmax_norm(s1), b = minmax_norm(s2);
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = 0.5 * (a[i] + b[i]);
  return a;
}

EdgeSelection rank_vote(const std::vector<double>& s1, const std::vector<double>& s2,
                        const std::vector<double>& s3, int k) {
  std::size_t n = s1.size();
  if (s2.size() != n || s3.size() != n)
    throw ValidationError("rank_vote: score vectors disagree in length");
  if (n == 0) return EdgeSelection{};
  if (k > static_cast<int>(n)) {
    warn("rank_vote: k=" + std::to_string(k) + " exceeds |E|=" + std::to_string(n) +
         ", clamping");
    k = static_cast<int>(n);
  }
  if (k < 1) throw ValidationError("rank_vote: k must be >= 1");

  std::vector<int> r1 = scores_to_ranks(s1), r2 = scores_to_ranks(s2),
                   r3 = scores_to_ranks(s3);
  std::vector<double> mean_rank(n);
  std::vector<int> votes(n, 0);
  for (std::size_t e = 0; e < n; ++e) {
    votes[e] = (r1[e] <= k) + (r2[e] <= k) + (r3[e] <= k);
    mean_rank[e] = (r1[e] + r2[e] + r3[e]) / 3.0;
  }

  std::vector<int> majority;
  for (std::size_t e = 0; e < n; ++e)
    if (votes[e] >= 2) majority.push_back(static_cast<int>(e));

  auto by_mean_rank = [&](int a, int b) {
    if (mean_rank[a] != mean_rank[b]) return mean_rank[a] < mean_rank[b];
    return a < b;
  };
  std::sort(majority.begin(), majority.end(), by_mean_rank);
  if (static_cast<int>(majority.size()) > k) {
    majority.resize(k);
  } else if (static_cast<int>(majority.size()) < k) {
    std::vector<char> in(n, 0);
    for (int e : majority) in[e] = 1;
    std::vector<int> rest;
    for (std::size_t e = 0; e < n; ++e)
      if (!in[e]) rest.push_back(static_cast<int>(e));
    std::sort(rest.begin(), rest.end(), by_mean_rank);
    for (int e : rest) {
      if (static_cast<int>(majority.size()) == k) break;
      majority.push_back(e);
    }
  }
  return make_selection(std::move(majority), n);
}

}  // namespace cfgx
