#include "cfgx/eval.hpp"

#include <algorithm>
#include <cmath>

#include "cfgx/errors.hpp"
#include "cfgx/extract.hpp"
#include "cfgx/rng.hpp"

namespace cfgx {

std::string extraction_name(Extraction e) {
  return e == Extraction::tes ? "tes" : "gec";
}

Extraction extraction_from_string(const std::string& s) {
  if (s == "tes") return Extraction::tes;
  if (s == "gec") return Extraction::gec;
  throw ValidationError("unknown extraction method '" + s + "' (tes|gec)");
}

SelectionFn selector_from_scores(
    const std::map<std::string, std::vector<double>>& scores_by_graph,
    Extraction extraction) {
  return [scores_by_graph, extraction](const CFGraph& g,
                                       double sparsity) -> EdgeSelection {
    auto it = scores_by_graph.find(g.id);
    if (it == scores_by_graph.end())
      throw ValidationError("no explanation scores for graph '" + g.id + "'");
    int k = sparsity_to_k(g, sparsity);
    if (extraction == Extraction::tes) return tes(g, it->second, k);
    return gec(g, it->second, k).edges;
  };
}

std::vector<double> default_sparsity_grid() {
  std::vector<double> out;
  for (int s = 5; s <= 95; s += 5) out.push_back(static_cast<double>(s));
  return out;
}

std::vector<double> default_tau_grid() {
  std::vector<double> out;
  for (int i = 0; i <= 8; ++i) out.push_back(0.01 + 0.0025 * i);
  return out;
}

std::vector<SweepRow> accuracy_sweep(
    const std::vector<const CFGraph*>& graphs, const GCNParams& p,
    const std::vector<std::pair<std::string, SelectionFn>>& explainers,
    const std::string& extraction_label, const std::vector<double>& sparsities) {
  std::vector<SweepRow> rows;
  for (const auto& [name, select] : explainers) {
    for (double sp : sparsities) {
      double correct = 0.0;
      for (const CFGraph* g : graphs) {
        EdgeSelection sel = select(*g, sp);
        CFGraph sub = important_subgraph(*g, sel);
        if (sub.num_nodes() == 0) {
          warn("accuracy_sweep: empty extraction for graph '" + g->id +
               "' at sparsity " + std::to_string(sp) + "; counted as miss");
          continue;
        }
        ModelOutput out = gcn_eval(sub, p);
        if (out.predicted() == g->label) correct += 1.0;
      }
      rows.push_back({name, extraction_label, sp,
                      graphs.empty() ? 0.0
                                     : correct / static_cast<double>(graphs.size())});
    }
  }
  return rows;
}

std::pair<double, double> fidelity_single(const CFGraph& g, const GCNParams& p,
                                          const EdgeSelection& sel) {
  double f_full = gcn_eval(g, p).probs[g.label];
  CFGraph comp = complement_graph(g, sel);
  double f_comp = gcn_eval(comp, p).probs[g.label];
  CFGraph sub = important_subgraph(g, sel);
  double f_sub = gcn_eval(sub, p).probs[g.label];
  return {f_full - f_comp, f_full - f_sub};
}

FidelityResult fidelity(const std::vector<const CFGraph*>& graphs,
                        const GCNParams& p, const std::string& explainer_label,
                        const SelectionFn& select, Extraction extraction,
                        double sparsity) {
  FidelityResult res;
  for (const CFGraph* g : graphs) {
    EdgeSelection sel = select(*g, sparsity);
    auto [fp, fm] = fidelity_single(*g, p, sel);
    CFGraph sub = important_subgraph(*g, sel);
    int correct = 0;
    if (sub.num_nodes() > 0)
      correct = gcn_eval(sub, p).predicted() == g->label ? 1 : 0;
    res.records.push_back({g->id, explainer_label, extraction_name(extraction),
                           sparsity, correct, fp, fm});
    res.fid_plus_mean += fp;
    res.fid_minus_mean += fm;
  }
  if (!graphs.empty()) {
    res.fid_plus_mean /= static_cast<double>(graphs.size());
    res.fid_minus_mean /= static_cast<double>(graphs.size());
  }
  return res;
}

std::size_t perturbation_removal_count(std::size_t x_size, double p_ratio) {
  if (x_size <= 1) {
    if (x_size == 1)
      warn("perturbation: |X|=1, removal count clamped to 0");
    return 0;
  }
  double raw = std::ceil(std::log(static_cast<double>(x_size)) +
                         static_cast<double>(x_size) * p_ratio);
  auto s = static_cast<std::size_t>(raw);
  if (s >= x_size) {
    warn("perturbation: removal count " + std::to_string(s) + " clamped to " +
         std::to_string(x_size - 1));
    s = x_size - 1;
  }
  return s;
}

namespace {

CFGraph remove_nodes(const CFGraph& g, const std::vector<std::size_t>& drop,
                     const std::string& suffix) {
  std::vector<char> dead(g.num_nodes(), 0);
  for (std::size_t i : drop) dead[i] = 1;
  CFGraph out;
  out.id = g.id + suffix;
  out.label = g.label;
  std::vector<int> remap(g.num_nodes(), -1);
  for (std::size_t i = 0; i < g.num_nodes(); ++i) {
    if (dead[i]) continue;
    remap[i] = static_cast<int>(out.nodes.size());
    out.nodes.push_back(g.nodes[i]);
  }
  for (auto [u, v] : g.edges)
    if (remap[u] >= 0 && remap[v] >= 0) out.edges.emplace_back(remap[u], remap[v]);
  if (g.features) {
    Tensor feat(out.nodes.size(), g.features->cols);
    std::size_t r = 0;
    for (std::size_t i = 0; i < g.num_nodes(); ++i) {
      if (dead[i]) continue;
      for (std::size_t c = 0; c < g.features->cols; ++c)
        feat(r, c) = (*g.features)(i, c);
      ++r;
    }
    out.features = std::move(feat);
  }
  return out;
}

std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k,
                                                    Rng& rng) {
  std::vector<std::size_t> all(n);
  for (std::size_t i = 0; i < n; ++i) all[i] = i;
  for (std::size_t i = 0; i < k; ++i) {
    std::size_t j = i + rng.below(n - i);
    std::swap(all[i], all[j]);
  }
  all.resize(k);
  return all;
}

}  // namespace

std::vector<CFGraph> gen_perturbations(const CFGraph& g, double p_ratio,
                                       int n_node, int n_edge,
                                       std::uint64_t seed) {
  std::vector<CFGraph> out;
  std::size_t node_drop = perturbation_removal_count(g.num_nodes(), p_ratio);
  std::size_t edge_drop = perturbation_removal_count(g.num_edges(), p_ratio);
  for (int i = 0; i < n_node; ++i) {
    Rng rng(derive_seed(seed, "pert-node", static_cast<std::uint64_t>(i)));
    std::vector<std::size_t> drop =
        sample_without_replacement(g.num_nodes(), node_drop, rng);
    out.push_back(remove_nodes(g, drop, "#pn" + std::to_string(i)));
  }
  for (int i = 0; i < n_edge; ++i) {
    Rng rng(derive_seed(seed, "pert-edge", static_cast<std::uint64_t>(i)));
    std::vector<std::size_t> drop =
        sample_without_replacement(g.num_edges(), edge_drop, rng);
    std::vector<int> idx(drop.begin(), drop.end());
    CFGraph pert = complement_graph(g, make_selection(std::move(idx), g.num_edges()));
    pert.id = g.id + "#pe" + std::to_string(i);
    out.push_back(std::move(pert));
  }
  return out;
}

namespace {

double cosine_distance(const std::vector<double>& a, const std::vector<double>& b) {
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) return 1.0;  // zero-norm: no similarity
  return 1.0 - dot / (std::sqrt(na) * std::sqrt(nb));
}

}  // namespace

std::vector<std::size_t> filter_valid(const CFGraph& g,
                                      const std::vector<CFGraph>& perts,
                                      const GCNParams& p, double tau_cos) {
  ModelOutput base = gcn_eval(g, p);
  std::vector<std::size_t> valid;
  for (std::size_t i = 0; i < perts.size(); ++i) {
    ModelOutput out = gcn_eval(perts[i], p);
    if (out.predicted() != base.predicted()) continue;
    if (cosine_distance(base.graph_embedding, out.graph_embedding) < tau_cos)
      valid.push_back(i);
  }
  return valid;
}

std::vector<ConsistencyRecord> consistency(const CFGraph& g,
                                           const ExplainFn& explain_fn,
                                           const GCNParams& p,
                                           Extraction extraction, double sparsity,
                                           const std::vector<double>& tau_grid,
                                           std::uint64_t seed) {
  std::vector<CFGraph> perts = gen_perturbations(g, 0.01, 10, 10, seed);

  // fidelity of each perturbation under its own fresh explanation
  std::vector<std::pair<double, double>> fids(perts.size());
  for (std::size_t i = 0; i < perts.size(); ++i) {
    const CFGraph& gp = perts[i];
    if (gp.num_edges() == 0) {
      fids[i] = fidelity_single(gp, p, EdgeSelection{});
      continue;
    }
    std::vector<double> scores = explain_fn(gp);
    int k = sparsity_to_k(gp, sparsity);
    EdgeSelection sel = extraction == Extraction::tes ? tes(gp, scores, k)
                                                      : gec(gp, scores, k).edges;
    fids[i] = fidelity_single(gp, p, sel);
  }

  std::vector<ConsistencyRecord> records;
  for (double tau : tau_grid) {
    std::vector<std::size_t> valid = filter_valid(g, perts, p, tau);
    ConsistencyRecord rec;
    rec.graph_id = g.id;
    rec.tau_cos = tau;
    rec.n_valid = static_cast<int>(valid.size());
    if (!valid.empty()) {
      double pmin = 1e300, pmax = -1e300, mmin = 1e300, mmax = -1e300;
      for (std::size_t i : valid) {
        pmin = std::min(pmin, fids[i].first);
        pmax = std::max(pmax, fids[i].first);
        mmin = std::min(mmin, fids[i].second);
        mmax = std::max(mmax, fids[i].second);
      }
      rec.delta_plus = pmax - pmin;
      rec.delta_minus = mmax - mmin;
    }
    records.push_back(std::move(rec));
  }
  return records;
}

}  // namespace cfgx
