#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cfgx/gcn.hpp"
#include "cfgx/graph.hpp"

namespace cfgx {

enum class Extraction { tes, gec };
std::string extraction_name(Extraction e);
Extraction extraction_from_string(const std::string& s);

// Maps a graph and a sparsity percent to the selected edges. Lets the sweep
// handle score-based explainers, per-sparsity fused scores and vote
// selections uniformly.
using SelectionFn = std::function<EdgeSelection(const CFGraph&, double)>;

SelectionFn selector_from_scores(
    const std::map<std::string, std::vector<double>>& scores_by_graph,
    Extraction extraction);

struct SweepRow {
  std::string explainer;
  std::string extraction;
  double sparsity;
  double accuracy;
};

std::vector<SweepRow> accuracy_sweep(
    const std::vector<const CFGraph*>& graphs, const GCNParams& p,
    const std::vector<std::pair<std::string, SelectionFn>>& explainers,
    const std::string& extraction_label, const std::vector<double>& sparsities);

std::vector<double> default_sparsity_grid();  // 5,10,...,95

struct EvalRecord {
  std::string graph_id;
  std::string explainer;
  std::string extraction;
  double sparsity;
  int correct;  // subgraph classified to the ground-truth label
  double fid_plus;
  double fid_minus;
};

struct FidelityResult {
  double fid_plus_mean = 0.0;
  double fid_minus_mean = 0.0;
  std::vector<EvalRecord> records;
};

// Fidelity+ = mean_i f(G_i)_y - f(G_i - G_s)_y, Fidelity- with the
// important subgraph instead; f is the softmax probability of the
// ground-truth class in eval mode.
FidelityResult fidelity(const std::vector<const CFGraph*>& graphs,
                        const GCNParams& p,
                        const std::string& explainer_label,
                        const SelectionFn& select, Extraction extraction,
                        double sparsity);

// Single-graph fidelity pair for a given selection.
std::pair<double, double> fidelity_single(const CFGraph& g, const GCNParams& p,
                                          const EdgeSelection& sel);

// ceil(ln|X| + |X|*p), clamped to |X|-1 (with warning); 0 when |X| <= 1.
std::size_t perturbation_removal_count(std::size_t x_size, double p_ratio);

// n_node node-removal + n_edge edge-removal perturbed copies, seeded.
std::vector<CFGraph> gen_perturbations(const CFGraph& g, double p_ratio,
                                       int n_node, int n_edge,
                                       std::uint64_t seed);

// Keeps perturbations whose prediction matches g and whose graph embedding
// stays within cosine distance tau of g's.
std::vector<std::size_t> filter_valid(const CFGraph& g,
                                      const std::vector<CFGraph>& perts,
                                      const GCNParams& p, double tau_cos);

struct ConsistencyRecord {
  std::string graph_id;
  double tau_cos;
  int n_valid;
  std::optional<double> delta_plus;   // null when n_valid = 0
  std::optional<double> delta_minus;
};

using ExplainFn = std::function<std::vector<double>(const CFGraph&)>;

std::vector<double> default_tau_grid();  // 0.01..0.03 step 0.0025

// Re-explains every perturbation, extracts at the same sparsity, computes
// per-perturbation fidelity, and reports the max-min spread over the valid
// set at each tau.
std::vector<ConsistencyRecord> consistency(const CFGraph& g,
                                           const ExplainFn& explain_fn,
                                           const GCNParams& p,
                                           Extraction extraction, double sparsity,
                                           const std::vector<double>& tau_grid,
                                           std::uint64_t seed);

}  // namespace cfgx
