#include "cfgx/graph.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "cfgx/errors.hpp"
#include "cfgx/jsonio.hpp"

namespace cfgx {

using nlohmann::json;

EdgeSelection make_selection(std::vector<int> indices, std::size_t n_edges) {
  std::sort(indices.begin(), indices.end());
  indices.erase(std::unique(indices.begin(), indices.end()), indices.end());
  for (int i : indices)
    if (i < 0 || static_cast<std::size_t>(i) >= n_edges)
      throw ValidationError("edge selection index " + std::to_string(i) +
                            " out of range for " + std::to_string(n_edges) +
                            " edges");
  return EdgeSelection{std::move(indices)};
}

void validate_graph(const CFGraph& g) {
  int n = static_cast<int>(g.nodes.size());
  std::set<std::int64_t> ids;
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    if (!ids.insert(g.nodes[i].id).second)
      throw ValidationError("graph '" + g.id + "': duplicate node id " +
                            std::to_string(g.nodes[i].id));
  }
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    auto [u, v] = g.edges[e];
    if (u < 0 || u >= n || v < 0 || v >= n)
      throw ValidationError("graph '" + g.id + "': edges[" + std::to_string(e) +
                            "] endpoint out of range (nodes: " +
                            std::to_string(n) + ")");
  }
  if (g.label != 0 && g.label != 1)
    throw ValidationError("graph '" + g.id + "': label must be 0 or 1");
  if (g.features && g.features->rows != g.nodes.size())
    throw ValidationError("graph '" + g.id + "': feature rows " +
                          std::to_string(g.features->rows) + " != |V| " +
                          std::to_string(g.nodes.size()));
}

void canonicalize(CFGraph& g) {
  validate_graph(g);
  std::size_t before = g.edges.size();
  std::sort(g.edges.begin(), g.edges.end());
  g.edges.erase(std::unique(g.edges.begin(), g.edges.end()), g.edges.end());
  if (g.edges.size() != before)
    warn("graph '" + g.id + "': dropped " +
         std::to_string(before - g.edges.size()) + " duplicate edge(s)");
}

InstructionFields instruction_from_json(const json& j, const std::string& where) {
  if (!j.is_object()) throw ValidationError(where + ": expected object");
  if (!j.contains("opcode") || !j["opcode"].is_number_integer())
    throw ValidationError(where + ".opcode: required integer");
  InstructionFields f;
  f.opcode = j["opcode"].get<int>();
  if (j.contains("prefix")) {
    const auto& p = j["prefix"];
    if (!p.is_object()) throw ValidationError(where + ".prefix: expected object");
    f.prefix = PrefixFields{p.value("es", 0), p.value("osz", 0), p.value("asz", 0),
                            p.value("lock", 0)};
  }
  if (j.contains("modrm")) {
    const auto& m = j["modrm"];
    if (!m.is_object()) throw ValidationError(where + ".modrm: expected object");
    f.modrm = ModRmFields{m.value("mod", 0), m.value("reg", 0), m.value("rm", 0)};
  }
  if (j.contains("sib")) {
    const auto& s = j["sib"];
    if (!s.is_object()) throw ValidationError(where + ".sib: expected object");
    f.sib = SibFields{s.value("scale", 0), s.value("index", 0), s.value("base", 0)};
  }
  if (j.contains("disp")) {
    if (!j["disp"].is_number_unsigned() && !j["disp"].is_number_integer())
      throw ValidationError(where + ".disp: expected unsigned integer");
    f.disp = j["disp"].get<std::uint64_t>();
  }
  if (j.contains("imm")) {
    if (!j["imm"].is_number_unsigned() && !j["imm"].is_number_integer())
      throw ValidationError(where + ".imm: expected unsigned integer");
    f.imm = j["imm"].get<std::uint64_t>();
  }
  return f;
}

json instruction_to_json(const InstructionFields& f) {
  json j;
  j["opcode"] = f.opcode;
  if (f.prefix)
    j["prefix"] = {{"es", f.prefix->es},
                   {"osz", f.prefix->osz},
                   {"asz", f.prefix->asz},
                   {"lock", f.prefix->lock}};
  if (f.modrm)
    j["modrm"] = {{"mod", f.modrm->mod}, {"reg", f.modrm->reg}, {"rm", f.modrm->rm}};
  if (f.sib)
    j["sib"] = {{"scale", f.sib->scale},
                {"index", f.sib->index},
                {"base", f.sib->base}};
  if (f.disp) j["disp"] = *f.disp;
  if (f.imm) j["imm"] = *f.imm;
  return j;
}

CFGraph graph_from_json(const json& j, const std::string& where) {
  if (!j.is_object()) throw ValidationError(where + ": expected object");
  CFGraph g;
  if (!j.contains("id") || !j["id"].is_string())
    throw ValidationError(where + ".id: required string");
  g.id = j["id"].get<std::string>();
  if (!j.contains("label") || !j["label"].is_number_integer())
    throw ValidationError(where + ".label: required integer 0|1");
  g.label = j["label"].get<int>();
  if (!j.contains("nodes") || !j["nodes"].is_array())
    throw ValidationError(where + ".nodes: required array");
  std::size_t ni = 0;
  for (const auto& nj : j["nodes"]) {
    std::string npath = where + ".nodes[" + std::to_string(ni) + "]";
    if (!nj.is_object()) throw ValidationError(npath + ": expected object");
    NodeBlock nb;
    if (!nj.contains("id") || !nj["id"].is_number_integer())
      throw ValidationError(npath + ".id: required integer");
    nb.id = nj["id"].get<std::int64_t>();
    if (nj.contains("instructions")) {
      if (!nj["instructions"].is_array())
        throw ValidationError(npath + ".instructions: expected array");
      std::size_t ii = 0;
      for (const auto& ij : nj["instructions"]) {
        nb.instructions.push_back(instruction_from_json(
            ij, npath + ".instructions[" + std::to_string(ii) + "]"));
        ++ii;
      }
    }
    g.nodes.push_back(std::move(nb));
    ++ni;
  }
  if (!j.contains("edges") || !j["edges"].is_array())
    throw ValidationError(where + ".edges: required array");
  std::size_t ei = 0;
  for (const auto& ej : j["edges"]) {
    std::string epath = where + ".edges[" + std::to_string(ei) + "]";
    if (!ej.is_array() || ej.size() != 2 || !ej[0].is_number_integer() ||
        !ej[1].is_number_integer())
      throw ValidationError(epath + ": expected [int,int]");
    g.edges.emplace_back(ej[0].get<int>(), ej[1].get<int>());
    ++ei;
  }
  if (j.contains("features")) {
    const auto& fj = j["features"];
    if (!fj.is_array())
      throw ValidationError(where + ".features: expected array of rows");
    Tensor feat(fj.size(), 64);
    std::size_t r = 0;
    for (const auto& row : fj) {
      if (!row.is_array() || row.size() != 64)
        throw ValidationError(where + ".features[" + std::to_string(r) +
                              "]: expected 64 reals");
      for (std::size_t c = 0; c < 64; ++c) feat(r, c) = row[c].get<double>();
      ++r;
    }
    g.features = std::move(feat);
  }
  canonicalize(g);
  return g;
}

json graph_to_json(const CFGraph& g) {
  json nodes = json::array();
  for (const auto& nb : g.nodes) {
    json instrs = json::array();
    for (const auto& ins : nb.instructions) instrs.push_back(instruction_to_json(ins));
    nodes.push_back({{"id", nb.id}, {"instructions", std::move(instrs)}});
  }
  json edges = json::array();
  for (auto [u, v] : g.edges) edges.push_back({u, v});
  json j{{"id", g.id}, {"label", g.label}, {"nodes", std::move(nodes)},
         {"edges", std::move(edges)}};
  if (g.features) {
    json rows = json::array();
    for (std::size_t r = 0; r < g.features->rows; ++r) {
      json row = json::array();
      for (std::size_t c = 0; c < g.features->cols; ++c)
        row.push_back((*g.features)(r, c));
      rows.push_back(std::move(row));
    }
    j["features"] = std::move(rows);
  }
  return j;
}

CFGraph load_cfg(const std::string& bytes) {
  json j = json::parse(bytes, nullptr, false);
  if (j.is_discarded()) throw ValidationError("cfg: invalid JSON document");
  return graph_from_json(j, "$");
}

std::string save_cfg(const CFGraph& g) { return graph_to_json(g).dump(); }

CFGraph important_subgraph(const CFGraph& g, const EdgeSelection& sel) {
  std::vector<int> keep;
  for (int e : sel.edge_indices) {
    if (e < 0 || static_cast<std::size_t>(e) >= g.edges.size())
      throw ValidationError("important_subgraph: edge index " + std::to_string(e) +
                            " out of range");
    keep.push_back(g.edges[e].first);
    keep.push_back(g.edges[e].second);
  }
  std::sort(keep.begin(), keep.end());
  keep.erase(std::unique(keep.begin(), keep.end()), keep.end());

  std::vector<int> remap(g.nodes.size(), -1);
  CFGraph out;
  out.id = g.id;
  out.label = g.label;
  for (std::size_t i = 0; i < keep.size(); ++i) {
    remap[keep[i]] = static_cast<int>(i);
    out.nodes.push_back(g.nodes[keep[i]]);
  }
  for (int e : sel.edge_indices) {
    auto [u, v] = g.edges[e];
    out.edges.emplace_back(remap[u], remap[v]);
  }
  std::sort(out.edges.begin(), out.edges.end());
  if (g.features) {
    Tensor feat(keep.size(), g.features->cols);
    for (std::size_t i = 0; i < keep.size(); ++i)
      for (std::size_t c = 0; c < g.features->cols; ++c)
        feat(i, c) = (*g.features)(keep[i], c);
    out.features = std::move(feat);
  }
  return out;
}

CFGraph complement_graph(const CFGraph& g, const EdgeSelection& sel) {
  std::vector<char> removed(g.edges.size(), 0);
  for (int e : sel.edge_indices) {
    if (e < 0 || static_cast<std::size_t>(e) >= g.edges.size())
      throw ValidationError("complement_graph: edge index " + std::to_string(e) +
                            " out of range");
    removed[e] = 1;
  }
  CFGraph out;
  out.id = g.id;
  out.label = g.label;
  out.nodes = g.nodes;
  out.features = g.features;
  for (std::size_t e = 0; e < g.edges.size(); ++e)
    if (!removed[e]) out.edges.push_back(g.edges[e]);
  return out;
}

std::string to_dot(const CFGraph& g, const EdgeSelection* highlight) {
  std::vector<char> hot(g.edges.size(), 0);
  if (highlight)
    for (int e : highlight->edge_indices)
      if (e >= 0 && static_cast<std::size_t>(e) < g.edges.size()) hot[e] = 1;
  std::ostringstream os;
  os << "digraph \"" << g.id << "\" {\n";
  for (std::size_t i = 0; i < g.nodes.size(); ++i)
    os << "  n" << i << " [label=\"" << g.nodes[i].id << "\"];\n";
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    os << "  n" << g.edges[e].first << " -> n" << g.edges[e].second;
    if (hot[e]) os << " [color=\"red\", penwidth=2]";
    os << ";\n";
  }
  os << "}\n";
  return os.str();
}

}  // namespace cfgx
