#include "sbsos/decomposition.hpp"

#include <algorithm>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace sbsos {

int InteractionGraph::num_edges() const {
  int twice = 0;
  for (const auto& [v, nbrs] : adjacency) twice += static_cast<int>(nbrs.size());
  return twice / 2;
}

namespace {

void add_clique(InteractionGraph& g, const std::vector<VarId>& support) {
  for (VarId v : support) g.adjacency[v];  // ensure isolated vars exist
  for (size_t a = 0; a < support.size(); ++a) {
    for (size_t b = a + 1; b < support.size(); ++b) {
      g.adjacency[support[a]].insert(support[b]);
      g.adjacency[support[b]].insert(support[a]);
    }
  }
}

}  // namespace

InteractionGraph interaction_graph(const std::vector<Polynomial>& cost_terms,
                                   const std::vector<ConstraintPoly>& constraints) {
  InteractionGraph g;
  for (const Polynomial& p : cost_terms) add_clique(g, p.support());
  for (const ConstraintPoly& c : constraints) add_clique(g, c.g.support());
  for (const auto& [v, nbrs] : g.adjacency) g.vars.push_back(v);
  return g;
}

bool Block::contains(const std::vector<VarId>& subset) const {
  return std::includes(vars.begin(), vars.end(), subset.begin(), subset.end());
}

std::string Decomposition::to_json() const {
  std::ostringstream os;
  os << "{\"num_blocks\":" << blocks.size() << ",\"sizes\":[";
  for (size_t i = 0; i < blocks.size(); ++i) {
    os << (i ? "," : "") << blocks[i].vars.size();
  }
  os << "],\"blocks\":[";
  for (size_t i = 0; i < blocks.size(); ++i) {
    os << (i ? "," : "") << "{\"vars\":[";
    for (size_t k = 0; k < blocks[i].vars.size(); ++k) {
      os << (k ? "," : "") << blocks[i].vars[k];
    }
    os << "],\"num_constraints\":" << blocks[i].constraints.size()
       << ",\"num_terms\":" << blocks[i].terms.size() << "}";
  }
  os << "],\"consecutive_overlaps\":[";
  for (size_t i = 0; i + 1 < blocks.size(); ++i) {
    std::vector<VarId> inter;
    std::set_intersection(blocks[i].vars.begin(), blocks[i].vars.end(),
                          blocks[i + 1].vars.begin(), blocks[i + 1].vars.end(),
                          std::back_inserter(inter));
    os << (i ? "," : "") << inter.size();
  }
  os << "]}";
  return os.str();
}

namespace {

struct Clique {
  std::vector<VarId> vars;  // sorted
};

// Minimum-degree elimination with fill-in; returns the chordal completion as
// adjacency sets plus the elimination position of every vertex.
void eliminate_min_degree(const InteractionGraph& g,
                          std::map<VarId, std::set<VarId>>& chordal,
                          std::map<VarId, int>& position,
                          std::vector<VarId>& order) {
  std::map<VarId, std::set<VarId>> work = g.adjacency;
  chordal = g.adjacency;
  std::set<VarId> remaining(g.vars.begin(), g.vars.end());

  while (!remaining.empty()) {
    VarId best = *remaining.begin();
    size_t best_deg = std::numeric_limits<size_t>::max();
    for (VarId v : remaining) {
      const size_t deg = work[v].size();
      if (deg < best_deg) {  // ties keep the lowest id (set iteration order)
        best_deg = deg;
        best = v;
      }
    }
    position[best] = static_cast<int>(order.size());
    order.push_back(best);
    remaining.erase(best);

    const std::vector<VarId> nbrs(work[best].begin(), work[best].end());
    for (size_t a = 0; a < nbrs.size(); ++a) {
      for (size_t b = a + 1; b < nbrs.size(); ++b) {
        if (work[nbrs[a]].insert(nbrs[b]).second) {
          work[nbrs[b]].insert(nbrs[a]);
          chordal[nbrs[a]].insert(nbrs[b]);
          chordal[nbrs[b]].insert(nbrs[a]);
        }
      }
    }
    for (VarId u : nbrs) work[u].erase(best);
    work.erase(best);
  }
}

std::vector<Clique> maximal_cliques(const std::map<VarId, std::set<VarId>>& chordal,
                                    const std::map<VarId, int>& position,
                                    const std::vector<VarId>& order) {
  // In a chordal graph each vertex plus its later-eliminated neighbors is a
  // clique; the maximal ones are found by discarding contained candidates.
  std::vector<Clique> candidates;
  for (VarId v : order) {
    Clique c;
    c.vars.push_back(v);
    for (VarId u : chordal.at(v)) {
      if (position.at(u) > position.at(v)) c.vars.push_back(u);
    }
    std::sort(c.vars.begin(), c.vars.end());
    candidates.push_back(std::move(c));
  }
  std::vector<Clique> maximal;
  for (size_t i = 0; i < candidates.size(); ++i) {
    bool contained = false;
    for (size_t j = 0; j < candidates.size() && !contained; ++j) {
      if (i == j) continue;
      if (candidates[j].vars.size() < candidates[i].vars.size()) continue;
      if (candidates[j].vars.size() == candidates[i].vars.size() && j > i) continue;
      contained = std::includes(candidates[j].vars.begin(), candidates[j].vars.end(),
                                candidates[i].vars.begin(), candidates[i].vars.end());
    }
    if (!contained) maximal.push_back(candidates[i]);
  }
  std::sort(maximal.begin(), maximal.end(),
            [](const Clique& a, const Clique& b) { return a.vars < b.vars; });
  return maximal;
}

int intersection_size(const std::vector<VarId>& a, const std::vector<VarId>& b) {
  int count = 0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (*ia < *ib) ++ia;
    else if (*ib < *ia) ++ib;
    else {
      ++count;
      ++ia;
      ++ib;
    }
  }
  return count;
}

// Max-intersection spanning forest over the cliques (Prim, deterministic
// tie-breaks), parents stored per clique; roots get parent -1.
std::vector<int> clique_forest(const std::vector<Clique>& cliques) {
  const int q = static_cast<int>(cliques.size());
  std::vector<int> parent(q, -1);
  std::vector<bool> in_tree(q, false);
  int placed = 0;
  while (placed < q) {
    int root = -1;
    for (int i = 0; i < q; ++i) {
      if (!in_tree[i]) {
        root = i;
        break;
      }
    }
    in_tree[root] = true;
    ++placed;
    for (;;) {
      int best_w = 0, best_to = -1, best_from = -1;
      for (int a = 0; a < q; ++a) {
        if (!in_tree[a]) continue;
        for (int b = 0; b < q; ++b) {
          if (in_tree[b]) continue;
          const int w = intersection_size(cliques[a].vars, cliques[b].vars);
          if (w > best_w || (w == best_w && w > 0 && (best_to == -1 || b < best_to))) {
            best_w = w;
            best_from = a;
            best_to = b;
          }
        }
      }
      if (best_to == -1) break;  // component exhausted
      parent[best_to] = best_from;
      in_tree[best_to] = true;
      ++placed;
    }
  }
  return parent;
}

std::vector<int> preorder(const std::vector<int>& parent) {
  const int q = static_cast<int>(parent.size());
  std::vector<std::vector<int>> children(q);
  std::vector<int> roots;
  for (int i = 0; i < q; ++i) {
    if (parent[i] < 0) roots.push_back(i);
    else children[parent[i]].push_back(i);
  }
  std::vector<int> out;
  std::vector<int> stack;
  for (auto it = roots.rbegin(); it != roots.rend(); ++it) stack.push_back(*it);
  while (!stack.empty()) {
    const int node = stack.back();
    stack.pop_back();
    out.push_back(node);
    for (auto it = children[node].rbegin(); it != children[node].rend(); ++it) {
      stack.push_back(*it);
    }
  }
  return out;
}

}  // namespace

Decomposition chordal_blocks(const InteractionGraph& graph,
                             const std::vector<Polynomial>& cost_terms,
                             const std::vector<ConstraintPoly>& constraints,
                             const ChordalOptions& options) {
  Decomposition out;
  if (graph.vars.empty()) {
    throw std::invalid_argument("interaction graph has no variables");
  }

  std::map<VarId, std::set<VarId>> chordal;
  std::map<VarId, int> position;
  std::vector<VarId> order;
  eliminate_min_degree(graph, chordal, position, order);

  std::vector<Clique> cliques = maximal_cliques(chordal, position, order);
  std::vector<int> parent = clique_forest(cliques);

  if (options.coalesce) {
    // Contract tree edges whose overlap nearly equals the smaller endpoint.
    bool merged = true;
    while (merged) {
      merged = false;
      for (int i = 0; i < static_cast<int>(cliques.size()) && !merged; ++i) {
        const int p = parent[i];
        if (p < 0) continue;
        const int inter = intersection_size(cliques[i].vars, cliques[p].vars);
        const int smaller = static_cast<int>(
            std::min(cliques[i].vars.size(), cliques[p].vars.size()));
        if (inter < options.coalesce_ratio * smaller) continue;
        std::vector<VarId> merged_vars;
        std::set_union(cliques[p].vars.begin(), cliques[p].vars.end(),
                       cliques[i].vars.begin(), cliques[i].vars.end(),
                       std::back_inserter(merged_vars));
        cliques[p].vars = std::move(merged_vars);
        cliques.erase(cliques.begin() + i);
        std::vector<int> np(cliques.size());
        for (int k = 0, old = 0; old < static_cast<int>(parent.size()); ++old) {
          if (old == i) continue;
          int pa = parent[old];
          if (pa == i) pa = p;
          if (pa > i) --pa;
          np[k++] = pa;
        }
        parent = std::move(np);
        merged = true;
      }
    }
  }

  const std::vector<int> emit = preorder(parent);
  out.blocks.reserve(cliques.size());
  for (int id : emit) {
    Block b;
    b.vars = cliques[id].vars;
    if (static_cast<int>(b.vars.size()) > options.max_block_warn) {
      out.warnings.push_back("block with " + std::to_string(b.vars.size()) +
                             " variables exceeds the size cap of " +
                             std::to_string(options.max_block_warn));
    }
    out.blocks.push_back(std::move(b));
  }

  for (int t = 0; t < static_cast<int>(cost_terms.size()); ++t) {
    const std::vector<VarId> sup = cost_terms[t].support();
    bool placed = sup.empty();
    if (placed) out.blocks.front().terms.push_back(t);
    for (Block& b : out.blocks) {
      if (placed) break;
      if (b.contains(sup)) {
        b.terms.push_back(t);
        placed = true;
      }
    }
    if (!placed) {
      throw std::logic_error("cost term support not contained in any block");
    }
  }
  for (int j = 0; j < static_cast<int>(constraints.size()); ++j) {
    const std::vector<VarId> sup = constraints[j].g.support();
    bool placed = false;
    for (Block& b : out.blocks) {
      if (b.contains(sup)) {
        b.constraints.push_back(j);
        placed = true;
      }
    }
    if (!placed) {
      throw std::logic_error("constraint support not contained in any block");
    }
  }
  return out;
}

namespace {

bool rip_ordering_holds(const Decomposition& d) {
  std::set<VarId> seen;
  for (size_t l = 0; l < d.blocks.size(); ++l) {
    if (l > 0) {
      std::vector<VarId> inter;
      for (VarId v : d.blocks[l].vars) {
        if (seen.count(v)) inter.push_back(v);
      }
      bool ok = inter.empty();
      for (size_t s = 0; s < l && !ok; ++s) {
        ok = d.blocks[s].contains(inter);
      }
      if (!ok) return false;
    }
    seen.insert(d.blocks[l].vars.begin(), d.blocks[l].vars.end());
  }
  return true;
}

bool covers(const Decomposition& d, const std::set<VarId>& universe) {
  std::set<VarId> got;
  for (const Block& b : d.blocks) got.insert(b.vars.begin(), b.vars.end());
  return got == universe;
}

}  // namespace

bool validate_rip(const Decomposition& d,
                  const std::vector<Polynomial>& cost_terms,
                  const std::vector<ConstraintPoly>& constraints) {
  std::set<VarId> universe;
  for (const Polynomial& p : cost_terms) {
    for (VarId v : p.support()) universe.insert(v);
  }
  for (const ConstraintPoly& c : constraints) {
    for (VarId v : c.g.support()) universe.insert(v);
  }
  if (!covers(d, universe)) return false;

  // Every term assigned exactly once, support inside its block.
  std::vector<int> term_count(cost_terms.size(), 0);
  for (const Block& b : d.blocks) {
    for (int t : b.terms) {
      if (t < 0 || t >= static_cast<int>(cost_terms.size())) return false;
      ++term_count[t];
      if (!b.contains(cost_terms[t].support())) return false;
    }
  }
  for (int c : term_count) {
    if (c != 1) return false;
  }

  // Constraint coverage and per-block support containment.
  std::vector<bool> constraint_seen(constraints.size(), false);
  for (const Block& b : d.blocks) {
    for (int j : b.constraints) {
      if (j < 0 || j >= static_cast<int>(constraints.size())) return false;
      constraint_seen[j] = true;
      if (!b.contains(constraints[j].g.support())) return false;
    }
  }
  for (bool seen : constraint_seen) {
    if (!seen) return false;
  }

  return rip_ordering_holds(d);
}

bool validate_rip(const Decomposition& d, const std::vector<VarId>& universe) {
  return covers(d, {universe.begin(), universe.end()}) && rip_ordering_holds(d);
}

}  // namespace sbsos
