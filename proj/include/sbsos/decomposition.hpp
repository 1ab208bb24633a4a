#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "sbsos/poly_build.hpp"
#include "sbsos/polynomial.hpp"

namespace sbsos {

/// Undirected co-occurrence graph on variables: an edge joins every pair of
/// variables appearing together in the support of a cost term or constraint.
struct InteractionGraph {
  std::vector<VarId> vars;                    // ascending
  std::map<VarId, std::set<VarId>> adjacency;

  int num_edges() const;
};

InteractionGraph interaction_graph(const std::vector<Polynomial>& cost_terms,
                                   const std::vector<ConstraintPoly>& constraints);

/// One variable block of the sparse relaxation: its variables I, the indices
/// J of constraints fully supported on I, and the cost terms assigned to it.
struct Block {
  std::vector<VarId> vars;         // I_l, ascending
  std::vector<int> constraints;    // J_l, ascending
  std::vector<int> terms;          // cost-term ids owned by this block

  bool contains(const std::vector<VarId>& subset) const;
};

struct Decomposition {
  std::vector<Block> blocks;  // emitted in an order that satisfies the RIP
  std::vector<std::string> warnings;

  std::string to_json() const;  // block sizes and pairwise overlaps
};

struct ChordalOptions {
  bool coalesce = false;          // merge consecutive near-identical blocks
  double coalesce_ratio = 0.9;    // min |intersection| / |smaller block|
  int max_block_warn = 60;        // emit a warning above this block size
};

/// Minimum-degree elimination -> chordal completion -> maximal cliques ->
/// max-intersection clique tree -> root-first block order. Cost terms go to
/// the first block containing their support; constraints to every block
/// containing theirs. Deterministic: ties break toward lower variable ids.
Decomposition chordal_blocks(const InteractionGraph& graph,
                             const std::vector<Polynomial>& cost_terms,
                             const std::vector<ConstraintPoly>& constraints,
                             const ChordalOptions& options = {});

/// Literal check of the running-intersection conditions: term and constraint
/// supports inside their blocks, full coverage of variables and constraints,
/// and the ordering condition on block intersections.
bool validate_rip(const Decomposition& d,
                  const std::vector<Polynomial>& cost_terms,
                  const std::vector<ConstraintPoly>& constraints);

/// Ordering-and-coverage check only, for decompositions built by hand.
/// `universe` lists every variable that must be covered.
bool validate_rip(const Decomposition& d, const std::vector<VarId>& universe);

}  // namespace sbsos
