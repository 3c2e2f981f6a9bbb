#pragma once

// Brute-force reference for the tree edit distance. Nothing here calls into
// the engine: the distance is the minimum mapping cost over an explicit
// enumeration of every valid edit distance mapping.

#include "hmil_ted/assignment.hpp"
#include "hmil_ted/cost_model.hpp"
#include "hmil_ted/engine.hpp"
#include "hmil_ted/rlt.hpp"

#include <cstddef>
#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace hmil_ted::oracle {

struct OracleOptions {
    /// Combined node count above which the oracle refuses to run.
    std::size_t max_nodes = 20;
};

using NodePairs = std::vector<std::pair<NodeId, NodeId>>;

/// Calls `visit` once for every valid mapping between a and b (including the
/// empty one). Mappings are grown top-down: the roots are paired or not, and
/// each paired node pair chooses a partial matching of its children that
/// respects node type, data type and, under Objects, edge labels.
void enumerate_mappings(const RltTree& a, const RltTree& b,
                        const std::function<void(const NodePairs&)>& visit);

/// Number of mappings enumerate_mappings produces.
std::size_t count_mappings(const RltTree& a, const RltTree& b);

/// Number of node-pair sets between a and b that satisfy all five mapping
/// constraints, found by testing every partial injection of nodes with
/// check_mapping. Exponential; intended for trees of at most five nodes.
std::size_t count_mappings_unpruned(const RltTree& a, const RltTree& b);

/// Cost of a node-pair set: relabel over pairs, delete over unpaired nodes
/// of a, insert over unpaired nodes of b.
Cost mapping_cost(const NodePairs& pairs, const RltTree& a, const RltTree& b, const CostModel& model);

/// Minimum mapping cost over all valid mappings. ResourceError when the two
/// trees together exceed options.max_nodes.
Cost brute_force_distance(const RltTree& a, const RltTree& b, const CostModel& model,
                          const OracleOptions& options = {});

/// Minimum over all dim! permutations. ResourceError when dim > 8.
Cost brute_force_assignment(const DeltaMatrix& delta);

/// Constraint violations of a pair set; empty iff it is a valid mapping.
std::vector<std::string> check_pairs(const NodePairs& pairs, const RltTree& a, const RltTree& b);

/// check_pairs plus: `deleted` and `inserted` are exactly the unpaired nodes,
/// and the stated cost equals the recomputed mapping cost.
std::vector<std::string> check_mapping(const EditMapping& mapping, const RltTree& a, const RltTree& b,
                                       const CostModel& model);

} // namespace hmil_ted::oracle
