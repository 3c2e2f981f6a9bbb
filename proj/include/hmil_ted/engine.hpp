#pragma once

#include "hmil_ted/assignment.hpp"
#include "hmil_ted/canonical.hpp"
#include "hmil_ted/cost_model.hpp"
#include "hmil_ted/rlt.hpp"

#include <cstdint>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace hmil_ted {

struct EngineOptions {
    /// Trees deeper than this are refused with ResourceError.
    std::size_t max_depth = kDefaultMaxDepth;
};

/// Tree edit distance between interned subtree classes.
///
/// Results are memoized per ordered class pair, so repeated subtrees (common
/// in bags) are solved once. Evaluation uses an explicit work stack; nesting
/// depth never reaches the call stack. Bags are matched through the padded
/// assignment matrix after cancelling children that are identical on both
/// sides, which never changes the optimum because the distance is a metric.
///
/// One instance per thread; the interner must not grow concurrently.
class ClassDistance {
public:
    ClassDistance(const SubtreeInterner& interner, const CostModel& model,
                  simd::KernelKind kernel = simd::active_kernel());

    Cost between(ClassId a, ClassId b);
    /// Cost of deleting / inserting the whole subtree.
    const Cost& removal(ClassId id);
    const Cost& insertion(ClassId id);

    void clear_memo() { memo_.clear(); }
    std::size_t memo_size() const noexcept { return memo_.size(); }

private:
    static std::uint64_t key(ClassId a, ClassId b) noexcept {
        return (static_cast<std::uint64_t>(a) << 32) | b;
    }
    void extend_costs();
    /// Value for (a, b), or false after pushing the sub-pairs it still needs.
    bool try_evaluate(ClassId a, ClassId b, Cost& out);
    const Cost* lookup(ClassId a, ClassId b);

    const SubtreeInterner& interner_;
    const CostModel& model_;
    std::vector<Cost> removal_;
    std::vector<Cost> insertion_;
    std::unordered_map<std::uint64_t, Cost> memo_;
    std::vector<std::pair<ClassId, ClassId>> work_;
    std::vector<ClassId> left_, right_;
    std::vector<Cost> delta_;
    AssignmentSolver solver_;
};

/// d(a, b). Either tree may be the empty tree. Throws ContractError when a
/// tree fails validate_tree and ResourceError when it is deeper than
/// options.max_depth.
Cost distance(const RltTree& a, const RltTree& b, const CostModel& model,
              const EngineOptions& options = {});

/// d(a, empty): every node deleted leaf-upward. ContractError on the empty tree.
Cost delete_tree_cost(const RltTree& a, const CostModel& model);
/// d(empty, b): every node inserted parent-first. ContractError on the empty tree.
Cost insert_tree_cost(const RltTree& b, const CostModel& model);

/// Distance between two Value leaves: the relabel cost when the data types
/// agree, delete + insert otherwise. A relabel dearer than delete + insert
/// is replaced by the latter, which is what the minimum-cost mapping picks.
Cost value_distance(const RltNode& a, const RltNode& b, const CostModel& model);

/// Distance between trees whose roots are both Objects / both Bags.
/// ContractError on any other root combination.
Cost object_distance(const RltTree& a, const RltTree& b, const CostModel& model);
Cost bag_distance(const RltTree& a, const RltTree& b, const CostModel& model);

/// Correspondence between the nodes of two trees: paired nodes plus the
/// unpaired nodes of each side.
struct EditMapping {
    std::vector<std::pair<NodeId, NodeId>> pairs;
    std::vector<NodeId> deleted;  ///< unpaired nodes of the left tree
    std::vector<NodeId> inserted; ///< unpaired nodes of the right tree
    /// Sum of relabel costs over pairs, delete costs over `deleted` and
    /// insert costs over `inserted`.
    Cost cost;
};

enum class EditKind : std::uint8_t { Relabel, Delete, Insert };

struct EditOperation {
    EditKind kind;
    NodeId source = kNoNode; ///< node of the left tree (relabel, delete)
    NodeId target = kNoNode; ///< node of the right tree (relabel, insert)
    Cost cost;
};

/// Edit sequence on leaves only: relabels, then deletions leaf-upward, then
/// insertions parent-first, so every intermediate tree is a valid RLT.
/// An insert places node `target` of the right tree under the image of its
/// parent, on the same edge label.
struct EditScript {
    std::vector<EditOperation> operations;
    Cost cost;
};

struct Explanation {
    EditMapping mapping;
    EditScript script;
    Cost distance;
};

/// Witness for distance(a, b): a mapping of minimum cost and an edit script
/// realizing it. Bag children are matched by the lexicographically smallest
/// optimal assignment, so the output is deterministic.
Explanation explain(const RltTree& a, const RltTree& b, const CostModel& model,
                    const EngineOptions& options = {});

/// Sum of gamma over a mapping, recomputed from the cost model.
Cost mapping_cost(const EditMapping& mapping, const RltTree& a, const RltTree& b,
                  const CostModel& model);

} // namespace hmil_ted
