#pragma once

#include "hmil_ted/rlt.hpp"

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

namespace hmil_ted {

using ClassId = std::uint32_t;

/// A subtree up to bag reordering. Children of an Object are sorted by edge
/// label, children of a Bag by class id.
struct SubtreeClass {
    NodeType type = NodeType::Value;
    Label label;
    std::vector<ClassId> children;
    /// Edge labels parallel to `children`; empty for bags.
    std::vector<std::string> edges;
    std::uint32_t size = 1;
    std::uint32_t height = 0;
};

/// Hash-consing of subtrees into equivalence classes. Two subtrees receive
/// the same class id iff they are equal under multiset bag semantics.
/// Children are always interned before their parent, so class ids are a
/// topological order (child ids < parent id).
///
/// Interning mutates the table; lookups on a fully built interner are safe
/// from any number of threads.
class SubtreeInterner {
public:
    /// Class id of every node of `tree`, indexed by NodeId.
    std::vector<ClassId> intern(const RltTree& tree);

    ClassId intern_root(const RltTree& tree) { return intern(tree).front(); }

    const SubtreeClass& operator[](ClassId id) const { return classes_[id]; }
    std::size_t size() const noexcept { return classes_.size(); }

private:
    std::unordered_map<std::string, ClassId> index_;
    std::vector<SubtreeClass> classes_;
};

} // namespace hmil_ted
