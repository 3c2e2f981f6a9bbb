#pragma once

#include "hmil_ted/json.hpp"

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <ranges>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace hmil_ted {

/// Node type (function nu). Object is the image of a JSON object, Bag of a
/// JSON array, Value of a scalar.
enum class NodeType : std::uint8_t { Object, Bag, Value };

/// Data type of a node label (function tau). Inner nodes carry Null.
enum class DataType : std::uint8_t { Null, Boolean, Number, String };

/// Typed scalar label; the active alternative determines the data type.
using Label = std::variant<std::monostate, bool, Decimal, std::string>;

inline DataType data_type_of(const Label& label) noexcept {
    return static_cast<DataType>(label.index());
}

std::string_view to_string(NodeType type) noexcept;
std::string_view to_string(DataType type) noexcept;
std::optional<DataType> parse_data_type(std::string_view name) noexcept;
std::optional<NodeType> parse_node_type(std::string_view name) noexcept;

/// JSON text of a label value ("null", "true", "2.5", "\"abc\"").
std::string label_to_json(const Label& label);

using NodeId = std::uint32_t;
inline constexpr NodeId kNoNode = std::numeric_limits<NodeId>::max();

struct RltNode {
    NodeType type = NodeType::Value;
    Label label;
    /// Label of the edge from the parent (kappa); set only under Object parents.
    std::optional<std::string> edge;
    /// Index of this node among its parent's children in the source document.
    std::uint32_t position = 0;
    NodeId parent = kNoNode;
    NodeId first_child = 0;
    std::uint32_t child_count = 0;

    DataType data_type() const noexcept { return data_type_of(label); }
    bool is_leaf() const noexcept { return child_count == 0; }
};

/// Rooted labeled tree stored as a breadth-first arena: node 0 is the root,
/// every node's children occupy a contiguous id range, and children always
/// have larger ids than their parent. A default-constructed tree is the
/// empty tree.
class RltTree {
public:
    RltTree() = default;

    static RltTree empty() { return RltTree{}; }

    bool is_empty() const noexcept { return nodes_.empty(); }
    std::size_t node_count() const noexcept { return nodes_.size(); }

    NodeId root() const;
    const RltNode& node(NodeId id) const { return nodes_.at(id); }
    const RltNode& operator[](NodeId id) const { return nodes_[id]; }
    std::span<const RltNode> nodes() const noexcept { return nodes_; }

    auto children(NodeId id) const {
        const RltNode& n = nodes_[id];
        return std::views::iota(n.first_child, n.first_child + n.child_count);
    }

    /// RFC 6901 JSON Pointer of the node in the source document; "" is the root.
    std::string path(NodeId id) const;

    /// Length of the longest root-to-leaf path in edges; 0 for a single node
    /// and for the empty tree.
    std::size_t depth() const;

private:
    friend class RltBuilder;
    std::vector<RltNode> nodes_;
};

/// Builds arbitrary trees, including ones that break the RLT invariants, so
/// that validation can be exercised on hand-made input.
class RltBuilder {
public:
    NodeId add_root(NodeType type, Label label = {});
    NodeId add_child(NodeId parent, NodeType type, Label label = {},
                     std::optional<std::string> edge = std::nullopt);

    NodeId add_value(NodeId parent, Label label, std::optional<std::string> edge = std::nullopt) {
        return add_child(parent, NodeType::Value, std::move(label), std::move(edge));
    }

    /// Lays the nodes out breadth-first. Handles returned by the add_* calls
    /// are not node ids of the resulting tree.
    RltTree build() &&;

private:
    struct Pending {
        NodeType type;
        Label label;
        std::optional<std::string> edge;
        std::vector<NodeId> children;
    };
    std::vector<Pending> pending_;
};

/// Composed JSON -> HMIL -> RLT mapping. Objects become Object nodes with
/// key-labeled edges, arrays become Bag nodes with unlabeled edges, scalars
/// become Value leaves.
RltTree to_rlt(const JsonValue& doc);

/// Inverse of to_rlt: bag children come out in stored order.
JsonValue from_rlt(const RltTree& tree);

struct Violation {
    std::string path;
    std::string message;
};

/// One entry per broken node invariant; empty iff the tree is a valid RLT.
std::vector<Violation> validate_tree(const RltTree& tree);

/// Equality of the two trees with bag children compared as multisets.
bool equivalent(const RltTree& a, const RltTree& b);

/// Byte-stable tagged JSON rendering for debugging:
/// {"t":"obj"|"bag"|"val","k":edge,"dt":type,"v":value,"c":[...]}.
/// Object children are ordered by edge label, bag children by a structural
/// subtree hash.
std::string render_canonical(const RltTree& tree);

} // namespace hmil_ted
