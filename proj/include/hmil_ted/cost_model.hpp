#pragma once

#include "hmil_ted/cost.hpp"
#include "hmil_ted/rlt.hpp"

#include <array>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hmil_ted {

/// Relabel cost between two labels of one data type.
struct RelabelFunction {
    std::string name;
    std::function<Cost(const Label&, const Label&)> fn;

    Cost operator()(const Label& a, const Label& b) const { return fn(a, b); }
};

/// 0 for equal labels, 1 otherwise. Valid for every data type.
RelabelFunction indicator();
/// |x - y| on Number labels.
RelabelFunction numeric_absolute();
/// min(levenshtein(x, y), cap) on String labels, counted in code points.
RelabelFunction capped_levenshtein(Cost cap);

/// Edit distance between two UTF-8 strings in code points. Stops early and
/// returns `bound + 1` once the distance is known to exceed `bound`.
std::size_t levenshtein(std::string_view a, std::string_view b,
                        std::size_t bound = static_cast<std::size_t>(-1));

struct NodeCost {
    Cost remove{1};
    Cost insert{1};
};

/// The cost function gamma: relabel costs per data type for Value nodes and
/// delete/insert costs per (node type, data type). Relabeling inner nodes
/// is free since their labels are null. The default-constructed model is
/// the unit model: indicator relabel and cost 1 for every deletion and
/// insertion.
class CostModel {
public:
    CostModel();

    static CostModel unit() { return CostModel{}; }

    void set_relabel(DataType type, RelabelFunction fn);
    /// `type` selects Object/Bag (data type ignored) or a Value data type.
    void set_node_cost(NodeType type, DataType data_type, NodeCost cost);

    const RelabelFunction& relabel_function(DataType type) const {
        return relabel_[static_cast<std::size_t>(type)];
    }
    const NodeCost& node_cost(NodeType type, DataType data_type) const {
        return node_cost_[slot(type, data_type)];
    }

    /// gamma(v, w) for same-typed nodes; ContractError if node type or data
    /// type differ (those pairs are priced as delete + insert by the engine).
    Cost relabel(NodeType type_a, const Label& a, NodeType type_b, const Label& b) const;
    Cost remove(NodeType type, const Label& label) const {
        return node_cost(type, data_type_of(label)).remove;
    }
    Cost insert(NodeType type, const Label& label) const {
        return node_cost(type, data_type_of(label)).insert;
    }

    Cost relabel(const RltNode& v, const RltNode& w) const {
        return relabel(v.type, v.label, w.type, w.label);
    }
    Cost remove(const RltNode& v) const { return remove(v.type, v.label); }
    Cost insert(const RltNode& w) const { return insert(w.type, w.label); }

    /// One-line summary, e.g. for counterexample reports.
    std::string describe() const;

private:
    static std::size_t slot(NodeType type, DataType data_type) noexcept {
        return type == NodeType::Value ? 2 + static_cast<std::size_t>(data_type)
                                       : static_cast<std::size_t>(type);
    }

    std::array<RelabelFunction, 4> relabel_;
    std::array<NodeCost, 6> node_cost_;
};

/// Placeholder for the non-existent node in delete/insert operations.
struct Lambda {};
inline constexpr Lambda lambda{};

inline Cost gamma(const RltNode& v, const RltNode& w, const CostModel& model) {
    return model.relabel(v, w);
}
inline Cost gamma(const RltNode& v, Lambda, const CostModel& model) { return model.remove(v); }
inline Cost gamma(Lambda, const RltNode& w, const CostModel& model) { return model.insert(w); }

/// Parses a cost configuration document. Missing entries keep the unit
/// defaults. Throws ConfigError on unknown keys or function names, negative
/// costs, or delete and insert costs that differ for one node kind.
CostModel parse_cost_config(std::string_view json_text);
CostModel load_cost_config(const std::filesystem::path& path);

struct AxiomViolation {
    std::string axiom;
    std::string detail;
};

/// Exhaustively checks identity, symmetry, the triangle inequality and
/// non-negativity of gamma over all same-typed pairs and triples of
/// `samples`, plus delete/insert symmetry per sample. At most `max_entries`
/// violations are listed; the result is empty iff every check passes.
std::vector<AxiomViolation> verify_metric_axioms(const CostModel& model,
                                                 std::span<const RltNode> samples,
                                                 std::size_t max_entries = 100);

} // namespace hmil_ted
