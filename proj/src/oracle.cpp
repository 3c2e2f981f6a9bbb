#include "hmil_ted/oracle.hpp"

#include "hmil_ted/error.hpp"

#include <algorithm>
#include <numeric>
#include <set>

namespace hmil_ted::oracle {

namespace {

bool compatible(const RltNode& v, const RltNode& w) {
    return v.type == w.type && v.data_type() == w.data_type();
}

class Enumerator {
public:
    Enumerator(const RltTree& a, const RltTree& b, const std::function<void(const NodePairs&)>& visit)
        : a_(a), b_(b), visit_(visit) {}

    void run() {
        visit_(pairs_);
        if (a_.is_empty() || b_.is_empty() || !compatible(a_[0], b_[0])) return;
        pairs_.emplace_back(0, 0);
        open_.emplace_back(0, 0);
        expand();
        open_.pop_back();
        pairs_.pop_back();
    }

private:
    // Picks the most recent open pair and enumerates every partial matching
    // of its children; each matched child pair becomes open in turn.
    void expand() {
        if (open_.empty()) {
            visit_(pairs_);
            return;
        }
        auto [x, y] = open_.back();
        open_.pop_back();
        std::vector<NodeId> left(a_.children(x).begin(), a_.children(x).end());
        std::vector<NodeId> right(b_.children(y).begin(), b_.children(y).end());
        std::vector<char> taken(right.size(), 0);
        const bool keyed = a_[x].type == NodeType::Object;
        std::size_t opened = 0;
        choose(left, right, taken, keyed, 0, opened);
        open_.emplace_back(x, y);
    }

    void choose(const std::vector<NodeId>& left, const std::vector<NodeId>& right, std::vector<char>& taken,
                bool keyed, std::size_t i, std::size_t& opened) {
        if (i == left.size()) {
            expand();
            return;
        }
        // Leave left[i] unpaired.
        choose(left, right, taken, keyed, i + 1, opened);
        for (std::size_t j = 0; j < right.size(); ++j) {
            if (taken[j]) continue;
            const RltNode& v = a_[left[i]];
            const RltNode& w = b_[right[j]];
            if (!compatible(v, w)) continue;
            if (keyed && v.edge != w.edge) continue;
            taken[j] = 1;
            pairs_.emplace_back(left[i], right[j]);
            open_.emplace_back(left[i], right[j]);
            choose(left, right, taken, keyed, i + 1, opened);
            open_.pop_back();
            pairs_.pop_back();
            taken[j] = 0;
        }
    }

    const RltTree& a_;
    const RltTree& b_;
    const std::function<void(const NodePairs&)>& visit_;
    NodePairs pairs_;
    NodePairs open_;
};

} // namespace

void enumerate_mappings(const RltTree& a, const RltTree& b, const std::function<void(const NodePairs&)>& visit) {
    Enumerator(a, b, visit).run();
}

std::size_t count_mappings(const RltTree& a, const RltTree& b) {
    std::size_t count = 0;
    enumerate_mappings(a, b, [&](const NodePairs&) { ++count; });
    return count;
}

std::size_t count_mappings_unpruned(const RltTree& a, const RltTree& b) {
    const std::size_t n = a.node_count();
    const std::size_t m = b.node_count();
    std::size_t count = 0;
    NodePairs pairs;
    std::vector<char> taken(m, 0);
    // Every partial injection from the nodes of a into the nodes of b.
    std::function<void(std::size_t)> step = [&](std::size_t i) {
        if (i == n) {
            if (check_pairs(pairs, a, b).empty()) ++count;
            return;
        }
        step(i + 1);
        for (std::size_t j = 0; j < m; ++j) {
            if (taken[j]) continue;
            taken[j] = 1;
            pairs.emplace_back(static_cast<NodeId>(i), static_cast<NodeId>(j));
            step(i + 1);
            pairs.pop_back();
            taken[j] = 0;
        }
    };
    step(0);
    return count;
}

Cost mapping_cost(const NodePairs& pairs, const RltTree& a, const RltTree& b, const CostModel& model) {
    std::vector<char> paired_a(a.node_count(), 0);
    std::vector<char> paired_b(b.node_count(), 0);
    Cost total;
    for (auto [x, y] : pairs) {
        paired_a[x] = 1;
        paired_b[y] = 1;
        total += model.relabel(a[x], b[y]);
    }
    for (NodeId x = 0; x < a.node_count(); ++x) {
        if (!paired_a[x]) total += model.remove(a[x]);
    }
    for (NodeId y = 0; y < b.node_count(); ++y) {
        if (!paired_b[y]) total += model.insert(b[y]);
    }
    return total;
}

Cost brute_force_distance(const RltTree& a, const RltTree& b, const CostModel& model, const OracleOptions& options) {
    if (a.node_count() + b.node_count() > options.max_nodes) {
        throw ResourceError("oracle refuses " + std::to_string(a.node_count() + b.node_count()) +
                            " nodes (bound " + std::to_string(options.max_nodes) + ")");
    }
    bool first = true;
    Cost best;
    enumerate_mappings(a, b, [&](const NodePairs& pairs) {
        Cost c = mapping_cost(pairs, a, b, model);
        if (first || c < best) best = c;
        first = false;
    });
    return best;
}

Cost brute_force_assignment(const DeltaMatrix& delta) {
    if (delta.dim > 8) throw ResourceError("brute_force_assignment is limited to 8x8");
    if (delta.dim == 0) throw ContractError("assignment over an empty matrix");
    std::vector<std::size_t> perm(delta.dim);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    bool first = true;
    Cost best;
    do {
        Cost c;
        for (std::size_t i = 0; i < delta.dim; ++i) c += delta.at(i, perm[i]);
        if (first || c < best) best = c;
        first = false;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

std::vector<std::string> check_pairs(const NodePairs& pairs, const RltTree& a, const RltTree& b) {
    std::vector<std::string> errors;
    auto where = [&](NodeId x, NodeId y) {
        return "(" + (a.path(x).empty() ? std::string("/") : a.path(x)) + ", " +
               (b.path(y).empty() ? std::string("/") : b.path(y)) + ")";
    };
    std::vector<NodeId> image(a.node_count(), kNoNode);
    std::vector<NodeId> preimage(b.node_count(), kNoNode);
    for (auto [x, y] : pairs) {
        if (x >= a.node_count() || y >= b.node_count()) {
            errors.push_back("pair refers to a node outside the trees");
            return errors;
        }
        if (!compatible(a[x], b[y])) errors.push_back("constraint 1: type mismatch in " + where(x, y));
        if (image[x] != kNoNode || preimage[y] != kNoNode) {
            errors.push_back("constraint 2: node reused in " + where(x, y));
        }
        image[x] = y;
        preimage[y] = x;
    }
    for (auto [x, y] : pairs) {
        const NodeId px = a[x].parent;
        const NodeId py = b[y].parent;
        if ((px == kNoNode) != (py == kNoNode)) {
            errors.push_back("constraint 3: root paired with non-root in " + where(x, y));
        } else if (px != kNoNode && image[px] != py) {
            errors.push_back("constraint 3: parents of " + where(x, y) + " are not paired");
        }
        if (px != kNoNode && py != kNoNode && a[px].type == NodeType::Object && a[x].edge != b[y].edge) {
            errors.push_back("constraint 5: edge labels differ in " + where(x, y));
        }
    }
    // Constraint 4: below an unpaired node nothing is paired.
    auto check_subtrees = [&](const RltTree& t, const std::vector<NodeId>& partner, const char* side) {
        std::vector<char> blocked(t.node_count(), 0);
        for (NodeId id = 0; id < t.node_count(); ++id) {
            const NodeId p = t[id].parent;
            if (p != kNoNode && (blocked[p] || partner[p] == kNoNode)) blocked[id] = 1;
            if (blocked[id] && partner[id] != kNoNode) {
                errors.push_back(std::string("constraint 4: ") + side + " node " + t.path(id) +
                                 " is paired below an unpaired ancestor");
            }
        }
    };
    check_subtrees(a, image, "left");
    check_subtrees(b, preimage, "right");
    return errors;
}

std::vector<std::string> check_mapping(const EditMapping& mapping, const RltTree& a, const RltTree& b,
                                       const CostModel& model) {
    auto errors = check_pairs(mapping.pairs, a, b);
    std::set<NodeId> paired_a;
    std::set<NodeId> paired_b;
    for (auto [x, y] : mapping.pairs) {
        paired_a.insert(x);
        paired_b.insert(y);
    }
    std::set<NodeId> expect_deleted;
    std::set<NodeId> expect_inserted;
    for (NodeId x = 0; x < a.node_count(); ++x) {
        if (!paired_a.contains(x)) expect_deleted.insert(x);
    }
    for (NodeId y = 0; y < b.node_count(); ++y) {
        if (!paired_b.contains(y)) expect_inserted.insert(y);
    }
    std::set<NodeId> deleted(mapping.deleted.begin(), mapping.deleted.end());
    std::set<NodeId> inserted(mapping.inserted.begin(), mapping.inserted.end());
    if (deleted != expect_deleted || deleted.size() != mapping.deleted.size()) {
        errors.push_back("deleted set differs from the unpaired nodes of the left tree");
    }
    if (inserted != expect_inserted || inserted.size() != mapping.inserted.size()) {
        errors.push_back("inserted set differs from the unpaired nodes of the right tree");
    }
    Cost expected = mapping_cost(mapping.pairs, a, b, model);
    if (!approx_equal(expected, mapping.cost)) {
        errors.push_back("mapping cost " + mapping.cost.to_string() + " differs from recomputed " + expected.to_string());
    }
    return errors;
}

} // namespace hmil_ted::oracle
