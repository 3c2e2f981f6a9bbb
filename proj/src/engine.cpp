#include "hmil_ted/engine.hpp"

#include "hmil_ted/error.hpp"

#include <algorithm>

namespace hmil_ted {

// ---------------------------------------------------------------------------
// ClassDistance

ClassDistance::ClassDistance(const SubtreeInterner& interner, const CostModel& model,
                             simd::KernelKind kernel)
    : interner_(interner), model_(model), solver_(kernel) {
    extend_costs();
}

void ClassDistance::extend_costs() {
    // Class ids are topological, so children are always priced first.
    for (std::size_t id = removal_.size(); id < interner_.size(); ++id) {
        const SubtreeClass& cls = interner_[static_cast<ClassId>(id)];
        Cost del = model_.remove(cls.type, cls.label);
        Cost ins = model_.insert(cls.type, cls.label);
        for (ClassId c : cls.children) {
            del += removal_[c];
            ins += insertion_[c];
        }
        removal_.push_back(del);
        insertion_.push_back(ins);
    }
}

const Cost& ClassDistance::removal(ClassId id) {
    if (id >= removal_.size()) extend_costs();
    return removal_[id];
}

const Cost& ClassDistance::insertion(ClassId id) {
    if (id >= insertion_.size()) extend_costs();
    return insertion_[id];
}

const Cost* ClassDistance::lookup(ClassId a, ClassId b) {
    static const Cost kZero{};
    if (a == b) return &kZero;
    auto it = memo_.find(key(a, b));
    if (it != memo_.end()) return &it->second;
    work_.emplace_back(a, b);
    return nullptr;
}

Cost ClassDistance::between(ClassId a, ClassId b) {
    if (a == b) return Cost{};
    if (std::max(a, b) >= removal_.size()) extend_costs();
    if (auto it = memo_.find(key(a, b)); it != memo_.end()) return it->second;

    work_.clear();
    work_.emplace_back(a, b);
    while (!work_.empty()) {
        auto [x, y] = work_.back();
        if (memo_.contains(key(x, y))) {
            work_.pop_back();
            continue;
        }
        const std::size_t pending = work_.size();
        Cost value;
        if (try_evaluate(x, y, value)) {
            memo_.emplace(key(x, y), value);
            // Nothing was pushed, so (x, y) is still on top.
            work_.pop_back();
        } else if (work_.size() == pending) {
            throw ContractError("distance evaluation made no progress");
        }
    }
    return memo_.at(key(a, b));
}

bool ClassDistance::try_evaluate(ClassId a, ClassId b, Cost& out) {
    const SubtreeClass& x = interner_[a];
    const SubtreeClass& y = interner_[b];

    if (x.type != y.type) {
        out = removal_[a] + insertion_[b];
        return true;
    }

    if (x.type == NodeType::Value) {
        Cost replace = model_.remove(x.type, x.label) + model_.insert(y.type, y.label);
        if (x.label.index() != y.label.index()) {
            out = replace;
        } else {
            out = min(model_.relabel(x.type, x.label, y.type, y.label), replace);
        }
        return true;
    }

    if (x.type == NodeType::Object) {
        // Children are sorted by edge label on both sides.
        bool complete = true;
        Cost sum;
        std::size_t i = 0;
        std::size_t j = 0;
        while (i < x.children.size() || j < y.children.size()) {
            int order = i == x.children.size()   ? 1
                        : j == y.children.size() ? -1
                                                 : x.edges[i].compare(y.edges[j]);
            if (order < 0) {
                sum += removal_[x.children[i++]];
            } else if (order > 0) {
                sum += insertion_[y.children[j++]];
            } else {
                const Cost* d = lookup(x.children[i++], y.children[j++]);
                if (d) {
                    sum += *d;
                } else {
                    complete = false;
                }
            }
        }
        if (complete) out = sum;
        return complete;
    }

    // Bag: cancel identical children (both lists are sorted), then match the
    // rest through the padded assignment matrix.
    left_.clear();
    right_.clear();
    {
        std::size_t i = 0;
        std::size_t j = 0;
        while (i < x.children.size() || j < y.children.size()) {
            if (j == y.children.size() || (i < x.children.size() && x.children[i] < y.children[j])) {
                left_.push_back(x.children[i++]);
            } else if (i == x.children.size() || y.children[j] < x.children[i]) {
                right_.push_back(y.children[j++]);
            } else {
                ++i;
                ++j;
            }
        }
    }
    const std::size_t m = left_.size();
    const std::size_t n = right_.size();
    if (m == 0 || n == 0) {
        Cost sum;
        for (ClassId c : left_) sum += removal_[c];
        for (ClassId c : right_) sum += insertion_[c];
        out = sum;
        return true;
    }

    const std::size_t dim = std::max(m, n);
    delta_.resize(dim * dim);
    bool complete = true;
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const Cost* d = lookup(left_[i], right_[j]);
            if (d) {
                delta_[i * dim + j] = *d;
            } else {
                complete = false;
            }
        }
    }
    if (!complete) return false;
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = n; j < dim; ++j) delta_[i * dim + j] = removal_[left_[i]];
    }
    for (std::size_t i = m; i < dim; ++i) {
        for (std::size_t j = 0; j < n; ++j) delta_[i * dim + j] = insertion_[right_[j]];
    }
    out = solver_.solve_cost(delta_, dim);
    return true;
}

// ---------------------------------------------------------------------------
// Tree-level entry points

namespace {

void require_valid(const RltTree& tree, const EngineOptions& options, const char* which) {
    auto report = validate_tree(tree);
    if (!report.empty()) {
        std::string msg = std::string(which) + " tree is not a valid RLT:";
        for (const auto& v : report) msg += " [" + (v.path.empty() ? std::string("/") : v.path) + ": " + v.message + "]";
        throw ContractError(msg);
    }
    if (tree.depth() > options.max_depth) {
        throw ResourceError(std::string(which) + " tree depth " + std::to_string(tree.depth()) +
                            " exceeds max depth " + std::to_string(options.max_depth));
    }
}

Cost subtree_sum(const RltTree& tree, bool removal, const CostModel& model) {
    std::vector<Cost> cost(tree.node_count());
    for (std::size_t i = tree.node_count(); i-- > 0;) {
        const RltNode& n = tree[static_cast<NodeId>(i)];
        Cost c = removal ? model.remove(n) : model.insert(n);
        for (NodeId child : tree.children(static_cast<NodeId>(i))) c += cost[child];
        cost[i] = c;
    }
    return cost.front();
}

} // namespace

Cost delete_tree_cost(const RltTree& a, const CostModel& model) {
    if (a.is_empty()) throw ContractError("delete_tree_cost of the empty tree");
    return subtree_sum(a, true, model);
}

Cost insert_tree_cost(const RltTree& b, const CostModel& model) {
    if (b.is_empty()) throw ContractError("insert_tree_cost of the empty tree");
    return subtree_sum(b, false, model);
}

Cost distance(const RltTree& a, const RltTree& b, const CostModel& model, const EngineOptions& options) {
    require_valid(a, options, "left");
    require_valid(b, options, "right");
    if (a.is_empty() && b.is_empty()) return Cost{};
    if (b.is_empty()) return delete_tree_cost(a, model);
    if (a.is_empty()) return insert_tree_cost(b, model);
    SubtreeInterner interner;
    ClassId ca = interner.intern_root(a);
    ClassId cb = interner.intern_root(b);
    ClassDistance engine(interner, model);
    return engine.between(ca, cb);
}

Cost value_distance(const RltNode& a, const RltNode& b, const CostModel& model) {
    if (a.type != NodeType::Value || b.type != NodeType::Value) {
        throw ContractError("value_distance needs two Value nodes");
    }
    Cost replace = model.remove(a) + model.insert(b);
    if (a.data_type() != b.data_type()) return replace;
    return min(model.relabel(a, b), replace);
}

Cost object_distance(const RltTree& a, const RltTree& b, const CostModel& model) {
    if (a.is_empty() || b.is_empty() || a[0].type != NodeType::Object || b[0].type != NodeType::Object) {
        throw ContractError("object_distance needs two Object roots");
    }
    return distance(a, b, model);
}

Cost bag_distance(const RltTree& a, const RltTree& b, const CostModel& model) {
    if (a.is_empty() || b.is_empty() || a[0].type != NodeType::Bag || b[0].type != NodeType::Bag) {
        throw ContractError("bag_distance needs two Bag roots");
    }
    return distance(a, b, model);
}

// ---------------------------------------------------------------------------
// Witness reconstruction

namespace {

// Subtree nodes in reverse preorder: every node after all of its descendants.
void append_leaf_upward(const RltTree& tree, NodeId root, std::vector<NodeId>& out) {
    std::vector<NodeId> preorder;
    std::vector<NodeId> stack{root};
    while (!stack.empty()) {
        NodeId n = stack.back();
        stack.pop_back();
        preorder.push_back(n);
        auto kids = tree.children(n);
        for (auto it = kids.end(); it != kids.begin();) stack.push_back(*--it);
    }
    out.insert(out.end(), preorder.rbegin(), preorder.rend());
}

void append_parent_first(const RltTree& tree, NodeId root, std::vector<NodeId>& out) {
    std::vector<NodeId> stack{root};
    while (!stack.empty()) {
        NodeId n = stack.back();
        stack.pop_back();
        out.push_back(n);
        auto kids = tree.children(n);
        for (auto it = kids.end(); it != kids.begin();) stack.push_back(*--it);
    }
}

} // namespace

Cost mapping_cost(const EditMapping& mapping, const RltTree& a, const RltTree& b, const CostModel& model) {
    Cost total;
    for (auto [x, y] : mapping.pairs) total += gamma(a[x], b[y], model);
    for (NodeId x : mapping.deleted) total += gamma(a[x], lambda, model);
    for (NodeId y : mapping.inserted) total += gamma(lambda, b[y], model);
    return total;
}

Explanation explain(const RltTree& a, const RltTree& b, const CostModel& model, const EngineOptions& options) {
    require_valid(a, options, "left");
    require_valid(b, options, "right");

    std::vector<std::pair<NodeId, NodeId>> pairs;
    std::vector<NodeId> deleted_roots;
    std::vector<NodeId> inserted_roots;

    Explanation result;
    if (!a.is_empty() && !b.is_empty()) {
        SubtreeInterner interner;
        const auto ids_a = interner.intern(a);
        const auto ids_b = interner.intern(b);
        ClassDistance engine(interner, model);
        AssignmentSolver solver;
        result.distance = engine.between(ids_a[0], ids_b[0]);

        std::vector<std::pair<NodeId, NodeId>> stack{{a.root(), b.root()}};
        std::vector<Cost> cells;
        while (!stack.empty()) {
            auto [x, y] = stack.back();
            stack.pop_back();
            const RltNode& nx = a[x];
            const RltNode& ny = b[y];
            if (nx.type != ny.type) {
                deleted_roots.push_back(x);
                inserted_roots.push_back(y);
                continue;
            }
            switch (nx.type) {
            case NodeType::Value: {
                const bool keep = nx.data_type() == ny.data_type() &&
                                  model.relabel(nx, ny) <= model.remove(nx) + model.insert(ny);
                if (keep) {
                    pairs.emplace_back(x, y);
                } else {
                    deleted_roots.push_back(x);
                    inserted_roots.push_back(y);
                }
                break;
            }
            case NodeType::Object: {
                pairs.emplace_back(x, y);
                std::unordered_map<std::string_view, NodeId> right;
                for (NodeId c : b.children(y)) right.emplace(*b[c].edge, c);
                for (NodeId c : a.children(x)) {
                    auto it = right.find(*a[c].edge);
                    if (it == right.end()) {
                        deleted_roots.push_back(c);
                    } else {
                        stack.emplace_back(c, it->second);
                        right.erase(it);
                    }
                }
                for (NodeId c : b.children(y)) {
                    if (right.contains(*b[c].edge)) inserted_roots.push_back(c);
                }
                break;
            }
            case NodeType::Bag: {
                pairs.emplace_back(x, y);
                const std::size_t m = nx.child_count;
                const std::size_t n = ny.child_count;
                if (m == 0 && n == 0) break;
                const std::size_t dim = std::max(m, n);
                cells.assign(dim * dim, Cost{});
                for (std::size_t i = 0; i < dim; ++i) {
                    for (std::size_t j = 0; j < dim; ++j) {
                        const NodeId ci = nx.first_child + static_cast<NodeId>(i);
                        const NodeId cj = ny.first_child + static_cast<NodeId>(j);
                        if (i < m && j < n) {
                            cells[i * dim + j] = engine.between(ids_a[ci], ids_b[cj]);
                        } else if (i < m) {
                            cells[i * dim + j] = engine.removal(ids_a[ci]);
                        } else {
                            cells[i * dim + j] = engine.insertion(ids_b[cj]);
                        }
                    }
                }
                auto assignment = solver.solve(cells, dim);
                for (std::size_t i = 0; i < dim; ++i) {
                    const std::size_t j = assignment.permutation[i];
                    const NodeId ci = nx.first_child + static_cast<NodeId>(i);
                    const NodeId cj = ny.first_child + static_cast<NodeId>(j);
                    if (i < m && j < n) {
                        stack.emplace_back(ci, cj);
                    } else if (i < m) {
                        deleted_roots.push_back(ci);
                    } else {
                        inserted_roots.push_back(cj);
                    }
                }
                break;
            }
            }
        }
    } else if (!a.is_empty()) {
        deleted_roots.push_back(a.root());
        result.distance = delete_tree_cost(a, model);
    } else if (!b.is_empty()) {
        inserted_roots.push_back(b.root());
        result.distance = insert_tree_cost(b, model);
    }

    std::sort(pairs.begin(), pairs.end());
    std::sort(deleted_roots.begin(), deleted_roots.end());
    std::sort(inserted_roots.begin(), inserted_roots.end());

    EditMapping& mapping = result.mapping;
    mapping.pairs = std::move(pairs);
    for (NodeId r : deleted_roots) append_leaf_upward(a, r, mapping.deleted);
    for (NodeId r : inserted_roots) append_parent_first(b, r, mapping.inserted);
    mapping.cost = mapping_cost(mapping, a, b, model);

    EditScript& script = result.script;
    for (auto [x, y] : mapping.pairs) {
        if (a[x].type == NodeType::Value && a[x].label != b[y].label) {
            script.operations.push_back({EditKind::Relabel, x, y, model.relabel(a[x], b[y])});
        }
    }
    for (NodeId x : mapping.deleted) script.operations.push_back({EditKind::Delete, x, kNoNode, model.remove(a[x])});
    for (NodeId y : mapping.inserted) script.operations.push_back({EditKind::Insert, kNoNode, y, model.insert(b[y])});
    for (const auto& op : script.operations) script.cost += op.cost;
    return result;
}

} // namespace hmil_ted
