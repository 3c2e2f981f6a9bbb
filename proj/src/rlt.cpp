#include "hmil_ted/rlt.hpp"

#include "hmil_ted/canonical.hpp"
#include "hmil_ted/error.hpp"

#include <algorithm>
#include <cstring>
#include <deque>
#include <unordered_map>
#include <unordered_set>

namespace hmil_ted {

std::string_view to_string(NodeType type) noexcept {
    switch (type) {
    case NodeType::Object: return "Object";
    case NodeType::Bag: return "Bag";
    case NodeType::Value: return "Value";
    }
    return "?";
}

std::string_view to_string(DataType type) noexcept {
    switch (type) {
    case DataType::Null: return "Null";
    case DataType::Boolean: return "Boolean";
    case DataType::Number: return "Number";
    case DataType::String: return "String";
    }
    return "?";
}

std::optional<DataType> parse_data_type(std::string_view name) noexcept {
    for (auto t : {DataType::Null, DataType::Boolean, DataType::Number, DataType::String}) {
        if (to_string(t) == name) return t;
    }
    return std::nullopt;
}

std::optional<NodeType> parse_node_type(std::string_view name) noexcept {
    for (auto t : {NodeType::Object, NodeType::Bag, NodeType::Value}) {
        if (to_string(t) == name) return t;
    }
    return std::nullopt;
}

std::string label_to_json(const Label& label) {
    switch (data_type_of(label)) {
    case DataType::Null: return "null";
    case DataType::Boolean: return std::get<bool>(label) ? "true" : "false";
    case DataType::Number: return std::get<Decimal>(label).to_string();
    case DataType::String: return quote_json_string(std::get<std::string>(label));
    }
    return "null";
}

// ---------------------------------------------------------------------------
// RltTree

NodeId RltTree::root() const {
    if (nodes_.empty()) throw ContractError("the empty tree has no root");
    return 0;
}

namespace {

std::string escape_pointer_token(std::string_view token) {
    std::string out;
    out.reserve(token.size());
    for (char c : token) {
        if (c == '~') {
            out += "~0";
        } else if (c == '/') {
            out += "~1";
        } else {
            out += c;
        }
    }
    return out;
}

} // namespace

std::string RltTree::path(NodeId id) const {
    std::vector<std::string> tokens;
    for (NodeId cur = id; nodes_.at(cur).parent != kNoNode; cur = nodes_[cur].parent) {
        const RltNode& n = nodes_[cur];
        const RltNode& p = nodes_[n.parent];
        if (p.type == NodeType::Object && n.edge) {
            tokens.push_back(escape_pointer_token(*n.edge));
        } else {
            tokens.push_back(std::to_string(n.position));
        }
    }
    std::string out;
    for (auto it = tokens.rbegin(); it != tokens.rend(); ++it) {
        out += '/';
        out += *it;
    }
    return out;
}

std::size_t RltTree::depth() const {
    std::vector<std::size_t> level(nodes_.size(), 0);
    std::size_t deepest = 0;
    for (NodeId id = 1; id < nodes_.size(); ++id) {
        level[id] = level[nodes_[id].parent] + 1;
        deepest = std::max(deepest, level[id]);
    }
    return deepest;
}

// ---------------------------------------------------------------------------
// RltBuilder

NodeId RltBuilder::add_root(NodeType type, Label label) {
    if (!pending_.empty()) throw ContractError("tree already has a root");
    pending_.push_back(Pending{type, std::move(label), std::nullopt, {}});
    return 0;
}

NodeId RltBuilder::add_child(NodeId parent, NodeType type, Label label,
                             std::optional<std::string> edge) {
    if (parent >= pending_.size()) throw ContractError("unknown parent handle");
    auto id = static_cast<NodeId>(pending_.size());
    pending_.push_back(Pending{type, std::move(label), std::move(edge), {}});
    pending_[parent].children.push_back(id);
    return id;
}

RltTree RltBuilder::build() && {
    RltTree tree;
    if (pending_.empty()) return tree;
    tree.nodes_.reserve(pending_.size());
    std::vector<NodeId> order{0};
    tree.nodes_.push_back(RltNode{pending_[0].type, std::move(pending_[0].label), std::nullopt});
    for (std::size_t i = 0; i < order.size(); ++i) {
        Pending& src = pending_[order[i]];
        auto& dst = tree.nodes_[i];
        dst.first_child = static_cast<NodeId>(tree.nodes_.size());
        dst.child_count = static_cast<std::uint32_t>(src.children.size());
        std::uint32_t position = 0;
        for (NodeId child : src.children) {
            Pending& c = pending_[child];
            RltNode n{c.type, std::move(c.label), std::move(c.edge)};
            n.position = position++;
            n.parent = static_cast<NodeId>(i);
            order.push_back(child);
            tree.nodes_.push_back(std::move(n));
        }
    }
    pending_.clear();
    return tree;
}

// ---------------------------------------------------------------------------
// JSON <-> RLT

RltTree to_rlt(const JsonValue& doc) {
    struct Item {
        const JsonValue* value;
        NodeId parent;
        const std::string* edge;
        std::uint32_t position;
    };
    // Breadth-first walk; queue index doubles as the node id.
    std::vector<Item> queue{{&doc, kNoNode, nullptr, 0}};
    RltBuilder builder;
    std::vector<NodeId> handle;
    handle.reserve(64);
    for (std::size_t i = 0; i < queue.size(); ++i) {
        const Item item = queue[i];
        const JsonValue& v = *item.value;
        NodeType type = NodeType::Value;
        Label label;
        switch (v.kind()) {
        case JsonValue::Kind::Null: break;
        case JsonValue::Kind::Boolean: label = v.as_bool(); break;
        case JsonValue::Kind::Number: label = v.as_number(); break;
        case JsonValue::Kind::String: label = v.as_string(); break;
        case JsonValue::Kind::Array: type = NodeType::Bag; break;
        case JsonValue::Kind::Object: type = NodeType::Object; break;
        }
        NodeId h;
        if (item.parent == kNoNode) {
            h = builder.add_root(type, std::move(label));
        } else {
            std::optional<std::string> edge;
            if (item.edge) edge = *item.edge;
            h = builder.add_child(handle[item.parent], type, std::move(label), std::move(edge));
        }
        handle.push_back(h);
        auto self = static_cast<NodeId>(i);
        if (v.is_array()) {
            std::uint32_t pos = 0;
            for (const auto& child : v.as_array()) queue.push_back({&child, self, nullptr, pos++});
        } else if (v.is_object()) {
            std::uint32_t pos = 0;
            for (const auto& [key, child] : v.as_object()) queue.push_back({&child, self, &key, pos++});
        }
    }
    return std::move(builder).build();
}

JsonValue from_rlt(const RltTree& tree) {
    if (tree.is_empty()) throw ContractError("the empty tree has no JSON form");
    std::vector<JsonValue> built(tree.node_count());
    for (std::size_t i = tree.node_count(); i-- > 0;) {
        const RltNode& n = tree[static_cast<NodeId>(i)];
        switch (n.type) {
        case NodeType::Value:
            switch (n.data_type()) {
            case DataType::Null: built[i] = JsonValue::null(); break;
            case DataType::Boolean: built[i] = JsonValue::boolean(std::get<bool>(n.label)); break;
            case DataType::Number: built[i] = JsonValue::number(std::get<Decimal>(n.label)); break;
            case DataType::String: built[i] = JsonValue::string(std::get<std::string>(n.label)); break;
            }
            break;
        case NodeType::Bag: {
            JsonValue::Array items;
            for (NodeId c : tree.children(static_cast<NodeId>(i))) items.push_back(std::move(built[c]));
            built[i] = JsonValue::array(std::move(items));
            break;
        }
        case NodeType::Object: {
            JsonValue::Object members;
            for (NodeId c : tree.children(static_cast<NodeId>(i))) {
                members.emplace_back(tree[c].edge.value_or(""), std::move(built[c]));
            }
            built[i] = JsonValue::object(std::move(members));
            break;
        }
        }
    }
    return std::move(built.front());
}

// ---------------------------------------------------------------------------
// Validation

std::vector<Violation> validate_tree(const RltTree& tree) {
    std::vector<Violation> report;
    if (tree.is_empty()) return report;
    auto flag = [&](NodeId id, std::string message) {
        report.push_back(Violation{tree.path(id), std::move(message)});
    };

    std::size_t reachable = 0;
    std::vector<NodeId> stack{tree.root()};
    while (!stack.empty()) {
        NodeId id = stack.back();
        stack.pop_back();
        ++reachable;
        for (NodeId c : tree.children(id)) {
            if (tree[c].parent != id) flag(c, "child does not link back to its parent");
            stack.push_back(c);
        }
    }
    if (reachable != tree.node_count()) {
        report.push_back(Violation{"", "node count " + std::to_string(tree.node_count()) +
                                           " differs from reachable nodes " +
                                           std::to_string(reachable)});
    }

    for (NodeId id = 0; id < tree.node_count(); ++id) {
        const RltNode& n = tree[id];
        switch (n.type) {
        case NodeType::Value:
            if (!n.is_leaf()) flag(id, "Value node must be a leaf");
            break;
        case NodeType::Object: {
            if (n.data_type() != DataType::Null) flag(id, "inner node label must be null");
            std::unordered_set<std::string_view> seen;
            for (NodeId c : tree.children(id)) {
                const auto& edge = tree[c].edge;
                if (!edge) {
                    flag(c, "Object child edge must be labeled");
                } else if (!seen.insert(*edge).second) {
                    flag(c, "duplicate edge label \"" + *edge + "\"");
                }
            }
            break;
        }
        case NodeType::Bag:
            if (n.data_type() != DataType::Null) flag(id, "inner node label must be null");
            for (NodeId c : tree.children(id)) {
                if (tree[c].edge) flag(c, "Bag child edge must not be labeled");
            }
            break;
        }
    }
    return report;
}

// ---------------------------------------------------------------------------
// Canonical classes

namespace {

void append_u64(std::string& key, std::uint64_t v) {
    char buf[sizeof v];
    std::memcpy(buf, &v, sizeof v);
    key.append(buf, sizeof v);
}

void append_label(std::string& key, const Label& label) {
    key.push_back(static_cast<char>(label.index()));
    switch (data_type_of(label)) {
    case DataType::Null: break;
    case DataType::Boolean: key.push_back(std::get<bool>(label) ? 1 : 0); break;
    case DataType::Number: {
        const auto& d = std::get<Decimal>(label);
        key.push_back(d.is_negative() ? 1 : 0);
        append_u64(key, static_cast<std::uint64_t>(d.exponent()));
        append_u64(key, d.digits().size());
        key += d.digits();
        break;
    }
    case DataType::String: {
        const auto& s = std::get<std::string>(label);
        append_u64(key, s.size());
        key += s;
        break;
    }
    }
}

} // namespace

std::vector<ClassId> SubtreeInterner::intern(const RltTree& tree) {
    std::vector<ClassId> ids(tree.node_count());
    std::string key;
    std::vector<std::pair<std::string_view, ClassId>> keyed;
    for (std::size_t i = tree.node_count(); i-- > 0;) {
        const auto id = static_cast<NodeId>(i);
        const RltNode& n = tree[id];
        SubtreeClass cls;
        cls.type = n.type;
        if (n.type == NodeType::Object) {
            keyed.clear();
            for (NodeId c : tree.children(id)) {
                const auto& edge = tree[c].edge;
                keyed.emplace_back(edge ? std::string_view(*edge) : std::string_view(), ids[c]);
            }
            std::sort(keyed.begin(), keyed.end());
            for (auto& [edge, child] : keyed) {
                cls.edges.emplace_back(edge);
                cls.children.push_back(child);
            }
        } else {
            for (NodeId c : tree.children(id)) cls.children.push_back(ids[c]);
            std::sort(cls.children.begin(), cls.children.end());
        }

        key.clear();
        key.push_back(static_cast<char>(n.type));
        append_label(key, n.label);
        append_u64(key, cls.children.size());
        for (std::size_t k = 0; k < cls.children.size(); ++k) {
            if (n.type == NodeType::Object) {
                append_u64(key, cls.edges[k].size());
                key += cls.edges[k];
            }
            key.append(reinterpret_cast<const char*>(&cls.children[k]), sizeof(ClassId));
        }

        auto [it, inserted] = index_.try_emplace(key, static_cast<ClassId>(classes_.size()));
        if (inserted) {
            cls.label = n.label;
            for (ClassId c : cls.children) {
                cls.size += classes_[c].size;
                cls.height = std::max(cls.height, classes_[c].height + 1);
            }
            classes_.push_back(std::move(cls));
        }
        ids[id] = it->second;
    }
    return ids;
}

bool equivalent(const RltTree& a, const RltTree& b) {
    if (a.is_empty() || b.is_empty()) return a.is_empty() && b.is_empty();
    SubtreeInterner interner;
    return interner.intern_root(a) == interner.intern_root(b);
}

// ---------------------------------------------------------------------------
// Canonical rendering

namespace {

std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

} // namespace

std::string render_canonical(const RltTree& tree) {
    if (tree.is_empty()) return "null";
    // Body of each node's rendering without the surrounding braces and
    // without the edge label, so it can be hashed independently of its parent.
    std::vector<std::string> body(tree.node_count());
    std::vector<std::pair<std::uint64_t, NodeId>> order;
    for (std::size_t i = tree.node_count(); i-- > 0;) {
        const auto id = static_cast<NodeId>(i);
        const RltNode& n = tree[id];
        std::string out;
        if (n.type == NodeType::Value) {
            out += "\"t\":\"val\",\"dt\":";
            out += quote_json_string(to_string(n.data_type()));
            out += ",\"v\":";
            out += label_to_json(n.label);
            body[i] = std::move(out);
            continue;
        }
        out += n.type == NodeType::Object ? "\"t\":\"obj\"" : "\"t\":\"bag\"";
        if (n.data_type() != DataType::Null) {
            out += ",\"dt\":";
            out += quote_json_string(to_string(n.data_type()));
            out += ",\"v\":";
            out += label_to_json(n.label);
        }
        order.clear();
        for (NodeId c : tree.children(id)) order.emplace_back(fnv1a(body[c]), c);
        if (n.type == NodeType::Object) {
            std::sort(order.begin(), order.end(), [&](const auto& x, const auto& y) {
                return std::tie(tree[x.second].edge, body[x.second]) <
                       std::tie(tree[y.second].edge, body[y.second]);
            });
        } else {
            std::sort(order.begin(), order.end(), [&](const auto& x, const auto& y) {
                if (x.first != y.first) return x.first < y.first;
                return body[x.second] < body[y.second];
            });
        }
        out += ",\"c\":[";
        bool first = true;
        for (const auto& [hash, c] : order) {
            if (!first) out += ',';
            first = false;
            out += '{';
            if (tree[c].edge) {
                std::string child = std::move(body[c]);
                // Place the edge label right after the type tag.
                auto comma = child.find(',');
                std::string edge = "\"k\":" + quote_json_string(*tree[c].edge);
                if (comma == std::string::npos) {
                    out += child + "," + edge;
                } else {
                    out += child.substr(0, comma) + "," + edge + child.substr(comma);
                }
            } else {
                out += body[c];
            }
            out += '}';
            body[c].clear();
        }
        out += ']';
        body[i] = std::move(out);
    }
    return "{" + body[0] + "}";
}

} // namespace hmil_ted
