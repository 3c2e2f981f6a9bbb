#include "hmil_ted/cost_model.hpp"

#include "hmil_ted/error.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>

namespace hmil_ted {

// ---------------------------------------------------------------------------
// Built-in relabel functions

RelabelFunction indicator() {
    return {"indicator", [](const Label& a, const Label& b) { return Cost(a == b ? 0 : 1); }};
}

RelabelFunction numeric_absolute() {
    return {"numeric_absolute", [](const Label& a, const Label& b) {
                const auto* x = std::get_if<Decimal>(&a);
                const auto* y = std::get_if<Decimal>(&b);
                if (!x || !y) throw ContractError("numeric_absolute applies to Number labels only");
                if (*x == *y) return Cost{};
                return abs(x->to_cost() - y->to_cost());
            }};
}

RelabelFunction capped_levenshtein(Cost cap) {
    if (cap.is_negative()) throw ContractError("levenshtein cap must be non-negative");
    // Largest integer distance that can still fall below the cap.
    auto bound = static_cast<std::size_t>(std::max(0.0, cap.to_double()) + 1.0);
    return {"capped_levenshtein(" + cap.to_string() + ")",
            [cap, bound](const Label& a, const Label& b) {
                const auto* x = std::get_if<std::string>(&a);
                const auto* y = std::get_if<std::string>(&b);
                if (!x || !y) throw ContractError("capped_levenshtein applies to String labels only");
                std::size_t d = levenshtein(*x, *y, bound);
                return min(Cost(static_cast<std::int64_t>(d)), cap);
            }};
}

namespace {

std::vector<char32_t> decode_utf8(std::string_view s) {
    std::vector<char32_t> out;
    out.reserve(s.size());
    for (std::size_t i = 0; i < s.size();) {
        auto c = static_cast<unsigned char>(s[i]);
        std::size_t len = c < 0x80 ? 1 : (c >> 5) == 0x6 ? 2 : (c >> 4) == 0xE ? 3 : (c >> 3) == 0x1E ? 4 : 0;
        if (len == 0 || i + len > s.size()) {
            // Not UTF-8: fall back to the raw byte.
            out.push_back(c);
            ++i;
            continue;
        }
        char32_t cp = len == 1 ? c : (c & (0x7F >> len));
        for (std::size_t k = 1; k < len; ++k) cp = (cp << 6) | (static_cast<unsigned char>(s[i + k]) & 0x3F);
        out.push_back(cp);
        i += len;
    }
    return out;
}

} // namespace

std::size_t levenshtein(std::string_view a, std::string_view b, std::size_t bound) {
    if (a == b) return 0;
    auto x = decode_utf8(a);
    auto y = decode_utf8(b);
    if (x.size() < y.size()) std::swap(x, y);
    const std::size_t n = x.size();
    const std::size_t m = y.size();
    if (n - m > bound) return bound + 1;
    std::vector<std::size_t> row(m + 1);
    std::iota(row.begin(), row.end(), std::size_t{0});
    for (std::size_t i = 1; i <= n; ++i) {
        std::size_t diag = row[0];
        row[0] = i;
        std::size_t row_min = row[0];
        for (std::size_t j = 1; j <= m; ++j) {
            std::size_t up = row[j];
            std::size_t sub = diag + (x[i - 1] == y[j - 1] ? 0 : 1);
            row[j] = std::min({up + 1, row[j - 1] + 1, sub});
            diag = up;
            row_min = std::min(row_min, row[j]);
        }
        if (row_min > bound) return bound + 1;
    }
    return row[m];
}

// ---------------------------------------------------------------------------
// CostModel

CostModel::CostModel() {
    relabel_.fill(indicator());
}

void CostModel::set_relabel(DataType type, RelabelFunction fn) {
    relabel_[static_cast<std::size_t>(type)] = std::move(fn);
}

void CostModel::set_node_cost(NodeType type, DataType data_type, NodeCost cost) {
    if (cost.remove.is_negative() || cost.insert.is_negative()) {
        throw ContractError("node costs must be non-negative");
    }
    node_cost_[slot(type, data_type)] = cost;
}

Cost CostModel::relabel(NodeType type_a, const Label& a, NodeType type_b, const Label& b) const {
    if (type_a != type_b || a.index() != b.index()) {
        throw ContractError("relabel between " + std::string(to_string(type_a)) + "/" +
                            std::string(to_string(data_type_of(a))) + " and " +
                            std::string(to_string(type_b)) + "/" +
                            std::string(to_string(data_type_of(b))) + " is undefined");
    }
    if (type_a != NodeType::Value) return Cost{};
    return relabel_[a.index()](a, b);
}

std::string CostModel::describe() const {
    std::ostringstream out;
    out << "relabel{";
    for (auto t : {DataType::Null, DataType::Boolean, DataType::Number, DataType::String}) {
        if (t != DataType::Null) out << ',';
        out << to_string(t) << ':' << relabel_function(t).name;
    }
    out << "} node_cost{";
    bool first = true;
    auto emit = [&](std::string_view name, const NodeCost& c) {
        if (!first) out << ',';
        first = false;
        out << name << ':' << c.remove.to_string();
        if (c.insert != c.remove) out << '/' << c.insert.to_string();
    };
    emit("Object", node_cost(NodeType::Object, DataType::Null));
    emit("Bag", node_cost(NodeType::Bag, DataType::Null));
    for (auto t : {DataType::Null, DataType::Boolean, DataType::Number, DataType::String}) {
        emit(to_string(t), node_cost(NodeType::Value, t));
    }
    out << '}';
    return out.str();
}

// ---------------------------------------------------------------------------
// Configuration

namespace {

using json = nlohmann::json;

Cost config_cost(const json& v, const std::string& where) {
    if (!v.is_number()) throw ConfigError(where + ": expected a number");
    // Through the shortest decimal text, so 0.1 becomes the rational 1/10.
    Cost c = Decimal::parse(v.dump()).to_cost();
    if (c.is_negative()) throw ConfigError(where + ": cost must be non-negative");
    return c;
}

struct PartialCost {
    std::optional<Cost> remove;
    std::optional<Cost> insert;
};

PartialCost read_node_cost(const json& v, const std::string& where) {
    if (v.is_number()) {
        Cost c = config_cost(v, where);
        return {c, c};
    }
    if (!v.is_object()) throw ConfigError(where + ": expected a number or {delete, insert}");
    PartialCost out;
    for (const auto& [key, item] : v.items()) {
        if (key == "delete") {
            out.remove = config_cost(item, where + ".delete");
        } else if (key == "insert") {
            out.insert = config_cost(item, where + ".insert");
        } else {
            throw ConfigError(where + ": unknown key \"" + key + "\"");
        }
    }
    return out;
}

NodeCost resolve(const PartialCost& specific, const NodeCost& fallback, const std::string& where) {
    NodeCost out = fallback;
    if (specific.remove && specific.insert) {
        out = {*specific.remove, *specific.insert};
    } else if (specific.remove) {
        out = {*specific.remove, *specific.remove};
    } else if (specific.insert) {
        out = {*specific.insert, *specific.insert};
    }
    if (out.remove != out.insert) {
        throw ConfigError(where + ": delete and insert costs must be equal (got " +
                          out.remove.to_string() + " and " + out.insert.to_string() + ")");
    }
    return out;
}

// Relabel entries are resolved after node costs so capped_levenshtein can
// default its cap to delete + insert of String nodes.
RelabelFunction make_relabel(const json& spec, DataType type, const CostModel& model,
                             const std::string& where) {
    std::string name;
    const json* params = nullptr;
    if (spec.is_string()) {
        name = spec.get<std::string>();
    } else if (spec.is_object()) {
        for (const auto& [key, item] : spec.items()) {
            if (key != "name" && key != "params") throw ConfigError(where + ": unknown key \"" + key + "\"");
        }
        auto it = spec.find("name");
        if (it == spec.end() || !it->is_string()) throw ConfigError(where + ": missing function name");
        name = it->get<std::string>();
        if (auto p = spec.find("params"); p != spec.end()) {
            if (!p->is_object()) throw ConfigError(where + ".params: expected an object");
            params = &*p;
        }
    } else {
        throw ConfigError(where + ": expected a function name or {name, params}");
    }

    auto reject_params = [&] {
        if (params && !params->empty()) throw ConfigError(where + ": " + name + " takes no parameters");
    };
    if (name == "indicator") {
        reject_params();
        return indicator();
    }
    if (name == "numeric_absolute") {
        if (type != DataType::Number) throw ConfigError(where + ": numeric_absolute applies to Number only");
        reject_params();
        return numeric_absolute();
    }
    if (name == "capped_levenshtein") {
        if (type != DataType::String) throw ConfigError(where + ": capped_levenshtein applies to String only");
        const NodeCost& nc = model.node_cost(NodeType::Value, DataType::String);
        Cost cap = nc.remove + nc.insert;
        if (params) {
            for (const auto& [key, item] : params->items()) {
                if (key != "cap") throw ConfigError(where + ".params: unknown key \"" + key + "\"");
                cap = config_cost(item, where + ".params.cap");
            }
        }
        return capped_levenshtein(cap);
    }
    throw ConfigError(where + ": unknown relabel function \"" + name + "\"");
}

} // namespace

CostModel parse_cost_config(std::string_view json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("cost config is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ConfigError("cost config must be a JSON object");
    for (const auto& [key, _] : doc.items()) {
        if (key != "relabel" && key != "node_cost") throw ConfigError("unknown cost config key \"" + key + "\"");
    }

    CostModel model;
    if (auto it = doc.find("node_cost"); it != doc.end()) {
        if (!it->is_object()) throw ConfigError("node_cost must be an object");
        PartialCost defaults;
        PartialCost value_defaults;
        std::vector<std::pair<std::string, PartialCost>> specific;
        for (const auto& [key, item] : it->items()) {
            const std::string where = "node_cost." + key;
            if (key == "delete") {
                defaults.remove = config_cost(item, where);
            } else if (key == "insert") {
                defaults.insert = config_cost(item, where);
            } else if (key == "Value") {
                value_defaults = read_node_cost(item, where);
            } else if (parse_node_type(key) || parse_data_type(key)) {
                specific.emplace_back(key, read_node_cost(item, where));
            } else {
                throw ConfigError(where + ": unknown node kind");
            }
        }
        NodeCost base = resolve(defaults, NodeCost{}, "node_cost");
        NodeCost value_base = resolve(value_defaults, base, "node_cost.Value");
        model.set_node_cost(NodeType::Object, DataType::Null, base);
        model.set_node_cost(NodeType::Bag, DataType::Null, base);
        for (auto t : {DataType::Null, DataType::Boolean, DataType::Number, DataType::String}) {
            model.set_node_cost(NodeType::Value, t, value_base);
        }
        for (const auto& [key, partial] : specific) {
            const std::string where = "node_cost." + key;
            if (auto nt = parse_node_type(key)) {
                model.set_node_cost(*nt, DataType::Null, resolve(partial, base, where));
            } else {
                auto dt = *parse_data_type(key);
                model.set_node_cost(NodeType::Value, dt, resolve(partial, value_base, where));
            }
        }
    }

    if (auto it = doc.find("relabel"); it != doc.end()) {
        if (!it->is_object()) throw ConfigError("relabel must be an object");
        for (const auto& [key, item] : it->items()) {
            auto dt = parse_data_type(key);
            if (!dt) throw ConfigError("relabel." + key + ": unknown data type");
            model.set_relabel(*dt, make_relabel(item, *dt, model, "relabel." + key));
        }
    }
    return model;
}

CostModel load_cost_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open cost config " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    try {
        return parse_cost_config(buffer.str());
    } catch (const ConfigError& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

// ---------------------------------------------------------------------------
// Axiom verification

std::vector<AxiomViolation> verify_metric_axioms(const CostModel& model,
                                                 std::span<const RltNode> samples,
                                                 std::size_t max_entries) {
    std::vector<AxiomViolation> report;
    auto add = [&](std::string axiom, std::string detail) {
        if (report.size() < max_entries) report.push_back({std::move(axiom), std::move(detail)});
    };
    auto show = [](const RltNode& n) {
        return std::string(to_string(n.type)) + "(" + label_to_json(n.label) + ")";
    };

    // Group samples by (node type, data type).
    std::array<std::vector<const RltNode*>, 12> groups;
    for (const auto& s : samples) {
        groups[static_cast<std::size_t>(s.type) * 4 + static_cast<std::size_t>(s.data_type())].push_back(&s);
        Cost del = model.remove(s);
        Cost ins = model.insert(s);
        if (del.is_negative() || ins.is_negative()) add("non-negativity", "negative delete/insert cost for " + show(s));
        if (!approx_equal(del, ins)) {
            add("delete-insert symmetry", show(s) + ": delete " + del.to_string() + " != insert " + ins.to_string());
        }
    }

    for (const auto& group : groups) {
        const std::size_t g = group.size();
        if (g == 0) continue;
        std::vector<Cost> d(g * g);
        for (std::size_t i = 0; i < g; ++i) {
            for (std::size_t j = 0; j < g; ++j) d[i * g + j] = model.relabel(*group[i], *group[j]);
        }
        for (std::size_t i = 0; i < g; ++i) {
            if (!approx_equal(d[i * g + i], Cost{})) {
                add("identity of indiscernibles", "gamma(" + show(*group[i]) + ", itself) = " + d[i * g + i].to_string());
            }
            for (std::size_t j = 0; j < g; ++j) {
                const Cost& c = d[i * g + j];
                if (c.is_negative() && !approx_equal(c, Cost{})) {
                    add("non-negativity", "gamma(" + show(*group[i]) + ", " + show(*group[j]) + ") = " + c.to_string());
                }
                if (i < j && !approx_equal(c, d[j * g + i])) {
                    add("symmetry", "gamma(" + show(*group[i]) + ", " + show(*group[j]) + ") = " + c.to_string() +
                                        " but reversed = " + d[j * g + i].to_string());
                }
                if (i != j && group[i]->label != group[j]->label && c.is_zero()) {
                    add("identity of indiscernibles",
                        "gamma(" + show(*group[i]) + ", " + show(*group[j]) + ") = 0 for distinct labels");
                }
            }
        }
        for (std::size_t i = 0; i < g; ++i) {
            for (std::size_t j = 0; j < g; ++j) {
                for (std::size_t k = 0; k < g; ++k) {
                    if (!approx_less_equal(d[i * g + j], d[i * g + k] + d[k * g + j])) {
                        add("triangle inequality", "gamma(" + show(*group[i]) + ", " + show(*group[j]) + ") = " +
                                                       d[i * g + j].to_string() + " > via " + show(*group[k]));
                    }
                }
            }
        }
    }
    return report;
}

} // namespace hmil_ted
