#include "hmil_ted/validate.hpp"

#include "hmil_ted/engine.hpp"
#include "hmil_ted/oracle.hpp"
#include "hmil_ted/rlt.hpp"

#include <algorithm>
#include <array>
#include <sstream>

namespace hmil_ted {

namespace {

constexpr std::array<std::string_view, 6> kKeys{"x", "y", "z", "w", "v", "u"};
constexpr std::array<std::string_view, 6> kStrings{"a", "ab", "", "b", "ba", "abc"};

std::size_t pick(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

JsonValue random_scalar(std::mt19937_64& rng, std::size_t alphabet) {
    switch (pick(rng, 0, 3)) {
    case 0: return JsonValue::null();
    case 1: return JsonValue::boolean(pick(rng, 0, 1) == 1);
    case 2: {
        // Halves exercise non-integer exact costs.
        const auto k = static_cast<std::int64_t>(pick(rng, 0, alphabet - 1));
        return JsonValue::number(k % 2 ? Decimal::parse(std::to_string(k / 2) + ".5")
                                       : Decimal::from_integer(k / 2));
    }
    default: return JsonValue::string(std::string(kStrings[pick(rng, 0, std::min(alphabet, kStrings.size()) - 1)]));
    }
}

// Builds a value of at most `budget` nodes; `used` receives the actual count.
JsonValue random_value(std::mt19937_64& rng, const GeneratorOptions& opt, std::size_t budget, std::size_t& used) {
    if (budget <= 1 || pick(rng, 0, 9) < 4) {
        used = 1;
        return random_scalar(rng, opt.alphabet);
    }
    const bool object = pick(rng, 0, 1) == 0;
    std::size_t width = std::min(opt.max_children, budget - 1);
    if (object) width = std::min(width, std::min(opt.alphabet, kKeys.size()));
    const std::size_t count = pick(rng, 0, width);
    std::size_t left = budget - 1;
    used = 1;
    std::vector<std::string_view> keys(kKeys.begin(), kKeys.begin() + std::min(opt.alphabet, kKeys.size()));
    std::shuffle(keys.begin(), keys.end(), rng);
    JsonValue::Array items;
    JsonValue::Object members;
    for (std::size_t c = 0; c < count; ++c) {
        const std::size_t reserve = count - c - 1;
        std::size_t child_used = 0;
        JsonValue child = random_value(rng, opt, pick(rng, 1, left - reserve), child_used);
        left -= child_used;
        used += child_used;
        if (object) {
            members.emplace_back(std::string(keys[c]), std::move(child));
        } else {
            items.push_back(std::move(child));
        }
    }
    return object ? JsonValue::object(std::move(members)) : JsonValue::array(std::move(items));
}

bool same(const Cost& a, const Cost& b) {
    return a.is_exact() && b.is_exact() ? a == b : approx_equal(a, b);
}

std::optional<JsonValue> as_document(const RltTree& tree, const JsonValue& doc) {
    if (tree.is_empty()) return std::nullopt;
    return doc;
}

} // namespace

JsonValue random_document(std::mt19937_64& rng, const GeneratorOptions& options) {
    std::size_t used = 0;
    return random_value(rng, options, std::max<std::size_t>(options.max_nodes, 1), used);
}

JsonValue shuffle_arrays(const JsonValue& doc, std::mt19937_64& rng) {
    if (doc.is_array()) {
        JsonValue::Array items;
        for (const auto& item : doc.as_array()) items.push_back(shuffle_arrays(item, rng));
        std::shuffle(items.begin(), items.end(), rng);
        return JsonValue::array(std::move(items));
    }
    if (doc.is_object()) {
        JsonValue::Object members;
        for (const auto& [key, value] : doc.as_object()) members.emplace_back(key, shuffle_arrays(value, rng));
        return JsonValue::object(std::move(members));
    }
    return doc;
}

CostModel weighted_model() {
    CostModel model;
    model.set_relabel(DataType::Number, numeric_absolute());
    model.set_relabel(DataType::String, capped_levenshtein(Cost{2}));
    model.set_node_cost(NodeType::Object, DataType::Null, {Cost{2}, Cost{2}});
    model.set_node_cost(NodeType::Bag, DataType::Null, {Cost::rational(3, 2), Cost::rational(3, 2)});
    model.set_node_cost(NodeType::Value, DataType::Boolean, {Cost::rational(1, 2), Cost::rational(1, 2)});
    return model;
}

std::string Counterexample::to_json() const {
    std::ostringstream out;
    out << "{\"check\":" << quote_json_string(check) << ",\"seed\":" << seed << ",\"iteration\":" << iteration
        << ",\"model\":" << quote_json_string(model) << ",\"documents\":[";
    for (std::size_t i = 0; i < documents.size(); ++i) {
        if (i) out << ',';
        if (documents[i]) {
            out << "{\"empty\":false,\"doc\":" << to_json_text(*documents[i]) << '}';
        } else {
            out << "{\"empty\":true}";
        }
    }
    out << "],\"expected\":" << quote_json_string(expected) << ",\"actual\":" << quote_json_string(actual) << '}';
    return out.str();
}

ValidationReport run_validation(const ValidateOptions& options) {
    ValidationReport report;
    const std::array<std::pair<const char*, CostModel>, 2> models{{{"unit", CostModel::unit()},
                                                                   {"weighted", weighted_model()}}};
    std::vector<RltNode> samples;

    auto engine = [&](const RltTree& a, const RltTree& b, const CostModel& model) {
        Cost d = distance(a, b, model);
        if (options.inject_fault && !d.is_zero()) d += Cost{1};
        return d;
    };

    for (std::size_t i = 0; i < options.iterations && !report.failure; ++i) {
        std::seed_seq seq{static_cast<std::uint32_t>(options.seed), static_cast<std::uint32_t>(options.seed >> 32),
                          static_cast<std::uint32_t>(i)};
        std::mt19937_64 rng(seq);
        const JsonValue doc_a = random_document(rng, options.generator);
        JsonValue doc_b = random_document(rng, options.generator);
        if (pick(rng, 0, 9) == 0) doc_b = shuffle_arrays(doc_a, rng);
        const RltTree a = pick(rng, 0, 29) == 0 ? RltTree::empty() : to_rlt(doc_a);
        const RltTree b = pick(rng, 0, 29) == 0 ? RltTree::empty() : to_rlt(doc_b);
        const RltTree a_shuffled = a.is_empty() ? RltTree::empty() : to_rlt(shuffle_arrays(doc_a, rng));
        for (const RltTree* t : {&a, &b}) {
            for (const RltNode& n : t->nodes()) {
                if (n.type == NodeType::Value && samples.size() < 400) samples.push_back(n);
            }
        }
        ++report.cases;

        auto fail = [&](const char* check, const char* model, std::vector<std::optional<JsonValue>> docs,
                        const Cost& expected, const Cost& actual) {
            report.failure = Counterexample{check, options.seed, i, model, std::move(docs),
                                            expected.to_string(), actual.to_string()};
        };

        for (const auto& [name, model] : models) {
            const Cost d = engine(a, b, model);
            const Cost reference = oracle::brute_force_distance(a, b, model);
            ++report.comparisons;
            if (!same(d, reference)) {
                fail("oracle", name, {as_document(a, doc_a), as_document(b, doc_b)}, reference, d);
                break;
            }
            const Cost reverse = engine(b, a, model);
            if (!same(d, reverse)) {
                fail("symmetry", name, {as_document(a, doc_a), as_document(b, doc_b)}, d, reverse);
                break;
            }
            const Cost self = engine(a, a_shuffled, model);
            if (!self.is_zero()) {
                fail("bag-order", name, {as_document(a, doc_a), as_document(a_shuffled, from_rlt(a_shuffled))},
                     Cost{}, self);
                break;
            }
            const Explanation ex = explain(a, b, model);
            const auto problems = oracle::check_mapping(ex.mapping, a, b, model);
            if (!problems.empty() || !same(ex.mapping.cost, d)) {
                Counterexample c{"explain", options.seed, i, name, {as_document(a, doc_a), as_document(b, doc_b)},
                                 d.to_string(), ex.mapping.cost.to_string()};
                if (!problems.empty()) c.actual += " (" + problems.front() + ")";
                report.failure = std::move(c);
                break;
            }
        }
    }

    for (const auto& [name, model] : models) {
        for (const auto& v : verify_metric_axioms(model, samples, 10)) {
            report.axiom_failures.push_back(std::string(name) + ": " + v.axiom + ": " + v.detail);
        }
    }
    return report;
}

} // namespace hmil_ted
