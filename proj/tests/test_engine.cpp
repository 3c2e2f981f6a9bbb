#include "hmil_ted/engine.hpp"
#include "hmil_ted/error.hpp"
#include "hmil_ted/oracle.hpp"
#include "hmil_ted/validate.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <random>
#include <set>

using namespace hmil_ted;

namespace {

RltTree tree_of(const std::string& text) { return to_rlt(parse_json(text)); }

const char* const kT1 = R"({"k1":false,"k2":{"k5":"A","k6":1,"k7":{}},"k3":[1,2,3,4],"k4":[]})";
const char* const kT2 = R"({"k1":false,"k2":{"k5":"B","k6":1,"k7":{}},"k8":{"k9":5}})";

CostModel numeric_model() { return parse_cost_config(R"({"relabel":{"Number":"numeric_absolute"}})"); }

// Mutable copy of the left tree that replays an edit script and checks that
// every intermediate state is still a valid tree.
class ScriptReplay {
public:
    explicit ScriptReplay(const RltTree& a) {
        for (NodeId id = 0; id < a.node_count(); ++id) {
            nodes_.push_back({a[id].type, a[id].label, a[id].edge, a[id].parent, {}, true});
            if (a[id].parent != kNoNode) nodes_[a[id].parent].children.push_back(id);
        }
    }

    ::testing::AssertionResult apply(const EditScript& script, const Explanation& ex, const RltTree& a,
                                     const RltTree& b) {
        std::map<NodeId, std::size_t> image; // right node -> replay node
        for (auto [x, y] : ex.mapping.pairs) image[y] = x;
        for (const EditOperation& op : script.operations) {
            switch (op.kind) {
            case EditKind::Relabel: {
                Node& n = nodes_[op.source];
                if (!n.alive || n.type != NodeType::Value) return ::testing::AssertionFailure() << "bad relabel";
                if (n.label.index() != b[op.target].label.index()) {
                    return ::testing::AssertionFailure() << "relabel changes data type";
                }
                n.label = b[op.target].label;
                break;
            }
            case EditKind::Delete: {
                Node& n = nodes_[op.source];
                if (!n.alive) return ::testing::AssertionFailure() << "double delete of " << a.path(op.source);
                for (std::size_t c : n.children) {
                    if (nodes_[c].alive) return ::testing::AssertionFailure() << "delete of inner node " << a.path(op.source);
                }
                n.alive = false;
                break;
            }
            case EditKind::Insert: {
                const RltNode& w = b[op.target];
                std::size_t parent = kNoNode;
                if (w.parent == kNoNode) {
                    if (std::any_of(nodes_.begin(), nodes_.end(), [](const Node& n) { return n.alive && n.parent == kNoNode; })) {
                        return ::testing::AssertionFailure() << "second root inserted";
                    }
                } else {
                    auto it = image.find(w.parent);
                    if (it == image.end()) return ::testing::AssertionFailure() << "insert before its parent";
                    parent = it->second;
                    if (nodes_[parent].type == NodeType::Value) return ::testing::AssertionFailure() << "child of a Value";
                    for (std::size_t c : nodes_[parent].children) {
                        if (nodes_[c].alive && w.edge && nodes_[c].edge == w.edge) {
                            return ::testing::AssertionFailure() << "duplicate edge after insert";
                        }
                    }
                }
                nodes_.push_back({w.type, w.label, w.edge, parent, {}, true});
                if (parent != kNoNode) nodes_[parent].children.push_back(nodes_.size() - 1);
                image[op.target] = nodes_.size() - 1;
                break;
            }
            }
        }
        if (!equivalent(result(), b)) return ::testing::AssertionFailure() << "script does not produce the right tree";
        return ::testing::AssertionSuccess();
    }

private:
    struct Node {
        NodeType type;
        Label label;
        std::optional<std::string> edge;
        std::size_t parent;
        std::vector<std::size_t> children;
        bool alive;
    };

    RltTree result() const {
        RltBuilder builder;
        std::vector<NodeId> handle(nodes_.size(), kNoNode);
        std::vector<std::size_t> order;
        for (std::size_t i = 0; i < nodes_.size(); ++i) {
            if (nodes_[i].alive && nodes_[i].parent == kNoNode) order.push_back(i);
        }
        for (std::size_t k = 0; k < order.size(); ++k) {
            const std::size_t i = order[k];
            const Node& n = nodes_[i];
            handle[i] = n.parent == kNoNode ? builder.add_root(n.type, n.label)
                                            : builder.add_child(handle[n.parent], n.type, n.label, n.edge);
            for (std::size_t c : n.children) {
                if (nodes_[c].alive) order.push_back(c);
            }
        }
        if (order.empty()) return RltTree::empty();
        return std::move(builder).build();
    }

    std::vector<Node> nodes_;
};

Cost script_total(const EditScript& script) {
    Cost total;
    for (const auto& op : script.operations) total += op.cost;
    return total;
}

} // namespace

TEST(Distance, EmptyTrees) {
    CostModel unit;
    RltTree t = tree_of(R"({"a":[1,2],"b":null})");
    EXPECT_EQ(distance(RltTree::empty(), RltTree::empty(), unit), Cost{});
    EXPECT_EQ(distance(t, RltTree::empty(), unit), Cost{5});
    EXPECT_EQ(distance(RltTree::empty(), t, unit), Cost{5});
}

TEST(Distance, WorkedExample) {
    EXPECT_EQ(distance(tree_of(kT1), tree_of(kT2), CostModel{}), Cost{9});
    EXPECT_EQ(distance(tree_of(kT2), tree_of(kT1), CostModel{}), Cost{9});
}

TEST(Distance, IdentityForAnyModel) {
    std::mt19937_64 rng(12);
    GeneratorOptions opt;
    opt.max_nodes = 25;
    for (int i = 0; i < 100; ++i) {
        RltTree t = to_rlt(random_document(rng, opt));
        EXPECT_EQ(distance(t, t, CostModel{}), Cost{});
        EXPECT_EQ(distance(t, t, weighted_model()), Cost{});
    }
}

TEST(Distance, InvalidTreeIsAContractError) {
    RltBuilder b;
    NodeId root = b.add_root(NodeType::Object);
    b.add_value(root, Label{}, "x");
    b.add_value(root, Label{}, "x");
    RltTree bad = std::move(b).build();
    try {
        distance(bad, tree_of("1"), CostModel{});
        FAIL() << "expected ContractError";
    } catch (const ContractError& e) {
        EXPECT_NE(std::string(e.what()).find("duplicate edge label"), std::string::npos) << e.what();
    }
    EXPECT_THROW(explain(tree_of("1"), bad, CostModel{}), ContractError);
}

TEST(Distance, DepthLimit) {
    std::string text(40, '[');
    text += std::string(40, ']');
    RltTree t = tree_of(text);
    EXPECT_THROW(distance(t, tree_of("[]"), CostModel{}, EngineOptions{10}), ResourceError);
    EXPECT_EQ(distance(t, tree_of("[]"), CostModel{}, EngineOptions{40}), Cost{39});
}

TEST(Distance, DeepNestingDoesNotUseTheCallStack) {
    const std::size_t depth = 50000;
    std::string a(depth, '[');
    a += std::string(depth, ']');
    std::string b(depth, '[');
    b += "1";
    b += std::string(depth, ']');
    const RltTree ta = to_rlt(parse_json(a, ParseOptions{depth + 1}));
    const RltTree tb = to_rlt(parse_json(b, ParseOptions{depth + 1}));
    EXPECT_EQ(distance(ta, tb, CostModel{}, EngineOptions{depth + 1}), Cost{1});
    const Explanation ex = explain(ta, tb, CostModel{}, EngineOptions{depth + 1});
    EXPECT_EQ(ex.distance, Cost{1});
    EXPECT_EQ(ex.mapping.inserted.size(), 1u);
}

TEST(DeleteTreeCost, Examples) {
    CostModel unit;
    EXPECT_EQ(delete_tree_cost(tree_of("7"), unit), Cost{1});
    EXPECT_EQ(delete_tree_cost(tree_of("[1,2,3,4]"), unit), Cost{5});
    EXPECT_EQ(delete_tree_cost(tree_of("[]"), unit), Cost{1});
    EXPECT_EQ(delete_tree_cost(tree_of(kT1), unit), Cost{12});
    EXPECT_THROW(delete_tree_cost(RltTree::empty(), unit), ContractError);
}

TEST(InsertTreeCost, Examples) {
    CostModel unit;
    EXPECT_EQ(insert_tree_cost(tree_of(R"({"k9":5})"), unit), Cost{2});
    EXPECT_THROW(insert_tree_cost(RltTree::empty(), unit), ContractError);
    std::mt19937_64 rng(13);
    GeneratorOptions opt;
    opt.max_nodes = 30;
    for (int i = 0; i < 50; ++i) {
        RltTree t = to_rlt(random_document(rng, opt));
        EXPECT_EQ(delete_tree_cost(t, unit), Cost{static_cast<std::int64_t>(t.node_count())});
        EXPECT_EQ(insert_tree_cost(t, weighted_model()), delete_tree_cost(t, weighted_model()));
        EXPECT_EQ(distance(t, RltTree::empty(), unit), Cost{static_cast<std::int64_t>(t.node_count())});
    }
}

TEST(ValueDistance, Examples) {
    CostModel unit;
    EXPECT_EQ(value_distance(tree_of(R"("A")")[0], tree_of(R"("B")")[0], unit), Cost{1});
    EXPECT_EQ(value_distance(tree_of("1")[0], tree_of("true")[0], unit), Cost{2});
    EXPECT_EQ(value_distance(tree_of("2")[0], tree_of("2")[0], unit), Cost{});
    EXPECT_THROW(value_distance(tree_of("[]")[0], tree_of("2")[0], unit), ContractError);
}

TEST(ValueDistance, RelabelNeverExceedsReplacement) {
    // |2 - 40| = 38 but deleting and inserting costs 2.
    EXPECT_EQ(value_distance(tree_of("2")[0], tree_of("40")[0], numeric_model()), Cost{2});
    EXPECT_EQ(value_distance(tree_of("2")[0], tree_of("2.5")[0], numeric_model()), Cost::rational(1, 2));
    EXPECT_EQ(oracle::brute_force_distance(tree_of("2"), tree_of("40"), numeric_model()), Cost{2});
}

TEST(ObjectDistance, Examples) {
    CostModel unit;
    EXPECT_EQ(object_distance(tree_of(R"({"a":1,"b":[2]})"), tree_of(R"({"b":[2],"a":1})"), unit), Cost{});
    EXPECT_EQ(object_distance(tree_of(R"({"x":1})"), tree_of(R"({"y":1})"), unit), Cost{2});
    EXPECT_EQ(object_distance(tree_of(kT1), tree_of(kT2), unit), Cost{9});
    EXPECT_EQ(object_distance(tree_of("{}"), tree_of("{}"), unit), Cost{});
    EXPECT_THROW(object_distance(tree_of("[]"), tree_of("{}"), unit), ContractError);
}

TEST(BagDistance, Examples) {
    CostModel unit;
    EXPECT_EQ(bag_distance(tree_of("[1,2]"), tree_of("[2,1]"), unit), Cost{});
    EXPECT_EQ(bag_distance(tree_of("[1]"), tree_of("[1,1,1]"), unit), Cost{2});
    EXPECT_EQ(bag_distance(tree_of("[]"), tree_of("[]"), unit), Cost{});
    EXPECT_THROW(bag_distance(tree_of("{}"), tree_of("[]"), unit), ContractError);

    const RltTree a = tree_of("[1,2]");
    const RltTree b = tree_of("[2,9]");
    const Cost expected = oracle::brute_force_distance(a, b, numeric_model());
    EXPECT_EQ(expected, Cost{2});
    EXPECT_EQ(bag_distance(a, b, numeric_model()), expected);
}

TEST(Distance, TypeMismatchAtTheRoot) {
    CostModel unit;
    EXPECT_EQ(distance(tree_of("[]"), tree_of("{}"), unit), Cost{2});
    EXPECT_EQ(distance(tree_of("[1,2]"), tree_of(R"({"a":1})"), unit), Cost{5});
    EXPECT_EQ(distance(tree_of("1"), tree_of(R"("1")"), unit), Cost{2});
}

TEST(Distance, MatchesOracleOnRandomPairs) {
    std::mt19937_64 rng(21);
    GeneratorOptions opt;
    opt.max_nodes = 7;
    opt.max_children = 4;
    for (int i = 0; i < 300; ++i) {
        RltTree a = to_rlt(random_document(rng, opt));
        RltTree b = to_rlt(random_document(rng, opt));
        for (const CostModel& model : {CostModel{}, weighted_model()}) {
            ASSERT_EQ(distance(a, b, model), oracle::brute_force_distance(a, b, model))
                << render_canonical(a) << " vs " << render_canonical(b);
        }
    }
}

TEST(Distance, MetricOnRandomTriples) {
    std::mt19937_64 rng(22);
    GeneratorOptions opt;
    opt.max_nodes = 12;
    opt.max_children = 4;
    for (int i = 0; i < 300; ++i) {
        RltTree a = to_rlt(random_document(rng, opt));
        RltTree b = to_rlt(random_document(rng, opt));
        RltTree c = to_rlt(random_document(rng, opt));
        for (const CostModel& model : {CostModel{}, weighted_model()}) {
            const Cost ab = distance(a, b, model);
            EXPECT_EQ(ab, distance(b, a, model));
            EXPECT_EQ(ab.is_zero(), equivalent(a, b));
            EXPECT_LE(distance(a, c, model), ab + distance(b, c, model));
        }
    }
}

TEST(Distance, BagPermutationInvariance) {
    std::mt19937_64 rng(23);
    GeneratorOptions opt;
    opt.max_nodes = 20;
    opt.max_children = 5;
    for (int i = 0; i < 200; ++i) {
        JsonValue doc = random_document(rng, opt);
        RltTree a = to_rlt(doc);
        RltTree shuffled = to_rlt(shuffle_arrays(doc, rng));
        RltTree other = to_rlt(random_document(rng, opt));
        EXPECT_EQ(distance(a, shuffled, CostModel{}), Cost{});
        EXPECT_EQ(distance(a, other, CostModel{}), distance(shuffled, other, CostModel{}));
    }
}

TEST(Distance, ScalarAndAvx2AgreeOnWideBags) {
    if (!simd::kernel_available(simd::KernelKind::Avx2)) GTEST_SKIP() << "no AVX2 on this CPU";
    std::mt19937_64 rng(24);
    GeneratorOptions opt;
    opt.max_nodes = 200;
    opt.max_children = 40;
    const simd::KernelKind before = simd::active_kernel();
    for (int i = 0; i < 20; ++i) {
        RltTree a = to_rlt(random_document(rng, opt));
        RltTree b = to_rlt(random_document(rng, opt));
        simd::set_active_kernel(simd::KernelKind::Scalar);
        const Cost scalar = distance(a, b, weighted_model());
        const Explanation ex_scalar = explain(a, b, weighted_model());
        simd::set_active_kernel(simd::KernelKind::Avx2);
        EXPECT_EQ(distance(a, b, weighted_model()), scalar);
        EXPECT_EQ(explain(a, b, weighted_model()).mapping.pairs, ex_scalar.mapping.pairs);
    }
    simd::set_active_kernel(before);
}

TEST(Explain, WorkedExampleDecomposition) {
    const RltTree a = tree_of(kT1);
    const RltTree b = tree_of(kT2);
    const Explanation ex = explain(a, b, CostModel{});
    EXPECT_EQ(ex.distance, Cost{9});
    EXPECT_EQ(ex.mapping.cost, Cost{9});
    EXPECT_EQ(ex.script.cost, Cost{9});

    std::size_t relabels = 0, deletes = 0, inserts = 0;
    std::set<std::string> deleted, inserted;
    for (const auto& op : ex.script.operations) {
        EXPECT_EQ(op.cost, Cost{1});
        switch (op.kind) {
        case EditKind::Relabel:
            ++relabels;
            EXPECT_EQ(a.path(op.source), "/k2/k5");
            EXPECT_EQ(b.path(op.target), "/k2/k5");
            break;
        case EditKind::Delete:
            ++deletes;
            deleted.insert(a.path(op.source));
            break;
        case EditKind::Insert:
            ++inserts;
            inserted.insert(b.path(op.target));
            break;
        }
    }
    EXPECT_EQ(relabels, 1u);
    EXPECT_EQ(deletes, 6u);
    EXPECT_EQ(inserts, 2u);
    EXPECT_EQ(deleted, (std::set<std::string>{"/k3", "/k3/0", "/k3/1", "/k3/2", "/k3/3", "/k4"}));
    EXPECT_EQ(inserted, (std::set<std::string>{"/k8", "/k8/k9"}));
    EXPECT_TRUE(oracle::check_mapping(ex.mapping, a, b, CostModel{}).empty());
    EXPECT_TRUE(ScriptReplay(a).apply(ex.script, ex, a, b));
}

TEST(Explain, IdenticalTrees) {
    const RltTree t = tree_of(kT1);
    const Explanation ex = explain(t, t, CostModel{});
    EXPECT_EQ(ex.distance, Cost{});
    EXPECT_TRUE(ex.script.operations.empty());
    EXPECT_EQ(ex.mapping.pairs.size(), t.node_count());
    EXPECT_TRUE(ex.mapping.deleted.empty());
    EXPECT_TRUE(ex.mapping.inserted.empty());
}

TEST(Explain, EmptyTrees) {
    const RltTree t = tree_of("[1,{}]");
    Explanation ex = explain(t, RltTree::empty(), CostModel{});
    EXPECT_EQ(ex.distance, Cost{3});
    EXPECT_EQ(ex.mapping.deleted.size(), 3u);
    EXPECT_TRUE(ScriptReplay(t).apply(ex.script, ex, t, RltTree::empty()));

    ex = explain(RltTree::empty(), t, CostModel{});
    EXPECT_EQ(ex.distance, Cost{3});
    EXPECT_EQ(ex.mapping.inserted.size(), 3u);
    EXPECT_TRUE(ScriptReplay(RltTree::empty()).apply(ex.script, ex, RltTree::empty(), t));

    ex = explain(RltTree::empty(), RltTree::empty(), CostModel{});
    EXPECT_EQ(ex.distance, Cost{});
    EXPECT_TRUE(ex.script.operations.empty());
}

TEST(Explain, DeletesLeafUpwardAndInsertsParentFirst) {
    const RltTree a = tree_of(R"({"x":[[1],[2]]})");
    const RltTree b = tree_of(R"({"y":{"z":[3]}})");
    const Explanation ex = explain(a, b, CostModel{});
    std::vector<NodeId> deleted_order, inserted_order;
    for (const auto& op : ex.script.operations) {
        if (op.kind == EditKind::Delete) deleted_order.push_back(op.source);
        if (op.kind == EditKind::Insert) inserted_order.push_back(op.target);
    }
    for (std::size_t i = 0; i < deleted_order.size(); ++i) {
        for (std::size_t j = i + 1; j < deleted_order.size(); ++j) {
            EXPECT_NE(a[deleted_order[j]].parent, deleted_order[i]) << "parent deleted before its child";
        }
    }
    for (std::size_t i = 0; i < inserted_order.size(); ++i) {
        for (std::size_t j = i + 1; j < inserted_order.size(); ++j) {
            EXPECT_NE(b[inserted_order[i]].parent, inserted_order[j]) << "child inserted before its parent";
        }
    }
    EXPECT_TRUE(ScriptReplay(a).apply(ex.script, ex, a, b));
}

TEST(Explain, SaturatedRelabelBecomesDeleteAndInsert) {
    const RltTree a = tree_of(R"({"n":2})");
    const RltTree b = tree_of(R"({"n":40})");
    const Explanation ex = explain(a, b, numeric_model());
    EXPECT_EQ(ex.distance, Cost{2});
    EXPECT_EQ(ex.mapping.cost, Cost{2});
    EXPECT_EQ(ex.mapping.pairs.size(), 1u);
    EXPECT_TRUE(oracle::check_mapping(ex.mapping, a, b, numeric_model()).empty());
}

TEST(Explain, TieBreakIsDeterministic) {
    const RltTree a = tree_of("[1,1,1,2]");
    const RltTree b = tree_of("[3,3,3]");
    const Explanation first = explain(a, b, CostModel{});
    for (int i = 0; i < 5; ++i) EXPECT_EQ(explain(a, b, CostModel{}).mapping.pairs, first.mapping.pairs);
}

TEST(Explain, RandomPairsAreConsistent) {
    std::mt19937_64 rng(25);
    GeneratorOptions opt;
    opt.max_nodes = 8;
    opt.max_children = 4;
    for (int i = 0; i < 400; ++i) {
        RltTree a = to_rlt(random_document(rng, opt));
        RltTree b = to_rlt(random_document(rng, opt));
        for (const CostModel& model : {CostModel{}, weighted_model()}) {
            const Explanation ex = explain(a, b, model);
            ASSERT_EQ(ex.distance, distance(a, b, model));
            ASSERT_EQ(ex.mapping.cost, ex.distance);
            ASSERT_EQ(mapping_cost(ex.mapping, a, b, model), ex.distance);
            ASSERT_EQ(ex.script.cost, ex.distance);
            ASSERT_EQ(script_total(ex.script), ex.distance);
            ASSERT_EQ(ex.distance, oracle::brute_force_distance(a, b, model));
            const auto problems = oracle::check_mapping(ex.mapping, a, b, model);
            ASSERT_TRUE(problems.empty()) << problems.front();
            ASSERT_TRUE(ScriptReplay(a).apply(ex.script, ex, a, b))
                << render_canonical(a) << " vs " << render_canonical(b);
        }
    }
}

TEST(ClassDistance, MemoIsReusedAcrossCalls) {
    SubtreeInterner interner;
    const ClassId a = interner.intern_root(tree_of(R"([[1,2],[3,4],[5]])"));
    const ClassId b = interner.intern_root(tree_of(R"([[1,2],[3],[6,7]])"));
    CostModel unit;
    ClassDistance engine(interner, unit);
    const Cost first = engine.between(a, b);
    const std::size_t memo = engine.memo_size();
    EXPECT_GT(memo, 0u);
    EXPECT_EQ(engine.between(a, b), first);
    EXPECT_EQ(engine.memo_size(), memo);
    engine.clear_memo();
    EXPECT_EQ(engine.between(b, a), first);
    EXPECT_EQ(engine.removal(a), Cost{9});
    EXPECT_EQ(engine.insertion(b), Cost{9});
}
