#include "hmil_ted/error.hpp"
#include "hmil_ted/oracle.hpp"
#include "hmil_ted/validate.hpp"

#include <gtest/gtest.h>

#include <random>
#include <set>

using namespace hmil_ted;

namespace {

RltTree tree_of(const char* text) { return to_rlt(parse_json(text)); }

} // namespace

TEST(BruteForceDistance, Examples) {
    CostModel unit;
    EXPECT_EQ(oracle::brute_force_distance(tree_of(R"({"k1":false,"k2":{"k5":"A","k6":1,"k7":{}},"k3":[1,2,3,4],"k4":[]})"),
                                           tree_of(R"({"k1":false,"k2":{"k5":"B","k6":1,"k7":{}},"k8":{"k9":5}})"), unit),
              Cost{9});
    EXPECT_EQ(oracle::brute_force_distance(tree_of("3"), tree_of("3"), unit), Cost{});
    EXPECT_EQ(oracle::brute_force_distance(RltTree::empty(), RltTree::empty(), unit), Cost{});
    EXPECT_EQ(oracle::brute_force_distance(tree_of("[1,[2]]"), RltTree::empty(), unit), Cost{4});
    EXPECT_EQ(oracle::brute_force_distance(RltTree::empty(), tree_of("{}"), unit), Cost{1});
    EXPECT_EQ(oracle::brute_force_distance(tree_of("[]"), tree_of("{}"), unit), Cost{2});
}

TEST(BruteForceDistance, RefusesLargeInputs) {
    std::string big = "[";
    for (int i = 0; i < 15; ++i) big += (i ? ",1" : "1");
    big += "]";
    EXPECT_THROW(oracle::brute_force_distance(tree_of(big.c_str()), tree_of(big.c_str()), CostModel{}), ResourceError);
    EXPECT_THROW(oracle::brute_force_distance(tree_of(big.c_str()), tree_of("[1,1,1,1,1,1,1,1]"), CostModel{},
                                              oracle::OracleOptions{20}),
                 ResourceError);
}

TEST(BruteForceDistance, Symmetric) {
    std::mt19937_64 rng(41);
    GeneratorOptions opt;
    opt.max_nodes = 7;
    for (int i = 0; i < 200; ++i) {
        RltTree a = to_rlt(random_document(rng, opt));
        RltTree b = to_rlt(random_document(rng, opt));
        EXPECT_EQ(oracle::brute_force_distance(a, b, weighted_model()), oracle::brute_force_distance(b, a, weighted_model()));
    }
}

TEST(Enumeration, EveryMappingIsValidAndDistinct) {
    std::mt19937_64 rng(42);
    GeneratorOptions opt;
    opt.max_nodes = 6;
    opt.max_children = 4;
    for (int i = 0; i < 200; ++i) {
        RltTree a = to_rlt(random_document(rng, opt));
        RltTree b = to_rlt(random_document(rng, opt));
        std::set<std::set<std::pair<NodeId, NodeId>>> seen;
        oracle::enumerate_mappings(a, b, [&](const oracle::NodePairs& pairs) {
            EXPECT_TRUE(oracle::check_pairs(pairs, a, b).empty());
            EXPECT_TRUE(seen.insert({pairs.begin(), pairs.end()}).second) << "mapping visited twice";
        });
    }
}

TEST(Enumeration, PrunedCountMatchesUnprunedOnSmallTrees) {
    std::mt19937_64 rng(43);
    GeneratorOptions opt;
    opt.max_nodes = 5;
    opt.max_children = 4;
    opt.alphabet = 2;
    std::size_t nontrivial = 0;
    for (int i = 0; i < 3000; ++i) {
        RltTree a = to_rlt(random_document(rng, opt));
        RltTree b = to_rlt(random_document(rng, opt));
        const std::size_t pruned = oracle::count_mappings(a, b);
        ASSERT_EQ(pruned, oracle::count_mappings_unpruned(a, b))
            << render_canonical(a) << " vs " << render_canonical(b);
        nontrivial += pruned > 2;
    }
    EXPECT_GT(nontrivial, 20u);
    EXPECT_EQ(oracle::count_mappings(tree_of("[1,1]"), tree_of("[1,1]")), 1u + 7u);
}

TEST(CheckPairs, ReportsEachConstraint) {
    const RltTree a = tree_of(R"({"x":[1],"y":true})");
    const RltTree b = tree_of(R"({"x":[1],"z":true})");
    auto find = [](const RltTree& t, const char* path) {
        for (NodeId id = 0; id < t.node_count(); ++id) {
            if (t.path(id) == path) return id;
        }
        return kNoNode;
    };
    const NodeId ar = 0, ax = find(a, "/x"), ax0 = find(a, "/x/0"), ay = find(a, "/y");
    const NodeId br = 0, bx = find(b, "/x"), bx0 = find(b, "/x/0"), bz = find(b, "/z");

    auto mentions = [](const std::vector<std::string>& errors, const char* text) {
        for (const auto& e : errors) {
            if (e.find(text) != std::string::npos) return true;
        }
        return false;
    };
    EXPECT_TRUE(oracle::check_pairs({{ar, br}, {ax, bx}, {ax0, bx0}}, a, b).empty());
    EXPECT_TRUE(mentions(oracle::check_pairs({{ar, br}, {ax, bz}}, a, b), "constraint 1"));
    EXPECT_TRUE(mentions(oracle::check_pairs({{ar, br}, {ax, bx}, {ax, bx}}, a, b), "constraint 2"));
    EXPECT_TRUE(mentions(oracle::check_pairs({{ax0, bx0}}, a, b), "constraint 3"));
    EXPECT_TRUE(mentions(oracle::check_pairs({{ar, bx}}, a, b), "constraint 1"));
    EXPECT_TRUE(mentions(oracle::check_pairs({{ar, br}, {ax0, bx0}}, a, b), "constraint 3"));
    EXPECT_TRUE(mentions(oracle::check_pairs({{ar, br}, {ay, bz}}, a, b), "constraint 5"));
}

TEST(CheckMapping, DetectsWrongSetsAndCost) {
    const RltTree a = tree_of("[1]");
    const RltTree b = tree_of("[2]");
    EditMapping m;
    m.pairs = {{0, 0}, {1, 1}};
    m.cost = Cost{1};
    EXPECT_TRUE(oracle::check_mapping(m, a, b, CostModel{}).empty());
    m.cost = Cost{2};
    EXPECT_FALSE(oracle::check_mapping(m, a, b, CostModel{}).empty());
    m.pairs = {{0, 0}};
    m.cost = Cost{2};
    EXPECT_FALSE(oracle::check_mapping(m, a, b, CostModel{}).empty());
    m.deleted = {1};
    m.inserted = {1};
    EXPECT_TRUE(oracle::check_mapping(m, a, b, CostModel{}).empty());
}

TEST(MappingCost, SumsRelabelDeleteInsert) {
    const RltTree a = tree_of("[1,true]");
    const RltTree b = tree_of("[4]");
    CostModel m = weighted_model();
    // Bag pair free, 1 -> 4 priced raw at |1-4| = 3, true deleted at 1/2.
    EXPECT_EQ(oracle::mapping_cost({{0, 0}, {1, 1}}, a, b, m), Cost::rational(7, 2));
    // Nothing paired: delete 3/2 + 1 + 1/2, insert 3/2 + 1.
    EXPECT_EQ(oracle::mapping_cost({}, a, b, m), Cost::rational(11, 2));
}
