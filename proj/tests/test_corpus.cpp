#include "hmil_ted/corpus.hpp"
#include "hmil_ted/engine.hpp"
#include "hmil_ted/error.hpp"
#include "hmil_ted/validate.hpp"

#include <gtest/gtest.h>

#include <random>
#include <sstream>

using namespace hmil_ted;

namespace {

std::vector<CorpusRecord> corpus_of(const std::string& text) {
    std::istringstream in(text);
    return read_corpus(in);
}

std::vector<CorpusRecord> random_corpus(std::uint64_t seed, std::size_t count, std::size_t max_nodes) {
    std::mt19937_64 rng(seed);
    GeneratorOptions opt;
    opt.max_nodes = max_nodes;
    opt.max_children = 5;
    std::vector<CorpusRecord> records;
    for (std::size_t i = 0; i < count; ++i) records.push_back({std::to_string(i), random_document(rng, opt)});
    return records;
}

} // namespace

TEST(ReadCorpus, IdsFromLineIndexOrIdField) {
    auto records = corpus_of("{\"a\":1}\n[1,2]\n{\"_id\":\"doc-x\",\"b\":2}\n{\"_id\":7}\n");
    ASSERT_EQ(records.size(), 4u);
    EXPECT_EQ(records[0].id, "0");
    EXPECT_EQ(records[1].id, "1");
    EXPECT_EQ(records[2].id, "doc-x");
    EXPECT_EQ(records[2].doc, parse_json(R"({"b":2})"));
    EXPECT_EQ(records[3].id, "7");
    EXPECT_EQ(records[3].doc, parse_json("{}"));
}

TEST(ReadCorpus, BlankLinesAreSkippedButCounted) {
    auto records = corpus_of("1\n\n  \r\n2\r\n");
    ASSERT_EQ(records.size(), 2u);
    EXPECT_EQ(records[0].id, "0");
    EXPECT_EQ(records[1].id, "3");
}

TEST(ReadCorpus, NestedIdIsKept) {
    auto records = corpus_of(R"({"inner":{"_id":1}})");
    EXPECT_EQ(records[0].id, "0");
    EXPECT_NE(records[0].doc.find("inner")->find("_id"), nullptr);
}

TEST(ReadCorpus, BadLineNamesTheLine) {
    try {
        corpus_of("1\n2\n{oops\n");
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(std::string(e.what()).rfind("line 3:", 0), 0u) << e.what();
    }
    try {
        corpus_of("{\"_id\":\"a\"}\n{\"_id\":\"a\"}\n");
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos) << e.what();
        EXPECT_NE(std::string(e.what()).find("duplicate id"), std::string::npos) << e.what();
    }
    EXPECT_THROW(corpus_of("{\"_id\":[1]}\n"), ParseError);
    EXPECT_THROW(corpus_of("0\n{\"_id\":\"0\"}\n"), ParseError);
}

TEST(ReadCorpus, DepthLimit) {
    std::istringstream in("[[[[1]]]]\n");
    EXPECT_THROW(read_corpus(in, ParseOptions{2}), ResourceError);
}

TEST(DistanceMatrix, SingleDocument) {
    auto m = compute_distance_matrix(corpus_of("{\"a\":1}\n"), CostModel{});
    ASSERT_EQ(m.size(), 1u);
    EXPECT_EQ(m.at(0, 0), Cost{});
}

TEST(DistanceMatrix, IdenticalDocuments) {
    auto m = compute_distance_matrix(corpus_of("[1,{\"a\":2}]\n[{\"a\":2},1]\n[1,{\"a\":2.0}]\n"), CostModel{});
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = 0; j < 3; ++j) EXPECT_EQ(m.at(i, j), Cost{});
    }
}

TEST(DistanceMatrix, MatchesPairwiseDistances) {
    const auto records = random_corpus(51, 40, 20);
    for (const CostModel& model : {CostModel{}, weighted_model()}) {
        const auto m = compute_distance_matrix(records, model);
        for (std::size_t i = 0; i < records.size(); ++i) {
            EXPECT_EQ(m.at(i, i), Cost{});
            for (std::size_t j = 0; j < records.size(); ++j) {
                ASSERT_EQ(m.at(i, j), distance(to_rlt(records[i].doc), to_rlt(records[j].doc), model));
                ASSERT_EQ(m.at(i, j), m.at(j, i));
            }
        }
    }
}

TEST(DistanceMatrix, IndependentOfParallelism) {
    const auto records = random_corpus(52, 120, 30);
    MatrixOptions opt;
    opt.parallelism = 1;
    const auto serial = compute_distance_matrix(records, weighted_model(), opt);
    for (std::size_t p : {2u, 3u, 8u, 0u}) {
        opt.parallelism = p;
        const auto parallel = compute_distance_matrix(records, weighted_model(), opt);
        EXPECT_EQ(parallel.entries, serial.entries) << "parallelism " << p;
    }
    opt.parallelism = 4;
    opt.memo_limit = 16;
    EXPECT_EQ(compute_distance_matrix(records, weighted_model(), opt).entries, serial.entries);
}

TEST(DistanceMatrix, DepthLimit) {
    MatrixOptions opt;
    opt.max_depth = 2;
    EXPECT_THROW(compute_distance_matrix(corpus_of("[[[1]]]\n1\n"), CostModel{}, opt), ResourceError);
}

TEST(DistanceMatrix, EmptyCorpus) {
    auto m = compute_distance_matrix({}, CostModel{});
    EXPECT_EQ(m.size(), 0u);
    std::ostringstream out;
    write_csv(out, m);
    EXPECT_EQ(out.str(), "\r\n");
}

TEST(WriteCsv, Rfc4180) {
    DistanceMatrix m;
    m.ids = {"plain", "with,comma", "with \"quote\""};
    m.entries = {Cost{}, Cost::rational(1, 2), Cost{3}, Cost::rational(1, 2), Cost{}, Cost::rational(1, 3), Cost{3},
                 Cost::rational(1, 3), Cost{}};
    std::ostringstream out;
    write_csv(out, m);
    EXPECT_EQ(out.str(),
              "plain,\"with,comma\",\"with \"\"quote\"\"\"\r\n"
              "0,0.5,3\r\n"
              "0.5,0,0.333333333\r\n"
              "3,0.333333333,0\r\n");
}
