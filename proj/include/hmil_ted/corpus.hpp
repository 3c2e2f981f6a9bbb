#pragma once

#include "hmil_ted/cost_model.hpp"
#include "hmil_ted/json.hpp"

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace hmil_ted {

struct CorpusRecord {
    std::string id;
    JsonValue doc;
};

/// Reads NDJSON: one document per non-blank line. A top-level object may
/// carry its identifier in an "_id" member (string or number), which is
/// removed from the document; otherwise the id is the 0-based line index.
/// Malformed lines and duplicate ids raise ParseError naming the 1-based
/// line; over-deep documents raise ResourceError.
std::vector<CorpusRecord> read_corpus(std::istream& in, const ParseOptions& options = {});
std::vector<CorpusRecord> read_corpus_file(const std::filesystem::path& path,
                                           const ParseOptions& options = {});

struct MatrixOptions {
    /// Worker threads; 0 picks the hardware concurrency.
    std::size_t parallelism = 1;
    std::size_t max_depth = kDefaultMaxDepth;
    /// Per-worker memo entries kept before the memo is flushed.
    std::size_t memo_limit = std::size_t{1} << 22;
};

/// Row-major symmetric matrix with zero diagonal.
struct DistanceMatrix {
    std::vector<std::string> ids;
    std::vector<Cost> entries;

    std::size_t size() const noexcept { return ids.size(); }
    const Cost& at(std::size_t i, std::size_t j) const { return entries[i * ids.size() + j]; }
};

/// All pairwise distances. Only the upper triangle is computed; results do
/// not depend on the parallelism.
DistanceMatrix compute_distance_matrix(const std::vector<CorpusRecord>& records, const CostModel& model,
                                       const MatrixOptions& options = {});

/// RFC 4180 CSV: a header row of ids, then one row of costs per id.
void write_csv(std::ostream& out, const DistanceMatrix& matrix);

} // namespace hmil_ted
