#include "hmil_ted/corpus.hpp"

#include "hmil_ted/canonical.hpp"
#include "hmil_ted/engine.hpp"
#include "hmil_ted/error.hpp"
#include "hmil_ted/rlt.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <fstream>
#include <istream>
#include <mutex>
#include <ostream>
#include <thread>
#include <unordered_set>

namespace hmil_ted {

namespace {

std::string take_id(JsonValue& doc, std::size_t index, std::size_t line) {
    if (!doc.is_object()) return std::to_string(index);
    auto& members = doc.as_object();
    auto it = std::find_if(members.begin(), members.end(), [](const auto& m) { return m.first == "_id"; });
    if (it == members.end()) return std::to_string(index);
    std::string id;
    switch (it->second.kind()) {
    case JsonValue::Kind::String: id = it->second.as_string(); break;
    case JsonValue::Kind::Number: id = it->second.as_number().to_string(); break;
    default:
        throw ParseError("line " + std::to_string(line) + ": \"_id\" must be a string or a number");
    }
    members.erase(it);
    return id;
}

bool blank(const std::string& line) {
    return std::all_of(line.begin(), line.end(), [](char c) { return c == ' ' || c == '\t' || c == '\r'; });
}

std::string csv_field(const std::string& text) {
    if (text.find_first_of(",\"\r\n") == std::string::npos) return text;
    std::string out = "\"";
    for (char c : text) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

} // namespace

std::vector<CorpusRecord> read_corpus(std::istream& in, const ParseOptions& options) {
    std::vector<CorpusRecord> records;
    std::unordered_set<std::string> seen;
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (blank(line)) continue;
        JsonValue doc;
        try {
            doc = parse_json(line, options);
        } catch (const ParseError& e) {
            throw ParseError("line " + std::to_string(number) + ": " + e.what(), e.offset());
        } catch (const ResourceError& e) {
            throw ResourceError("line " + std::to_string(number) + ": " + e.what());
        }
        std::string id = take_id(doc, number - 1, number);
        if (!seen.insert(id).second) {
            throw ParseError("line " + std::to_string(number) + ": duplicate id \"" + id + "\"");
        }
        records.push_back({std::move(id), std::move(doc)});
    }
    return records;
}

std::vector<CorpusRecord> read_corpus_file(const std::filesystem::path& path, const ParseOptions& options) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open " + path.string());
    return read_corpus(in, options);
}

DistanceMatrix compute_distance_matrix(const std::vector<CorpusRecord>& records, const CostModel& model,
                                       const MatrixOptions& options) {
    const std::size_t n = records.size();
    DistanceMatrix matrix;
    matrix.ids.reserve(n);
    for (const auto& r : records) matrix.ids.push_back(r.id);
    matrix.entries.assign(n * n, Cost{});

    SubtreeInterner interner;
    std::vector<ClassId> roots;
    roots.reserve(n);
    for (const auto& r : records) {
        RltTree tree = to_rlt(r.doc);
        if (tree.depth() > options.max_depth) {
            throw ResourceError("document " + r.id + " is nested deeper than " + std::to_string(options.max_depth));
        }
        roots.push_back(interner.intern_root(tree));
    }

    std::size_t workers = options.parallelism == 0 ? std::thread::hardware_concurrency() : options.parallelism;
    workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(n, 1));

    // Rows are handed out from a shared counter; each cell is written by
    // exactly one worker, so no locking is needed for the matrix itself.
    std::atomic<std::size_t> next_row{0};
    std::exception_ptr failure;
    std::mutex failure_lock;
    auto work = [&] {
        try {
            ClassDistance engine(interner, model);
            for (std::size_t i = next_row.fetch_add(1); i < n; i = next_row.fetch_add(1)) {
                for (std::size_t j = i + 1; j < n; ++j) {
                    Cost d = roots[i] == roots[j] ? Cost{} : engine.between(roots[i], roots[j]);
                    matrix.entries[i * n + j] = d;
                    matrix.entries[j * n + i] = d;
                    if (engine.memo_size() > options.memo_limit) engine.clear_memo();
                }
            }
        } catch (...) {
            std::lock_guard lock(failure_lock);
            if (!failure) failure = std::current_exception();
            next_row = n;
        }
    };
    if (workers == 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    }
    if (failure) std::rethrow_exception(failure);
    return matrix;
}

void write_csv(std::ostream& out, const DistanceMatrix& matrix) {
    const std::size_t n = matrix.size();
    for (std::size_t j = 0; j < n; ++j) {
        if (j) out << ',';
        out << csv_field(matrix.ids[j]);
    }
    out << "\r\n";
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (j) out << ',';
            out << matrix.at(i, j).to_string();
        }
        out << "\r\n";
    }
}

} // namespace hmil_ted
