// hmil-ted: tree edit distance between JSON documents with arrays treated
// as unordered bags.

#include "hmil_ted/corpus.hpp"
#include "hmil_ted/cost_model.hpp"
#include "hmil_ted/engine.hpp"
#include "hmil_ted/error.hpp"
#include "hmil_ted/json.hpp"
#include "hmil_ted/rlt.hpp"
#include "hmil_ted/validate.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

namespace {

using namespace hmil_ted;

enum Exit : int { kOk = 0, kValidationFailed = 1, kInput = 2, kConfig = 3, kResource = 4 };

struct Common {
    std::string cost_config;
    std::optional<std::size_t> max_depth;
};

void add_common(CLI::App* cmd, Common& common) {
    cmd->add_option("--cost-config", common.cost_config, "JSON cost configuration");
    cmd->add_option("--max-depth", common.max_depth, "Deepest permitted nesting (env HMIL_TED_MAX_DEPTH)");
}

std::size_t resolve_max_depth(const Common& common) {
    if (common.max_depth) return *common.max_depth;
    const char* env = std::getenv("HMIL_TED_MAX_DEPTH");
    if (!env || !*env) return kDefaultMaxDepth;
    try {
        std::size_t used = 0;
        const unsigned long long value = std::stoull(env, &used);
        if (used != std::string_view(env).size()) throw std::invalid_argument(env);
        return static_cast<std::size_t>(value);
    } catch (const std::exception&) {
        throw ConfigError(std::string("HMIL_TED_MAX_DEPTH is not a non-negative integer: ") + env);
    }
}

CostModel resolve_model(const Common& common) {
    return common.cost_config.empty() ? CostModel::unit() : load_cost_config(common.cost_config);
}

RltTree load_tree(const std::string& path, std::size_t max_depth) {
    return to_rlt(parse_json_file(path, ParseOptions{max_depth}));
}

// Left tree from `first`, right tree from `second` or the empty tree.
std::pair<RltTree, RltTree> load_pair(const std::vector<std::string>& files, bool empty, std::size_t max_depth) {
    const std::size_t wanted = empty ? 1 : 2;
    if (files.size() != wanted && !(empty && files.empty())) {
        throw ParseError(empty ? "expected at most one file with --empty" : "expected two files");
    }
    RltTree a = files.empty() ? RltTree::empty() : load_tree(files[0], max_depth);
    RltTree b = files.size() < 2 ? RltTree::empty() : load_tree(files[1], max_depth);
    return {std::move(a), std::move(b)};
}

std::string display_path(const std::string& pointer) { return quote_json_string(pointer); }

std::string explain_json(const Explanation& ex, const RltTree& a, const RltTree& b) {
    std::string relabels;
    std::string deletes;
    std::string inserts;
    auto append = [](std::string& list, const std::string& item) {
        list += list.empty() ? "\n    " : ",\n    ";
        list += item;
    };
    for (const EditOperation& op : ex.script.operations) {
        switch (op.kind) {
        case EditKind::Relabel:
            append(relabels, "{\"path_a\": " + display_path(a.path(op.source)) + ", \"path_b\": " +
                                 display_path(b.path(op.target)) + ", \"from\": " + label_to_json(a[op.source].label) +
                                 ", \"to\": " + label_to_json(b[op.target].label) + ", \"cost\": " +
                                 op.cost.to_string() + "}");
            break;
        case EditKind::Delete:
            append(deletes, "{\"path\": " + display_path(a.path(op.source)) + ", \"cost\": " + op.cost.to_string() + "}");
            break;
        case EditKind::Insert:
            append(inserts, "{\"path\": " + display_path(b.path(op.target)) + ", \"cost\": " + op.cost.to_string() + "}");
            break;
        }
    }
    auto close = [](const std::string& list) { return list.empty() ? std::string("[]") : "[" + list + "\n  ]"; };
    return "{\n  \"cost\": " + ex.distance.to_string() + ",\n  \"relabels\": " + close(relabels) +
           ",\n  \"deletes\": " + close(deletes) + ",\n  \"inserts\": " + close(inserts) + "\n}\n";
}

int run(int argc, char** argv) {
    CLI::App app{"Tree edit distance between JSON documents; arrays are compared as unordered bags"};
    app.require_subcommand(1);

    Common common;
    std::vector<std::string> files;
    bool empty = false;

    auto* distance_cmd = app.add_subcommand("distance", "Print the distance between two documents");
    distance_cmd->add_option("files", files, "FILE_A [FILE_B]")->expected(0, 2);
    distance_cmd->add_flag("--empty", empty, "Use the empty tree in place of FILE_B");
    add_common(distance_cmd, common);

    auto* explain_cmd = app.add_subcommand("explain", "Print a minimum-cost edit script as JSON");
    explain_cmd->add_option("files", files, "FILE_A [FILE_B]")->expected(0, 2);
    explain_cmd->add_flag("--empty", empty, "Use the empty tree in place of FILE_B");
    add_common(explain_cmd, common);

    std::string corpus;
    std::string output;
    std::size_t parallelism = 1;
    auto* matrix_cmd = app.add_subcommand("matrix", "Write the pairwise distance matrix of an NDJSON corpus as CSV");
    matrix_cmd->add_option("corpus", corpus, "NDJSON corpus")->required();
    matrix_cmd->add_option("--output", output, "CSV destination (default: stdout)");
    matrix_cmd->add_option("--parallelism", parallelism, "Worker threads (0 = all cores)");
    add_common(matrix_cmd, common);

    ValidateOptions validate_opts;
    auto* validate_cmd = app.add_subcommand("validate", "Check the engine against the brute-force oracle");
    validate_cmd->add_option("--seed", validate_opts.seed, "Random seed");
    validate_cmd->add_option("--iterations", validate_opts.iterations, "Number of random cases");
    validate_cmd->add_flag("--inject-fault", validate_opts.inject_fault)->group("");

    std::string tree_file;
    auto* tree_cmd = app.add_subcommand("tree", "Print the canonical tree rendering of a document");
    tree_cmd->add_option("file", tree_file, "JSON document")->required();
    add_common(tree_cmd, common);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kInput;
    }

    const std::size_t max_depth = resolve_max_depth(common);

    if (*distance_cmd || *explain_cmd) {
        const CostModel model = resolve_model(common);
        auto [a, b] = load_pair(files, empty, max_depth);
        if (*distance_cmd) {
            std::cout << distance(a, b, model, EngineOptions{max_depth}).to_string() << '\n';
        } else {
            std::cout << explain_json(explain(a, b, model, EngineOptions{max_depth}), a, b);
        }
        return kOk;
    }
    if (*matrix_cmd) {
        const CostModel model = resolve_model(common);
        const auto records = read_corpus_file(corpus, ParseOptions{max_depth});
        MatrixOptions opts;
        opts.parallelism = parallelism;
        opts.max_depth = max_depth;
        const DistanceMatrix matrix = compute_distance_matrix(records, model, opts);
        if (output.empty()) {
            write_csv(std::cout, matrix);
        } else {
            std::ofstream out(output, std::ios::binary);
            if (!out) throw ParseError("cannot write " + output);
            write_csv(out, matrix);
            if (!out.flush()) throw ParseError("failed writing " + output);
        }
        return kOk;
    }
    if (*validate_cmd) {
        const ValidationReport report = run_validation(validate_opts);
        std::cout << "seed " << validate_opts.seed << ", " << report.cases << " cases, " << report.comparisons
                  << " oracle comparisons\n";
        for (const auto& line : report.axiom_failures) std::cout << "axiom violation: " << line << '\n';
        if (report.failure) {
            std::cout << "counterexample: " << report.failure->to_json() << '\n';
        }
        std::cout << (report.ok() ? "ok" : "FAILED") << '\n';
        return report.ok() ? kOk : kValidationFailed;
    }
    if (*tree_cmd) {
        std::cout << render_canonical(load_tree(tree_file, max_depth)) << '\n';
        return kOk;
    }
    return kInput;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const hmil_ted::ParseError& e) {
        std::cerr << "hmil-ted: " << e.what() << '\n';
        return kInput;
    } catch (const hmil_ted::ConfigError& e) {
        std::cerr << "hmil-ted: " << e.what() << '\n';
        return kConfig;
    } catch (const hmil_ted::ResourceError& e) {
        std::cerr << "hmil-ted: " << e.what() << '\n';
        return kResource;
    } catch (const std::bad_alloc&) {
        std::cerr << "hmil-ted: out of memory\n";
        return kResource;
    } catch (const std::exception& e) {
        std::cerr << "hmil-ted: " << e.what() << '\n';
        return kInput;
    }
}
