#pragma once

#include "hmil_ted/cost_model.hpp"
#include "hmil_ted/json.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace hmil_ted {

struct GeneratorOptions {
    /// Upper bound on the number of JSON values (= tree nodes).
    std::size_t max_nodes = 8;
    std::size_t max_children = 3;
    /// Distinct scalars per data type and distinct object keys.
    std::size_t alphabet = 3;
};

/// Random document drawn from a small alphabet so that equal labels,
/// equal keys and repeated subtrees are common.
JsonValue random_document(std::mt19937_64& rng, const GeneratorOptions& options = {});

/// Copy of `doc` with every array shuffled.
JsonValue shuffle_arrays(const JsonValue& doc, std::mt19937_64& rng);

/// Non-unit model used by the validation suite: numeric_absolute on
/// Numbers, capped_levenshtein on Strings, and non-unit structural costs.
CostModel weighted_model();

struct ValidateOptions {
    std::uint64_t seed = 1;
    std::size_t iterations = 200;
    GeneratorOptions generator{};
    /// Test hook: perturbs the engine result so that the harness must fail.
    bool inject_fault = false;
};

struct Counterexample {
    std::string check;
    std::uint64_t seed = 0;
    std::size_t iteration = 0;
    std::string model;
    /// Documents involved; nullopt stands for the empty tree.
    std::vector<std::optional<JsonValue>> documents;
    std::string expected;
    std::string actual;

    /// JSON object with everything needed to replay the case.
    std::string to_json() const;
};

struct ValidationReport {
    std::size_t cases = 0;
    std::size_t comparisons = 0;
    std::optional<Counterexample> failure;
    std::vector<std::string> axiom_failures;

    bool ok() const noexcept { return !failure && axiom_failures.empty(); }
};

/// Engine against oracle on seeded random pairs under the unit and the
/// weighted model, plus symmetry, bag-order invariance, explain mapping
/// validity and the cost-axiom check over every generated label. Stops at
/// the first disagreement. Case i depends only on (seed, i).
ValidationReport run_validation(const ValidateOptions& options);

} // namespace hmil_ted
