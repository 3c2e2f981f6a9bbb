#pragma once

#include "hmil_ted/cost.hpp"
#include "hmil_ted/simd/kernels.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace hmil_ted {

/// Dense row-major m x n matrix of costs.
struct CostMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<Cost> cells;

    CostMatrix() = default;
    CostMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), cells(r * c) {}

    Cost& at(std::size_t i, std::size_t j) { return cells[i * cols + j]; }
    const Cost& at(std::size_t i, std::size_t j) const { return cells[i * cols + j]; }
};

/// What a cell of the padded matrix stands for.
enum class CellKind : std::uint8_t { Pair, Delete, Insert };

/// Square matrix of subtree distances padded with whole-subtree delete
/// costs (extra columns, when the left bag is larger) or insert costs
/// (extra rows, when the right bag is larger).
struct DeltaMatrix {
    std::size_t rows = 0; ///< children of the left bag
    std::size_t cols = 0; ///< children of the right bag
    std::size_t dim = 0;  ///< max(rows, cols)
    std::vector<Cost> cells;
    std::vector<CellKind> kinds;

    const Cost& at(std::size_t i, std::size_t j) const { return cells[i * dim + j]; }
    CellKind kind(std::size_t i, std::size_t j) const { return kinds[i * dim + j]; }

    /// Plain square matrix with every cell tagged Pair.
    static DeltaMatrix square(std::size_t dim, std::vector<Cost> cells);
};

/// Builds the padded matrix. Throws ContractError on negative costs,
/// mismatched vector sizes, or an empty 0 x 0 input.
DeltaMatrix pad_to_square(const CostMatrix& pair_costs, std::span<const Cost> delete_costs,
                          std::span<const Cost> insert_costs);

struct AssignmentResult {
    /// permutation[i] is the column assigned to row i.
    std::vector<std::size_t> permutation;
    Cost total_cost;
};

/// Exact minimum-cost assignment reusing its buffers across calls. Exact
/// costs are brought to a common denominator and solved in 64-bit integers;
/// anything else is solved in binary64. Not thread-safe; use one per thread.
class AssignmentSolver {
public:
    explicit AssignmentSolver(simd::KernelKind kernel = simd::active_kernel()) : kernel_(kernel) {}

    /// Optimal assignment of a dim x dim row-major matrix; among optimal
    /// assignments the lexicographically smallest permutation is returned.
    AssignmentResult solve(std::span<const Cost> cells, std::size_t dim);

    /// Optimal cost only, skipping the tie-break pass.
    Cost solve_cost(std::span<const Cost> cells, std::size_t dim);

    simd::KernelKind kernel() const noexcept { return kernel_; }

private:
    template <class T>
    void run_hungarian(std::size_t dim, const simd::HungarianKernels<T>& kernels);
    template <class T>
    void lexicographic_minimum(std::size_t dim);
    bool load(std::span<const Cost> cells, std::size_t dim);

    simd::KernelKind kernel_;
    bool integral_ = true;
    std::vector<std::int64_t> int_cells_;
    std::vector<double> float_cells_;
    std::vector<std::int64_t> int_u_, int_v_, int_slack_;
    std::vector<double> float_u_, float_v_, float_slack_;
    std::vector<std::int64_t> way_, used_;
    std::vector<std::size_t> col_owner_;
    std::vector<std::size_t> used_cols_;
    std::vector<std::size_t> row_col_;
};

/// Lexicographically smallest optimal assignment of delta.
AssignmentResult min_cost_assignment(const DeltaMatrix& delta);

} // namespace hmil_ted
