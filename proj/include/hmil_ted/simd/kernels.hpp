#pragma once

// Column kernels of the Hungarian solver.
//
// Each shortest-augmenting-path step of the solver makes two passes over the
// columns of the cost matrix: a relaxation pass that lowers the running
// slack of every free column and finds the column of least slack, and a
// shift pass that moves the dual potentials by that slack. Both are
// branch-free over the column range and are provided as a scalar reference
// and as AVX2 variants. The dispatcher picks the widest variant the CPU
// supports at first use; HMIL_TED_KERNEL=scalar|avx2 overrides the choice.
//
// The variants are interchangeable bit for bit: ties in the argmin resolve to
// the lowest column index and the returned slack is the stored value of that
// column, so integer and floating-point runs match the scalar kernel exactly.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace hmil_ted::simd {

enum class KernelKind { Scalar, Avx2 };

std::string_view to_string(KernelKind kind) noexcept;

template <class T>
struct ScanResult {
    T slack;
    std::size_t column; ///< == count when every column is used
};

/// `used` holds 0 for free columns and ~0 for columns in the alternating tree.
template <class T>
struct HungarianKernels {
    /// For each free column j: reduced = row[j] - row_potential - col_potential[j];
    /// if reduced < min_slack[j], store it and set way[j] = from. Returns the
    /// least min_slack over free columns and its first column.
    ScanResult<T> (*relax)(const T* row, T row_potential, const T* col_potential, T* min_slack,
                           std::int64_t* way, const std::int64_t* used, std::size_t count,
                           std::int64_t from);
    /// col_potential[j] -= delta on used columns, min_slack[j] -= delta on free ones.
    void (*shift)(T* col_potential, T* min_slack, const std::int64_t* used, std::size_t count,
                  T delta);
};

bool kernel_available(KernelKind kind) noexcept;

/// Variant in effect for new solves.
KernelKind active_kernel() noexcept;
/// Throws ContractError if the CPU lacks the instructions.
void set_active_kernel(KernelKind kind);

const HungarianKernels<std::int64_t>& int_kernels(KernelKind kind);
const HungarianKernels<double>& float_kernels(KernelKind kind);

namespace detail {
extern const HungarianKernels<std::int64_t> kScalarInt;
extern const HungarianKernels<double> kScalarFloat;
#if defined(__x86_64__) || defined(_M_X64)
extern const HungarianKernels<std::int64_t> kAvx2Int;
extern const HungarianKernels<double> kAvx2Float;
#endif
} // namespace detail

} // namespace hmil_ted::simd
