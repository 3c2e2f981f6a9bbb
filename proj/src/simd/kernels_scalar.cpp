#include "hmil_ted/simd/kernels.hpp"

#include <limits>

namespace hmil_ted::simd::detail {

namespace {

template <class T>
ScanResult<T> relax_scalar(const T* row, T row_potential, const T* col_potential, T* min_slack,
                           std::int64_t* way, const std::int64_t* used, std::size_t count,
                           std::int64_t from) {
    T best = std::numeric_limits<T>::max();
    std::size_t best_column = count;
    for (std::size_t j = 0; j < count; ++j) {
        if (used[j]) continue;
        T reduced = row[j] - row_potential - col_potential[j];
        if (reduced < min_slack[j]) {
            min_slack[j] = reduced;
            way[j] = from;
        }
        if (min_slack[j] < best) {
            best = min_slack[j];
            best_column = j;
        }
    }
    return {best, best_column};
}

template <class T>
void shift_scalar(T* col_potential, T* min_slack, const std::int64_t* used, std::size_t count, T delta) {
    for (std::size_t j = 0; j < count; ++j) {
        if (used[j]) {
            col_potential[j] -= delta;
        } else {
            min_slack[j] -= delta;
        }
    }
}

} // namespace

const HungarianKernels<std::int64_t> kScalarInt{relax_scalar<std::int64_t>, shift_scalar<std::int64_t>};
const HungarianKernels<double> kScalarFloat{relax_scalar<double>, shift_scalar<double>};

} // namespace hmil_ted::simd::detail
