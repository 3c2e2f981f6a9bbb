// Compiled with -mavx2; only reached after the dispatcher has checked cpuid.
#if defined(__x86_64__) || defined(_M_X64)

#include "hmil_ted/simd/kernels.hpp"

#include <immintrin.h>

#include <limits>

namespace hmil_ted::simd::detail {

namespace {

inline std::int64_t hmin_epi64(__m256i v) {
    alignas(32) std::int64_t lanes[4];
    _mm256_store_si256(reinterpret_cast<__m256i*>(lanes), v);
    std::int64_t m = lanes[0];
    for (int k = 1; k < 4; ++k) m = lanes[k] < m ? lanes[k] : m;
    return m;
}

inline double hmin_pd(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    __m128d m = _mm_min_pd(lo, hi);
    m = _mm_min_sd(m, _mm_unpackhi_pd(m, m));
    return _mm_cvtsd_f64(m);
}

ScanResult<std::int64_t> relax_avx2_i64(const std::int64_t* row, std::int64_t row_potential,
                                        const std::int64_t* col_potential, std::int64_t* min_slack,
                                        std::int64_t* way, const std::int64_t* used, std::size_t count,
                                        std::int64_t from) {
    const __m256i vrow_pot = _mm256_set1_epi64x(row_potential);
    const __m256i vfrom = _mm256_set1_epi64x(from);
    const __m256i vmax = _mm256_set1_epi64x(std::numeric_limits<std::int64_t>::max());
    __m256i vbest = vmax;
    std::size_t j = 0;
    for (; j + 4 <= count; j += 4) {
        __m256i r = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(row + j));
        __m256i c = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(col_potential + j));
        __m256i m = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(min_slack + j));
        __m256i w = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(way + j));
        __m256i u = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(used + j));
        __m256i reduced = _mm256_sub_epi64(_mm256_sub_epi64(r, vrow_pot), c);
        __m256i lower = _mm256_andnot_si256(u, _mm256_cmpgt_epi64(m, reduced));
        m = _mm256_blendv_epi8(m, reduced, lower);
        w = _mm256_blendv_epi8(w, vfrom, lower);
        _mm256_storeu_si256(reinterpret_cast<__m256i*>(min_slack + j), m);
        _mm256_storeu_si256(reinterpret_cast<__m256i*>(way + j), w);
        __m256i candidate = _mm256_blendv_epi8(m, vmax, u);
        vbest = _mm256_blendv_epi8(vbest, candidate, _mm256_cmpgt_epi64(vbest, candidate));
    }
    std::int64_t best = hmin_epi64(vbest);
    for (; j < count; ++j) {
        if (used[j]) continue;
        std::int64_t reduced = row[j] - row_potential - col_potential[j];
        if (reduced < min_slack[j]) {
            min_slack[j] = reduced;
            way[j] = from;
        }
        if (min_slack[j] < best) best = min_slack[j];
    }

    // First free column holding the minimum.
    const __m256i vtarget = _mm256_set1_epi64x(best);
    j = 0;
    for (; j + 4 <= count; j += 4) {
        __m256i m = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(min_slack + j));
        __m256i u = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(used + j));
        __m256i hit = _mm256_andnot_si256(u, _mm256_cmpeq_epi64(m, vtarget));
        int bits = _mm256_movemask_pd(_mm256_castsi256_pd(hit));
        if (bits != 0) {
            std::size_t col = j + static_cast<std::size_t>(__builtin_ctz(static_cast<unsigned>(bits)));
            return {min_slack[col], col};
        }
    }
    for (; j < count; ++j) {
        if (!used[j] && min_slack[j] == best) return {min_slack[j], j};
    }
    return {std::numeric_limits<std::int64_t>::max(), count};
}

void shift_avx2_i64(std::int64_t* col_potential, std::int64_t* min_slack, const std::int64_t* used,
                    std::size_t count, std::int64_t delta) {
    const __m256i vdelta = _mm256_set1_epi64x(delta);
    std::size_t j = 0;
    for (; j + 4 <= count; j += 4) {
        __m256i u = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(used + j));
        __m256i c = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(col_potential + j));
        __m256i m = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(min_slack + j));
        c = _mm256_sub_epi64(c, _mm256_and_si256(vdelta, u));
        m = _mm256_sub_epi64(m, _mm256_andnot_si256(u, vdelta));
        _mm256_storeu_si256(reinterpret_cast<__m256i*>(col_potential + j), c);
        _mm256_storeu_si256(reinterpret_cast<__m256i*>(min_slack + j), m);
    }
    for (; j < count; ++j) {
        if (used[j]) {
            col_potential[j] -= delta;
        } else {
            min_slack[j] -= delta;
        }
    }
}

ScanResult<double> relax_avx2_f64(const double* row, double row_potential, const double* col_potential,
                                  double* min_slack, std::int64_t* way, const std::int64_t* used,
                                  std::size_t count, std::int64_t from) {
    const __m256d vrow_pot = _mm256_set1_pd(row_potential);
    const __m256i vfrom = _mm256_set1_epi64x(from);
    const __m256d vmax = _mm256_set1_pd(std::numeric_limits<double>::max());
    __m256d vbest = vmax;
    std::size_t j = 0;
    for (; j + 4 <= count; j += 4) {
        __m256d r = _mm256_loadu_pd(row + j);
        __m256d c = _mm256_loadu_pd(col_potential + j);
        __m256d m = _mm256_loadu_pd(min_slack + j);
        __m256i w = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(way + j));
        __m256d u = _mm256_castsi256_pd(_mm256_loadu_si256(reinterpret_cast<const __m256i*>(used + j)));
        __m256d reduced = _mm256_sub_pd(_mm256_sub_pd(r, vrow_pot), c);
        __m256d lower = _mm256_andnot_pd(u, _mm256_cmp_pd(reduced, m, _CMP_LT_OQ));
        m = _mm256_blendv_pd(m, reduced, lower);
        w = _mm256_castpd_si256(_mm256_blendv_pd(_mm256_castsi256_pd(w), _mm256_castsi256_pd(vfrom), lower));
        _mm256_storeu_pd(min_slack + j, m);
        _mm256_storeu_si256(reinterpret_cast<__m256i*>(way + j), w);
        vbest = _mm256_min_pd(vbest, _mm256_blendv_pd(m, vmax, u));
    }
    double best = hmin_pd(vbest);
    for (; j < count; ++j) {
        if (used[j]) continue;
        double reduced = row[j] - row_potential - col_potential[j];
        if (reduced < min_slack[j]) {
            min_slack[j] = reduced;
            way[j] = from;
        }
        if (min_slack[j] < best) best = min_slack[j];
    }

    const __m256d vtarget = _mm256_set1_pd(best);
    j = 0;
    for (; j + 4 <= count; j += 4) {
        __m256d m = _mm256_loadu_pd(min_slack + j);
        __m256d u = _mm256_castsi256_pd(_mm256_loadu_si256(reinterpret_cast<const __m256i*>(used + j)));
        int bits = _mm256_movemask_pd(_mm256_andnot_pd(u, _mm256_cmp_pd(m, vtarget, _CMP_EQ_OQ)));
        if (bits != 0) {
            std::size_t col = j + static_cast<std::size_t>(__builtin_ctz(static_cast<unsigned>(bits)));
            return {min_slack[col], col};
        }
    }
    for (; j < count; ++j) {
        if (!used[j] && min_slack[j] == best) return {min_slack[j], j};
    }
    return {std::numeric_limits<double>::max(), count};
}

void shift_avx2_f64(double* col_potential, double* min_slack, const std::int64_t* used, std::size_t count,
                    double delta) {
    const __m256d vdelta = _mm256_set1_pd(delta);
    std::size_t j = 0;
    for (; j + 4 <= count; j += 4) {
        __m256d u = _mm256_castsi256_pd(_mm256_loadu_si256(reinterpret_cast<const __m256i*>(used + j)));
        __m256d c = _mm256_loadu_pd(col_potential + j);
        __m256d m = _mm256_loadu_pd(min_slack + j);
        c = _mm256_blendv_pd(c, _mm256_sub_pd(c, vdelta), u);
        m = _mm256_blendv_pd(_mm256_sub_pd(m, vdelta), m, u);
        _mm256_storeu_pd(col_potential + j, c);
        _mm256_storeu_pd(min_slack + j, m);
    }
    for (; j < count; ++j) {
        if (used[j]) {
            col_potential[j] -= delta;
        } else {
            min_slack[j] -= delta;
        }
    }
}

} // namespace

const HungarianKernels<std::int64_t> kAvx2Int{relax_avx2_i64, shift_avx2_i64};
const HungarianKernels<double> kAvx2Float{relax_avx2_f64, shift_avx2_f64};

} // namespace hmil_ted::simd::detail

#endif
