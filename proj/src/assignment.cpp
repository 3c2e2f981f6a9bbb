#include "hmil_ted/assignment.hpp"

#include "hmil_ted/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace hmil_ted {

DeltaMatrix DeltaMatrix::square(std::size_t dim, std::vector<Cost> cells) {
    if (cells.size() != dim * dim) throw ContractError("square matrix needs dim*dim cells");
    DeltaMatrix d;
    d.rows = d.cols = d.dim = dim;
    d.cells = std::move(cells);
    d.kinds.assign(dim * dim, CellKind::Pair);
    return d;
}

DeltaMatrix pad_to_square(const CostMatrix& pair_costs, std::span<const Cost> delete_costs,
                          std::span<const Cost> insert_costs) {
    const std::size_t m = pair_costs.rows;
    const std::size_t n = pair_costs.cols;
    if (m == 0 && n == 0) throw ContractError("cannot pad an empty 0x0 matrix");
    if (pair_costs.cells.size() != m * n || delete_costs.size() != m || insert_costs.size() != n) {
        throw ContractError("pad_to_square: inconsistent input sizes");
    }
    auto check = [](const Cost& c) {
        if (c.is_negative()) throw ContractError("pad_to_square: negative cost " + c.to_string());
    };
    std::for_each(pair_costs.cells.begin(), pair_costs.cells.end(), check);
    std::for_each(delete_costs.begin(), delete_costs.end(), check);
    std::for_each(insert_costs.begin(), insert_costs.end(), check);

    DeltaMatrix d;
    d.rows = m;
    d.cols = n;
    d.dim = std::max(m, n);
    d.cells.resize(d.dim * d.dim);
    d.kinds.resize(d.dim * d.dim);
    for (std::size_t i = 0; i < d.dim; ++i) {
        for (std::size_t j = 0; j < d.dim; ++j) {
            const std::size_t at = i * d.dim + j;
            if (i < m && j < n) {
                d.cells[at] = pair_costs.at(i, j);
                d.kinds[at] = CellKind::Pair;
            } else if (i < m) {
                d.cells[at] = delete_costs[i];
                d.kinds[at] = CellKind::Delete;
            } else {
                d.cells[at] = insert_costs[j];
                d.kinds[at] = CellKind::Insert;
            }
        }
    }
    return d;
}

// ---------------------------------------------------------------------------
// Solver

namespace {

using i128 = __int128;

// Integer entries must leave room for the dual potentials, which stay within
// a few multiples of dim * max entry.
constexpr i128 kIntegerBudget = i128{1} << 60;

} // namespace

bool AssignmentSolver::load(std::span<const Cost> cells, std::size_t dim) {
    if (dim == 0) throw ContractError("assignment over an empty matrix");
    if (cells.size() != dim * dim) throw ContractError("assignment needs a square matrix");

    integral_ = std::all_of(cells.begin(), cells.end(), [](const Cost& c) { return c.is_exact(); });
    if (integral_) {
        i128 lcm = 1;
        for (const Cost& c : cells) {
            i128 den = c.denominator();
            if (den == 1 || lcm % den == 0) continue;
            i128 a = lcm;
            i128 b = den;
            while (b != 0) {
                i128 t = a % b;
                a = b;
                b = t;
            }
            lcm = lcm / a * den;
            if (lcm > kIntegerBudget) {
                integral_ = false;
                break;
            }
        }
        if (integral_) {
            const i128 limit = kIntegerBudget / static_cast<i128>(dim + 2);
            int_cells_.resize(dim * dim);
            for (std::size_t k = 0; k < cells.size(); ++k) {
                i128 scaled = static_cast<i128>(cells[k].numerator()) * (lcm / cells[k].denominator());
                if (scaled > limit || scaled < -limit) {
                    integral_ = false;
                    break;
                }
                int_cells_[k] = static_cast<std::int64_t>(scaled);
            }
        }
    }
    if (!integral_) {
        float_cells_.resize(dim * dim);
        for (std::size_t k = 0; k < cells.size(); ++k) float_cells_[k] = cells[k].to_double();
    }
    return integral_;
}

// Shortest augmenting path Hungarian method with row and column potentials
// (u, v). Rows and columns are 1-based here; column 0 is the virtual root of
// each alternating tree. On return col_owner_[j] is the row assigned to
// column j and u, v form an optimal dual solution.
template <class T>
void AssignmentSolver::run_hungarian(std::size_t dim, const simd::HungarianKernels<T>& kernels) {
    std::vector<T>* cells;
    std::vector<T>* u;
    std::vector<T>* v;
    std::vector<T>* slack;
    if constexpr (std::is_same_v<T, std::int64_t>) {
        cells = &int_cells_;
        u = &int_u_;
        v = &int_v_;
        slack = &int_slack_;
    } else {
        cells = &float_cells_;
        u = &float_u_;
        v = &float_v_;
        slack = &float_slack_;
    }
    u->assign(dim + 1, T{});
    v->assign(dim + 1, T{});
    slack->resize(dim + 1);
    way_.assign(dim + 1, 0);
    used_.resize(dim + 1);
    col_owner_.assign(dim + 1, 0);

    for (std::size_t row = 1; row <= dim; ++row) {
        col_owner_[0] = row;
        std::size_t j0 = 0;
        std::fill(slack->begin(), slack->end(), std::numeric_limits<T>::max());
        std::fill(used_.begin(), used_.end(), 0);
        used_cols_.clear();
        do {
            used_[j0] = ~std::int64_t{0};
            used_cols_.push_back(j0);
            const std::size_t i0 = col_owner_[j0];
            const T* cost_row = cells->data() + (i0 - 1) * dim;
            auto step = kernels.relax(cost_row, (*u)[i0], v->data() + 1, slack->data() + 1,
                                      way_.data() + 1, used_.data() + 1, dim,
                                      static_cast<std::int64_t>(j0));
            const T delta = step.slack;
            for (std::size_t j : used_cols_) (*u)[col_owner_[j]] += delta;
            (*v)[0] -= delta;
            kernels.shift(v->data() + 1, slack->data() + 1, used_.data() + 1, dim, delta);
            j0 = step.column + 1;
        } while (col_owner_[j0] != 0);
        do {
            auto j1 = static_cast<std::size_t>(way_[j0]);
            col_owner_[j0] = col_owner_[j1];
            j0 = j1;
        } while (j0 != 0);
    }

    row_col_.assign(dim, 0);
    for (std::size_t j = 1; j <= dim; ++j) row_col_[col_owner_[j] - 1] = j - 1;
}

// Every optimal assignment uses only edges that are tight under the optimal
// duals, so the smallest one is found by fixing rows in order, each to its
// smallest tight column that still admits a perfect matching of the rest.
// Feasibility of moving row i to column j is an alternating cycle through
// the current matching, searched breadth-first over the unfixed rows.
template <class T>
void AssignmentSolver::lexicographic_minimum(std::size_t dim) {
    const std::vector<T>* cells;
    const std::vector<T>* u;
    const std::vector<T>* v;
    T tolerance{};
    if constexpr (std::is_same_v<T, std::int64_t>) {
        cells = &int_cells_;
        u = &int_u_;
        v = &int_v_;
    } else {
        cells = &float_cells_;
        u = &float_u_;
        v = &float_v_;
        double scale = 1.0;
        for (double c : float_cells_) scale = std::max(scale, std::fabs(c));
        tolerance = 1e-9 * scale * static_cast<double>(dim);
    }
    auto tight = [&](std::size_t i, std::size_t j) {
        T reduced = (*cells)[i * dim + j] - (*u)[i + 1] - (*v)[j + 1];
        if constexpr (std::is_same_v<T, std::int64_t>) {
            return reduced == 0;
        } else {
            return std::fabs(reduced) <= tolerance;
        }
    };

    std::vector<std::size_t> owner(dim);
    for (std::size_t i = 0; i < dim; ++i) owner[row_col_[i]] = i;
    std::vector<char> locked(dim, 0);
    std::vector<char> seen(dim);
    std::vector<std::size_t> via(dim);
    std::vector<std::size_t> queue;
    queue.reserve(dim);

    for (std::size_t i = 0; i < dim; ++i) {
        for (std::size_t j = 0; j < dim; ++j) {
            if (j == row_col_[i]) break;
            if (locked[j] || !tight(i, j)) continue;

            const std::size_t start = owner[j];
            const std::size_t target = row_col_[i];
            std::fill(seen.begin(), seen.end(), 0);
            seen[j] = 1;
            queue.assign(1, start);
            bool found = false;
            for (std::size_t q = 0; q < queue.size() && !found; ++q) {
                const std::size_t x = queue[q];
                for (std::size_t c = 0; c < dim; ++c) {
                    if (seen[c] || locked[c] || c == row_col_[x] || !tight(x, c)) continue;
                    seen[c] = 1;
                    via[c] = x;
                    if (c == target) {
                        found = true;
                        break;
                    }
                    queue.push_back(owner[c]);
                }
            }
            if (!found) continue;

            for (std::size_t c = target;;) {
                const std::size_t x = via[c];
                const std::size_t previous = row_col_[x];
                row_col_[x] = c;
                owner[c] = x;
                if (x == start) break;
                c = previous;
            }
            row_col_[i] = j;
            owner[j] = i;
            break;
        }
        locked[row_col_[i]] = 1;
    }
}

AssignmentResult AssignmentSolver::solve(std::span<const Cost> cells, std::size_t dim) {
    if (load(cells, dim)) {
        run_hungarian<std::int64_t>(dim, simd::int_kernels(kernel_));
        lexicographic_minimum<std::int64_t>(dim);
    } else {
        run_hungarian<double>(dim, simd::float_kernels(kernel_));
        lexicographic_minimum<double>(dim);
    }
    AssignmentResult result;
    result.permutation = row_col_;
    for (std::size_t i = 0; i < dim; ++i) result.total_cost += cells[i * dim + row_col_[i]];
    return result;
}

Cost AssignmentSolver::solve_cost(std::span<const Cost> cells, std::size_t dim) {
    if (dim == 1) {
        if (cells.size() != 1) throw ContractError("assignment needs a square matrix");
        return cells[0];
    }
    if (load(cells, dim)) {
        run_hungarian<std::int64_t>(dim, simd::int_kernels(kernel_));
    } else {
        run_hungarian<double>(dim, simd::float_kernels(kernel_));
    }
    Cost total;
    for (std::size_t i = 0; i < dim; ++i) total += cells[i * dim + row_col_[i]];
    return total;
}

AssignmentResult min_cost_assignment(const DeltaMatrix& delta) {
    if (delta.dim == 0) throw ContractError("assignment over an empty matrix");
    AssignmentSolver solver;
    return solver.solve(delta.cells, delta.dim);
}

} // namespace hmil_ted
