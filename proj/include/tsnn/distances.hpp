#pragma once

#include <limits>
#include <optional>
#include <vector>

#include "tsnn/model.hpp"

namespace tsnn {

enum class Axis { row, column };

/// Symmetric pairwise squared distances between rows (or columns), together
/// with the co-observation counts that produced them. Pairs with empty
/// overlap carry +infinity so they can never become neighbors.
struct DistanceTable {
    Axis axis = Axis::row;
    Grid<double> d_sq;    // k x k, diagonal 0
    Grid<int> overlap;    // co-observed positions per pair

    int size() const { return d_sq.rows(); }
};

/// Mean squared difference over co-observed positions, one pass per pair:
///   d²(i,i') = sum_j (X_ij - X_i'j)² A_ij A_i'j / sum_j A_ij A_i'j
/// minus 2*noise_var when supplied. De-biased entries may be negative and are
/// kept as-is so the exact -2s shift property holds. Self-distance is 0 by
/// convention.
inline DistanceTable estimated_row_distances(const ObservedMatrix& matrix,
                                             std::optional<double> noise_var = std::nullopt) {
    const int n = matrix.rows();
    const int m = matrix.cols();
    const double inf = std::numeric_limits<double>::infinity();
    DistanceTable table;
    table.axis = Axis::row;
    table.d_sq = Grid<double>(n, n, 0.0);
    table.overlap = Grid<int>(n, n, 0);

    for (int i = 0; i < n; ++i) {
        int self = 0;
        for (int j = 0; j < m; ++j) self += matrix.mask(i, j) ? 1 : 0;
        table.overlap(i, i) = self;
    }

    for (int a = 0; a < n; ++a) {
        const double* va = matrix.values.row_ptr(a);
        const std::uint8_t* ma = matrix.mask.row_ptr(a);
        for (int b = a + 1; b < n; ++b) {
            const double* vb = matrix.values.row_ptr(b);
            const std::uint8_t* mb = matrix.mask.row_ptr(b);
            double ssd = 0.0;
            int count = 0;
            for (int j = 0; j < m; ++j) {
                if (ma[j] && mb[j]) {
                    const double diff = va[j] - vb[j];
                    ssd += diff * diff;
                    ++count;
                }
            }
            double d = inf;
            if (count > 0) {
                d = ssd / static_cast<double>(count);
                if (noise_var) d -= 2.0 * *noise_var;
            }
            table.d_sq(a, b) = d;
            table.d_sq(b, a) = d;
            table.overlap(a, b) = count;
            table.overlap(b, a) = count;
        }
    }
    return table;
}

/// Column mirror; computed through the transpose so both axes share one pair
/// kernel.
inline DistanceTable estimated_col_distances(const ObservedMatrix& matrix,
                                             std::optional<double> noise_var = std::nullopt) {
    DistanceTable table = estimated_row_distances(transpose_observed(matrix), noise_var);
    table.axis = Axis::column;
    return table;
}

/// Population-style distance from known ground truth:
///   d²_row(i,i') = 1/m sum_j (theta_ij - theta_i'j)²
inline DistanceTable oracle_row_distances(const GroundTruth& truth) {
    const int n = truth.rows();
    const int m = truth.cols();
    DistanceTable table;
    table.axis = Axis::row;
    table.d_sq = Grid<double>(n, n, 0.0);
    table.overlap = Grid<int>(n, n, m);
    for (int a = 0; a < n; ++a) {
        const double* va = truth.theta.row_ptr(a);
        for (int b = a + 1; b < n; ++b) {
            const double* vb = truth.theta.row_ptr(b);
            double ssd = 0.0;
            for (int j = 0; j < m; ++j) {
                const double diff = va[j] - vb[j];
                ssd += diff * diff;
            }
            const double d = ssd / static_cast<double>(m);
            table.d_sq(a, b) = d;
            table.d_sq(b, a) = d;
        }
    }
    return table;
}

inline DistanceTable oracle_col_distances(const GroundTruth& truth) {
    GroundTruth t;
    t.theta = transposed(truth.theta);
    DistanceTable table = oracle_row_distances(t);
    table.axis = Axis::column;
    return table;
}

/// Finite off-diagonal distances, one value per unordered pair. Input for the
/// percentile grids.
inline std::vector<double> finite_offdiagonal(const DistanceTable& table) {
    std::vector<double> out;
    const int k = table.size();
    out.reserve(static_cast<std::size_t>(k) * (k - 1) / 2);
    for (int a = 0; a < k; ++a)
        for (int b = a + 1; b < k; ++b)
            if (std::isfinite(table.d_sq(a, b))) out.push_back(table.d_sq(a, b));
    return out;
}

}  // namespace tsnn
