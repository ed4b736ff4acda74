#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>

#include "tsnn/neighborhoods.hpp"

namespace tsnn {

enum class Method { tsnn, rownn, colnn, drnn, allrow, allcol, otsnn, usvt, softimpute };

inline const char* method_name(Method m) {
    switch (m) {
        case Method::tsnn: return "tsnn";
        case Method::rownn: return "rownn";
        case Method::colnn: return "colnn";
        case Method::drnn: return "drnn";
        case Method::allrow: return "allrow";
        case Method::allcol: return "allcol";
        case Method::otsnn: return "otsnn";
        case Method::usvt: return "usvt";
        case Method::softimpute: return "softimpute";
    }
    return "?";
}

inline Method parse_method(const std::string& name) {
    for (Method m : {Method::tsnn, Method::rownn, Method::colnn, Method::drnn, Method::allrow,
                     Method::allcol, Method::otsnn, Method::usvt, Method::softimpute})
        if (name == method_name(m)) return m;
    throw usage_error("unknown method '" + name + "'");
}

/// Completed matrix plus per-entry bookkeeping. neighbor_count is the size of
/// the joint neighbor set actually averaged; undefined_mask flags entries
/// whose joint set was empty (those get theta_hat only through the optional
/// mean fallback). neighbor_sumsq, filled on request, holds sum of X² over
/// the joint set and feeds the within-neighborhood SD without materializing
/// neighbor lists.
struct CompletionResult {
    Grid<double> theta_hat;
    Grid<int> neighbor_count;
    Grid<std::uint8_t> undefined_mask;
    std::optional<Grid<double>> neighbor_sumsq;
    bool fallback_applied = false;
};

struct CompleteOptions {
    Radii radii;
    bool exclude_target = false;  // remove the target cell from its own estimate
    bool fallback_mean = false;   // fill undefined entries with the observed mean
    bool with_neighbor_sumsq = false;
    std::uint64_t seed = 0;       // only consumed by cap subsampling
};

namespace detail {

inline void apply_fallback(CompletionResult& result, const ObservedMatrix& matrix) {
    bool any = false;
    for (int i = 0; i < result.theta_hat.rows() && !any; ++i)
        for (int j = 0; j < result.theta_hat.cols() && !any; ++j)
            if (result.undefined_mask(i, j)) any = true;
    if (!any) return;
    const double mean = observed_mean(matrix);
    for (int i = 0; i < result.theta_hat.rows(); ++i)
        for (int j = 0; j < result.theta_hat.cols(); ++j)
            if (result.undefined_mask(i, j)) result.theta_hat(i, j) = mean;
    result.fallback_applied = true;
}

/// Shared averaging core. Row sums over the row neighborhood are aggregated
/// once per target row, then every column neighborhood reduces them; the
/// result equals the direct double sum over N_row(i) x N_col(j).
inline CompletionResult product_average(const ObservedMatrix& matrix, const NeighborhoodSet& rows,
                                        const NeighborhoodSet& cols, const CompleteOptions& opts) {
    const int n = matrix.rows();
    const int m = matrix.cols();
    CompletionResult result;
    result.theta_hat = Grid<double>(n, m, std::numeric_limits<double>::quiet_NaN());
    result.neighbor_count = Grid<int>(n, m, 0);
    result.undefined_mask = Grid<std::uint8_t>(n, m, 1);
    if (opts.with_neighbor_sumsq) result.neighbor_sumsq = Grid<double>(n, m, 0.0);

    std::vector<std::uint8_t> self_in_col(m, 0);
    for (int j = 0; j < m; ++j) self_in_col[j] = cols.contains_self(j) ? 1 : 0;

    std::vector<double> sum_s(m), sum_s2(m);
    std::vector<int> sum_c(m);
    for (int i = 0; i < n; ++i) {
        std::fill(sum_s.begin(), sum_s.end(), 0.0);
        std::fill(sum_s2.begin(), sum_s2.end(), 0.0);
        std::fill(sum_c.begin(), sum_c.end(), 0);
        for (int ip : rows.members[i]) {
            const double* v = matrix.values.row_ptr(ip);
            const std::uint8_t* a = matrix.mask.row_ptr(ip);
            for (int j = 0; j < m; ++j) {
                if (a[j]) {
                    sum_s[j] += v[j];
                    sum_s2[j] += v[j] * v[j];
                    ++sum_c[j];
                }
            }
        }
        const bool self_in_row = rows.contains_self(i);
        for (int j = 0; j < m; ++j) {
            double num = 0.0, ss = 0.0;
            int den = 0;
            for (int jp : cols.members[j]) {
                num += sum_s[jp];
                ss += sum_s2[jp];
                den += sum_c[jp];
            }
            if (opts.exclude_target && self_in_row && self_in_col[j] && matrix.observed(i, j)) {
                const double x = matrix.values(i, j);
                num -= x;
                ss -= x * x;
                den -= 1;
            }
            if (den > 0) {
                result.theta_hat(i, j) = num / static_cast<double>(den);
                result.neighbor_count(i, j) = den;
                result.undefined_mask(i, j) = 0;
                if (result.neighbor_sumsq) (*result.neighbor_sumsq)(i, j) = ss;
            }
        }
    }
    if (opts.fallback_mean) apply_fallback(result, matrix);
    return result;
}

/// A neighborhood set where every index is only its own neighbor; the
/// degenerate eta that reduces TS-NN to a one-sided method.
inline NeighborhoodSet singleton_set(Axis axis, int k) {
    NeighborhoodSet set;
    set.axis = axis;
    set.radius_sq = 0.0;
    set.capped.assign(k, 0);
    set.members.resize(k);
    for (int a = 0; a < k; ++a) set.members[a] = {a};
    return set;
}

}  // namespace detail

/// Two-sided nearest neighbor completion from precomputed distance tables.
/// theta_hat[i][j] is the mean of observed values over N_row(i) x N_col(j).
inline CompletionResult tsnn_complete(const ObservedMatrix& matrix, const DistanceTable& row_table,
                                      const DistanceTable& col_table, const CompleteOptions& opts) {
    const Radii& r = opts.radii;
    NeighborhoodSet rows = build_neighborhoods(row_table, r.eta_row_sq, r.cap_row,
                                               r.allow_self_neighbor, opts.seed);
    NeighborhoodSet cols = build_neighborhoods(col_table, r.eta_col_sq, r.cap_col,
                                               r.allow_self_neighbor, opts.seed);
    return detail::product_average(matrix, rows, cols, opts);
}

inline CompletionResult tsnn_complete(const ObservedMatrix& matrix, const CompleteOptions& opts,
                                      std::optional<double> noise_var = std::nullopt) {
    return tsnn_complete(matrix, estimated_row_distances(matrix, noise_var),
                         estimated_col_distances(matrix, noise_var), opts);
}

struct OneSidedOptions {
    double eta_sq = 0.0;
    std::optional<int> cap;
    bool allow_self = true;
    bool exclude_target = false;
    bool fallback_mean = false;
    bool with_neighbor_sumsq = false;
    std::uint64_t seed = 0;
};

/// Row nearest neighbors: the column neighborhood is forced to {j}, so
/// theta_hat[i][j] averages X[i'][j] over observed row neighbors.
inline CompletionResult rownn_complete(const ObservedMatrix& matrix, const DistanceTable& row_table,
                                       const OneSidedOptions& opts) {
    NeighborhoodSet rows =
        build_neighborhoods(row_table, opts.eta_sq, opts.cap, opts.allow_self, opts.seed);
    NeighborhoodSet cols = detail::singleton_set(Axis::column, matrix.cols());
    CompleteOptions copts;
    copts.exclude_target = opts.exclude_target;
    copts.fallback_mean = opts.fallback_mean;
    copts.with_neighbor_sumsq = opts.with_neighbor_sumsq;
    return detail::product_average(matrix, rows, cols, copts);
}

inline CompletionResult rownn_complete(const ObservedMatrix& matrix, const OneSidedOptions& opts,
                                       std::optional<double> noise_var = std::nullopt) {
    return rownn_complete(matrix, estimated_row_distances(matrix, noise_var), opts);
}

namespace detail {
inline CompletionResult transpose_result(CompletionResult r) {
    CompletionResult out;
    out.theta_hat = transposed(r.theta_hat);
    out.neighbor_count = transposed(r.neighbor_count);
    out.undefined_mask = transposed(r.undefined_mask);
    if (r.neighbor_sumsq) out.neighbor_sumsq = transposed(*r.neighbor_sumsq);
    out.fallback_applied = r.fallback_applied;
    return out;
}
}  // namespace detail

/// Column mirror of rownn_complete.
inline CompletionResult colnn_complete(const ObservedMatrix& matrix, const DistanceTable& col_table,
                                       const OneSidedOptions& opts) {
    DistanceTable as_rows = col_table;
    as_rows.axis = Axis::row;
    return detail::transpose_result(rownn_complete(transpose_observed(matrix), as_rows, opts));
}

inline CompletionResult colnn_complete(const ObservedMatrix& matrix, const OneSidedOptions& opts,
                                       std::optional<double> noise_var = std::nullopt) {
    return colnn_complete(matrix, estimated_col_distances(matrix, noise_var), opts);
}

/// Doubly robust variant: averages X[i'][j] + X[i][j'] - X[i'][j'] over joint
/// neighbors, keeping only triples whose three cells are all observed. The
/// transform is exact for additive signals and follows the standard doubly
/// robust nearest-neighbor construction. With exclude_target set, any triple
/// that reads the target cell (i'=i or j'=j when (i,j) is observed) is
/// skipped, so the estimate never sees its own outcome.
inline CompletionResult drnn_complete(const ObservedMatrix& matrix, const DistanceTable& row_table,
                                      const DistanceTable& col_table, const CompleteOptions& opts) {
    const Radii& r = opts.radii;
    NeighborhoodSet rows = build_neighborhoods(row_table, r.eta_row_sq, r.cap_row,
                                               r.allow_self_neighbor, opts.seed);
    NeighborhoodSet cols = build_neighborhoods(col_table, r.eta_col_sq, r.cap_col,
                                               r.allow_self_neighbor, opts.seed);
    const int n = matrix.rows();
    const int m = matrix.cols();
    CompletionResult result;
    result.theta_hat = Grid<double>(n, m, std::numeric_limits<double>::quiet_NaN());
    result.neighbor_count = Grid<int>(n, m, 0);
    result.undefined_mask = Grid<std::uint8_t>(n, m, 1);

    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < m; ++j) {
            const bool target_obs = matrix.observed(i, j);
            double sum = 0.0;
            int count = 0;
            for (int ip : rows.members[i]) {
                if (!matrix.observed(ip, j)) continue;
                const double x_ipj = matrix.values(ip, j);
                const double* v = matrix.values.row_ptr(ip);
                const std::uint8_t* a = matrix.mask.row_ptr(ip);
                for (int jp : cols.members[j]) {
                    if (!a[jp] || !matrix.observed(i, jp)) continue;
                    if (opts.exclude_target && target_obs && (ip == i || jp == j)) continue;
                    sum += x_ipj + matrix.values(i, jp) - v[jp];
                    ++count;
                }
            }
            if (count > 0) {
                result.theta_hat(i, j) = sum / static_cast<double>(count);
                result.neighbor_count(i, j) = count;
                result.undefined_mask(i, j) = 0;
            }
        }
    }
    if (opts.fallback_mean) detail::apply_fallback(result, matrix);
    return result;
}

inline CompletionResult drnn_complete(const ObservedMatrix& matrix, const CompleteOptions& opts,
                                      std::optional<double> noise_var = std::nullopt) {
    return drnn_complete(matrix, estimated_row_distances(matrix, noise_var),
                         estimated_col_distances(matrix, noise_var), opts);
}

struct AllNeighborOptions {
    bool exclude_target = false;
    bool fallback_mean = false;
};

/// allRow-NN baseline: every row is a neighbor, so each entry gets its
/// column's observed mean.
inline CompletionResult allrow_complete(const ObservedMatrix& matrix,
                                        const AllNeighborOptions& opts = {}) {
    const int n = matrix.rows();
    const int m = matrix.cols();
    CompletionResult result;
    result.theta_hat = Grid<double>(n, m, std::numeric_limits<double>::quiet_NaN());
    result.neighbor_count = Grid<int>(n, m, 0);
    result.undefined_mask = Grid<std::uint8_t>(n, m, 1);

    std::vector<double> col_sum(m, 0.0);
    std::vector<int> col_cnt(m, 0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j)
            if (matrix.observed(i, j)) {
                col_sum[j] += matrix.values(i, j);
                ++col_cnt[j];
            }
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < m; ++j) {
            double num = col_sum[j];
            int den = col_cnt[j];
            if (opts.exclude_target && matrix.observed(i, j)) {
                num -= matrix.values(i, j);
                den -= 1;
            }
            if (den > 0) {
                result.theta_hat(i, j) = num / static_cast<double>(den);
                result.neighbor_count(i, j) = den;
                result.undefined_mask(i, j) = 0;
            }
        }
    }
    if (opts.fallback_mean) detail::apply_fallback(result, matrix);
    return result;
}

/// allCol-NN baseline: row means over observed entries.
inline CompletionResult allcol_complete(const ObservedMatrix& matrix,
                                        const AllNeighborOptions& opts = {}) {
    return detail::transpose_result(allrow_complete(transpose_observed(matrix), opts));
}

/// MSE of a completion against known truth over all entries (the decay-study
/// score). Requires a defined value everywhere; run with fallback enabled.
inline double mse_vs_truth(const CompletionResult& result, const GroundTruth& truth) {
    const int n = truth.rows();
    const int m = truth.cols();
    double sum = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j) {
            if (!std::isfinite(result.theta_hat(i, j)))
                throw compute_error("mse_vs_truth: undefined estimate at (" + std::to_string(i) +
                                    "," + std::to_string(j) + "); enable the mean fallback");
            const double diff = result.theta_hat(i, j) - truth.theta(i, j);
            sum += diff * diff;
        }
    return sum / (static_cast<double>(n) * static_cast<double>(m));
}

}  // namespace tsnn
