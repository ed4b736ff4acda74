#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <vector>

#include "tsnn/estimators.hpp"

namespace tsnn {

/// Linear-interpolation empirical quantile (type-7 order-statistic
/// convention) at percentile pct in [0,100]. Input must be sorted ascending.
inline double quantile_sorted(const std::vector<double>& sorted, double pct) {
    if (sorted.empty()) throw compute_error("quantile: empty sample");
    if (!(pct >= 0.0 && pct <= 100.0)) throw compute_error("quantile: percentile out of range");
    const double h = (static_cast<double>(sorted.size()) - 1.0) * pct / 100.0;
    const std::size_t lo = static_cast<std::size_t>(std::floor(h));
    if (lo + 1 >= sorted.size()) return sorted.back();
    const double frac = h - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

/// Squared radii at the given percentiles of the finite off-diagonal
/// distances, ascending and deduplicated.
inline std::vector<double> eta_grid_from_percentiles(const DistanceTable& table,
                                                     const std::vector<double>& percentiles) {
    std::vector<double> values = finite_offdiagonal(table);
    if (values.empty()) throw compute_error("eta grid: table has no finite off-diagonal distance");
    std::sort(values.begin(), values.end());
    std::vector<double> out;
    out.reserve(percentiles.size());
    for (double pct : percentiles) out.push_back(quantile_sorted(values, pct));
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

inline std::vector<double> evenly_spaced_percentiles(double lo, double hi, int count) {
    if (count < 1) throw config_error("percentile grid: count must be >= 1");
    std::vector<double> pcts;
    if (count == 1) {
        pcts.push_back(lo);
    } else {
        for (int k = 0; k < count; ++k)
            pcts.push_back(lo + (hi - lo) * static_cast<double>(k) / (count - 1));
    }
    return pcts;
}

inline std::vector<double> eta_grid_from_percentiles(const DistanceTable& table, double lo,
                                                     double hi, int count) {
    return eta_grid_from_percentiles(table, evenly_spaced_percentiles(lo, hi, count));
}

/// Candidate squared radii per axis. One-sided methods use only their own
/// axis; the other list stays empty.
struct EtaGrid {
    std::vector<double> row_values;
    std::vector<double> col_values;
    std::vector<double> source_percentiles;
};

enum class FoldKind { random_entry, blocked_rows };

/// Assignment of entries to cross-validation folds. Random-entry folds give
/// each observed entry an iid uniform fold id. Blocked folds partition rows
/// into K groups; the test set of a fold is its rows' trailing holdout_cols
/// columns, and everything else trains.
struct FoldPlan {
    FoldKind kind = FoldKind::random_entry;
    int K = 5;
    int holdout_cols = 0;
    Grid<int> fold_of;  // 1..K for observed entries, 0 otherwise

    Grid<std::uint8_t> test_mask(int fold) const {
        const int n = fold_of.rows(), m = fold_of.cols();
        Grid<std::uint8_t> mask(n, m, 0);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < m; ++j) {
                if (fold_of(i, j) != fold) continue;
                if (kind == FoldKind::blocked_rows && j < m - holdout_cols) continue;
                mask(i, j) = 1;
            }
        return mask;
    }

    Grid<std::uint8_t> train_mask(int fold) const {
        Grid<std::uint8_t> test = test_mask(fold);
        Grid<std::uint8_t> mask(fold_of.rows(), fold_of.cols(), 0);
        for (int i = 0; i < mask.rows(); ++i)
            for (int j = 0; j < mask.cols(); ++j)
                mask(i, j) = (fold_of(i, j) != 0 && !test(i, j)) ? 1 : 0;
        return mask;
    }
};

inline FoldPlan make_folds(const ObservedMatrix& matrix, FoldKind kind, int K, int holdout_cols,
                           std::uint64_t seed) {
    if (K < 2) throw config_error("make_folds: K must be >= 2");
    const int n = matrix.rows(), m = matrix.cols();
    FoldPlan plan;
    plan.kind = kind;
    plan.K = K;
    plan.fold_of = Grid<int>(n, m, 0);
    Rng rng = stream_rng(seed, {streams::kFolds});
    if (kind == FoldKind::random_entry) {
        plan.holdout_cols = 0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < m; ++j)
                if (matrix.observed(i, j))
                    plan.fold_of(i, j) = 1 + static_cast<int>(rng.uniform_int(K));
    } else {
        if (holdout_cols < 1 || holdout_cols > m)
            throw config_error("make_folds: holdout_cols must lie in [1, m]");
        if (K > n) throw config_error("make_folds: more folds than rows");
        plan.holdout_cols = holdout_cols;
        std::vector<int> rows(n);
        std::iota(rows.begin(), rows.end(), 0);
        rng.choose(rows, rows.size());  // full shuffle
        // contiguous groups, sizes differing by at most one
        int idx = 0;
        for (int f = 1; f <= K; ++f) {
            const int size = n / K + (f <= n % K ? 1 : 0);
            for (int r = 0; r < size; ++r, ++idx)
                for (int j = 0; j < m; ++j)
                    if (matrix.observed(rows[idx], j)) plan.fold_of(rows[idx], j) = f;
        }
    }
    return plan;
}

struct TuneOptions {
    bool exclude_target = true;  // leave-one-out guard against zero-error fits
    bool allow_self = true;
    std::optional<int> cap_row;
    std::optional<int> cap_col;
    std::optional<double> noise_var;
    std::uint64_t seed = 0;
};

struct TuneResult {
    Radii radii;
    Grid<double> cv_table;  // row grid index x col grid index
    double best_score = 0.0;
    int best_row_index = 0;
    int best_col_index = 0;
};

namespace detail {

/// Mean squared residual of a completion over the observed entries of
/// `score_mask` (or all observed entries when null). Undefined estimates
/// score against the observed-mean fallback.
inline double score_completion(const ObservedMatrix& matrix, const CompletionResult& result,
                               double fallback, const Grid<std::uint8_t>* score_mask,
                               long* out_count = nullptr) {
    double sum = 0.0;
    long count = 0;
    for (int i = 0; i < matrix.rows(); ++i)
        for (int j = 0; j < matrix.cols(); ++j) {
            if (!matrix.observed(i, j)) continue;
            if (score_mask && !(*score_mask)(i, j)) continue;
            const double est = result.undefined_mask(i, j) ? fallback : result.theta_hat(i, j);
            const double r = matrix.values(i, j) - est;
            sum += r * r;
            ++count;
        }
    if (out_count) *out_count = count;
    if (count == 0) throw compute_error("score_completion: nothing to score");
    return sum / static_cast<double>(count);
}

/// Grid scorer for the product-average family. Mirrors product_average
/// exactly (same member sets, same accumulation order) but reuses the
/// per-row aggregates across all column radii, which turns the t x t grid
/// sweep from t² completions into t aggregate passes. Fits on `fit` and
/// scores squared residuals against `score` over entries observed in
/// `score` (restricted to `score_mask` when given).
inline Grid<double> tsnn_grid_scores(const ObservedMatrix& fit, const ObservedMatrix& score,
                                     const Grid<std::uint8_t>* score_mask,
                                     const DistanceTable& row_table, const DistanceTable& col_table,
                                     const EtaGrid& grid, const TuneOptions& opts) {
    const int n = fit.rows();
    const int m = fit.cols();
    const int tr = static_cast<int>(grid.row_values.size());
    const int tc = static_cast<int>(grid.col_values.size());
    const double fallback = observed_mean(fit);

    std::vector<NeighborhoodSet> col_sets;
    col_sets.reserve(tc);
    for (double eta : grid.col_values)
        col_sets.push_back(build_neighborhoods(col_table, eta, opts.cap_col, opts.allow_self, opts.seed));
    std::vector<std::vector<std::uint8_t>> self_in_col(tc, std::vector<std::uint8_t>(m, 0));
    for (int e = 0; e < tc; ++e)
        for (int j = 0; j < m; ++j) self_in_col[e][j] = col_sets[e].contains_self(j) ? 1 : 0;

    Grid<double> err_sum(tr, tc, 0.0);
    Grid<long> defined_cnt(tr, tc, 0);
    long scored = 0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j)
            if (score.mask(i, j) && (!score_mask || (*score_mask)(i, j))) ++scored;
    if (scored == 0) throw compute_error("tune: nothing to score");

    std::vector<double> sum_s(m);
    std::vector<int> sum_c(m);
    for (int er = 0; er < tr; ++er) {
        NeighborhoodSet rows = build_neighborhoods(row_table, grid.row_values[er], opts.cap_row,
                                                   opts.allow_self, opts.seed);
        for (int i = 0; i < n; ++i) {
            std::fill(sum_s.begin(), sum_s.end(), 0.0);
            std::fill(sum_c.begin(), sum_c.end(), 0);
            for (int ip : rows.members[i]) {
                const double* v = fit.values.row_ptr(ip);
                const std::uint8_t* a = fit.mask.row_ptr(ip);
                for (int j = 0; j < m; ++j) {
                    if (a[j]) {
                        sum_s[j] += v[j];
                        ++sum_c[j];
                    }
                }
            }
            const bool self_in_row = rows.contains_self(i);
            for (int ec = 0; ec < tc; ++ec) {
                const NeighborhoodSet& cols = col_sets[ec];
                for (int j = 0; j < m; ++j) {
                    if (!score.mask(i, j) || (score_mask && !(*score_mask)(i, j))) continue;
                    double num = 0.0;
                    int den = 0;
                    for (int jp : cols.members[j]) {
                        num += sum_s[jp];
                        den += sum_c[jp];
                    }
                    if (opts.exclude_target && self_in_row && self_in_col[ec][j] && fit.mask(i, j)) {
                        num -= fit.values(i, j);
                        den -= 1;
                    }
                    const double est = den > 0 ? num / static_cast<double>(den) : fallback;
                    if (den > 0) ++defined_cnt(er, ec);
                    const double r = score.values(i, j) - est;
                    err_sum(er, ec) += r * r;
                }
            }
        }
    }
    // a point that defines nothing anywhere is useless; score it out
    Grid<double> scores(tr, tc, 0.0);
    for (int er = 0; er < tr; ++er)
        for (int ec = 0; ec < tc; ++ec)
            scores(er, ec) = defined_cnt(er, ec) == 0
                                 ? std::numeric_limits<double>::infinity()
                                 : err_sum(er, ec) / static_cast<double>(scored);
    return scores;
}

/// Doubly robust grid scorer restricted to the scored entries; the triple
/// loop matches drnn_complete entrywise.
inline Grid<double> drnn_grid_scores(const ObservedMatrix& fit, const ObservedMatrix& score,
                                     const Grid<std::uint8_t>& score_mask,
                                     const DistanceTable& row_table, const DistanceTable& col_table,
                                     const EtaGrid& grid, const TuneOptions& opts) {
    const int n = fit.rows();
    const int m = fit.cols();
    const int tr = static_cast<int>(grid.row_values.size());
    const int tc = static_cast<int>(grid.col_values.size());
    const double fallback = observed_mean(fit);

    std::vector<NeighborhoodSet> row_sets, col_sets;
    for (double eta : grid.row_values)
        row_sets.push_back(build_neighborhoods(row_table, eta, opts.cap_row, opts.allow_self, opts.seed));
    for (double eta : grid.col_values)
        col_sets.push_back(build_neighborhoods(col_table, eta, opts.cap_col, opts.allow_self, opts.seed));

    Grid<double> err_sum(tr, tc, 0.0);
    Grid<long> defined_cnt(tr, tc, 0);
    long scored = 0;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < m; ++j) {
            if (!score_mask(i, j) || !score.observed(i, j)) continue;
            ++scored;
            const bool target_obs = fit.observed(i, j);
            for (int er = 0; er < tr; ++er) {
                for (int ec = 0; ec < tc; ++ec) {
                    double sum = 0.0;
                    int count = 0;
                    for (int ip : row_sets[er].members[i]) {
                        if (!fit.observed(ip, j)) continue;
                        const double x_ipj = fit.values(ip, j);
                        const double* v = fit.values.row_ptr(ip);
                        const std::uint8_t* a = fit.mask.row_ptr(ip);
                        for (int jp : col_sets[ec].members[j]) {
                            if (!a[jp] || !fit.observed(i, jp)) continue;
                            if (opts.exclude_target && target_obs && (ip == i || jp == j)) continue;
                            sum += x_ipj + fit.values(i, jp) - v[jp];
                            ++count;
                        }
                    }
                    const double est = count > 0 ? sum / count : fallback;
                    if (count > 0) ++defined_cnt(er, ec);
                    const double r = score.values(i, j) - est;
                    err_sum(er, ec) += r * r;
                }
            }
        }
    }
    if (scored == 0) throw compute_error("tune: nothing to score");
    Grid<double> scores(tr, tc, 0.0);
    for (int er = 0; er < tr; ++er)
        for (int ec = 0; ec < tc; ++ec)
            scores(er, ec) = defined_cnt(er, ec) == 0
                                 ? std::numeric_limits<double>::infinity()
                                 : err_sum(er, ec) / static_cast<double>(scored);
    return scores;
}

}  // namespace detail

/// Score every grid point on the given training matrix and return the argmin
/// radii plus the full score table. Each point is scored by the mean squared
/// residual over the observed training entries, fitting on those same entries
/// with the target-exclusion guard on; ties break toward the smaller
/// (eta_row², eta_col²) lexicographically. Distances come from the supplied
/// tables, which the caller computes once from training entries.
inline TuneResult tune_with_tables(const ObservedMatrix& train, Method method,
                                   const DistanceTable& row_table, const DistanceTable& col_table,
                                   const EtaGrid& grid, const TuneOptions& opts) {
    const bool two_sided = method == Method::tsnn || method == Method::otsnn || method == Method::drnn;
    const bool row_sided = method == Method::rownn;
    const bool col_sided = method == Method::colnn;
    if (!two_sided && !row_sided && !col_sided)
        throw usage_error("tune applies to neighborhood methods only");
    if ((two_sided || row_sided) && grid.row_values.empty())
        throw config_error("tune: empty row grid");
    if ((two_sided || col_sided) && grid.col_values.empty())
        throw config_error("tune: empty column grid");

    EtaGrid effective = grid;
    if (row_sided) effective.col_values = {0.0};
    if (col_sided) effective.row_values = {0.0};
    const int tr = static_cast<int>(effective.row_values.size());
    const int tc = static_cast<int>(effective.col_values.size());

    Grid<double> scores;
    if (method == Method::tsnn || method == Method::otsnn) {
        scores = detail::tsnn_grid_scores(train, train, nullptr, row_table, col_table, effective, opts);
    } else {
        scores = Grid<double>(tr, tc, 0.0);
        const double fallback = observed_mean(train);
        for (int er = 0; er < tr; ++er) {
            for (int ec = 0; ec < tc; ++ec) {
                CompletionResult result;
                if (method == Method::drnn) {
                    CompleteOptions copts;
                    copts.radii.eta_row_sq = effective.row_values[er];
                    copts.radii.eta_col_sq = effective.col_values[ec];
                    copts.radii.cap_row = opts.cap_row;
                    copts.radii.cap_col = opts.cap_col;
                    copts.radii.allow_self_neighbor = opts.allow_self;
                    copts.exclude_target = opts.exclude_target;
                    copts.seed = opts.seed;
                    result = drnn_complete(train, row_table, col_table, copts);
                } else {
                    OneSidedOptions oopts;
                    oopts.eta_sq = row_sided ? effective.row_values[er] : effective.col_values[ec];
                    oopts.cap = row_sided ? opts.cap_row : opts.cap_col;
                    oopts.allow_self = opts.allow_self;
                    oopts.exclude_target = opts.exclude_target;
                    oopts.seed = opts.seed;
                    result = row_sided ? rownn_complete(train, row_table, oopts)
                                       : colnn_complete(train, col_table, oopts);
                }
                bool any_defined = false;
                for (int i = 0; i < train.rows() && !any_defined; ++i)
                    for (int j = 0; j < train.cols() && !any_defined; ++j)
                        if (train.observed(i, j) && !result.undefined_mask(i, j)) any_defined = true;
                scores(er, ec) = any_defined
                                     ? detail::score_completion(train, result, fallback, nullptr)
                                     : std::numeric_limits<double>::infinity();
            }
        }
    }

    TuneResult out;
    out.cv_table = scores;
    double best = std::numeric_limits<double>::infinity();
    for (int er = 0; er < tr; ++er)
        for (int ec = 0; ec < tc; ++ec)
            if (scores(er, ec) < best) {
                best = scores(er, ec);
                out.best_row_index = er;
                out.best_col_index = ec;
            }
    if (!std::isfinite(best)) throw compute_error("tune: every grid point left all entries undefined");
    out.best_score = best;
    out.radii.eta_row_sq = col_sided ? 0.0 : effective.row_values[out.best_row_index];
    out.radii.eta_col_sq = row_sided ? 0.0 : effective.col_values[out.best_col_index];
    out.radii.cap_row = opts.cap_row;
    out.radii.cap_col = opts.cap_col;
    out.radii.allow_self_neighbor = opts.allow_self;
    return out;
}

/// Convenience wrapper: training distances straight from the training matrix
/// (the practical variant without noise de-biasing unless requested).
inline TuneResult tune(const ObservedMatrix& train, Method method, const EtaGrid& grid,
                       const TuneOptions& opts) {
    DistanceTable row_table, col_table;
    if (method != Method::colnn) row_table = estimated_row_distances(train, opts.noise_var);
    if (method != Method::rownn) col_table = estimated_col_distances(train, opts.noise_var);
    return tune_with_tables(train, method, row_table, col_table, grid, opts);
}

/// K-fold cross-validated tuning. The grid is indexed by percentile: within
/// each fold the candidate radii are the quantiles of that fold's training
/// distances, each point is scored by the squared residual over the fold's
/// held-out observed entries, and scores average across folds. The returned
/// radii are the full-data quantiles at the winning percentiles (ties toward
/// the smaller pair). For otsnn the caller supplies fold-independent oracle
/// tables via `fixed_row` / `fixed_col`.
inline TuneResult cv_tune(const ObservedMatrix& matrix, Method method,
                          const std::vector<double>& percentiles, const FoldPlan& plan,
                          const TuneOptions& opts, const DistanceTable* fixed_row = nullptr,
                          const DistanceTable* fixed_col = nullptr) {
    const bool two_sided = method == Method::tsnn || method == Method::otsnn || method == Method::drnn;
    const bool row_sided = method == Method::rownn;
    const bool col_sided = method == Method::colnn;
    if (!two_sided && !row_sided && !col_sided)
        throw usage_error("cv_tune applies to neighborhood methods only");
    if (percentiles.empty()) throw config_error("cv_tune: empty percentile grid");
    if (method == Method::otsnn && !(fixed_row && fixed_col))
        throw usage_error("cv_tune: otsnn needs oracle tables");

    const int tr = col_sided ? 1 : static_cast<int>(percentiles.size());
    const int tc = row_sided ? 1 : static_cast<int>(percentiles.size());
    Grid<double> total(tr, tc, 0.0);
    int folds_used = 0;

    for (int fold = 1; fold <= plan.K; ++fold) {
        Grid<std::uint8_t> test = plan.test_mask(fold);
        long test_count = 0;
        for (int i = 0; i < matrix.rows(); ++i)
            for (int j = 0; j < matrix.cols(); ++j)
                if (test(i, j) && matrix.observed(i, j)) ++test_count;
        if (test_count == 0) continue;
        ObservedMatrix train = restrict_mask(matrix, plan.train_mask(fold));

        DistanceTable row_table, col_table;
        if (fixed_row && fixed_col) {
            row_table = *fixed_row;
            col_table = *fixed_col;
        } else {
            if (!col_sided) row_table = estimated_row_distances(train, opts.noise_var);
            if (!row_sided) col_table = estimated_col_distances(train, opts.noise_var);
        }
        EtaGrid grid;
        grid.source_percentiles = percentiles;
        if (col_sided)
            grid.row_values = {0.0};
        else
            for (double pct : percentiles)
                grid.row_values.push_back(eta_grid_from_percentiles(row_table, {pct}).front());
        if (row_sided)
            grid.col_values = {0.0};
        else
            for (double pct : percentiles)
                grid.col_values.push_back(eta_grid_from_percentiles(col_table, {pct}).front());

        Grid<double> fold_scores(tr, tc, 0.0);
        if (method == Method::tsnn || method == Method::otsnn) {
            fold_scores =
                detail::tsnn_grid_scores(train, matrix, &test, row_table, col_table, grid, opts);
        } else if (method == Method::drnn) {
            fold_scores = detail::drnn_grid_scores(train, matrix, test, row_table, col_table, grid, opts);
        } else {
            const double fallback = observed_mean(train);
            for (int er = 0; er < tr; ++er)
                for (int ec = 0; ec < tc; ++ec) {
                    OneSidedOptions oopts;
                    oopts.eta_sq = row_sided ? grid.row_values[er] : grid.col_values[ec];
                    oopts.cap = row_sided ? opts.cap_row : opts.cap_col;
                    oopts.allow_self = opts.allow_self;
                    oopts.exclude_target = opts.exclude_target;
                    oopts.seed = opts.seed;
                    CompletionResult result = row_sided ? rownn_complete(train, row_table, oopts)
                                                        : colnn_complete(train, col_table, oopts);
                    fold_scores(er, ec) =
                        detail::score_completion(matrix, result, fallback, &test);
                }
        }
        for (int er = 0; er < tr; ++er)
            for (int ec = 0; ec < tc; ++ec) total(er, ec) += fold_scores(er, ec);
        ++folds_used;
    }
    if (folds_used == 0) throw compute_error("cv_tune: every fold had an empty test set");

    TuneResult out;
    out.cv_table = Grid<double>(tr, tc, 0.0);
    double best = std::numeric_limits<double>::infinity();
    for (int er = 0; er < tr; ++er)
        for (int ec = 0; ec < tc; ++ec) {
            out.cv_table(er, ec) = total(er, ec) / folds_used;
            if (out.cv_table(er, ec) < best) {
                best = out.cv_table(er, ec);
                out.best_row_index = er;
                out.best_col_index = ec;
            }
        }
    if (!std::isfinite(best)) throw compute_error("cv_tune: every grid point left all entries undefined");
    out.best_score = best;

    // final radii from the full-data distance quantiles at the winning percentiles
    // TODO: let callers hand in precomputed full-data tables so this pass is not
    // repeated when they already built them for the final completion
    DistanceTable full_row, full_col;
    if (fixed_row && fixed_col) {
        full_row = *fixed_row;
        full_col = *fixed_col;
    } else {
        if (!col_sided) full_row = estimated_row_distances(matrix, opts.noise_var);
        if (!row_sided) full_col = estimated_col_distances(matrix, opts.noise_var);
    }
    out.radii.eta_row_sq =
        col_sided ? 0.0
                  : eta_grid_from_percentiles(full_row, {percentiles[out.best_row_index]}).front();
    out.radii.eta_col_sq =
        row_sided ? 0.0
                  : eta_grid_from_percentiles(full_col, {percentiles[out.best_col_index]}).front();
    out.radii.cap_row = opts.cap_row;
    out.radii.cap_col = opts.cap_col;
    out.radii.allow_self_neighbor = opts.allow_self;
    return out;
}

/// Train on the non-test entries of the given fold with fixed radii, then
/// report the mean squared residual over the fold's observed test entries.
/// Averaging across folds is the caller's job.
inline double test_error(const ObservedMatrix& matrix, Method method, const Radii& radii,
                         const FoldPlan& plan, int fold, const TuneOptions& opts) {
    Grid<std::uint8_t> test = plan.test_mask(fold);
    long test_count = 0;
    for (int i = 0; i < matrix.rows(); ++i)
        for (int j = 0; j < matrix.cols(); ++j)
            if (test(i, j) && matrix.observed(i, j)) ++test_count;
    if (test_count == 0) throw compute_error("test_error: fold has no observed test entries");

    ObservedMatrix train = restrict_mask(matrix, plan.train_mask(fold));
    CompletionResult result;
    if (method == Method::rownn || method == Method::colnn) {
        OneSidedOptions oopts;
        oopts.eta_sq = method == Method::rownn ? radii.eta_row_sq : radii.eta_col_sq;
        oopts.cap = method == Method::rownn ? radii.cap_row : radii.cap_col;
        oopts.allow_self = radii.allow_self_neighbor;
        oopts.exclude_target = opts.exclude_target;
        oopts.seed = opts.seed;
        result = method == Method::rownn ? rownn_complete(train, oopts, opts.noise_var)
                                         : colnn_complete(train, oopts, opts.noise_var);
    } else if (method == Method::tsnn || method == Method::drnn) {
        CompleteOptions copts;
        copts.radii = radii;
        copts.exclude_target = opts.exclude_target;
        copts.seed = opts.seed;
        result = method == Method::tsnn ? tsnn_complete(train, copts, opts.noise_var)
                                        : drnn_complete(train, copts, opts.noise_var);
    } else {
        throw usage_error("test_error applies to neighborhood methods only");
    }
    const double fallback = observed_mean(train);
    return detail::score_completion(matrix, result, fallback, &test);
}

}  // namespace tsnn
