#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "tsnn/baselines.hpp"
#include "tsnn/config.hpp"
#include "tsnn/inference.hpp"
#include "tsnn/parallel.hpp"
#include "tsnn/synthesis.hpp"
#include "tsnn/tuning.hpp"

namespace tsnn {

inline std::vector<Method> parse_methods(const std::vector<std::string>& names) {
    std::vector<Method> methods;
    methods.reserve(names.size());
    for (const auto& name : names) methods.push_back(parse_method(name));
    if (methods.empty()) throw config_error("methods list is empty");
    return methods;
}

struct SoftImputeSettings {
    std::vector<double> grid = SpectralConfig::default_si_grid();
    int max_iter = 100;
    double tol = 1e-4;
};

/// How the studies pick radii: K-fold cross-validation over the percentile
/// grid, or a single target-excluded fit-and-score pass on the training data
/// (used where the training set is itself already a fold).
enum class TuneMode { kfold_cv, train_loo };

/// Shared knobs for the tune-then-complete protocol used by the studies.
struct NnProtocol {
    GridSpec two_sided{1.5, 10.0, 8};
    GridSpec one_sided{1.5, 30.0, 8};
    bool allow_self = true;
    std::optional<int> cap_row;
    std::optional<int> cap_col;
    TuneMode tune_mode = TuneMode::train_loo;
    int cv_folds = 5;
};

struct MethodRun {
    Radii radii;
    CompletionResult result;
};

namespace detail {

inline bool is_two_sided(Method m) {
    return m == Method::tsnn || m == Method::otsnn || m == Method::drnn;
}

/// Tune on `train` and complete it with the tuned radii. For otsnn the
/// distance tables come from the ground truth; every later stage is shared
/// with the data-driven pipeline.
inline MethodRun tune_and_complete(const ObservedMatrix& train, Method method,
                                   const GroundTruth* truth, const NnProtocol& protocol,
                                   std::uint64_t tune_seed, bool final_exclude_target,
                                   bool fallback_mean, bool with_sumsq) {
    DistanceTable row_table, col_table;
    if (method == Method::otsnn) {
        if (!truth) throw usage_error("otsnn requires ground truth");
        row_table = oracle_row_distances(*truth);
        col_table = oracle_col_distances(*truth);
    } else {
        if (method != Method::colnn) row_table = estimated_row_distances(train);
        if (method != Method::rownn) col_table = estimated_col_distances(train);
    }

    const GridSpec& spec = is_two_sided(method) ? protocol.two_sided : protocol.one_sided;
    const std::vector<double> percentiles = evenly_spaced_percentiles(spec.lo, spec.hi, spec.count);

    TuneOptions topts;
    topts.exclude_target = true;  // targets never score themselves during tuning
    topts.allow_self = protocol.allow_self;
    topts.cap_row = protocol.cap_row;
    topts.cap_col = protocol.cap_col;
    topts.seed = tune_seed;

    TuneResult tuned;
    if (protocol.tune_mode == TuneMode::kfold_cv) {
        FoldPlan plan = make_folds(train, FoldKind::random_entry, protocol.cv_folds, 0,
                                   derive_stream(tune_seed, {streams::kFolds}));
        const bool oracle_tables = method == Method::otsnn;
        tuned = cv_tune(train, method, percentiles, plan, topts,
                        oracle_tables ? &row_table : nullptr, oracle_tables ? &col_table : nullptr);
    } else {
        EtaGrid grid;
        grid.source_percentiles = percentiles;
        if (method != Method::colnn)
            grid.row_values = eta_grid_from_percentiles(row_table, percentiles);
        if (method != Method::rownn)
            grid.col_values = eta_grid_from_percentiles(col_table, percentiles);
        tuned = tune_with_tables(train, method, row_table, col_table, grid, topts);
    }

    MethodRun run;
    run.radii = tuned.radii;
    if (method == Method::rownn || method == Method::colnn) {
        OneSidedOptions oopts;
        oopts.eta_sq = method == Method::rownn ? tuned.radii.eta_row_sq : tuned.radii.eta_col_sq;
        oopts.cap = method == Method::rownn ? protocol.cap_row : protocol.cap_col;
        oopts.allow_self = protocol.allow_self;
        oopts.exclude_target = final_exclude_target;
        oopts.fallback_mean = fallback_mean;
        oopts.with_neighbor_sumsq = with_sumsq;
        oopts.seed = tune_seed;
        run.result = method == Method::rownn ? rownn_complete(train, row_table, oopts)
                                             : colnn_complete(train, col_table, oopts);
    } else {
        CompleteOptions copts;
        copts.radii = tuned.radii;
        copts.exclude_target = final_exclude_target;
        copts.fallback_mean = fallback_mean;
        copts.with_neighbor_sumsq = with_sumsq;
        copts.seed = tune_seed;
        run.result = method == Method::drnn ? drnn_complete(train, row_table, col_table, copts)
                                            : tsnn_complete(train, row_table, col_table, copts);
    }
    return run;
}

inline double sample_sd(const std::vector<double>& xs, double mean) {
    if (xs.size() < 2) return 0.0;
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

inline double mean_of(const std::vector<double>& xs) {
    double sum = 0.0;
    for (double x : xs) sum += x;
    return sum / static_cast<double>(xs.size());
}

}  // namespace detail

// ---------------------------------------------------------------------------
// MSE decay study
// ---------------------------------------------------------------------------

struct DecayStudyConfig {
    std::vector<int> n_list{50, 100, 150, 200, 250, 300};  // m = n throughout
    std::vector<Method> methods{Method::tsnn};
    Mechanism mechanism;
    double lambda = 0.75;
    std::optional<double> target_snr;
    double noise_sd = 0.0;
    int replicates = 10;
    std::uint64_t seed = 0;
    NnProtocol protocol;
    double usvt_eta = 2.02;
    SoftImputeSettings softimpute;

    DecayStudyConfig() { protocol.tune_mode = TuneMode::kfold_cv; }

    void validate() const {
        if (n_list.empty()) throw config_error("decay: n_list is empty");
        for (int n : n_list)
            if (n < 4) throw config_error("decay: n values must be >= 4");
        if (methods.empty()) throw config_error("decay: methods list is empty");
        if (replicates < 1) throw config_error("decay: replicates must be >= 1");
        if (!target_snr && !(noise_sd >= 0.0)) throw config_error("decay: invalid noise_sd");
        mechanism.validate();
    }
};

struct DecayCell {
    Method method;
    int n = 0;
    std::vector<double> rep_mse;
    double mean_mse = 0.0;
    double sd_mse = 0.0;
};

struct SlopeFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 1.0;
};

/// Ordinary least squares of log(mse) on log(n).
inline SlopeFit fit_loglog_slope(const std::vector<std::pair<double, double>>& points) {
    std::vector<double> xs, ys;
    for (const auto& [n, mse] : points) {
        if (!(n > 0.0)) throw compute_error("fit_loglog_slope: n must be positive");
        if (!(mse > 0.0)) throw compute_error("fit_loglog_slope: mse must be positive");
        xs.push_back(std::log(n));
        ys.push_back(std::log(mse));
    }
    const std::size_t k = xs.size();
    if (k < 2) throw compute_error("fit_loglog_slope: need at least two points");
    double x_mean = 0.0, y_mean = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        x_mean += xs[i];
        y_mean += ys[i];
    }
    x_mean /= static_cast<double>(k);
    y_mean /= static_cast<double>(k);
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        sxx += (xs[i] - x_mean) * (xs[i] - x_mean);
        sxy += (xs[i] - x_mean) * (ys[i] - y_mean);
        syy += (ys[i] - y_mean) * (ys[i] - y_mean);
    }
    if (sxx == 0.0) throw compute_error("fit_loglog_slope: need at least two distinct n");
    SlopeFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = y_mean - fit.slope * x_mean;
    if (syy == 0.0) {
        fit.r_squared = 1.0;
    } else {
        const double ss_res = syy - fit.slope * sxy;
        fit.r_squared = 1.0 - ss_res / syy;
    }
    return fit;
}

struct DecayStudyResult {
    std::vector<DecayCell> cells;                      // method-major, then n
    std::vector<std::pair<Method, SlopeFit>> slopes;   // fit over mean MSE
};

/// One replicate of one (method, n) cell. The data draw depends only on
/// (seed, n, replicate), so every method sees the same matrices.
inline double decay_replicate_mse(const DecayStudyConfig& config, Method method, int n, int rep) {
    SimConfig sc;
    sc.n = n;
    sc.m = n;
    sc.lambda = config.lambda;
    sc.noise_sd = config.noise_sd;
    sc.target_snr = config.target_snr;
    sc.mechanism = config.mechanism;
    sc.seed = derive_stream(config.seed, {streams::kData, static_cast<std::uint64_t>(n),
                                          static_cast<std::uint64_t>(rep)});
    Generated gen = generate(sc);

    switch (method) {
        case Method::usvt: {
            CompletionResult result = usvt_complete(gen.observed, config.usvt_eta);
            return mse_vs_truth(result, gen.truth);
        }
        case Method::softimpute: {
            Grid<std::uint8_t> all(n, n, 1);
            SoftImputeBest best =
                soft_impute_best(gen.observed, config.softimpute.grid, gen.truth.theta, all,
                                 config.softimpute.max_iter, config.softimpute.tol);
            return *std::min_element(best.scores.begin(), best.scores.end());
        }
        case Method::allrow: {
            CompletionResult result = allrow_complete(gen.observed, {false, true});
            return mse_vs_truth(result, gen.truth);
        }
        case Method::allcol: {
            CompletionResult result = allcol_complete(gen.observed, {false, true});
            return mse_vs_truth(result, gen.truth);
        }
        default: {
            const std::uint64_t tune_seed =
                derive_stream(config.seed, {streams::kTune, static_cast<std::uint64_t>(method),
                                            static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(rep)});
            MethodRun run = detail::tune_and_complete(gen.observed, method, &gen.truth,
                                                      config.protocol, tune_seed,
                                                      /*final_exclude_target=*/false,
                                                      /*fallback_mean=*/true, /*with_sumsq=*/false);
            return mse_vs_truth(run.result, gen.truth);
        }
    }
}

inline DecayStudyResult run_decay_study(const DecayStudyConfig& config, unsigned threads = 0) {
    config.validate();
    const std::size_t n_methods = config.methods.size();
    const std::size_t n_sizes = config.n_list.size();
    const std::size_t reps = static_cast<std::size_t>(config.replicates);
    std::vector<double> mse(n_methods * n_sizes * reps, 0.0);

    parallel_for(mse.size(), threads, [&](std::size_t job) {
        const std::size_t mi = job / (n_sizes * reps);
        const std::size_t ni = (job / reps) % n_sizes;
        const int rep = static_cast<int>(job % reps);
        mse[job] = decay_replicate_mse(config, config.methods[mi], config.n_list[ni], rep);
    });

    DecayStudyResult out;
    for (std::size_t mi = 0; mi < n_methods; ++mi) {
        std::vector<std::pair<double, double>> points;
        for (std::size_t ni = 0; ni < n_sizes; ++ni) {
            DecayCell cell;
            cell.method = config.methods[mi];
            cell.n = config.n_list[ni];
            for (std::size_t r = 0; r < reps; ++r)
                cell.rep_mse.push_back(mse[(mi * n_sizes + ni) * reps + r]);
            cell.mean_mse = detail::mean_of(cell.rep_mse);
            cell.sd_mse = detail::sample_sd(cell.rep_mse, cell.mean_mse);
            points.emplace_back(static_cast<double>(cell.n), cell.mean_mse);
            out.cells.push_back(std::move(cell));
        }
        if (points.size() >= 2)
            out.slopes.emplace_back(config.methods[mi], fit_loglog_slope(points));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Confidence interval coverage study
// ---------------------------------------------------------------------------

struct CoverageStudyConfig {
    std::vector<int> n_list{50, 100, 150, 200};
    Mechanism mechanism;
    double lambda = 1.0;
    std::optional<double> target_snr;
    double noise_sd = 0.0;
    double level = 0.95;
    int replicates = 10;
    int folds = 5;
    std::uint64_t seed = 0;
    NnProtocol protocol;

    void validate() const {
        if (n_list.empty()) throw config_error("coverage: n_list is empty");
        if (!(level > 0.0 && level < 1.0) && level != 0.0)
            throw config_error("coverage: level must lie in [0,1)");
        if (replicates < 1) throw config_error("coverage: replicates must be >= 1");
        if (folds < 2) throw config_error("coverage: folds must be >= 2");
        mechanism.validate();
    }
};

struct CoverageCell {
    int n = 0;
    std::vector<double> rep_estimated;  // adjusted CI with estimated noise SD
    std::vector<double> rep_oracle;     // adjusted CI with the true noise SD
    double mean_estimated = 0.0, sd_estimated = 0.0;
    double mean_oracle = 0.0, sd_oracle = 0.0;
};

struct CoverageStudyResult {
    std::vector<CoverageCell> cells;
};

/// One replicate: split into K random-entry folds; for each held-out fold,
/// tune and fit TS-NN on the rest, widen both interval types by the
/// within-neighborhood SD, and record coverage over the fold's observed
/// entries. Returns (estimated-sd coverage, oracle-sd coverage) averaged over
/// folds.
inline std::pair<double, double> coverage_replicate(const CoverageStudyConfig& config, int n,
                                                    int rep) {
    SimConfig sc;
    sc.n = n;
    sc.m = n;
    sc.lambda = config.lambda;
    sc.noise_sd = config.noise_sd;
    sc.target_snr = config.target_snr;
    sc.mechanism = config.mechanism;
    sc.seed = derive_stream(config.seed, {streams::kData, static_cast<std::uint64_t>(n),
                                          static_cast<std::uint64_t>(rep)});
    Generated gen = generate(sc);
    const double sigma_true = gen.model.noise_sd;

    FoldPlan plan = make_folds(gen.observed, FoldKind::random_entry, config.folds, 0,
                               derive_stream(config.seed, {streams::kFolds, static_cast<std::uint64_t>(n),
                                                           static_cast<std::uint64_t>(rep)}));
    double sum_est = 0.0, sum_ora = 0.0;
    for (int f = 1; f <= config.folds; ++f) {
        ObservedMatrix train = restrict_mask(gen.observed, plan.train_mask(f));
        const std::uint64_t tune_seed =
            derive_stream(config.seed, {streams::kTune, static_cast<std::uint64_t>(n),
                                        static_cast<std::uint64_t>(rep), static_cast<std::uint64_t>(f)});
        MethodRun run = detail::tune_and_complete(train, Method::tsnn, &gen.truth, config.protocol,
                                                  tune_seed, /*final_exclude_target=*/true,
                                                  /*fallback_mean=*/false, /*with_sumsq=*/true);
        const double sigma_hat = estimate_noise_sd(train, run.result).sigma_hat;
        const Grid<double> within = within_sd_grid(run.result);
        IntervalGrid iv_est =
            confidence_intervals(run.result, sigma_hat, SdMode::estimated, config.level, &within);
        IntervalGrid iv_ora =
            confidence_intervals(run.result, sigma_true, SdMode::oracle, config.level, &within);
        const Grid<std::uint8_t> test = plan.test_mask(f);
        sum_est += coverage_rate(iv_est, gen.truth, test);
        sum_ora += coverage_rate(iv_ora, gen.truth, test);
    }
    return {sum_est / config.folds, sum_ora / config.folds};
}

inline CoverageStudyResult run_coverage_study(const CoverageStudyConfig& config,
                                              unsigned threads = 0) {
    config.validate();
    const std::size_t n_sizes = config.n_list.size();
    const std::size_t reps = static_cast<std::size_t>(config.replicates);
    std::vector<std::pair<double, double>> cov(n_sizes * reps);
    parallel_for(cov.size(), threads, [&](std::size_t job) {
        const std::size_t ni = job / reps;
        const int rep = static_cast<int>(job % reps);
        cov[job] = coverage_replicate(config, config.n_list[ni], rep);
    });

    CoverageStudyResult out;
    for (std::size_t ni = 0; ni < n_sizes; ++ni) {
        CoverageCell cell;
        cell.n = config.n_list[ni];
        for (std::size_t r = 0; r < reps; ++r) {
            cell.rep_estimated.push_back(cov[ni * reps + r].first);
            cell.rep_oracle.push_back(cov[ni * reps + r].second);
        }
        cell.mean_estimated = detail::mean_of(cell.rep_estimated);
        cell.sd_estimated = detail::sample_sd(cell.rep_estimated, cell.mean_estimated);
        cell.mean_oracle = detail::mean_of(cell.rep_oracle);
        cell.sd_oracle = detail::sample_sd(cell.rep_oracle, cell.mean_oracle);
        out.cells.push_back(std::move(cell));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Blocked hold-out comparison on externally supplied data
// ---------------------------------------------------------------------------

struct HoldoutConfig {
    std::vector<Method> methods{Method::tsnn, Method::rownn, Method::colnn, Method::drnn,
                                Method::allrow, Method::allcol};
    int folds = 5;
    int holdout_cols = 40;
    std::uint64_t seed = 0;
    NnProtocol protocol{{8.0, 50.0, 8}, {25.0, 85.0, 8}, /*allow_self=*/true, {}, {}};
    double usvt_eta = 2.02;
    SoftImputeSettings softimpute;
};

struct HoldoutResidual {
    Method method;
    int fold;
    int i, j;
    double residual;  // observed minus estimate
};

struct HoldoutMethodSummary {
    Method method;
    long count = 0;
    double q1 = 0.0, median = 0.0, q3 = 0.0;
};

struct HoldoutResult {
    std::vector<HoldoutResidual> residuals;
    std::vector<HoldoutMethodSummary> summaries;
};

inline HoldoutResult run_holdout_comparison(const ObservedMatrix& matrix, const HoldoutConfig& config,
                                            unsigned threads = 0) {
    if (config.methods.empty()) throw config_error("holdout: methods list is empty");
    FoldPlan plan = make_folds(matrix, FoldKind::blocked_rows, config.folds, config.holdout_cols,
                               derive_stream(config.seed, {streams::kFolds}));

    const std::size_t n_methods = config.methods.size();
    const std::size_t n_folds = static_cast<std::size_t>(config.folds);
    std::vector<std::vector<HoldoutResidual>> per_job(n_methods * n_folds);

    parallel_for(per_job.size(), threads, [&](std::size_t job) {
        const Method method = config.methods[job / n_folds];
        const int fold = static_cast<int>(job % n_folds) + 1;
        ObservedMatrix train = restrict_mask(matrix, plan.train_mask(fold));
        Grid<std::uint8_t> test = plan.test_mask(fold);

        CompletionResult result;
        if (method == Method::usvt) {
            result = usvt_complete(train, config.usvt_eta);
        } else if (method == Method::softimpute) {
            Grid<std::uint8_t> eval(matrix.rows(), matrix.cols(), 0);
            for (int i = 0; i < matrix.rows(); ++i)
                for (int j = 0; j < matrix.cols(); ++j)
                    if (test(i, j) && matrix.observed(i, j)) eval(i, j) = 1;
            SoftImputeBest best =
                soft_impute_best(train, config.softimpute.grid, matrix.values, eval,
                                 config.softimpute.max_iter, config.softimpute.tol);
            result = std::move(best.result);
        } else if (method == Method::allrow) {
            result = allrow_complete(train, {true, true});
        } else if (method == Method::allcol) {
            result = allcol_complete(train, {true, true});
        } else {
            const std::uint64_t tune_seed = derive_stream(
                config.seed, {streams::kTune, static_cast<std::uint64_t>(method),
                              static_cast<std::uint64_t>(fold)});
            // held-out protocol: entries may not be their own neighbors
            MethodRun run = detail::tune_and_complete(train, method, nullptr, config.protocol,
                                                      tune_seed, /*final_exclude_target=*/true,
                                                      /*fallback_mean=*/true, /*with_sumsq=*/false);
            result = std::move(run.result);
        }

        const double fallback = observed_mean(train);
        std::vector<HoldoutResidual>& sink = per_job[job];
        for (int i = 0; i < matrix.rows(); ++i)
            for (int j = 0; j < matrix.cols(); ++j) {
                if (!test(i, j) || !matrix.observed(i, j)) continue;
                const double est =
                    result.undefined_mask(i, j) ? fallback : result.theta_hat(i, j);
                sink.push_back({method, fold, i, j, matrix.values(i, j) - est});
            }
    });

    HoldoutResult out;
    for (std::size_t mi = 0; mi < n_methods; ++mi) {
        std::vector<double> pooled;
        for (std::size_t f = 0; f < n_folds; ++f) {
            for (const auto& r : per_job[mi * n_folds + f]) {
                out.residuals.push_back(r);
                pooled.push_back(r.residual);
            }
        }
        HoldoutMethodSummary summary;
        summary.method = config.methods[mi];
        summary.count = static_cast<long>(pooled.size());
        if (!pooled.empty()) {
            std::sort(pooled.begin(), pooled.end());
            summary.q1 = quantile_sorted(pooled, 25.0);
            summary.median = quantile_sorted(pooled, 50.0);
            summary.q3 = quantile_sorted(pooled, 75.0);
        }
        out.summaries.push_back(summary);
    }
    return out;
}

// ---------------------------------------------------------------------------
// JSON config schemas (documented in the README)
// ---------------------------------------------------------------------------

namespace detail {

inline SoftImputeSettings softimpute_from_json(detail::ObjectReader& reader) {
    SoftImputeSettings settings;
    if (reader.has("softimpute")) {
        detail::ObjectReader si(reader.raw("softimpute"), "softimpute");
        const double lo = si.get_or<double>("grid_lo", 1.0);
        const double hi = si.get_or<double>("grid_hi", 12.0);
        const int count = si.get_or<int>("grid_count", 10);
        if (!(lo > 0.0 && hi >= lo)) throw config_error("softimpute: grid must satisfy 0 < lo <= hi");
        if (count < 1) throw config_error("softimpute: grid_count must be >= 1");
        settings.grid = SpectralConfig::default_si_grid(lo, hi, count);
        settings.max_iter = si.get_or<int>("max_iter", 100);
        settings.tol = si.get_or<double>("tol", 1e-4);
        si.finish();
    }
    return settings;
}

inline void read_noise_level(detail::ObjectReader& reader, std::optional<double>& target_snr,
                             double& noise_sd, const char* context) {
    const bool has_snr = reader.has("target_snr");
    const bool has_sd = reader.has("noise_sd");
    if (has_snr == has_sd)
        throw config_error(std::string(context) + ": exactly one of target_snr / noise_sd is required");
    if (has_snr)
        target_snr = reader.require<double>("target_snr");
    else
        noise_sd = reader.require<double>("noise_sd");
}

}  // namespace detail

inline DecayStudyConfig decay_config_from_json(const json& j) {
    detail::ObjectReader reader(j, "decay config");
    DecayStudyConfig config;
    config.n_list = reader.require<std::vector<int>>("n_list");
    config.methods = parse_methods(reader.require<std::vector<std::string>>("methods"));
    config.mechanism = mechanism_from_json(reader.raw("mechanism"), "mechanism");
    config.lambda = reader.require<double>("lambda");
    detail::read_noise_level(reader, config.target_snr, config.noise_sd, "decay config");
    config.replicates = reader.get_or<int>("replicates", 10);
    config.seed = reader.require<std::uint64_t>("seed");
    if (reader.has("grid_two_sided"))
        config.protocol.two_sided = gridspec_from_json(reader.raw("grid_two_sided"), "grid_two_sided");
    if (reader.has("grid_one_sided"))
        config.protocol.one_sided = gridspec_from_json(reader.raw("grid_one_sided"), "grid_one_sided");
    config.protocol.cv_folds = reader.get_or<int>("cv_folds", 5);
    if (config.protocol.cv_folds < 2) throw config_error("decay config: cv_folds must be >= 2");
    config.usvt_eta = reader.get_or<double>("usvt_eta", 2.02);
    config.softimpute = detail::softimpute_from_json(reader);
    reader.finish();
    config.validate();
    return config;
}

inline CoverageStudyConfig coverage_config_from_json(const json& j) {
    detail::ObjectReader reader(j, "coverage config");
    CoverageStudyConfig config;
    config.n_list = reader.require<std::vector<int>>("n_list");
    config.mechanism = mechanism_from_json(reader.raw("mechanism"), "mechanism");
    config.lambda = reader.get_or<double>("lambda", 1.0);
    detail::read_noise_level(reader, config.target_snr, config.noise_sd, "coverage config");
    config.level = reader.get_or<double>("level", 0.95);
    config.replicates = reader.get_or<int>("replicates", 10);
    config.folds = reader.get_or<int>("folds", 5);
    config.seed = reader.require<std::uint64_t>("seed");
    if (reader.has("grid"))
        config.protocol.two_sided = gridspec_from_json(reader.raw("grid"), "grid");
    if (reader.has("cap_row")) config.protocol.cap_row = reader.require<int>("cap_row");
    if (reader.has("cap_col")) config.protocol.cap_col = reader.require<int>("cap_col");
    reader.finish();
    config.validate();
    return config;
}

struct HoldoutFileConfig {
    std::string input_csv;
    bool header = false;
    HoldoutConfig config;
};

inline HoldoutFileConfig holdout_config_from_json(const json& j) {
    detail::ObjectReader reader(j, "holdout config");
    HoldoutFileConfig out;
    out.input_csv = reader.require<std::string>("input_csv");
    out.header = reader.get_or<bool>("header", false);
    out.config.methods = parse_methods(reader.require<std::vector<std::string>>("methods"));
    out.config.folds = reader.get_or<int>("folds", 5);
    out.config.holdout_cols = reader.get_or<int>("holdout_cols", 40);
    out.config.seed = reader.require<std::uint64_t>("seed");
    if (reader.has("grid_two_sided"))
        out.config.protocol.two_sided = gridspec_from_json(reader.raw("grid_two_sided"), "grid_two_sided");
    if (reader.has("grid_one_sided"))
        out.config.protocol.one_sided = gridspec_from_json(reader.raw("grid_one_sided"), "grid_one_sided");
    out.config.usvt_eta = reader.get_or<double>("usvt_eta", 2.02);
    out.config.softimpute = detail::softimpute_from_json(reader);
    reader.finish();
    return out;
}

}  // namespace tsnn
