// Command-line front end: simulate / complete / tune / intervals / study.

#include <chrono>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "tsnn/csv.hpp"
#include "tsnn/experiments.hpp"
#include "tsnn/version.hpp"

namespace {

using namespace tsnn;

class Stopwatch {
public:
    Stopwatch() : start_(std::chrono::steady_clock::now()) {}
    double ms() const {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_)
            .count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

std::string fmt(double x) { return format_double(x); }

// --- simulate ---------------------------------------------------------------

struct SimulateArgs {
    int n = 0, m = 0;
    double lambda = 1.0;
    double noise_sd = -1.0;
    double target_snr = -1.0;
    std::string mechanism = "mcar";
    double p = 0.75;
    double p_dead = 0.2, base = 0.4, bump = 0.2;
    std::uint64_t seed = 0;
    std::string out_prefix;
};

int run_simulate(const SimulateArgs& args) {
    Stopwatch watch;
    SimConfig config;
    config.n = args.n;
    config.m = args.m;
    config.lambda = args.lambda;
    if ((args.noise_sd >= 0.0) == (args.target_snr > 0.0))
        throw usage_error("simulate: give exactly one of --noise-sd / --target-snr");
    if (args.noise_sd >= 0.0)
        config.noise_sd = args.noise_sd;
    else
        config.target_snr = args.target_snr;
    if (args.mechanism == "mcar")
        config.mechanism = Mechanism::mcar(args.p);
    else if (args.mechanism == "mnar")
        config.mechanism = Mechanism::mnar(args.p_dead, args.base, args.bump);
    else
        throw usage_error("simulate: mechanism must be mcar or mnar");
    config.seed = args.seed;

    Generated gen = generate(config);

    const std::string truth_path = args.out_prefix + ".truth.csv";
    const std::string observed_path = args.out_prefix + ".observed.csv";
    const std::string mask_path = args.out_prefix + ".mask.csv";
    const std::string meta_path = args.out_prefix + ".meta.json";
    write_dense_csv(gen.truth.theta, truth_path);
    write_matrix_csv(gen.observed, observed_path);
    write_mask_csv(gen.observed.mask, mask_path);

    json meta;
    meta["n"] = config.n;
    meta["m"] = config.m;
    meta["lambda"] = config.lambda;
    meta["noise_sd"] = gen.model.noise_sd;
    if (gen.model.noise_sd > 0.0) meta["snr"] = snr(gen.truth, gen.model.noise_sd);
    meta["mechanism"] = mechanism_to_json(config.mechanism);
    meta["seed"] = config.seed;
    meta["observed_fraction"] = observed_fraction(gen.observed);
    {
        std::ofstream out(meta_path);
        if (!out) throw io_error("cannot write '" + meta_path + "'");
        out << meta.dump(2) << '\n';
    }

    RunManifest manifest;
    manifest.command = "simulate";
    manifest.flags = {{"n", std::to_string(args.n)},
                      {"m", std::to_string(args.m)},
                      {"lambda", fmt(args.lambda)},
                      {"mechanism", args.mechanism},
                      {"noise_sd", fmt(gen.model.noise_sd)}};
    manifest.seed = args.seed;
    manifest.outputs = {truth_path, observed_path, mask_path, meta_path};
    manifest.duration_ms = watch.ms();
    write_manifest(manifest, args.out_prefix + ".manifest.json");
    return 0;
}

// --- complete ----------------------------------------------------------------

struct CompleteArgs {
    std::string input;
    bool header = false;
    std::string method = "tsnn";
    double eta_row_sq = 0.0, eta_col_sq = 0.0;
    int cap_row = 0, cap_col = 0;  // 0 = no cap
    bool no_self = false;
    bool exclude_target = false;
    bool fallback_mean = false;
    double noise_var = -1.0;
    std::uint64_t seed = 0;
    std::string output;
    std::string counts;
    std::string dump_row_distances, dump_col_distances;
};

int run_complete(const CompleteArgs& args) {
    Stopwatch watch;
    ObservedMatrix matrix = read_matrix_csv(args.input, args.header);
    {
        auto violations = validate(matrix);
        if (!violations.empty()) throw io_error("invalid input: " + violations.front());
    }
    const Method method = parse_method(args.method);
    if (method == Method::otsnn || method == Method::usvt || method == Method::softimpute)
        throw usage_error("complete: method must be one of tsnn,rownn,colnn,drnn,allrow,allcol");
    std::optional<double> noise_var;
    if (args.noise_var >= 0.0) noise_var = args.noise_var;

    Radii radii;
    radii.eta_row_sq = args.eta_row_sq;
    radii.eta_col_sq = args.eta_col_sq;
    if (args.cap_row > 0) radii.cap_row = args.cap_row;
    if (args.cap_col > 0) radii.cap_col = args.cap_col;
    radii.allow_self_neighbor = !args.no_self;
    radii.validate();

    DistanceTable row_table, col_table;
    const bool needs_rows = method == Method::tsnn || method == Method::drnn || method == Method::rownn;
    const bool needs_cols = method == Method::tsnn || method == Method::drnn || method == Method::colnn;
    if (needs_rows || !args.dump_row_distances.empty())
        row_table = estimated_row_distances(matrix, noise_var);
    if (needs_cols || !args.dump_col_distances.empty())
        col_table = estimated_col_distances(matrix, noise_var);
    if (!args.dump_row_distances.empty()) write_distance_csv(row_table, args.dump_row_distances);
    if (!args.dump_col_distances.empty()) write_distance_csv(col_table, args.dump_col_distances);

    CompletionResult result;
    if (method == Method::tsnn) {
        CompleteOptions opts{radii, args.exclude_target, args.fallback_mean, false, args.seed};
        result = tsnn_complete(matrix, row_table, col_table, opts);
    } else if (method == Method::drnn) {
        CompleteOptions opts{radii, args.exclude_target, args.fallback_mean, false, args.seed};
        result = drnn_complete(matrix, row_table, col_table, opts);
    } else if (method == Method::rownn || method == Method::colnn) {
        OneSidedOptions opts;
        opts.eta_sq = method == Method::rownn ? radii.eta_row_sq : radii.eta_col_sq;
        opts.cap = method == Method::rownn ? radii.cap_row : radii.cap_col;
        opts.allow_self = radii.allow_self_neighbor;
        opts.exclude_target = args.exclude_target;
        opts.fallback_mean = args.fallback_mean;
        opts.seed = args.seed;
        result = method == Method::rownn ? rownn_complete(matrix, row_table, opts)
                                         : colnn_complete(matrix, col_table, opts);
    } else {
        AllNeighborOptions opts{args.exclude_target, args.fallback_mean};
        result = method == Method::allrow ? allrow_complete(matrix, opts) : allcol_complete(matrix, opts);
    }

    const std::string counts_path = args.counts.empty() ? args.output + ".counts.csv" : args.counts;
    write_result_csv(result, args.output);
    write_counts_csv(result, counts_path);

    RunManifest manifest;
    manifest.command = "complete";
    manifest.flags = {{"method", args.method},
                      {"eta_row_sq", fmt(args.eta_row_sq)},
                      {"eta_col_sq", fmt(args.eta_col_sq)},
                      {"cap_row", std::to_string(args.cap_row)},
                      {"cap_col", std::to_string(args.cap_col)},
                      {"no_self", args.no_self ? "true" : "false"},
                      {"exclude_target", args.exclude_target ? "true" : "false"},
                      {"fallback_mean", args.fallback_mean ? "true" : "false"}};
    if (noise_var) manifest.flags["noise_var"] = fmt(*noise_var);
    manifest.seed = args.seed;
    manifest.inputs = {args.input};
    manifest.outputs = {args.output, counts_path};
    manifest.duration_ms = watch.ms();
    write_manifest(manifest, args.output + ".manifest.json");
    return 0;
}

// --- tune ---------------------------------------------------------------------

struct TuneArgs {
    std::string input;
    bool header = false;
    std::string method = "tsnn";
    int folds = 5;
    std::string grid_pcts;  // lo:hi:t
    bool blocked = false;
    int holdout_cols = 40;
    std::uint64_t seed = 0;
    std::string output;
};

GridSpec parse_grid_pcts(const std::string& text) {
    GridSpec spec;
    std::istringstream in(text);
    std::string lo, hi, t;
    if (!std::getline(in, lo, ':') || !std::getline(in, hi, ':') || !std::getline(in, t))
        throw usage_error("--grid-pcts expects lo:hi:t");
    try {
        spec.lo = std::stod(lo);
        spec.hi = std::stod(hi);
        spec.count = std::stoi(t);
    } catch (const std::exception&) {
        throw usage_error("--grid-pcts expects numeric lo:hi:t");
    }
    if (!(spec.lo > 0.0 && spec.hi < 100.0 && spec.lo <= spec.hi && spec.count >= 1))
        throw usage_error("--grid-pcts out of range");
    return spec;
}

int run_tune(const TuneArgs& args) {
    Stopwatch watch;
    ObservedMatrix matrix = read_matrix_csv(args.input, args.header);
    const Method method = parse_method(args.method);
    if (!(method == Method::tsnn || method == Method::rownn || method == Method::colnn ||
          method == Method::drnn))
        throw usage_error("tune: method must be one of tsnn,rownn,colnn,drnn");

    GridSpec spec;
    if (!args.grid_pcts.empty())
        spec = parse_grid_pcts(args.grid_pcts);
    else if (method == Method::rownn || method == Method::colnn)
        spec = GridSpec{1.5, 30.0, 8};
    else
        spec = GridSpec{1.5, 10.0, 8};
    const std::vector<double> percentiles = evenly_spaced_percentiles(spec.lo, spec.hi, spec.count);

    TuneOptions topts;
    topts.seed = args.seed;

    FoldPlan plan = make_folds(matrix,
                               args.blocked ? FoldKind::blocked_rows : FoldKind::random_entry,
                               args.folds, args.blocked ? args.holdout_cols : 0, args.seed);
    TuneResult cv = cv_tune(matrix, method, percentiles, plan, topts);

    // held-out error of the chosen radii, fold by fold
    json folds = json::array();
    double err_sum = 0.0;
    int folds_scored = 0;
    for (int f = 1; f <= args.folds; ++f) {
        double err;
        try {
            err = test_error(matrix, method, cv.radii, plan, f, topts);
        } catch (const Error&) {
            continue;  // fold without observed test entries
        }
        err_sum += err;
        ++folds_scored;
        folds.push_back(json{{"fold", f}, {"test_error", err}});
    }

    json out;
    out["method"] = args.method;
    out["chosen"] = {{"eta_row_sq", cv.radii.eta_row_sq},
                     {"eta_col_sq", cv.radii.eta_col_sq},
                     {"cv_score", cv.best_score}};
    out["grid"] = {{"percentiles", percentiles}};
    json table = json::array();
    for (int r = 0; r < cv.cv_table.rows(); ++r) {
        json row = json::array();
        for (int c = 0; c < cv.cv_table.cols(); ++c) row.push_back(cv.cv_table(r, c));
        table.push_back(row);
    }
    out["cv_table"] = table;
    out["folds"] = folds;
    if (folds_scored > 0) out["mean_test_error"] = err_sum / folds_scored;
    {
        std::ofstream os(args.output);
        if (!os) throw io_error("cannot write '" + args.output + "'");
        os << out.dump(2) << '\n';
    }

    RunManifest manifest;
    manifest.command = "tune";
    manifest.flags = {{"method", args.method},
                      {"folds", std::to_string(args.folds)},
                      {"grid_pcts", args.grid_pcts.empty() ? "default" : args.grid_pcts},
                      {"blocked", args.blocked ? "true" : "false"},
                      {"holdout_cols", std::to_string(args.holdout_cols)}};
    manifest.seed = args.seed;
    manifest.inputs = {args.input};
    manifest.outputs = {args.output};
    manifest.duration_ms = watch.ms();
    write_manifest(manifest, args.output + ".manifest.json");
    return 0;
}

// --- intervals ------------------------------------------------------------------

struct IntervalsArgs {
    std::string input;
    bool header = false;
    double eta_row_sq = 0.0, eta_col_sq = 0.0;
    int cap_row = 0, cap_col = 0;
    bool no_self = false;
    double level = 0.95;
    bool adjusted = false;
    double noise_sd = -1.0;  // <0: estimate from residuals
    std::uint64_t seed = 0;
    std::string output;
};

int run_intervals(const IntervalsArgs& args) {
    Stopwatch watch;
    ObservedMatrix matrix = read_matrix_csv(args.input, args.header);
    Radii radii;
    radii.eta_row_sq = args.eta_row_sq;
    radii.eta_col_sq = args.eta_col_sq;
    if (args.cap_row > 0) radii.cap_row = args.cap_row;
    if (args.cap_col > 0) radii.cap_col = args.cap_col;
    radii.allow_self_neighbor = !args.no_self;
    radii.validate();

    CompleteOptions opts;
    opts.radii = radii;
    opts.exclude_target = true;  // an entry never certifies itself
    opts.with_neighbor_sumsq = args.adjusted;
    opts.seed = args.seed;
    CompletionResult result = tsnn_complete(matrix, opts);

    double sd;
    SdMode mode;
    if (args.noise_sd >= 0.0) {
        sd = args.noise_sd;
        mode = SdMode::oracle;
    } else {
        sd = estimate_noise_sd(matrix, result).sigma_hat;
        mode = SdMode::estimated;
    }
    std::optional<Grid<double>> within;
    if (args.adjusted) within = within_sd_grid(result);
    IntervalGrid intervals =
        confidence_intervals(result, sd, mode, args.level, within ? &*within : nullptr);

    std::vector<std::vector<std::string>> rows;
    for (int i = 0; i < matrix.rows(); ++i)
        for (int j = 0; j < matrix.cols(); ++j) {
            if (!intervals.defined(i, j)) continue;
            rows.push_back({std::to_string(i), std::to_string(j), fmt(result.theta_hat(i, j)),
                            fmt(intervals.lower(i, j)), fmt(intervals.upper(i, j)),
                            std::to_string(result.neighbor_count(i, j))});
        }
    write_table_csv(args.output, {"i", "j", "theta_hat", "lower", "upper", "count"}, rows);

    RunManifest manifest;
    manifest.command = "intervals";
    manifest.flags = {{"eta_row_sq", fmt(args.eta_row_sq)},
                      {"eta_col_sq", fmt(args.eta_col_sq)},
                      {"level", fmt(args.level)},
                      {"adjusted", args.adjusted ? "true" : "false"},
                      {"sd_mode", mode == SdMode::oracle ? "oracle" : "estimated"},
                      {"noise_sd", fmt(sd)}};
    manifest.seed = args.seed;
    manifest.inputs = {args.input};
    manifest.outputs = {args.output};
    manifest.duration_ms = watch.ms();
    write_manifest(manifest, args.output + ".manifest.json");
    return 0;
}

// --- study ----------------------------------------------------------------------

struct StudyArgs {
    std::string config_path;
    std::string out_dir;
    unsigned threads = 0;
};

void finish_study_manifest(const std::string& kind, const StudyArgs& args, std::uint64_t seed,
                           std::vector<std::string> outputs, double ms,
                           std::vector<std::string> inputs = {}) {
    RunManifest manifest;
    manifest.command = "study " + kind;
    manifest.flags = {{"config", args.config_path}, {"threads", std::to_string(args.threads)}};
    manifest.seed = seed;
    inputs.insert(inputs.begin(), args.config_path);
    manifest.inputs = std::move(inputs);
    manifest.outputs = std::move(outputs);
    manifest.duration_ms = ms;
    write_manifest(manifest, args.out_dir + "/manifest.json");
}

int run_study_decay(const StudyArgs& args) {
    Stopwatch watch;
    DecayStudyConfig config = decay_config_from_json(detail::load_json(args.config_path));
    std::filesystem::create_directories(args.out_dir);
    DecayStudyResult result = run_decay_study(config, args.threads);

    std::vector<std::vector<std::string>> results_rows, long_rows, slope_rows;
    for (const DecayCell& cell : result.cells) {
        results_rows.push_back({method_name(cell.method), std::to_string(cell.n),
                                fmt(cell.mean_mse), fmt(cell.sd_mse)});
        for (std::size_t r = 0; r < cell.rep_mse.size(); ++r)
            long_rows.push_back({method_name(cell.method), std::to_string(cell.n),
                                 std::to_string(r), fmt(cell.rep_mse[r])});
    }
    for (const auto& [method, fit] : result.slopes)
        slope_rows.push_back(
            {method_name(method), fmt(fit.slope), fmt(fit.intercept), fmt(fit.r_squared)});

    const std::string results_path = args.out_dir + "/results.csv";
    const std::string slopes_path = args.out_dir + "/slopes.csv";
    const std::string long_path = args.out_dir + "/long.csv";
    write_table_csv(results_path, {"method", "n", "mean_mse", "sd_mse"}, results_rows);
    write_table_csv(slopes_path, {"method", "slope", "intercept", "r_squared"}, slope_rows);
    write_table_csv(long_path, {"method", "n", "replicate", "mse"}, long_rows);
    finish_study_manifest("decay", args, config.seed, {results_path, slopes_path, long_path},
                          watch.ms());
    return 0;
}

int run_study_coverage(const StudyArgs& args) {
    Stopwatch watch;
    CoverageStudyConfig config = coverage_config_from_json(detail::load_json(args.config_path));
    std::filesystem::create_directories(args.out_dir);
    CoverageStudyResult result = run_coverage_study(config, args.threads);

    std::vector<std::vector<std::string>> coverage_rows, long_rows;
    for (const CoverageCell& cell : result.cells) {
        coverage_rows.push_back({std::to_string(cell.n), "estimated", fmt(cell.mean_estimated),
                                 fmt(cell.sd_estimated)});
        coverage_rows.push_back(
            {std::to_string(cell.n), "oracle", fmt(cell.mean_oracle), fmt(cell.sd_oracle)});
        for (std::size_t r = 0; r < cell.rep_estimated.size(); ++r) {
            long_rows.push_back({std::to_string(cell.n), "estimated", std::to_string(r),
                                 fmt(cell.rep_estimated[r])});
            long_rows.push_back(
                {std::to_string(cell.n), "oracle", std::to_string(r), fmt(cell.rep_oracle[r])});
        }
    }
    const std::string coverage_path = args.out_dir + "/coverage.csv";
    const std::string long_path = args.out_dir + "/long.csv";
    write_table_csv(coverage_path, {"n", "ci_type", "mean_coverage", "sd_coverage"}, coverage_rows);
    write_table_csv(long_path, {"n", "ci_type", "replicate", "coverage"}, long_rows);
    finish_study_manifest("coverage", args, config.seed, {coverage_path, long_path}, watch.ms());
    return 0;
}

int run_study_holdout(const StudyArgs& args) {
    Stopwatch watch;
    HoldoutFileConfig file_config = holdout_config_from_json(detail::load_json(args.config_path));
    ObservedMatrix matrix = read_matrix_csv(file_config.input_csv, file_config.header);
    std::filesystem::create_directories(args.out_dir);
    HoldoutResult result = run_holdout_comparison(matrix, file_config.config, args.threads);

    std::vector<std::vector<std::string>> summary_rows, residual_rows;
    for (const HoldoutMethodSummary& s : result.summaries)
        summary_rows.push_back({method_name(s.method), std::to_string(s.count), fmt(s.q1),
                                fmt(s.median), fmt(s.q3)});
    for (const HoldoutResidual& r : result.residuals)
        residual_rows.push_back({method_name(r.method), std::to_string(r.fold), std::to_string(r.i),
                                 std::to_string(r.j), fmt(r.residual)});
    const std::string summary_path = args.out_dir + "/summary.csv";
    const std::string residuals_path = args.out_dir + "/residuals.csv";
    write_table_csv(summary_path, {"method", "count", "q1", "median", "q3"}, summary_rows);
    write_table_csv(residuals_path, {"method", "fold", "i", "j", "residual"}, residual_rows);
    finish_study_manifest("holdout", args, file_config.config.seed, {summary_path, residuals_path},
                          watch.ms(), {file_config.input_csv});
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Two-sided nearest neighbor matrix completion"};
    app.set_version_flag("--version", std::string("tsnn ") + tsnn::kVersion + " (config schema " +
                                          std::to_string(tsnn::kConfigSchemaVersion) + ")");
    app.require_subcommand(1);

    SimulateArgs sim;
    CLI::App* simulate = app.add_subcommand("simulate", "Draw a synthetic instance");
    simulate->add_option("--n", sim.n, "Rows")->required();
    simulate->add_option("--m", sim.m, "Columns")->required();
    simulate->add_option("--lambda", sim.lambda, "Smoothness exponent in (0,1]");
    simulate->add_option("--noise-sd", sim.noise_sd, "Noise SD");
    simulate->add_option("--target-snr", sim.target_snr, "Solve the noise SD for this SNR");
    simulate->add_option("--mechanism", sim.mechanism, "mcar or mnar");
    simulate->add_option("--p", sim.p, "MCAR observation probability");
    simulate->add_option("--p-dead", sim.p_dead, "MNAR dead-cell probability");
    simulate->add_option("--base", sim.base, "MNAR base observation probability");
    simulate->add_option("--bump", sim.bump, "MNAR bump for positive signal");
    simulate->add_option("--seed", sim.seed, "RNG seed")->required();
    simulate->add_option("--out-prefix", sim.out_prefix, "Output path prefix")->required();

    CompleteArgs comp;
    CLI::App* complete = app.add_subcommand("complete", "Complete a matrix from CSV");
    complete->add_option("--input", comp.input, "Input CSV")->required();
    complete->add_flag("--header", comp.header, "Skip one header line");
    complete->add_option("--method", comp.method, "tsnn|rownn|colnn|drnn|allrow|allcol")->required();
    complete->add_option("--eta-row-sq", comp.eta_row_sq, "Row radius (squared)");
    complete->add_option("--eta-col-sq", comp.eta_col_sq, "Column radius (squared)");
    complete->add_option("--cap-row", comp.cap_row, "Row neighborhood cap");
    complete->add_option("--cap-col", comp.cap_col, "Column neighborhood cap");
    complete->add_flag("--no-self", comp.no_self, "Exclude indices from their own neighborhoods");
    complete->add_flag("--exclude-target", comp.exclude_target,
                       "Remove the target entry from its own estimate");
    complete->add_flag("--fallback-mean", comp.fallback_mean,
                       "Fill undefined entries with the observed mean");
    complete->add_option("--noise-var", comp.noise_var, "De-bias distances by 2*noise_var");
    complete->add_option("--seed", comp.seed, "Seed for cap subsampling");
    complete->add_option("--output", comp.output, "Output CSV for theta_hat")->required();
    complete->add_option("--counts", comp.counts, "Sidecar CSV for neighbor counts");
    complete->add_option("--dump-row-distances", comp.dump_row_distances, "Debug CSV of row distances");
    complete->add_option("--dump-col-distances", comp.dump_col_distances, "Debug CSV of column distances");

    TuneArgs tun;
    CLI::App* tune_cmd = app.add_subcommand("tune", "Cross-validated radius tuning");
    tune_cmd->add_option("--input", tun.input, "Input CSV")->required();
    tune_cmd->add_flag("--header", tun.header, "Skip one header line");
    tune_cmd->add_option("--method", tun.method, "tsnn|rownn|colnn|drnn");
    tune_cmd->add_option("--folds", tun.folds, "Fold count");
    tune_cmd->add_option("--grid-pcts", tun.grid_pcts, "Percentile grid lo:hi:t");
    tune_cmd->add_flag("--blocked", tun.blocked, "Blocked row folds with trailing-column holdout");
    tune_cmd->add_option("--holdout-cols", tun.holdout_cols, "Held-out trailing columns per fold");
    tune_cmd->add_option("--seed", tun.seed, "RNG seed")->required();
    tune_cmd->add_option("--output", tun.output, "Output JSON")->required();

    IntervalsArgs iv;
    CLI::App* intervals = app.add_subcommand("intervals", "Per-entry confidence intervals");
    intervals->add_option("--input", iv.input, "Input CSV")->required();
    intervals->add_flag("--header", iv.header, "Skip one header line");
    intervals->add_option("--eta-row-sq", iv.eta_row_sq, "Row radius (squared)")->required();
    intervals->add_option("--eta-col-sq", iv.eta_col_sq, "Column radius (squared)")->required();
    intervals->add_option("--cap-row", iv.cap_row, "Row neighborhood cap");
    intervals->add_option("--cap-col", iv.cap_col, "Column neighborhood cap");
    intervals->add_flag("--no-self", iv.no_self, "Exclude indices from their own neighborhoods");
    intervals->add_option("--level", iv.level, "Coverage level (default 0.95)");
    intervals->add_flag("--adjusted", iv.adjusted, "Add the within-neighborhood SD");
    intervals->add_option("--noise-sd", iv.noise_sd, "Known noise SD (default: estimated)");
    intervals->add_option("--seed", iv.seed, "Seed for cap subsampling");
    intervals->add_option("--output", iv.output, "Output CSV")->required();

    StudyArgs study;
    CLI::App* study_cmd = app.add_subcommand("study", "Experiment drivers");
    study_cmd->require_subcommand(1);
    CLI::App* decay = study_cmd->add_subcommand("decay", "MSE decay study");
    CLI::App* coverage = study_cmd->add_subcommand("coverage", "CI coverage study");
    CLI::App* holdout = study_cmd->add_subcommand("holdout", "Blocked hold-out comparison");
    for (CLI::App* sub : {decay, coverage, holdout}) {
        sub->add_option("--config", study.config_path, "JSON config")->required();
        sub->add_option("--out-dir", study.out_dir, "Output directory")->required();
        sub->add_option("--threads", study.threads, "Worker thread cap (0 = hardware)");
    }

    try {
        app.parse(argc, argv);
        if (*simulate) return run_simulate(sim);
        if (*complete) return run_complete(comp);
        if (*tune_cmd) return run_tune(tun);
        if (*intervals) return run_intervals(iv);
        if (*decay) return run_study_decay(study);
        if (*coverage) return run_study_coverage(study);
        if (*holdout) return run_study_holdout(study);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help / --version
        std::cerr << "error:usage: " << e.what() << '\n';
        return 2;
    } catch (const tsnn::Error& e) {
        std::cerr << "error:" << tsnn::category_name(e.category()) << ": " << e.what() << '\n';
        switch (e.category()) {
            case tsnn::ErrorCategory::usage: return 2;
            case tsnn::ErrorCategory::config: return 3;
            case tsnn::ErrorCategory::io: return 4;
            case tsnn::ErrorCategory::compute: return 5;
        }
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error:compute: " << e.what() << '\n';
        return 5;
    }
    return 0;
}
