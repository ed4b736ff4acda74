// Acceptance suite: one pass/fail line per criterion. Exit code is the
// number of failed criteria. Heavy studies run threaded; every result is
// deterministic in the configured seeds.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>

#include "../naive_reference.hpp"
#include "tsnn/csv.hpp"
#include "tsnn/experiments.hpp"

using namespace tsnn;

namespace {

unsigned g_threads = 0;
std::string g_cli_path;

struct Criterion {
    int id;
    std::string name;
    std::function<bool(std::ostream&)> run;
};

bool close_rel(double a, double b, double tol = 1e-12) { return naive::close(a, b, tol); }

// --- criterion 1: oracle equivalence ---------------------------------------

bool same_as_naive(const CompletionResult& got, const naive::NaiveResult& want, std::ostream& log,
                   const char* tag) {
    for (int i = 0; i < got.theta_hat.rows(); ++i)
        for (int j = 0; j < got.theta_hat.cols(); ++j) {
            if (got.undefined_mask(i, j) != want.undefined(i, j) ||
                got.neighbor_count(i, j) != want.count(i, j) ||
                (!want.undefined(i, j) && !close_rel(got.theta_hat(i, j), want.theta(i, j)))) {
                log << tag << " mismatch at (" << i << "," << j << ")";
                return false;
            }
        }
    return true;
}

bool criterion_oracle_equivalence(std::ostream& log) {
    Rng rng(0xACCE5501);
    for (int trial = 0; trial < 200; ++trial) {
        ObservedMatrix x = naive::random_matrix(rng, 5);
        const double er = rng.uniform(0.0, 30.0);
        const double ec = rng.uniform(0.0, 30.0);
        const bool allow_self = rng.bernoulli(0.75);
        const bool exclude = rng.bernoulli(0.5);
        std::optional<double> nv;
        if (rng.bernoulli(0.25)) nv = rng.uniform(0.0, 1.5);

        CompleteOptions copts;
        copts.radii.eta_row_sq = er;
        copts.radii.eta_col_sq = ec;
        copts.radii.allow_self_neighbor = allow_self;
        copts.exclude_target = exclude;
        OneSidedOptions oopts;
        oopts.allow_self = allow_self;
        oopts.exclude_target = exclude;

        if (!same_as_naive(tsnn_complete(x, copts, nv), naive::tsnn(x, er, ec, allow_self, exclude, nv),
                           log, "tsnn"))
            return false;
        if (!same_as_naive(drnn_complete(x, copts, nv), naive::drnn(x, er, ec, allow_self, exclude, nv),
                           log, "drnn"))
            return false;
        oopts.eta_sq = er;
        if (!same_as_naive(rownn_complete(x, oopts, nv), naive::rownn(x, er, allow_self, exclude, nv),
                           log, "rownn"))
            return false;
        oopts.eta_sq = ec;
        if (!same_as_naive(colnn_complete(x, oopts, nv), naive::colnn(x, ec, allow_self, exclude, nv),
                           log, "colnn"))
            return false;
    }
    log << "200 instances, 4 estimators, exact agreement";
    return true;
}

// --- criterion 2: reduction laws --------------------------------------------

double min_finite_offdiag(const DistanceTable& t) {
    double best = std::numeric_limits<double>::infinity();
    for (int a = 0; a < t.size(); ++a)
        for (int b = a + 1; b < t.size(); ++b)
            if (std::isfinite(t.d_sq(a, b))) best = std::min(best, t.d_sq(a, b));
    return best;
}

bool entrywise_equal(const CompletionResult& a, const CompletionResult& b) {
    for (int i = 0; i < a.theta_hat.rows(); ++i)
        for (int j = 0; j < a.theta_hat.cols(); ++j) {
            if (a.undefined_mask(i, j) != b.undefined_mask(i, j)) return false;
            if (a.neighbor_count(i, j) != b.neighbor_count(i, j)) return false;
            if (!a.undefined_mask(i, j) && !close_rel(a.theta_hat(i, j), b.theta_hat(i, j)))
                return false;
        }
    return true;
}

bool criterion_reduction_laws(std::ostream& log) {
    Rng rng(0xACCE5502);
    int done = 0;
    while (done < 50) {
        ObservedMatrix x = naive::random_matrix(rng, 6);
        DistanceTable rows = estimated_row_distances(x);
        DistanceTable cols = estimated_col_distances(x);
        const double min_col = min_finite_offdiag(cols);
        const double min_row = min_finite_offdiag(rows);
        const double tiny_col = std::isfinite(min_col) ? min_col / 2.0 : 1.0;
        const double tiny_row = std::isfinite(min_row) ? min_row / 2.0 : 1.0;
        if (!(tiny_col > 0.0) || !(tiny_row > 0.0)) continue;  // duplicates; redraw
        ++done;

        const double er = rng.uniform(0.0, 20.0);
        const double ec = rng.uniform(0.0, 20.0);

        CompleteOptions copts;
        copts.radii.eta_row_sq = er;
        copts.radii.eta_col_sq = tiny_col;
        OneSidedOptions oopts;
        oopts.eta_sq = er;
        if (!entrywise_equal(tsnn_complete(x, rows, cols, copts), rownn_complete(x, rows, oopts))) {
            log << "row reduction failed on instance " << done;
            return false;
        }
        copts.radii.eta_row_sq = tiny_row;
        copts.radii.eta_col_sq = ec;
        oopts.eta_sq = ec;
        if (!entrywise_equal(tsnn_complete(x, rows, cols, copts), colnn_complete(x, cols, oopts))) {
            log << "column reduction failed on instance " << done;
            return false;
        }
    }
    log << "50 instances, both reductions exact";
    return true;
}

// --- criteria 3 & 4: decay slopes --------------------------------------------

bool slope_band(Mechanism mechanism, const std::vector<std::pair<double, double>>& cases,
                std::uint64_t seed, std::ostream& log) {
    bool ok = true;
    for (const auto& [lambda, reported] : cases) {
        DecayStudyConfig config;
        config.n_list = {50, 100, 150, 200, 250, 300};
        config.methods = {Method::tsnn};
        config.mechanism = mechanism;
        config.lambda = lambda;
        config.target_snr = 31.0;
        config.replicates = 10;
        config.seed = seed + static_cast<std::uint64_t>(lambda * 1000);
        DecayStudyResult result = run_decay_study(config, g_threads);
        const double slope = result.slopes.at(0).second.slope;
        const bool pass = std::abs(slope - reported) <= 0.2;
        log << "lambda=" << lambda << " slope=" << slope << " (reported " << reported << ") ";
        ok = ok && pass;
    }
    return ok;
}

bool criterion_mcar_slopes(std::ostream& log) {
    return slope_band(Mechanism::mcar(0.75),
                      {{0.5, -0.79}, {0.75, -0.93}, {1.0, -1.05}}, 0xDECA7101, log);
}

bool criterion_mnar_slopes(std::ostream& log) {
    return slope_band(Mechanism::mnar(), {{0.6, -0.79}, {0.8, -0.87}, {1.0, -1.0}}, 0xDECA7102, log);
}

// --- criterion 5: ordering at moderate SNR -----------------------------------

bool criterion_ordering(std::ostream& log) {
    DecayStudyConfig config;
    config.n_list = {100, 150, 200, 250, 300};
    config.methods = {Method::tsnn,  Method::rownn, Method::colnn,      Method::drnn,
                      Method::usvt,  Method::allrow, Method::allcol,     Method::softimpute};
    config.mechanism = Mechanism::mnar();
    config.lambda = 0.75;
    config.target_snr = std::sqrt(2.0);
    config.replicates = 10;
    config.seed = 0xDECA7103;
    DecayStudyResult result = run_decay_study(config, g_threads);

    auto mean_of = [&](Method m, int n) {
        for (const DecayCell& cell : result.cells)
            if (cell.method == m && cell.n == n) return cell.mean_mse;
        throw compute_error("cell not found");
    };
    bool ok = true;
    for (int n : config.n_list) {
        const double ts = mean_of(Method::tsnn, n);
        for (Method m : config.methods) {
            if (m == Method::tsnn) continue;
            const double other = mean_of(m, n);
            if (!(ts <= other)) {
                log << "tsnn=" << ts << " > " << method_name(m) << "=" << other << " at n=" << n
                    << "; ";
                ok = false;
            }
        }
    }
    if (ok) log << "tsnn has the smallest mean MSE at every n in {100..300}";
    return ok;
}

// --- criterion 6: coverage ----------------------------------------------------

bool criterion_coverage(std::ostream& log) {
    bool ok = true;

    CoverageStudyConfig mcar;
    mcar.n_list = {50, 100, 150, 200};
    mcar.mechanism = Mechanism::mcar(0.75);
    mcar.lambda = 1.0;
    mcar.target_snr = std::sqrt(2.0);
    mcar.replicates = 10;
    mcar.seed = 0xC0BE7201;
    CoverageStudyResult mc = run_coverage_study(mcar, g_threads);
    for (const CoverageCell& cell : mc.cells) {
        log << "mcar n=" << cell.n << " est=" << cell.mean_estimated
            << " ora=" << cell.mean_oracle << "; ";
        if (cell.n >= 100 && !(cell.mean_estimated >= 0.90)) ok = false;
        if (cell.n >= 50 && !(cell.mean_oracle >= 0.90)) ok = false;
    }

    CoverageStudyConfig mnar = mcar;
    mnar.n_list = {150, 200};
    mnar.mechanism = Mechanism::mnar();
    mnar.seed = 0xC0BE7202;
    CoverageStudyResult mn = run_coverage_study(mnar, g_threads);
    for (const CoverageCell& cell : mn.cells) {
        log << "mnar n=" << cell.n << " est=" << cell.mean_estimated
            << " ora=" << cell.mean_oracle << "; ";
        if (cell.n >= 150 && !(cell.mean_estimated >= 0.90 && cell.mean_oracle >= 0.90)) ok = false;
    }
    return ok;
}

// --- criterion 7: CLT shape check ----------------------------------------------

bool criterion_clt(std::ostream& log) {
    SimConfig sc;
    sc.n = 300;
    sc.m = 300;
    sc.lambda = 1.0;
    sc.noise_sd = 1.0;  // known sigma
    sc.mechanism = Mechanism::mcar(1.0);
    sc.seed = 0xC17C0de;
    Generated gen = generate(sc);

    DistanceTable rows = oracle_row_distances(gen.truth);
    DistanceTable cols = oracle_col_distances(gen.truth);
    CompleteOptions opts;
    opts.radii.eta_row_sq = eta_grid_from_percentiles(rows, {3.5}).front();
    opts.radii.eta_col_sq = eta_grid_from_percentiles(cols, {3.5}).front();
    opts.radii.cap_row = 4;  // enforces the neighbor-count bound
    opts.radii.cap_col = 4;
    opts.exclude_target = true;
    opts.seed = 0xC17C0de;
    CompletionResult completion = tsnn_complete(gen.observed, rows, cols, opts);

    // standardized errors over a held-out random subset of entries
    std::vector<double> z;
    Rng pick = stream_rng(sc.seed, {streams::kEval});
    for (int i = 0; i < sc.n; ++i)
        for (int j = 0; j < sc.m; ++j) {
            if (!pick.bernoulli(2000.0 / (300.0 * 300.0))) continue;
            if (completion.undefined_mask(i, j)) continue;
            const double count = completion.neighbor_count(i, j);
            z.push_back(std::sqrt(count) * (completion.theta_hat(i, j) - gen.truth.theta(i, j)) /
                        sc.noise_sd);
        }
    std::sort(z.begin(), z.end());
    const std::size_t n = z.size();
    double d_stat = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double phi = 0.5 * std::erfc(-z[k] / std::sqrt(2.0));
        d_stat = std::max(d_stat, std::abs(phi - static_cast<double>(k) / n));
        d_stat = std::max(d_stat, std::abs(static_cast<double>(k + 1) / n - phi));
    }
    const double root_n = std::sqrt(static_cast<double>(n));
    const double critical = 1.628 / (root_n + 0.12 + 0.11 / root_n);  // alpha = 0.01
    log << "KS D=" << d_stat << " critical=" << critical << " over " << n << " held-out entries";
    return d_stat <= critical;
}

// --- criterion 8: distance and neighborhood property suite ----------------------

bool criterion_properties(std::ostream& log) {
    Rng rng(0xACCE5508);
    for (int trial = 0; trial < 100; ++trial) {
        ObservedMatrix x = naive::random_matrix(rng, 7);
        const double s = rng.uniform(0.01, 2.0);
        DistanceTable plain = estimated_row_distances(x);
        DistanceTable biased = estimated_row_distances(x, s);
        DistanceTable cols = estimated_col_distances(x);
        DistanceTable cols_t = estimated_row_distances(transpose_observed(x));

        for (int a = 0; a < plain.size(); ++a)
            for (int b = 0; b < plain.size(); ++b) {
                if (plain.d_sq(a, b) != plain.d_sq(b, a)) {
                    log << "symmetry failed";
                    return false;
                }
                if (a == b) continue;
                const bool fin = std::isfinite(plain.d_sq(a, b));
                if (fin != std::isfinite(biased.d_sq(a, b))) {
                    log << "de-bias changed finiteness";
                    return false;
                }
                if (fin && !close_rel(biased.d_sq(a, b), plain.d_sq(a, b) - 2.0 * s)) {
                    log << "de-bias shift not exact";
                    return false;
                }
            }
        if (!(cols.d_sq == cols_t.d_sq) || !(cols.overlap == cols_t.overlap)) {
            log << "transpose symmetry failed";
            return false;
        }

        // rank order under de-biasing
        std::vector<std::pair<int, int>> pairs;
        for (int a = 0; a < plain.size(); ++a)
            for (int b = a + 1; b < plain.size(); ++b)
                if (std::isfinite(plain.d_sq(a, b))) pairs.emplace_back(a, b);
        auto order = [&pairs](const DistanceTable& t) {
            std::vector<std::size_t> idx(pairs.size());
            std::iota(idx.begin(), idx.end(), std::size_t{0});
            std::stable_sort(idx.begin(), idx.end(), [&](std::size_t u, std::size_t v) {
                return t.d_sq(pairs[u].first, pairs[u].second) <
                       t.d_sq(pairs[v].first, pairs[v].second);
            });
            return idx;
        };
        if (order(plain) != order(biased)) {
            log << "rank order changed under de-biasing";
            return false;
        }

        // permutation equivariance (rows)
        std::vector<int> perm(x.rows());
        std::iota(perm.begin(), perm.end(), 0);
        rng.choose(perm, perm.size());
        ObservedMatrix y(x.rows(), x.cols());
        for (int i = 0; i < x.rows(); ++i)
            for (int j = 0; j < x.cols(); ++j) {
                y.values(i, j) = x.values(perm[i], j);
                y.mask(i, j) = x.mask(perm[i], j);
            }
        DistanceTable ty = estimated_row_distances(y);
        for (int a = 0; a < x.rows(); ++a)
            for (int b = 0; b < x.rows(); ++b)
                if (ty.d_sq(a, b) != plain.d_sq(perm[a], perm[b])) {
                    log << "permutation equivariance failed";
                    return false;
                }

        // neighborhood monotonicity
        const double r1 = rng.uniform(0.0, 4.0);
        const double r2 = r1 + rng.uniform(0.0, 4.0);
        NeighborhoodSet small = build_neighborhoods(plain, r1, std::nullopt, true, 1);
        NeighborhoodSet big = build_neighborhoods(plain, r2, std::nullopt, true, 1);
        for (int a = 0; a < plain.size(); ++a)
            if (!std::includes(big.members[a].begin(), big.members[a].end(),
                               small.members[a].begin(), small.members[a].end())) {
                log << "monotonicity failed";
                return false;
            }
    }
    log << "100 randomized instances, all properties hold";
    return true;
}

// --- criterion 9: noise-sd consistency trend -------------------------------------

bool criterion_sigma_trend(std::ostream& log) {
    const std::vector<int> sizes{100, 200, 300};
    const int reps = 10;
    std::vector<double> errors(sizes.size() * reps, 0.0);
    parallel_for(errors.size(), g_threads, [&](std::size_t job) {
        const int n = sizes[job / reps];
        const int rep = static_cast<int>(job % reps);
        SimConfig sc;
        sc.n = n;
        sc.m = n;
        sc.lambda = 1.0;
        sc.target_snr = std::sqrt(2.0);
        sc.mechanism = Mechanism::mcar(0.75);
        sc.seed = derive_stream(0x516AA901, {streams::kData, static_cast<std::uint64_t>(n),
                                             static_cast<std::uint64_t>(rep)});
        Generated gen = generate(sc);
        NnProtocol protocol;
        MethodRun run = detail::tune_and_complete(gen.observed, Method::tsnn, &gen.truth, protocol,
                                                  sc.seed, /*final_exclude_target=*/true,
                                                  /*fallback_mean=*/false, /*with_sumsq=*/false);
        const double sigma_hat = estimate_noise_sd(gen.observed, run.result).sigma_hat;
        errors[job] = std::abs(sigma_hat - gen.model.noise_sd);
    });

    std::vector<double> medians;
    for (std::size_t s = 0; s < sizes.size(); ++s) {
        std::vector<double> errs(errors.begin() + s * reps, errors.begin() + (s + 1) * reps);
        std::sort(errs.begin(), errs.end());
        medians.push_back(quantile_sorted(errs, 50.0));
        log << "n=" << sizes[s] << " median|sigma_hat-sigma|=" << medians.back() << "; ";
    }
    return medians[0] >= medians[1] && medians[1] >= medians[2];
}

// --- criterion 10: bitwise determinism through the CLI ----------------------------

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

bool run_cli(const std::string& args, std::ostream& log) {
    const std::string cmd = g_cli_path + " " + args + " >/dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    if (rc != 0) {
        log << "command failed (" << rc << "): " << args << "; ";
        return false;
    }
    return true;
}

bool criterion_determinism(std::ostream& log) {
    if (g_cli_path.empty()) {
        log << "no --cli path supplied";
        return false;
    }
    namespace fs = std::filesystem;
    const fs::path root = fs::temp_directory_path() / "tsnn_determinism";
    fs::remove_all(root);
    fs::create_directories(root);

    // decay study
    {
        json config = {{"n_list", {24, 32}},
                       {"methods", {"tsnn", "rownn"}},
                       {"mechanism", {{"kind", "mcar"}, {"p", 0.8}}},
                       {"lambda", 0.75},
                       {"target_snr", 2.0},
                       {"replicates", 3},
                       {"seed", 12345}};
        std::ofstream((root / "decay.json").string()) << config.dump();
        if (!run_cli("study decay --config " + (root / "decay.json").string() + " --out-dir " +
                         (root / "d1").string() + " --threads 1",
                     log))
            return false;
        if (!run_cli("study decay --config " + (root / "decay.json").string() + " --out-dir " +
                         (root / "d2").string() + " --threads 2",
                     log))
            return false;
        for (const char* name : {"results.csv", "slopes.csv", "long.csv"}) {
            if (slurp((root / "d1" / name).string()) != slurp((root / "d2" / name).string())) {
                log << "decay " << name << " differs between runs";
                return false;
            }
        }
    }

    // coverage study
    {
        json config = {{"n_list", {30}},
                       {"mechanism", {{"kind", "mcar"}, {"p", 0.8}}},
                       {"lambda", 1.0},
                       {"target_snr", 1.4142135623730951},
                       {"replicates", 2},
                       {"folds", 4},
                       {"seed", 777}};
        std::ofstream((root / "coverage.json").string()) << config.dump();
        if (!run_cli("study coverage --config " + (root / "coverage.json").string() + " --out-dir " +
                         (root / "c1").string() + " --threads 2",
                     log))
            return false;
        if (!run_cli("study coverage --config " + (root / "coverage.json").string() + " --out-dir " +
                         (root / "c2").string() + " --threads 1",
                     log))
            return false;
        for (const char* name : {"coverage.csv", "long.csv"})
            if (slurp((root / "c1" / name).string()) != slurp((root / "c2" / name).string())) {
                log << "coverage " << name << " differs between runs";
                return false;
            }
    }

    // holdout study on a simulated CSV
    {
        if (!run_cli("simulate --n 20 --m 24 --lambda 0.75 --target-snr 2 --mechanism mnar --seed 5 "
                     "--out-prefix " +
                         (root / "sim").string(),
                     log))
            return false;
        json config = {{"input_csv", (root / "sim.observed.csv").string()},
                       {"methods", {"tsnn", "allrow"}},
                       {"folds", 4},
                       {"holdout_cols", 5},
                       {"seed", 31},
                       {"grid_two_sided", {10.0, 60.0, 4}}};
        std::ofstream((root / "holdout.json").string()) << config.dump();
        if (!run_cli("study holdout --config " + (root / "holdout.json").string() + " --out-dir " +
                         (root / "h1").string() + " --threads 2",
                     log))
            return false;
        if (!run_cli("study holdout --config " + (root / "holdout.json").string() + " --out-dir " +
                         (root / "h2").string() + " --threads 1",
                     log))
            return false;
        for (const char* name : {"summary.csv", "residuals.csv"})
            if (slurp((root / "h1" / name).string()) != slurp((root / "h2" / name).string())) {
                log << "holdout " << name << " differs between runs";
                return false;
            }
    }

    log << "decay, coverage, and holdout CSVs identical across reruns and thread counts";
    return true;
}

}  // namespace

int main(int argc, char** argv) {
    std::set<int> only;
    for (int k = 1; k < argc; ++k) {
        const std::string arg = argv[k];
        if (arg == "--cli" && k + 1 < argc) {
            g_cli_path = argv[++k];
        } else if (arg == "--threads" && k + 1 < argc) {
            g_threads = static_cast<unsigned>(std::atoi(argv[++k]));
        } else if (arg == "--only" && k + 1 < argc) {
            std::istringstream in(argv[++k]);
            std::string tok;
            while (std::getline(in, tok, ',')) only.insert(std::atoi(tok.c_str()));
        } else {
            std::cerr << "usage: acceptance [--cli <tsnn binary>] [--threads N] [--only 1,2,...]\n";
            return 64;
        }
    }

    const std::vector<Criterion> criteria = {
        {1, "oracle-equivalence", criterion_oracle_equivalence},
        {2, "reduction-laws", criterion_reduction_laws},
        {3, "mcar-decay-slopes", criterion_mcar_slopes},
        {4, "mnar-decay-slopes", criterion_mnar_slopes},
        {5, "moderate-snr-ordering", criterion_ordering},
        {6, "coverage", criterion_coverage},
        {7, "clt-shape", criterion_clt},
        {8, "distance-noise-properties", criterion_properties},
        {9, "sigma-consistency-trend", criterion_sigma_trend},
        {10, "determinism", criterion_determinism},
    };

    int failures = 0;
    for (const Criterion& criterion : criteria) {
        if (!only.empty() && !only.count(criterion.id)) continue;
        std::ostringstream log;
        const auto start = std::chrono::steady_clock::now();
        bool pass = false;
        try {
            pass = criterion.run(log);
        } catch (const std::exception& e) {
            log << "exception: " << e.what();
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("[%s] %2d. %-26s %s (%.1fs)\n", pass ? "PASS" : "FAIL", criterion.id,
                    criterion.name.c_str(), log.str().c_str(), secs);
        std::fflush(stdout);
        if (!pass) ++failures;
    }
    return failures;
}
