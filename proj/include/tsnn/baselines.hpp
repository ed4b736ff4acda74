#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "tsnn/estimators.hpp"

namespace tsnn {

struct SpectralConfig {
    double usvt_eta = 2.02;  // threshold multiplier on sqrt(n_max * p_hat)
    std::vector<double> si_lambda_grid;
    int si_max_iter = 100;
    double si_tol = 1e-4;

    /// Default shrinkage grid: log-spaced points on [1, 12].
    static std::vector<double> default_si_grid(double lo = 1.0, double hi = 12.0, int count = 10) {
        if (count == 1) return {lo};
        std::vector<double> grid;
        grid.reserve(count);
        const double log_lo = std::log(lo), log_hi = std::log(hi);
        for (int k = 0; k < count; ++k)
            grid.push_back(std::exp(log_lo + (log_hi - log_lo) * static_cast<double>(k) / (count - 1)));
        return grid;
    }
};

namespace detail {

inline Eigen::MatrixXd to_eigen(const Grid<double>& g) {
    Eigen::MatrixXd out(g.rows(), g.cols());
    for (int i = 0; i < g.rows(); ++i)
        for (int j = 0; j < g.cols(); ++j) out(i, j) = g(i, j);
    return out;
}

inline Grid<double> from_eigen(const Eigen::MatrixXd& m) {
    Grid<double> out(static_cast<int>(m.rows()), static_cast<int>(m.cols()), 0.0);
    for (int i = 0; i < out.rows(); ++i)
        for (int j = 0; j < out.cols(); ++j) out(i, j) = m(i, j);
    return out;
}

inline CompletionResult spectral_result(Grid<double> theta) {
    CompletionResult result;
    const int n = theta.rows(), m = theta.cols();
    result.theta_hat = std::move(theta);
    result.neighbor_count = Grid<int>(n, m, 1);  // spectral estimates define every entry
    result.undefined_mask = Grid<std::uint8_t>(n, m, 0);
    return result;
}

}  // namespace detail

/// Universal singular value thresholding. Observed values are scaled by
/// their largest magnitude (so entries land in [-1,1]; pure scaling commutes
/// with the SVD), unobserved cells zero-filled; singular values below
/// eta_mult * sqrt(n_max * p_hat) are dropped, the retained part is rescaled
/// by 1/p_hat, clipped to the observed range, and scaled back.
inline CompletionResult usvt_complete(const ObservedMatrix& matrix, double eta_mult) {
    const int n = matrix.rows(), m = matrix.cols();
    const double p_hat = observed_fraction(matrix);
    if (p_hat <= 0.0) throw compute_error("usvt: fully missing matrix");

    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    double scale = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j)
            if (matrix.observed(i, j)) {
                lo = std::min(lo, matrix.values(i, j));
                hi = std::max(hi, matrix.values(i, j));
                scale = std::max(scale, std::abs(matrix.values(i, j)));
            }
    if (scale == 0.0) return detail::spectral_result(Grid<double>(n, m, 0.0));

    Eigen::MatrixXd y = Eigen::MatrixXd::Zero(n, m);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j)
            if (matrix.observed(i, j)) y(i, j) = matrix.values(i, j) / scale;

    Eigen::BDCSVD<Eigen::MatrixXd> svd(y, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd& sv = svd.singularValues();
    const double threshold = eta_mult * std::sqrt(static_cast<double>(std::max(n, m)) * p_hat);

    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, m);
    for (int k = 0; k < sv.size(); ++k)
        if (sv(k) >= threshold)
            w += sv(k) * svd.matrixU().col(k) * svd.matrixV().col(k).transpose();
    w /= p_hat;

    Grid<double> theta(n, m, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j)
            theta(i, j) = std::clamp(w(i, j) * scale, lo, hi);
    return detail::spectral_result(std::move(theta));
}

struct SoftImputeRun {
    CompletionResult result;
    int iterations = 0;
    std::vector<double> objective;  // 0.5 ||P_obs(X - Z)||² + lambda ||Z||_*
    bool converged = false;
};

/// Iterative soft-thresholded SVD imputer. Each step restores the observed
/// entries into the current completion, takes an SVD, shrinks the spectrum by
/// lambda, and repeats until the relative Frobenius change drops below tol.
/// `warm_start` seeds the iterate (used when sweeping a lambda grid).
inline SoftImputeRun soft_impute_complete(const ObservedMatrix& matrix, double lambda, int max_iter,
                                          double tol, const Grid<double>* warm_start = nullptr) {
    if (lambda < 0.0) throw compute_error("soft_impute: lambda must be >= 0");
    if (max_iter < 1) throw compute_error("soft_impute: max_iter must be >= 1");
    const int n = matrix.rows(), m = matrix.cols();

    Eigen::MatrixXd z = Eigen::MatrixXd::Zero(n, m);
    if (warm_start) z = detail::to_eigen(*warm_start);

    SoftImputeRun run;
    for (int iter = 0; iter < max_iter; ++iter) {
        // observed entries restored exactly between shrinkage steps
        Eigen::MatrixXd w = z;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < m; ++j)
                if (matrix.observed(i, j)) w(i, j) = matrix.values(i, j);

        Eigen::BDCSVD<Eigen::MatrixXd> svd(w, Eigen::ComputeThinU | Eigen::ComputeThinV);
        Eigen::VectorXd sv = svd.singularValues();
        double nuclear = 0.0;
        for (int k = 0; k < sv.size(); ++k) {
            sv(k) = std::max(0.0, sv(k) - lambda);
            nuclear += sv(k);
        }
        Eigen::MatrixXd z_next = svd.matrixU() * sv.asDiagonal() * svd.matrixV().transpose();

        double fit = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < m; ++j)
                if (matrix.observed(i, j)) {
                    const double r = matrix.values(i, j) - z_next(i, j);
                    fit += r * r;
                }
        run.objective.push_back(0.5 * fit + lambda * nuclear);
        run.iterations = iter + 1;

        const double delta = (z_next - z).norm();
        const double scale = std::max(z.norm(), 1e-12);
        z = std::move(z_next);
        if (delta / scale <= tol) {
            run.converged = true;
            break;
        }
    }
    run.result = detail::spectral_result(detail::from_eigen(z));
    return run;
}

struct SoftImputeBest {
    double lambda = 0.0;
    CompletionResult result;
    std::vector<double> scores;  // one per grid value, grid order
};

/// Sweep the lambda grid (largest first, warm-starting) and keep the lambda
/// with the smallest mean squared error against `reference` over `eval_set`.
inline SoftImputeBest soft_impute_best(const ObservedMatrix& matrix,
                                       const std::vector<double>& grid,
                                       const Grid<double>& reference,
                                       const Grid<std::uint8_t>& eval_set, int max_iter,
                                       double tol) {
    if (grid.empty()) throw config_error("soft_impute_best: empty lambda grid");
    std::vector<std::size_t> order(grid.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return grid[a] > grid[b]; });

    SoftImputeBest best;
    best.scores.assign(grid.size(), 0.0);
    std::vector<CompletionResult> results(grid.size());
    Grid<double> warm;
    bool have_warm = false;
    for (std::size_t idx : order) {
        SoftImputeRun run = soft_impute_complete(matrix, grid[idx], max_iter, tol,
                                                 have_warm ? &warm : nullptr);
        warm = run.result.theta_hat;
        have_warm = true;
        double sum = 0.0;
        long count = 0;
        for (int i = 0; i < reference.rows(); ++i)
            for (int j = 0; j < reference.cols(); ++j)
                if (eval_set(i, j)) {
                    const double r = run.result.theta_hat(i, j) - reference(i, j);
                    sum += r * r;
                    ++count;
                }
        if (count == 0) throw compute_error("soft_impute_best: empty evaluation set");
        best.scores[idx] = sum / static_cast<double>(count);
        results[idx] = std::move(run.result);
    }
    std::size_t arg = 0;
    for (std::size_t k = 1; k < grid.size(); ++k)
        if (best.scores[k] < best.scores[arg]) arg = k;
    best.lambda = grid[arg];
    best.result = std::move(results[arg]);
    return best;
}

}  // namespace tsnn
