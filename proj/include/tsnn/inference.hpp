#pragma once

#include <cmath>
#include <optional>

#include "tsnn/estimators.hpp"

namespace tsnn {

/// Standard normal quantile via the Acklam rational approximation (relative
/// error below 1.2e-9 over (0,1)).
inline double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) {
        if (p == 0.0) return -std::numeric_limits<double>::infinity();
        if (p == 1.0) return std::numeric_limits<double>::infinity();
        throw compute_error("normal_quantile: p must lie in [0,1]");
    }
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double p_low = 0.02425;
    double q, r;
    if (p < p_low) {
        q = std::sqrt(-2.0 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    if (p <= 1.0 - p_low) {
        q = p - 0.5;
        r = q * q;
        return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
               (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    }
    q = std::sqrt(-2.0 * std::log(1.0 - p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
}

/// z_{alpha/2} for a two-sided interval at coverage `level` = 1 - alpha.
inline double two_sided_z(double level) {
    if (!(level >= 0.0 && level < 1.0)) throw compute_error("two_sided_z: level must lie in [0,1)");
    const double alpha = 1.0 - level;
    return level == 0.0 ? 0.0 : normal_quantile(1.0 - alpha / 2.0);
}

struct NoiseEstimate {
    double sigma_hat = 0.0;
    long n_used = 0;
};

/// Root mean squared residual over observed entries with defined estimates:
///   sigma_hat = sqrt( sum (X - theta_hat)² A / count ).
/// The averaged display is of squared residuals, so the square root is taken
/// to land in SD units. `restrict_to`, when given, limits the sum to entries
/// flagged nonzero (a training fold).
inline NoiseEstimate estimate_noise_sd(const ObservedMatrix& matrix, const CompletionResult& result,
                                       const Grid<std::uint8_t>* restrict_to = nullptr) {
    double sum = 0.0;
    long count = 0;
    for (int i = 0; i < matrix.rows(); ++i)
        for (int j = 0; j < matrix.cols(); ++j) {
            if (!matrix.observed(i, j)) continue;
            if (restrict_to && !(*restrict_to)(i, j)) continue;
            if (result.undefined_mask(i, j)) continue;
            const double r = matrix.values(i, j) - result.theta_hat(i, j);
            sum += r * r;
            ++count;
        }
    if (count == 0) throw compute_error("estimate_noise_sd: no residuals to average");
    return NoiseEstimate{std::sqrt(sum / static_cast<double>(count)), count};
}

/// Spread of the joint neighborhood around the entry's estimate:
///   sqrt( sum (X_i'j' - theta_hat_ij)² / (count - 1) )  when count > 1,
/// else 0. This is the finite-sample widening added to the noise SD.
inline double within_neighborhood_sd(const ObservedMatrix& matrix, const JointNeighborhood& joint,
                                     double theta_hat_ij) {
    const int count = joint.count();
    if (count <= 1) return 0.0;
    double sum = 0.0;
    for (const auto& [ip, jp] : joint.pairs) {
        const double r = matrix.values(ip, jp) - theta_hat_ij;
        sum += r * r;
    }
    return std::sqrt(sum / static_cast<double>(count - 1));
}

/// Same quantity computed from the completion's neighbor sums:
/// sum (x - t)² over the joint set equals sumsq - count * t² because t is the
/// joint-set mean. Tiny negative values from cancellation clamp to 0.
inline Grid<double> within_sd_grid(const CompletionResult& result) {
    if (!result.neighbor_sumsq)
        throw compute_error("within_sd_grid: completion lacks neighbor_sumsq; request it");
    const Grid<double>& ss = *result.neighbor_sumsq;
    Grid<double> out(ss.rows(), ss.cols(), 0.0);
    for (int i = 0; i < ss.rows(); ++i)
        for (int j = 0; j < ss.cols(); ++j) {
            const int count = result.neighbor_count(i, j);
            if (count <= 1) continue;
            const double t = result.theta_hat(i, j);
            double var = (ss(i, j) - count * t * t) / static_cast<double>(count - 1);
            if (var < 0.0) var = 0.0;
            out(i, j) = std::sqrt(var);
        }
    return out;
}

enum class SdMode { oracle, estimated };

/// Per-entry confidence intervals
///   theta_hat ± z_{alpha/2} * sd / sqrt(count),
/// where sd is the noise SD (oracle or estimated) plus, in adjusted mode, the
/// within-neighborhood SD. Entries with empty neighborhoods get no interval.
struct IntervalGrid {
    Grid<double> lower, upper;
    Grid<std::uint8_t> defined;
    double level = 0.95;
    SdMode sd_mode = SdMode::estimated;
    bool adjusted = false;
};

inline IntervalGrid confidence_intervals(const CompletionResult& result, double noise_sd,
                                         SdMode sd_mode, double level,
                                         const Grid<double>* within_sd = nullptr) {
    if (noise_sd < 0.0) throw compute_error("confidence_intervals: negative noise sd");
    const int n = result.theta_hat.rows();
    const int m = result.theta_hat.cols();
    IntervalGrid grid;
    grid.lower = Grid<double>(n, m, std::numeric_limits<double>::quiet_NaN());
    grid.upper = Grid<double>(n, m, std::numeric_limits<double>::quiet_NaN());
    grid.defined = Grid<std::uint8_t>(n, m, 0);
    grid.level = level;
    grid.sd_mode = sd_mode;
    grid.adjusted = within_sd != nullptr;
    const double z = two_sided_z(level);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j) {
            const int count = result.neighbor_count(i, j);
            if (count <= 0 || result.undefined_mask(i, j)) continue;
            double sd = noise_sd;
            if (within_sd) sd += (*within_sd)(i, j);
            const double half = z * sd / std::sqrt(static_cast<double>(count));
            grid.lower(i, j) = result.theta_hat(i, j) - half;
            grid.upper(i, j) = result.theta_hat(i, j) + half;
            grid.defined(i, j) = 1;
        }
    return grid;
}

/// Fraction of evaluated entries whose true value lands inside its interval.
/// Entries without an interval are skipped.
inline double coverage_rate(const IntervalGrid& intervals, const GroundTruth& truth,
                            const Grid<std::uint8_t>& eval_set) {
    long covered = 0, total = 0;
    for (int i = 0; i < truth.rows(); ++i)
        for (int j = 0; j < truth.cols(); ++j) {
            if (!eval_set(i, j) || !intervals.defined(i, j)) continue;
            ++total;
            const double t = truth.theta(i, j);
            if (intervals.lower(i, j) <= t && t <= intervals.upper(i, j)) ++covered;
        }
    if (total == 0) throw compute_error("coverage_rate: empty evaluation set");
    return static_cast<double>(covered) / static_cast<double>(total);
}

}  // namespace tsnn
