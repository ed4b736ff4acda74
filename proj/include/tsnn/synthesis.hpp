#pragma once

#include <cmath>

#include "tsnn/model.hpp"
#include "tsnn/rng.hpp"

namespace tsnn {

/// The simulation latent function f(u,v) = |u+v|^lambda * sgn(u+v), a
/// (lambda, 2)-Holder map on scalar factors.
inline double holder_signal(double u, double v, double lambda) {
    const double s = u + v;
    if (s == 0.0) return 0.0;
    const double mag = std::pow(std::abs(s), lambda);
    return s > 0.0 ? mag : -mag;
}

/// Synthetic scenario: scalar factors (d1 = d2 = 1), Gaussian noise, and an
/// MCAR or MNAR observation mechanism. Exactly one of noise_sd / target_snr
/// drives the noise level; with target_snr the SD is solved per realization
/// so the realized signal-to-noise ratio hits the target.
struct SimConfig {
    int n = 0;
    int m = 0;
    double lambda = 1.0;
    double noise_sd = 0.0;
    std::optional<double> target_snr;
    Mechanism mechanism;
    std::uint64_t seed = 0;

    void validate() const {
        if (n < 1 || m < 1) throw config_error("sim: n and m must be >= 1");
        if (!(lambda > 0.0 && lambda <= 1.0)) throw config_error("sim: lambda must lie in (0,1]");
        if (noise_sd < 0.0) throw config_error("sim: noise_sd must be >= 0");
        if (target_snr && !(*target_snr > 0.0)) throw config_error("sim: target_snr must be > 0");
        mechanism.validate();
    }
};

/// Root mean squared signal over the noise SD.
inline double snr(const GroundTruth& truth, double noise_sd) {
    if (!(noise_sd > 0.0)) throw compute_error("snr: noise_sd must be > 0");
    double sum = 0.0;
    for (int i = 0; i < truth.rows(); ++i)
        for (int j = 0; j < truth.cols(); ++j) sum += truth.theta(i, j) * truth.theta(i, j);
    const double cells = static_cast<double>(truth.rows()) * truth.cols();
    return std::sqrt(sum / (cells * noise_sd * noise_sd));
}

/// Inverts the SNR display: the noise SD that makes snr(truth, sd) == target.
inline double noise_sd_for_target_snr(const GroundTruth& truth, double target_snr) {
    if (!(target_snr > 0.0)) throw compute_error("noise_sd_for_target_snr: target must be > 0");
    double sum = 0.0;
    for (int i = 0; i < truth.rows(); ++i)
        for (int j = 0; j < truth.cols(); ++j) sum += truth.theta(i, j) * truth.theta(i, j);
    const double cells = static_cast<double>(truth.rows()) * truth.cols();
    const double rms = std::sqrt(sum / cells);
    if (rms == 0.0) throw compute_error("noise_sd_for_target_snr: zero signal");
    return rms / target_snr;
}

struct Generated {
    GroundTruth truth;
    ObservedMatrix observed;
    LatentModel model;
};

/// Factors and signal only; iid Uniform[-0.5, 0.5] scalar factors. Streams:
/// (seed, kRowFactors, i) and (seed, kColFactors, j).
inline Generated generate_truth(const SimConfig& config) {
    config.validate();
    Generated gen;
    LatentModel& model = gen.model;
    model.u = Grid<double>(config.n, 1, 0.0);
    model.v = Grid<double>(config.m, 1, 0.0);
    model.lambda = config.lambda;
    model.holder_const = 2.0;
    model.noise_sd = config.noise_sd;
    model.mechanism = config.mechanism;
    const double lambda = config.lambda;
    model.f = [lambda](std::span<const double> u, std::span<const double> v) {
        return holder_signal(u[0], v[0], lambda);
    };
    for (int i = 0; i < config.n; ++i)
        model.u(i, 0) =
            stream_rng(config.seed, {streams::kRowFactors, static_cast<std::uint64_t>(i)}).uniform(-0.5, 0.5);
    for (int j = 0; j < config.m; ++j)
        model.v(j, 0) =
            stream_rng(config.seed, {streams::kColFactors, static_cast<std::uint64_t>(j)}).uniform(-0.5, 0.5);

    gen.truth.theta = Grid<double>(config.n, config.m, 0.0);
    for (int i = 0; i < config.n; ++i)
        for (int j = 0; j < config.m; ++j)
            gen.truth.theta(i, j) = holder_signal(model.u(i, 0), model.v(j, 0), lambda);
    return gen;
}

/// Noise and mask on top of a realized truth. Per-cell streams
/// (seed, kNoise, cell) and (seed, kMask, cell) make generation deterministic
/// and partitionable by cell. MNAR draws the dead-cell indicator and the
/// alive-observation indicator from the same cell stream, in that order.
inline void observe(Generated& gen, const SimConfig& config, double noise_sd) {
    const int n = config.n, m = config.m;
    gen.model.noise_sd = noise_sd;
    gen.observed = ObservedMatrix(n, m);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < m; ++j) {
            const std::uint64_t cell = static_cast<std::uint64_t>(i) * m + j;
            Rng mask_rng = stream_rng(config.seed, {streams::kMask, cell});
            bool observed_cell;
            if (config.mechanism.kind == Mechanism::Kind::mcar) {
                observed_cell = mask_rng.bernoulli(config.mechanism.p);
            } else {
                const bool dead = mask_rng.bernoulli(config.mechanism.p_dead);
                if (dead) {
                    observed_cell = false;
                } else {
                    const double p_alive =
                        config.mechanism.base +
                        config.mechanism.bump * ((gen.model.u(i, 0) + gen.model.v(j, 0) > 0.0) ? 1.0 : 0.0);
                    observed_cell = mask_rng.bernoulli(p_alive);
                }
            }
            if (observed_cell) {
                Rng noise_rng = stream_rng(config.seed, {streams::kNoise, cell});
                gen.observed.mask(i, j) = 1;
                gen.observed.values(i, j) = gen.truth.theta(i, j) + noise_rng.normal(0.0, noise_sd);
            }
        }
    }
}

/// Full draw: factors, signal, noise, mask.
inline Generated generate(const SimConfig& config) {
    Generated gen = generate_truth(config);
    const double sd =
        config.target_snr ? noise_sd_for_target_snr(gen.truth, *config.target_snr) : config.noise_sd;
    observe(gen, config, sd);
    return gen;
}

}  // namespace tsnn
