#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tsnn/errors.hpp"
#include "tsnn/grid.hpp"

namespace tsnn {

/// Real-valued data matrix with an explicit observation mask. Entries with
/// mask 0 are unspecified and must never influence any computation; missing
/// data is never encoded through sentinel values.
struct ObservedMatrix {
    Grid<double> values;
    Grid<std::uint8_t> mask;  // 1 = observed

    ObservedMatrix() = default;
    ObservedMatrix(int n, int m) : values(n, m, 0.0), mask(n, m, 0) {}

    int rows() const { return values.rows(); }
    int cols() const { return values.cols(); }
    bool observed(int i, int j) const { return mask(i, j) != 0; }
};

/// Ground-truth signal matrix, available only for synthetic data.
struct GroundTruth {
    Grid<double> theta;

    int rows() const { return theta.rows(); }
    int cols() const { return theta.cols(); }
};

/// Missingness mechanism descriptor. MCAR observes each cell independently
/// with probability p. MNAR kills a cell outright with probability p_dead and
/// otherwise observes it with probability base + bump * 1(u_i + v_j > 0).
struct Mechanism {
    enum class Kind { mcar, mnar };
    Kind kind = Kind::mcar;
    double p = 0.75;
    double p_dead = 0.2;
    double base = 0.4;
    double bump = 0.2;

    static Mechanism mcar(double p) {
        Mechanism m;
        m.kind = Kind::mcar;
        m.p = p;
        return m;
    }
    static Mechanism mnar(double p_dead = 0.2, double base = 0.4, double bump = 0.2) {
        Mechanism m;
        m.kind = Kind::mnar;
        m.p_dead = p_dead;
        m.base = base;
        m.bump = bump;
        return m;
    }

    void validate() const {
        if (kind == Kind::mcar) {
            if (!(p > 0.0 && p <= 1.0)) throw config_error("mechanism: p must lie in (0,1]");
        } else {
            if (!(p_dead >= 0.0 && p_dead < 1.0)) throw config_error("mechanism: p_dead must lie in [0,1)");
            if (!(base >= 0.0 && base <= 1.0 && base + bump >= 0.0 && base + bump <= 1.0))
                throw config_error("mechanism: base and base+bump must lie in [0,1]");
        }
    }
};

/// Latent factor model: theta[i][j] = f(u_i, v_j) with f Holder-smooth of
/// exponent lambda and constant holder_const.
struct LatentModel {
    Grid<double> u;  // n x d1
    Grid<double> v;  // m x d2
    double lambda = 1.0;
    double holder_const = 2.0;
    double noise_sd = 0.0;
    std::function<double(std::span<const double>, std::span<const double>)> f;
    Mechanism mechanism;
};

/// Radius tuning parameters for the two-sided neighborhoods, plus the
/// optional subsample caps that bound neighborhood sizes.
struct Radii {
    double eta_row_sq = 0.0;
    double eta_col_sq = 0.0;
    std::optional<int> cap_row;
    std::optional<int> cap_col;
    bool allow_self_neighbor = true;

    void validate() const {
        if (!(eta_row_sq >= 0.0)) throw config_error("radii: eta_row_sq must be >= 0");
        if (!(eta_col_sq >= 0.0)) throw config_error("radii: eta_col_sq must be >= 0");
        if (cap_row && *cap_row < 1) throw config_error("radii: cap_row must be >= 1");
        if (cap_col && *cap_col < 1) throw config_error("radii: cap_col must be >= 1");
    }
};

/// Diagnostic invariant check; returns one message per violation, each naming
/// the offending index. Empty result means the matrix is well formed.
inline std::vector<std::string> validate(const ObservedMatrix& matrix) {
    std::vector<std::string> violations;
    if (matrix.rows() < 1) violations.push_back("n >= 1 violated: matrix has " + std::to_string(matrix.rows()) + " rows");
    if (matrix.cols() < 1) violations.push_back("m >= 1 violated: matrix has " + std::to_string(matrix.cols()) + " columns");
    if (!matrix.values.same_shape(Grid<double>(matrix.mask.rows(), matrix.mask.cols())))
        violations.push_back("values and mask shapes differ");
    for (int i = 0; i < matrix.rows(); ++i)
        for (int j = 0; j < matrix.cols(); ++j)
            if (matrix.mask(i, j) && !std::isfinite(matrix.values(i, j)))
                violations.push_back("non-finite observed value at (" + std::to_string(i) + "," + std::to_string(j) + ")");
    return violations;
}

inline long observed_count(const ObservedMatrix& matrix) {
    long count = 0;
    for (int i = 0; i < matrix.rows(); ++i)
        for (int j = 0; j < matrix.cols(); ++j) count += matrix.mask(i, j) ? 1 : 0;
    return count;
}

/// Fraction of observed entries; the plug-in p-hat used by USVT.
inline double observed_fraction(const ObservedMatrix& matrix) {
    const long cells = static_cast<long>(matrix.rows()) * matrix.cols();
    if (cells == 0) return 0.0;
    return static_cast<double>(observed_count(matrix)) / static_cast<double>(cells);
}

/// Mean of the observed entries. Throws if nothing is observed.
inline double observed_mean(const ObservedMatrix& matrix) {
    double sum = 0.0;
    long count = 0;
    for (int i = 0; i < matrix.rows(); ++i)
        for (int j = 0; j < matrix.cols(); ++j)
            if (matrix.mask(i, j)) {
                sum += matrix.values(i, j);
                ++count;
            }
    if (count == 0) throw compute_error("observed_mean: matrix has no observed entries");
    return sum / static_cast<double>(count);
}

/// Copy with the mask restricted to entries where `keep` is nonzero.
inline ObservedMatrix restrict_mask(const ObservedMatrix& matrix, const Grid<std::uint8_t>& keep) {
    ObservedMatrix out = matrix;
    for (int i = 0; i < matrix.rows(); ++i)
        for (int j = 0; j < matrix.cols(); ++j)
            if (!keep(i, j)) out.mask(i, j) = 0;
    return out;
}

inline ObservedMatrix transpose_observed(const ObservedMatrix& matrix) {
    ObservedMatrix out;
    out.values = transposed(matrix.values);
    out.mask = transposed(matrix.mask);
    return out;
}

}  // namespace tsnn
