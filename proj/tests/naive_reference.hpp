// Independent brute-force re-evaluation of the estimator formulas, kept
// deliberately naive: direct loops over the definitions, no shared code with
// the library's completion paths. Tests compare library output against these.
#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "tsnn/model.hpp"
#include "tsnn/rng.hpp"

namespace naive {

using tsnn::Grid;
using tsnn::ObservedMatrix;

constexpr double kInf = std::numeric_limits<double>::infinity();

inline Grid<double> row_distances(const ObservedMatrix& x, std::optional<double> noise_var) {
    const int n = x.rows(), m = x.cols();
    Grid<double> d(n, n, 0.0);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            if (a == b) continue;
            double ssd = 0.0;
            int cnt = 0;
            for (int j = 0; j < m; ++j)
                if (x.observed(a, j) && x.observed(b, j)) {
                    ssd += (x.values(a, j) - x.values(b, j)) * (x.values(a, j) - x.values(b, j));
                    ++cnt;
                }
            d(a, b) = cnt == 0 ? kInf : ssd / cnt - (noise_var ? 2.0 * *noise_var : 0.0);
        }
    return d;
}

inline Grid<double> col_distances(const ObservedMatrix& x, std::optional<double> noise_var) {
    const int n = x.rows(), m = x.cols();
    Grid<double> d(m, m, 0.0);
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) {
            if (a == b) continue;
            double ssd = 0.0;
            int cnt = 0;
            for (int i = 0; i < n; ++i)
                if (x.observed(i, a) && x.observed(i, b)) {
                    ssd += (x.values(i, a) - x.values(i, b)) * (x.values(i, a) - x.values(i, b));
                    ++cnt;
                }
            d(a, b) = cnt == 0 ? kInf : ssd / cnt - (noise_var ? 2.0 * *noise_var : 0.0);
        }
    return d;
}

inline std::vector<int> neighbors(const Grid<double>& d, int a, double radius_sq, bool allow_self) {
    std::vector<int> out;
    for (int b = 0; b < d.rows(); ++b) {
        if (b == a) {
            if (allow_self && radius_sq >= 0.0) out.push_back(b);
        } else if (d(a, b) <= radius_sq) {
            out.push_back(b);
        }
    }
    return out;
}

struct NaiveResult {
    Grid<double> theta;
    Grid<int> count;
    Grid<std::uint8_t> undefined;
};

inline NaiveResult make_result(int n, int m) {
    return {Grid<double>(n, m, std::numeric_limits<double>::quiet_NaN()), Grid<int>(n, m, 0),
            Grid<std::uint8_t>(n, m, 1)};
}

inline NaiveResult tsnn(const ObservedMatrix& x, double eta_row_sq, double eta_col_sq,
                        bool allow_self, bool exclude_target,
                        std::optional<double> noise_var = std::nullopt) {
    const int n = x.rows(), m = x.cols();
    Grid<double> dr = row_distances(x, noise_var);
    Grid<double> dc = col_distances(x, noise_var);
    NaiveResult r = make_result(n, m);
    for (int i = 0; i < n; ++i) {
        std::vector<int> nr = neighbors(dr, i, eta_row_sq, allow_self);
        for (int j = 0; j < m; ++j) {
            std::vector<int> nc = neighbors(dc, j, eta_col_sq, allow_self);
            double sum = 0.0;
            int cnt = 0;
            for (int ip : nr)
                for (int jp : nc) {
                    if (!x.observed(ip, jp)) continue;
                    if (exclude_target && ip == i && jp == j) continue;
                    sum += x.values(ip, jp);
                    ++cnt;
                }
            if (cnt > 0) {
                r.theta(i, j) = sum / cnt;
                r.count(i, j) = cnt;
                r.undefined(i, j) = 0;
            }
        }
    }
    return r;
}

inline NaiveResult rownn(const ObservedMatrix& x, double eta_row_sq, bool allow_self,
                         bool exclude_target, std::optional<double> noise_var = std::nullopt) {
    const int n = x.rows(), m = x.cols();
    Grid<double> dr = row_distances(x, noise_var);
    NaiveResult r = make_result(n, m);
    for (int i = 0; i < n; ++i) {
        std::vector<int> nr = neighbors(dr, i, eta_row_sq, allow_self);
        for (int j = 0; j < m; ++j) {
            double sum = 0.0;
            int cnt = 0;
            for (int ip : nr) {
                if (!x.observed(ip, j)) continue;
                if (exclude_target && ip == i) continue;
                sum += x.values(ip, j);
                ++cnt;
            }
            if (cnt > 0) {
                r.theta(i, j) = sum / cnt;
                r.count(i, j) = cnt;
                r.undefined(i, j) = 0;
            }
        }
    }
    return r;
}

inline NaiveResult colnn(const ObservedMatrix& x, double eta_col_sq, bool allow_self,
                         bool exclude_target, std::optional<double> noise_var = std::nullopt) {
    const int n = x.rows(), m = x.cols();
    Grid<double> dc = col_distances(x, noise_var);
    NaiveResult r = make_result(n, m);
    for (int j = 0; j < m; ++j) {
        std::vector<int> nc = neighbors(dc, j, eta_col_sq, allow_self);
        for (int i = 0; i < n; ++i) {
            double sum = 0.0;
            int cnt = 0;
            for (int jp : nc) {
                if (!x.observed(i, jp)) continue;
                if (exclude_target && jp == j) continue;
                sum += x.values(i, jp);
                ++cnt;
            }
            if (cnt > 0) {
                r.theta(i, j) = sum / cnt;
                r.count(i, j) = cnt;
                r.undefined(i, j) = 0;
            }
        }
    }
    return r;
}

inline NaiveResult drnn(const ObservedMatrix& x, double eta_row_sq, double eta_col_sq,
                        bool allow_self, bool exclude_target,
                        std::optional<double> noise_var = std::nullopt) {
    const int n = x.rows(), m = x.cols();
    Grid<double> dr = row_distances(x, noise_var);
    Grid<double> dc = col_distances(x, noise_var);
    NaiveResult r = make_result(n, m);
    for (int i = 0; i < n; ++i) {
        std::vector<int> nr = neighbors(dr, i, eta_row_sq, allow_self);
        for (int j = 0; j < m; ++j) {
            std::vector<int> nc = neighbors(dc, j, eta_col_sq, allow_self);
            double sum = 0.0;
            int cnt = 0;
            for (int ip : nr)
                for (int jp : nc) {
                    if (!x.observed(ip, jp) || !x.observed(ip, j) || !x.observed(i, jp)) continue;
                    if (exclude_target && x.observed(i, j) && (ip == i || jp == j)) continue;
                    sum += x.values(ip, j) + x.values(i, jp) - x.values(ip, jp);
                    ++cnt;
                }
            if (cnt > 0) {
                r.theta(i, j) = sum / cnt;
                r.count(i, j) = cnt;
                r.undefined(i, j) = 0;
            }
        }
    }
    return r;
}

inline NaiveResult allrow(const ObservedMatrix& x, bool exclude_target) {
    const int n = x.rows(), m = x.cols();
    NaiveResult r = make_result(n, m);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j) {
            double sum = 0.0;
            int cnt = 0;
            for (int ip = 0; ip < n; ++ip) {
                if (!x.observed(ip, j)) continue;
                if (exclude_target && ip == i) continue;
                sum += x.values(ip, j);
                ++cnt;
            }
            if (cnt > 0) {
                r.theta(i, j) = sum / cnt;
                r.count(i, j) = cnt;
                r.undefined(i, j) = 0;
            }
        }
    return r;
}

/// Random test matrices across observation regimes: full, iid Bernoulli at
/// several rates, and a signal-dependent (MNAR-style) mask.
inline ObservedMatrix random_matrix(tsnn::Rng& rng, int max_dim = 5) {
    const int n = 1 + static_cast<int>(rng.uniform_int(max_dim));
    const int m = 1 + static_cast<int>(rng.uniform_int(max_dim));
    ObservedMatrix x(n, m);
    const int regime = static_cast<int>(rng.uniform_int(5));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j) {
            const double value = rng.uniform(-5.0, 5.0);
            bool obs = true;
            switch (regime) {
                case 0: obs = true; break;
                case 1: obs = rng.bernoulli(0.9); break;
                case 2: obs = rng.bernoulli(0.6); break;
                case 3: obs = rng.bernoulli(0.3); break;
                default: obs = rng.bernoulli(value > 0.0 ? 0.7 : 0.35); break;
            }
            if (obs) {
                x.values(i, j) = value;
                x.mask(i, j) = 1;
            }
        }
    return x;
}

inline bool close(double a, double b, double tol = 1e-12) {
    if (std::isnan(a) && std::isnan(b)) return true;
    if (std::isinf(a) || std::isinf(b)) return a == b;
    return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace naive
