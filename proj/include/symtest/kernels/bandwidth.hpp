#ifndef SYMTEST_KERNELS_BANDWIDTH_HPP
#define SYMTEST_KERNELS_BANDWIDTH_HPP

#include <algorithm>
#include <cmath>
#include <vector>

#include "symtest/common.hpp"
#include "symtest/kernels/kernels.hpp"

namespace symtest {

// Type-7 quantile of an unsorted sample.
inline double quantile(std::vector<double> values, double q) {
    require(!values.empty(), "quantile of an empty sample");
    require(q >= 0.0 && q <= 1.0, "quantile level in [0, 1]");
    std::sort(values.begin(), values.end());
    const double pos = q * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = static_cast<std::size_t>(std::ceil(pos));
    const double frac = pos - static_cast<double>(lo);
    return values[lo] * (1.0 - frac) + values[hi] * frac;
}

// L bandwidths linearly spaced from half the 5% quantile to twice the 95%
// quantile of the given distances. A zero lower endpoint is replaced by the
// smallest positive distance.
inline std::vector<double> bandwidth_grid_from_distances(const std::vector<double>& pairwise,
                                                         int count) {
    require(!pairwise.empty(), "bandwidth grid needs at least one distance");
    require(count >= 2, "bandwidth grid needs at least two values");
    double lo = 0.5 * quantile(pairwise, 0.05);
    double hi = 2.0 * quantile(pairwise, 0.95);
    if (lo <= 0.0) {
        double smallest_positive = 0.0;
        for (double d : pairwise) {
            if (d > 0.0 && (smallest_positive == 0.0 || d < smallest_positive))
                smallest_positive = d;
        }
        if (smallest_positive == 0.0)
            throw degenerate_input_error("all pairwise distances are zero");
        lo = smallest_positive;
    }
    if (hi < lo) hi = lo;
    std::vector<double> grid(count);
    for (int i = 0; i < count; ++i) {
        const double t = static_cast<double>(i) / static_cast<double>(count - 1);
        grid[i] = lo + t * (hi - lo);
    }
    return grid;
}

inline std::vector<double> pairwise_distances(const Matrix& points, KernelFamily family) {
    const int n = static_cast<int>(points.rows());
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            if (family == KernelFamily::laplace) {
                out.push_back((points.row(i) - points.row(j)).lpNorm<1>());
            } else {
                out.push_back((points.row(i) - points.row(j)).norm());
            }
        }
    }
    return out;
}

// Per-dimension rule-of-thumb bandwidths for a Gaussian weighting kernel:
// h_j = (4 / (q + 2))^{1/(q+4)} n^{-1/(q+4)} sd_j, floored at 1e-8 for
// zero-variance columns.
inline Vector silverman_bandwidths(const Matrix& m_values) {
    const int n = static_cast<int>(m_values.rows());
    const int q = static_cast<int>(m_values.cols());
    require(n >= 2, "rule-of-thumb bandwidths need n >= 2");
    require(q >= 1, "rule-of-thumb bandwidths need q >= 1");
    const double factor = std::pow(4.0 / (q + 2.0), 1.0 / (q + 4.0)) *
                          std::pow(static_cast<double>(n), -1.0 / (q + 4.0));
    Vector h(q);
    for (int j = 0; j < q; ++j) {
        const double mean = m_values.col(j).mean();
        const double var = (m_values.col(j).array() - mean).square().sum() / (n - 1.0);
        h(j) = factor * std::sqrt(var);
        if (!(h(j) > 0.0)) h(j) = 1e-8;
    }
    return h;
}

}  // namespace symtest

#endif
