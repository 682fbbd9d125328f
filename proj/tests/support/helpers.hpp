#ifndef SYMTEST_TESTS_SUPPORT_HELPERS_HPP
#define SYMTEST_TESTS_SUPPORT_HELPERS_HPP

// Independent oracles and small statistical utilities used only by tests.
// Everything here is written directly from the defining formulas, without
// touching the library's optimized evaluation paths.

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "symtest/kernels/kernels.hpp"

namespace testsupport {

using Eigen::MatrixXd;
using Eigen::VectorXd;

inline double naive_kernel(const VectorXd& a, const VectorXd& b, symtest::KernelFamily family,
                           double sigma) {
    switch (family) {
        case symtest::KernelFamily::gaussian:
            return std::exp(-(a - b).squaredNorm() / (2.0 * sigma * sigma));
        case symtest::KernelFamily::laplace:
            return std::exp(-(a - b).lpNorm<1>() / sigma);
        case symtest::KernelFamily::information_diffusion: {
            double s = 0.0;
            for (int k = 0; k < a.size(); ++k)
                s += std::sqrt(std::max(0.0, a(k)) * std::max(0.0, b(k)));
            s = std::min(1.0, std::max(-1.0, s));
            const double angle = std::acos(s);
            return std::pow(4.0 * std::acos(-1.0) * sigma, -(a.size() + 1) / 2.0) *
                   std::exp(-angle * angle / sigma);
        }
    }
    return 0.0;
}

// Plain double-loop evaluation of the unbiased estimator.
inline double naive_mmd2_u(const MatrixXd& z, const MatrixXd& zp, symtest::KernelFamily family,
                           double sigma) {
    const int n = static_cast<int>(z.rows());
    double within = 0.0, cross = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (i != j) {
                within += naive_kernel(z.row(i), z.row(j), family, sigma);
                within += naive_kernel(zp.row(i), zp.row(j), family, sigma);
            }
            cross += naive_kernel(z.row(i), zp.row(j), family, sigma);
        }
    }
    return within / (n * (n - 1.0)) - 2.0 * cross / (static_cast<double>(n) * n);
}

// Plain double-loop evaluation of the biased estimator.
inline double naive_mmd2_v(const MatrixXd& z, const MatrixXd& zp, symtest::KernelFamily family,
                           double sigma) {
    const int n = static_cast<int>(z.rows());
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            acc += naive_kernel(z.row(i), z.row(j), family, sigma);
            acc += naive_kernel(zp.row(i), zp.row(j), family, sigma);
            acc -= 2.0 * naive_kernel(z.row(i), zp.row(j), family, sigma);
        }
    }
    return acc / (static_cast<double>(n) * n);
}

// Direct evaluation of the softmax aggregation without overflow protection.
inline double naive_fuse(const std::vector<double>& components, double omega) {
    double acc = 0.0;
    for (double v : components) acc += std::exp(omega * v);
    return std::log(acc / components.size()) / omega;
}

// Kolmogorov-Smirnov distance of a sample from Unif(0, 1].
inline double ks_uniform01(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    const double n = static_cast<double>(values.size());
    double d = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double cdf = values[i];  // uniform CDF at the value
        d = std::max(d, std::abs((i + 1) / n - cdf));
        d = std::max(d, std::abs(cdf - i / n));
    }
    return d;
}

inline double energy_statistic(const MatrixXd& a, const MatrixXd& b) {
    const int n = static_cast<int>(a.rows());
    const int m = static_cast<int>(b.rows());
    double aa = 0.0, bb = 0.0, ab = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) aa += (a.row(i) - a.row(j)).norm();
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) bb += (b.row(i) - b.row(j)).norm();
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j) ab += (a.row(i) - b.row(j)).norm();
    return 2.0 * ab / (static_cast<double>(n) * m) - aa / (static_cast<double>(n) * n) -
           bb / (static_cast<double>(m) * m);
}

// Two-sample energy-distance permutation test; returns the p-value.
inline double energy_permutation_pvalue(const MatrixXd& a, const MatrixXd& b, int permutations,
                                        unsigned seed) {
    const int n = static_cast<int>(a.rows());
    const int m = static_cast<int>(b.rows());
    MatrixXd pool(n + m, a.cols());
    pool.topRows(n) = a;
    pool.bottomRows(m) = b;
    const double observed = energy_statistic(a, b);
    std::mt19937_64 rng(seed);
    std::vector<int> idx(n + m);
    for (int i = 0; i < n + m; ++i) idx[i] = i;
    int count = 0;
    for (int p = 0; p < permutations; ++p) {
        std::shuffle(idx.begin(), idx.end(), rng);
        MatrixXd pa(n, a.cols()), pb(m, a.cols());
        for (int i = 0; i < n; ++i) pa.row(i) = pool.row(idx[i]);
        for (int i = 0; i < m; ++i) pb.row(i) = pool.row(idx[n + i]);
        if (energy_statistic(pa, pb) >= observed) ++count;
    }
    return (1.0 + count) / (permutations + 1.0);
}

}  // namespace testsupport

#endif
