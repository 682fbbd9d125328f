#ifndef SYMTEST_KERNELS_KERNELS_HPP
#define SYMTEST_KERNELS_KERNELS_HPP

#include <cmath>
#include <string>

#include "symtest/common.hpp"

namespace symtest {

enum class KernelFamily { gaussian, laplace, information_diffusion };

inline std::string to_string(KernelFamily f) {
    switch (f) {
        case KernelFamily::gaussian: return "gaussian";
        case KernelFamily::laplace: return "laplace";
        case KernelFamily::information_diffusion: return "information_diffusion";
    }
    return "?";
}

inline KernelFamily kernel_family_from_string(const std::string& s) {
    if (s == "gaussian") return KernelFamily::gaussian;
    if (s == "laplace") return KernelFamily::laplace;
    if (s == "information_diffusion") return KernelFamily::information_diffusion;
    throw std::invalid_argument("unknown kernel family: " + s);
}

inline void check_simplex(const Vector& z) {
    require((z.array() >= -1e-12).all() && std::abs(z.sum() - 1.0) <= 1e-9,
            "information diffusion kernel needs points on the probability simplex");
}

// Diagonal value k(z, z), constant over z within a family.
inline double kernel_diag(KernelFamily family, double sigma, int dim) {
    require(sigma > 0.0, "kernel bandwidth must be positive");
    switch (family) {
        case KernelFamily::gaussian:
        case KernelFamily::laplace: return 1.0;
        case KernelFamily::information_diffusion:
            return std::pow(4.0 * std::acos(-1.0) * sigma, -(dim + 1) / 2.0);
    }
    return 1.0;
}

inline double eval_kernel(KernelFamily family, double sigma, const Vector& z, const Vector& zp) {
    require(sigma > 0.0, "kernel bandwidth must be positive");
    require(z.size() == zp.size(), "kernel arguments must have equal dimension");
    switch (family) {
        case KernelFamily::gaussian: {
            const double d2 = (z - zp).squaredNorm();
            return std::exp(-d2 / (2.0 * sigma * sigma));
        }
        case KernelFamily::laplace: {
            const double d1 = (z - zp).lpNorm<1>();
            return std::exp(-d1 / sigma);
        }
        case KernelFamily::information_diffusion: {
            check_simplex(z);
            check_simplex(zp);
            double s = (z.array().max(0.0) * zp.array().max(0.0)).sqrt().sum();
            s = std::min(1.0, std::max(-1.0, s));
            const double a = std::acos(s);
            return kernel_diag(family, sigma, static_cast<int>(z.size())) *
                   std::exp(-a * a / sigma);
        }
    }
    return 0.0;
}

inline Matrix gram_matrix(KernelFamily family, double sigma, const Matrix& z) {
    const int n = static_cast<int>(z.rows());
    Matrix g(n, n);
    for (int i = 0; i < n; ++i) {
        g(i, i) = kernel_diag(family, sigma, static_cast<int>(z.cols()));
        for (int j = i + 1; j < n; ++j) {
            g(i, j) = g(j, i) = eval_kernel(family, sigma, z.row(i), z.row(j));
        }
    }
    return g;
}

}  // namespace symtest

#endif
