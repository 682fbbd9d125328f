#include <catch2/catch_amalgamated.hpp>

#include "symtest/kernels/kernels.hpp"
#include "symtest/rng.hpp"

#include <cmath>

using namespace symtest;

namespace {

Matrix random_points(int n, int d, Rng& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Matrix z(n, d);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < d; ++k) z(i, k) = gauss(rng);
    return z;
}

Matrix random_simplex_points(int n, int d, Rng& rng) {
    std::exponential_distribution<double> expo(1.0);
    Matrix z(n, d);
    for (int i = 0; i < n; ++i) {
        double total = 0.0;
        for (int k = 0; k < d; ++k) {
            z(i, k) = expo(rng);
            total += z(i, k);
        }
        z.row(i) /= total;
    }
    return z;
}

}  // namespace

TEST_CASE("kernel evaluations") {
    Vector z(3), zp(3);
    z << 0.5, -1.0, 2.0;
    zp = z;

    CHECK(eval_kernel(KernelFamily::gaussian, 1.3, z, zp) == 1.0);

    Vector a(1), b(1);
    a << 0.0;
    b << 0.7;
    CHECK(eval_kernel(KernelFamily::laplace, 0.7, a, b) ==
          Catch::Approx(std::exp(-1.0)).margin(1e-15));

    Vector s(3);
    s << 0.2, 0.3, 0.5;
    const double sigma = 0.4;
    CHECK(eval_kernel(KernelFamily::information_diffusion, sigma, s, s) ==
          Catch::Approx(std::pow(4.0 * std::acos(-1.0) * sigma, -2.0)).margin(1e-15));

    Vector bad(3);
    bad << 0.5, 0.2, 0.2;  // does not sum to one
    CHECK_THROWS_AS(eval_kernel(KernelFamily::information_diffusion, sigma, s, bad),
                    std::invalid_argument);
    CHECK_THROWS_AS(eval_kernel(KernelFamily::gaussian, 0.0, z, zp), std::invalid_argument);
    CHECK_THROWS_AS(eval_kernel(KernelFamily::laplace, -1.0, z, zp), std::invalid_argument);
}

TEST_CASE("kernel symmetry") {
    Rng rng = make_rng(31);
    const Matrix z = random_points(20, 4, rng);
    for (auto family : {KernelFamily::gaussian, KernelFamily::laplace}) {
        for (int i = 0; i < 20; ++i)
            for (int j = 0; j < i; ++j)
                CHECK(eval_kernel(family, 0.9, z.row(i), z.row(j)) ==
                      Catch::Approx(eval_kernel(family, 0.9, z.row(j), z.row(i))).margin(1e-15));
    }
    const Matrix s = random_simplex_points(15, 3, rng);
    for (int i = 0; i < 15; ++i)
        for (int j = 0; j < i; ++j)
            CHECK(eval_kernel(KernelFamily::information_diffusion, 0.5, s.row(i), s.row(j)) ==
                  Catch::Approx(eval_kernel(KernelFamily::information_diffusion, 0.5, s.row(j),
                                            s.row(i)))
                      .margin(1e-15));
}

TEST_CASE("gram matrices are positive semidefinite") {
    Rng rng = make_rng(32);
    for (int rep = 0; rep < 5; ++rep) {
        const int n = 20 + 10 * rep;
        const Matrix z = random_points(n, 3, rng);
        for (auto family : {KernelFamily::gaussian, KernelFamily::laplace}) {
            const Matrix g = gram_matrix(family, 0.8, z);
            CHECK(g.isApprox(g.transpose(), 1e-12));
            Eigen::SelfAdjointEigenSolver<Matrix> eig(g);
            CHECK(eig.eigenvalues().minCoeff() >= -1e-8);
        }
        const Matrix s = random_simplex_points(n, 4, rng);
        const Matrix g = gram_matrix(KernelFamily::information_diffusion, 0.6, s);
        CHECK(g.isApprox(g.transpose(), 1e-12));
        Eigen::SelfAdjointEigenSolver<Matrix> eig(g);
        CHECK(eig.eigenvalues().minCoeff() >= -1e-8);
    }
}
