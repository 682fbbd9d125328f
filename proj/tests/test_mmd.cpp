#include <catch2/catch_amalgamated.hpp>

#include "symtest/kernels/mmd.hpp"
#include "symtest/rng.hpp"
#include "support/helpers.hpp"

#include <cmath>
#include <numeric>

using namespace symtest;

namespace {

Matrix random_points(int n, int d, Rng& rng, double scale = 1.0) {
    std::normal_distribution<double> gauss(0.0, scale);
    Matrix z(n, d);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < d; ++k) z(i, k) = gauss(rng);
    return z;
}

Matrix random_simplex(int n, int d, Rng& rng) {
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

TEST_CASE("unbiased estimator basics") {
    SECTION("two-point expansion") {
        Matrix z(2, 2);
        z << 0.3, -0.4, 1.1, 0.8;
        const double k_ab = eval_kernel(KernelFamily::gaussian, 0.9, z.row(0), z.row(1));
        CHECK(mmd2_u(z, z, KernelFamily::gaussian, 0.9) ==
              Catch::Approx(k_ab - 1.0).margin(1e-12));
    }

    SECTION("mean zero when the samples share a law") {
        Rng rng = make_rng(41);
        const int reps = 10000;
        double sum = 0.0, sumsq = 0.0;
        for (int rep = 0; rep < reps; ++rep) {
            const Matrix z = random_points(10, 2, rng);
            const Matrix zp = random_points(10, 2, rng);
            const double v = mmd2_u(z, zp, KernelFamily::gaussian, 1.0);
            sum += v;
            sumsq += v * v;
        }
        const double mean = sum / reps;
        const double sd = std::sqrt((sumsq / reps - mean * mean) / reps);
        CHECK(std::abs(mean) <= 3.0 * sd);
    }

    SECTION("size mismatch and tiny samples are rejected") {
        Rng rng = make_rng(42);
        const Matrix z = random_points(4, 2, rng);
        const Matrix zp = random_points(5, 2, rng);
        CHECK_THROWS_AS(mmd2_u(z, zp, KernelFamily::gaussian, 1.0), std::invalid_argument);
        CHECK_THROWS_AS(mmd2_u(z.topRows(1), zp.topRows(1), KernelFamily::gaussian, 1.0),
                        std::invalid_argument);
    }
}

TEST_CASE("estimators match the naive loops") {
    Rng rng = make_rng(43);
    for (int rep = 0; rep < 30; ++rep) {
        const int n = 5 + rep;
        const Matrix z = random_points(n, 3, rng);
        const Matrix zp = random_points(n, 3, rng, 1.4);
        for (auto family : {KernelFamily::gaussian, KernelFamily::laplace}) {
            const double sigma = 0.5 + 0.1 * rep;
            CHECK(mmd2_u(z, zp, family, sigma) ==
                  Catch::Approx(testsupport::naive_mmd2_u(z, zp, family, sigma)).margin(1e-12));
            CHECK(mmd2_v(z, zp, family, sigma) ==
                  Catch::Approx(testsupport::naive_mmd2_v(z, zp, family, sigma)).margin(1e-12));
        }
    }
    // simplex kernel route
    for (int rep = 0; rep < 5; ++rep) {
        const Matrix z = random_simplex(12, 3, rng);
        const Matrix zp = random_simplex(12, 3, rng);
        CHECK(mmd2_u(z, zp, KernelFamily::information_diffusion, 0.7) ==
              Catch::Approx(
                  testsupport::naive_mmd2_u(z, zp, KernelFamily::information_diffusion, 0.7))
                  .margin(1e-12));
    }
}

TEST_CASE("biased estimator properties") {
    Rng rng = make_rng(44);
    const Matrix z = random_points(15, 3, rng);
    CHECK(mmd2_v(z, z, KernelFamily::gaussian, 1.0) == Catch::Approx(0.0).margin(1e-12));

    for (int rep = 0; rep < 1000; ++rep) {
        const Matrix a = random_points(8, 2, rng);
        const Matrix b = random_points(8, 2, rng, 2.0);
        CHECK(mmd2_v(a, b, KernelFamily::gaussian, 0.8) >= -1e-15);
    }
}

TEST_CASE("estimator difference identity") {
    // U - V expands to within-sample off-diagonal means minus the diagonal
    // contribution; both sides evaluated independently
    Rng rng = make_rng(45);
    for (int rep = 0; rep < 20; ++rep) {
        const int n = 6 + rep;
        const Matrix z = random_points(n, 2, rng);
        const Matrix zp = random_points(n, 2, rng);
        const double u = mmd2_u(z, zp, KernelFamily::gaussian, 1.1);
        const double v = mmd2_v(z, zp, KernelFamily::gaussian, 1.1);

        double offdiag = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                if (i == j) continue;
                offdiag += testsupport::naive_kernel(z.row(i), z.row(j), KernelFamily::gaussian, 1.1);
                offdiag +=
                    testsupport::naive_kernel(zp.row(i), zp.row(j), KernelFamily::gaussian, 1.1);
            }
        const double expected_gap =
            offdiag / (static_cast<double>(n) * n * (n - 1.0)) - 2.0 / n;
        CHECK(u - v == Catch::Approx(expected_gap).margin(1e-10));
        CHECK(u <= v + 2.0 / (n - 1.0) + 1e-12);
    }
}

TEST_CASE("softmax aggregation") {
    Rng rng = make_rng(46);
    const Matrix z = random_points(20, 2, rng);
    const Matrix zp = random_points(20, 2, rng, 1.3);

    SECTION("single bandwidth reduces to the plain estimator") {
        const std::vector<double> grid{0.9};
        const auto v = fuse_statistic(z, zp, grid, {KernelFamily::gaussian}, fuse_omega(20));
        CHECK(v.value == Catch::Approx(mmd2_u(z, zp, KernelFamily::gaussian, 0.9)).margin(1e-12));
    }

    SECTION("bounds and direct-formula agreement") {
        const std::vector<double> grid{0.4, 0.8, 1.6, 3.2};
        const double omega = 5.0;  // small enough for the unshifted formula
        const auto v = fuse_statistic(z, zp, grid, {KernelFamily::gaussian, KernelFamily::laplace},
                                      omega);
        const std::size_t L = v.per_bandwidth.size();
        REQUIRE(L == 8);
        const double max_comp =
            *std::max_element(v.per_bandwidth.begin(), v.per_bandwidth.end());
        double mean_comp = 0.0;
        for (double c : v.per_bandwidth) mean_comp += c / L;
        CHECK(v.value <= max_comp + 1e-12);
        CHECK(v.value >= mean_comp - std::log(static_cast<double>(L)) / omega - 1e-12);
        CHECK(v.value ==
              Catch::Approx(testsupport::naive_fuse(v.per_bandwidth, omega)).margin(1e-10));
    }

    SECTION("large weights do not overflow") {
        const std::vector<double> grid{0.5, 1.0};
        const auto v = fuse_statistic(z, zp, grid, {KernelFamily::gaussian}, 1e6);
        CHECK(std::isfinite(v.value));
    }

    CHECK_THROWS_AS(fuse_statistic(z, zp, {}, {KernelFamily::gaussian}, 1.0),
                    std::invalid_argument);
}

TEST_CASE("sup aggregation") {
    Rng rng = make_rng(47);
    const Matrix z = random_points(18, 3, rng);
    const Matrix zp = random_points(18, 3, rng, 1.5);

    SECTION("single bandwidth reduces to the plain estimator") {
        const auto v = sk_statistic(z, zp, {1.1}, {KernelFamily::gaussian});
        CHECK(v.value == Catch::Approx(mmd2_u(z, zp, KernelFamily::gaussian, 1.1)).margin(1e-12));
    }

    SECTION("matches an explicit loop and dominates the softmax") {
        const std::vector<double> grid{0.3, 0.7, 1.4, 2.8};
        const auto v = sk_statistic(z, zp, grid, {KernelFamily::gaussian, KernelFamily::laplace});
        double loop_max = -1e300;
        for (auto family : {KernelFamily::gaussian, KernelFamily::laplace})
            for (double s : grid) loop_max = std::max(loop_max, mmd2_u(z, zp, family, s));
        CHECK(v.value == loop_max);

        const double omega = fuse_omega(18);
        const auto f = fuse_statistic(z, zp, grid,
                                      {KernelFamily::gaussian, KernelFamily::laplace}, omega);
        CHECK(v.value >= f.value - std::log(8.0) / omega - 1e-12);
    }

    CHECK_THROWS_AS(sk_statistic(z, zp, {}, {KernelFamily::gaussian}), std::invalid_argument);
}

TEST_CASE("statistics are invariant to joint reordering") {
    Rng rng = make_rng(48);
    const int n = 16;
    const Matrix z = random_points(n, 3, rng);
    const Matrix zp = random_points(n, 3, rng);
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    Matrix z2(n, 3), zp2(n, 3);
    for (int i = 0; i < n; ++i) {
        z2.row(i) = z.row(perm[i]);
        zp2.row(i) = zp.row(perm[i]);
    }
    const std::vector<double> grid{0.5, 1.0, 2.0};
    CHECK(mmd2_u(z, zp, KernelFamily::gaussian, 1.0) ==
          Catch::Approx(mmd2_u(z2, zp2, KernelFamily::gaussian, 1.0)).margin(1e-12));
    CHECK(mmd2_v(z, zp, KernelFamily::laplace, 1.0) ==
          Catch::Approx(mmd2_v(z2, zp2, KernelFamily::laplace, 1.0)).margin(1e-12));
    CHECK(fuse_statistic(z, zp, grid, {KernelFamily::gaussian}, 10.0).value ==
          Catch::Approx(fuse_statistic(z2, zp2, grid, {KernelFamily::gaussian}, 10.0).value)
              .margin(1e-12));
    CHECK(sk_statistic(z, zp, grid, {KernelFamily::laplace}).value ==
          Catch::Approx(sk_statistic(z2, zp2, grid, {KernelFamily::laplace}).value)
              .margin(1e-12));
}
