#include <catch2/catch_amalgamated.hpp>

#include "symtest/groups/rotations.hpp"
#include "support/helpers.hpp"

#include <cmath>

using namespace symtest;

namespace {
const double kPi = std::acos(-1.0);
}

TEST_CASE("planar rotation matrix") {
    REQUIRE(rotation_2d(0.0).isApprox(Matrix::Identity(2, 2), 1e-15));

    Vector e1(2);
    e1 << 1.0, 0.0;
    const Vector quarter = rotation_2d(kPi / 2.0) * e1;
    CHECK(std::abs(quarter(0)) < 1e-15);
    CHECK(std::abs(quarter(1) - 1.0) < 1e-15);

    const Matrix r = rotation_2d(kPi / 3.0);
    CHECK(r(0, 0) == Catch::Approx(std::cos(kPi / 3.0)).margin(1e-15));
    CHECK(r(0, 1) == Catch::Approx(-std::sin(kPi / 3.0)).margin(1e-15));
    CHECK(r(1, 0) == Catch::Approx(std::sin(kPi / 3.0)).margin(1e-15));
    CHECK(r(1, 1) == Catch::Approx(std::cos(kPi / 3.0)).margin(1e-15));

    CHECK_THROWS_AS(rotation_2d(std::nan("")), std::invalid_argument);
    CHECK_THROWS_AS(rotation_2d(std::numeric_limits<double>::infinity()), std::invalid_argument);
}

TEST_CASE("uniform rotation sampling") {
    Rng rng = make_rng(101);
    CHECK_THROWS_AS(sample_haar_rotation(1, rng), std::invalid_argument);

    SECTION("every draw is a rotation matrix") {
        for (int d : {2, 3, 5}) {
            for (int rep = 0; rep < 50; ++rep) {
                CHECK(is_rotation_matrix(sample_haar_rotation(d, rng)));
            }
        }
    }

    SECTION("planar angle is uniform") {
        const int draws = 100000;
        std::vector<double> unit(draws);
        for (int i = 0; i < draws; ++i) {
            const Matrix g = sample_haar_rotation(2, rng);
            double angle = std::atan2(g(1, 0), g(0, 0));
            if (angle < 0.0) angle += 2.0 * kPi;
            unit[i] = angle / (2.0 * kPi);
        }
        CHECK(testsupport::ks_uniform01(unit) < 0.01);
    }

    SECTION("pushforward of a fixed direction has zero mean") {
        const int draws = 100000;
        Vector v = Vector::Zero(3);
        v(2) = 1.0;
        Vector acc = Vector::Zero(3);
        for (int i = 0; i < draws; ++i) acc += sample_haar_rotation(3, rng) * v;
        CHECK((acc / draws).norm() < 0.02);
    }
}

TEST_CASE("orbit representative on the first axis") {
    CHECK(so_d_orbit_rep(Vector::Zero(4)).isZero(0.0));

    Vector x(2);
    x << 3.0, 4.0;
    Vector rep = so_d_orbit_rep(x);
    CHECK(rep(0) == Catch::Approx(5.0).margin(1e-12));
    CHECK(rep(1) == 0.0);

    Vector y(3);
    y << 1.0, 2.0, 2.0;
    rep = so_d_orbit_rep(y);
    CHECK(rep(0) == Catch::Approx(3.0).margin(1e-12));
    CHECK(rep.tail(2).isZero(0.0));
}

TEST_CASE("representative inversion") {
    SECTION("points on the positive axis invert to the identity") {
        Vector x = Vector::Zero(3);
        x(0) = 2.5;
        CHECK(so_d_representative_inversion(x).isApprox(Matrix::Identity(3, 3), 1e-12));
    }

    SECTION("defining property on random points") {
        Rng rng = make_rng(77);
        std::normal_distribution<double> gauss(0.0, 1.0);
        for (int d : {2, 3, 4, 6}) {
            for (int rep = 0; rep < 200; ++rep) {
                Vector x(d);
                for (int k = 0; k < d; ++k) x(k) = gauss(rng);
                const Matrix tau = so_d_representative_inversion(x);
                REQUIRE(is_rotation_matrix(tau));
                Vector axis = Vector::Zero(d);
                axis(0) = x.norm();
                CHECK((tau * axis - x).norm() < 1e-9);
            }
        }
    }

    SECTION("planar case matches the quarter turn") {
        Vector x(2);
        x << 0.0, 1.0;
        CHECK(so_d_representative_inversion(x).isApprox(rotation_2d(kPi / 2.0), 1e-12));
    }

    SECTION("antiparallel input uses the fixed plane") {
        Vector x = Vector::Zero(3);
        x(0) = -2.0;
        const Matrix tau = so_d_representative_inversion(x);
        REQUIRE(is_rotation_matrix(tau));
        Vector axis = Vector::Zero(3);
        axis(0) = 2.0;
        CHECK((tau * axis - x).norm() < 1e-9);
        CHECK(tau(2, 2) == Catch::Approx(1.0).margin(1e-12));
    }

    CHECK_THROWS_AS(so_d_representative_inversion(Vector::Zero(3)), degenerate_input_error);
}

TEST_CASE("inversion kernel sampling") {
    Rng rng = make_rng(55);

    SECTION("planar draws are deterministic") {
        std::normal_distribution<double> gauss(0.0, 1.0);
        for (int rep = 0; rep < 20; ++rep) {
            Vector x(2);
            x << gauss(rng), gauss(rng);
            if (x.norm() == 0.0) continue;
            CHECK(so_d_sample_inversion(x, rng).isApprox(so_d_representative_inversion(x), 1e-12));
        }
    }

    SECTION("draws invert the representative") {
        std::normal_distribution<double> gauss(0.0, 1.0);
        for (int d : {3, 5}) {
            for (int rep = 0; rep < 200; ++rep) {
                Vector x(d);
                for (int k = 0; k < d; ++k) x(k) = gauss(rng);
                const Matrix g = so_d_sample_inversion(x, rng);
                Vector axis = Vector::Zero(d);
                axis(0) = x.norm();
                CHECK((g * axis - x).norm() < 1e-7);
            }
        }
    }

    SECTION("stabilizer draws fix the axis point") {
        Vector x = Vector::Zero(3);
        x(0) = 1.0;
        for (int rep = 0; rep < 50; ++rep) {
            const Matrix g = so_d_sample_inversion(x, rng);
            CHECK((g.col(0) - x).norm() < 1e-9);
        }
    }

    CHECK_THROWS_AS(so_d_sample_inversion(Vector::Zero(3), rng), degenerate_input_error);
}
