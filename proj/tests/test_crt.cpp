#include <catch2/catch_amalgamated.hpp>

#include "symtest/randomization/tests.hpp"
#include "symtest/synth/designs.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

using namespace symtest;

namespace {

template <GroupAction A>
PairedDataset<A> dataset(const A& action, int n, int d, double p, std::uint64_t seed) {
    Rng rng = make_rng(seed);
    auto [x, y] = gen_gauss_cov(n, d, p, rng);
    return make_paired_dataset(action, x, y, rng);
}

}  // namespace

TEST_CASE("conditional symmetry test basics") {
    const RotationAction action(3);
    auto ds = dataset(action, 40, 3, 0.0, 701);
    RandomizationScheme<RotationAction> scheme;
    TestStatisticSpec spec;

    SECTION("valid p-values under both comparison policies") {
        for (bool reuse : {true, false}) {
            const auto r =
                crt_symmetry_test(action, ds, scheme, spec, 25, 0.05, reuse, DataScope::y_only, 5);
            CHECK(r.p_value > 0.0);
            CHECK(r.p_value <= 1.0);
            CHECK(r.null_stats.size() == 25);
            CHECK(r.reject == (r.p_value <= 0.05));
        }
    }

    SECTION("paired scope runs") {
        const auto r =
            crt_symmetry_test(action, ds, scheme, spec, 15, 0.05, true, DataScope::pair, 6);
        CHECK(r.p_value > 0.0);
        CHECK(r.p_value <= 1.0);
    }

    SECTION("identical seed and config reproduce the result bitwise") {
        const auto a =
            crt_symmetry_test(action, ds, scheme, spec, 20, 0.05, true, DataScope::y_only, 7);
        const auto b =
            crt_symmetry_test(action, ds, scheme, spec, 20, 0.05, true, DataScope::y_only, 7);
        CHECK(a.p_value == b.p_value);
        CHECK(a.observed_stat == b.observed_stat);
        CHECK(a.null_stats == b.null_stats);
    }

    SECTION("response-only scope needs a response action") {
        const RotationAction trivial_y(3, /*trivial_on_y=*/true);
        auto ds2 = dataset(trivial_y, 20, 3, 0.0, 702);
        RandomizationScheme<RotationAction> s2;
        CHECK_THROWS_AS(
            crt_symmetry_test(trivial_y, ds2, s2, spec, 10, 0.05, true, DataScope::y_only, 8),
            std::invalid_argument);
        // the paired route remains available
        const auto r =
            crt_symmetry_test(trivial_y, ds2, s2, spec, 10, 0.05, true, DataScope::pair, 8);
        CHECK(r.p_value > 0.0);
    }
}

TEST_CASE("marginal invariance test basics") {
    Rng rng = make_rng(71);
    const RotationAction action(2);
    const Matrix x = gen_rot2d_invariance(50, 2.0 * std::acos(-1.0), rng);
    TestStatisticSpec spec;

    const auto r = marginal_invariance_test(action, x, spec, 30, 0.05, true, 9);
    CHECK(r.p_value > 0.0);
    CHECK(r.p_value <= 1.0);

    SECTION("single observation still yields a valid p-value") {
        TestStatisticSpec vspec;
        vspec.kind = StatKind::mmd2_v;
        vspec.fixed_sigma = 1.0;
        const auto r1 = marginal_invariance_test(action, x.topRows(1), vspec, 19, 0.05, true, 10);
        CHECK(r1.p_value >= 1.0 / 20.0);
        CHECK(r1.p_value <= 1.0);
    }
}

TEST_CASE("pooled permutation baseline") {
    const RotationAction action(3);
    TestStatisticSpec spec;
    RandomizationScheme<RotationAction> scheme;

    SECTION("two rows and one permutation") {
        auto ds = dataset(action, 2, 3, 0.0, 703);
        const auto r =
            baseline_permutation_test(action, ds, scheme, spec, 1, 0.5, DataScope::y_only, 11);
        CHECK((r.p_value == 0.5 || r.p_value == 1.0));
    }

    SECTION("pooled statistics match direct evaluation") {
        // the quadratic-form path must agree with evaluating the statistic on
        // explicitly permuted pools
        auto ds = dataset(action, 12, 3, 0.4, 704);
        const TwoSampleStatistic stat =
            build_statistic(spec, conditioning_matrix(ds, scheme.variant, DataScope::y_only));
        const ConditionalRandomizer<RotationAction> randomizer(action, ds, scheme);
        Rng rng0 = make_rng(12, 0);
        Matrix yr;
        randomizer.draw(rng0, nullptr, yr);
        const auto r = two_sample_permutation_test(ds.y, yr, stat, 40, 0.05, 12);

        Matrix pool(24, 3);
        pool.topRows(12) = ds.y;
        pool.bottomRows(12) = yr;
        Rng perm_rng = make_rng(static_cast<std::uint64_t>(12), 0x706572);
        std::vector<int> idx(24);
        std::iota(idx.begin(), idx.end(), 0);
        for (int b = 0; b < 40; ++b) {
            std::shuffle(idx.begin(), idx.end(), perm_rng);
            Matrix za(12, 3), zb(12, 3);
            for (int i = 0; i < 12; ++i) za.row(i) = pool.row(idx[i]);
            for (int i = 0; i < 12; ++i) zb.row(i) = pool.row(idx[12 + i]);
            const double direct = stat.evaluate(za, zb).value;
            CHECK(r.null_stats[b] == Catch::Approx(direct).margin(1e-10));
        }
    }

    SECTION("marginal baseline yields valid p-values") {
        Rng rng = make_rng(72);
        const RotationAction rot2(2);
        const Matrix x = gen_rot2d_invariance(40, 2.0 * std::acos(-1.0), rng);
        TestStatisticSpec mspec;
        const auto r = baseline_marginal_test(rot2, x, mspec, 30, 0.05, 13);
        CHECK(r.p_value > 0.0);
        CHECK(r.p_value <= 1.0);
    }
}
