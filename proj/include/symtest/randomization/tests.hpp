#ifndef SYMTEST_RANDOMIZATION_TESTS_HPP
#define SYMTEST_RANDOMIZATION_TESTS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "symtest/common.hpp"
#include "symtest/kernels/mmd.hpp"
#include "symtest/randomization/dataset.hpp"
#include "symtest/randomization/pvalue.hpp"
#include "symtest/randomization/samplers.hpp"
#include "symtest/rng.hpp"

namespace symtest {

enum class DataScope { pair, y_only };

inline std::string to_string(DataScope s) {
    return s == DataScope::pair ? "pair" : "y_only";
}

inline DataScope data_scope_from_string(const std::string& s) {
    if (s == "pair") return DataScope::pair;
    if (s == "y_only") return DataScope::y_only;
    throw std::invalid_argument("unknown data scope: " + s);
}

struct TestStatisticSpec {
    StatKind kind = StatKind::fuse;
    std::vector<KernelFamily> families = {KernelFamily::gaussian, KernelFamily::laplace};
    int grid_size = 10;
    bool use_vstat = false;
    double fixed_sigma = 0.0;  // > 0: single kernel of families[0] at this bandwidth
};

struct TestResult {
    double p_value = 1.0;
    double observed_stat = 0.0;
    std::vector<double> null_stats;
    bool reject = false;
    std::uint64_t seed = 0;
};

inline TwoSampleStatistic build_statistic(const TestStatisticSpec& spec,
                                          const Matrix& conditioning_points) {
    if (spec.fixed_sigma > 0.0) {
        require(!spec.families.empty(), "statistic needs a kernel family");
        const bool vstat = spec.use_vstat || spec.kind == StatKind::mmd2_v;
        return TwoSampleStatistic(spec.kind, {{spec.families.front(), spec.fixed_sigma}}, vstat);
    }
    require(conditioning_points.rows() >= 2,
            "bandwidth selection needs at least two conditioning points");
    return TwoSampleStatistic::from_grids(spec.kind, spec.families, conditioning_points,
                                          spec.grid_size, spec.use_vstat);
}

namespace detail {

inline Matrix hcat(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows(), a.cols() + b.cols());
    out << a, b;
    return out;
}

// How the comparison sample of the two-sample statistic is drawn across the
// observed round and the null rounds. With a shared comparison set the B + 1
// statistics are conditionally i.i.d. given it, so the test keeps its exact
// level; giving the observed round its own comparison set breaks that
// exchangeability and empirically over-rejects. The last mode is kept only as
// a study surface.
enum class ComparisonMode { fresh_per_round, shared, shared_distinct_observed };

inline ComparisonMode comparison_mode(bool reuse, bool distinct_observed) {
    if (!reuse) return ComparisonMode::fresh_per_round;
    return distinct_observed ? ComparisonMode::shared_distinct_observed : ComparisonMode::shared;
}

// Randomization-vs-observed test core: T(0) compares the observed sample with
// a randomization, each null round compares a fresh randomization with either
// a per-round or the shared comparison set, and the p-value counts null
// rounds that reach T(0).
template <typename DrawFn>
TestResult randomization_test_core(const Matrix& z_obs, const TwoSampleStatistic& stat,
                                   DrawFn&& draw, int num_rounds, double alpha,
                                   ComparisonMode mode, std::uint64_t seed) {
    require(num_rounds >= 1, "the test needs at least one randomization round");
    require(alpha >= 0.0 && alpha <= 1.0, "test level must lie in [0, 1]");

    TestResult result;
    result.seed = seed;

    TwoSampleStatistic::RhsCache cache;
    Matrix z_cmp;
    const bool shared = mode != ComparisonMode::fresh_per_round;
    if (shared) {
        Rng rng1 = make_rng(seed, 1);
        z_cmp = draw(rng1);
        cache = stat.make_rhs_cache(z_cmp);
    }

    if (mode == ComparisonMode::shared) {
        result.observed_stat = stat.evaluate_with_rhs(z_obs, z_cmp, cache).value;
    } else {
        Rng rng0 = make_rng(seed, 0);
        const Matrix z0 = draw(rng0);
        result.observed_stat = stat.evaluate(z_obs, z0).value;
    }

    result.null_stats.resize(num_rounds);
    for (int b = 0; b < num_rounds; ++b) {
        Rng rng_b = make_rng(seed, 2 + 2 * static_cast<std::uint64_t>(b));
        const Matrix zb = draw(rng_b);
        if (!shared) {
            Rng rng_c = make_rng(seed, 3 + 2 * static_cast<std::uint64_t>(b));
            z_cmp = draw(rng_c);
            cache = stat.make_rhs_cache(z_cmp);
        }
        result.null_stats[b] = stat.evaluate_with_rhs(zb, z_cmp, cache).value;
    }
    result.p_value = compute_p_value(result.observed_stat, result.null_stats);
    result.reject = result.p_value <= alpha;
    return result;
}

}  // namespace detail

// Conditioning data available to the statistic: the aligned responses when the
// scheme keeps them fixed, otherwise the orbit representatives; paired scope
// prepends the representatives.
template <GroupAction A>
Matrix conditioning_matrix(const PairedDataset<A>& ds, Variant variant, DataScope scope) {
    const bool ytilde_fixed = variant == Variant::r1_resample_gamma;
    if (scope == DataScope::y_only) return ytilde_fixed ? ds.y_tilde : ds.rep;
    return ytilde_fixed ? detail::hcat(ds.rep, ds.y_tilde) : ds.rep;
}

// Conditional randomization test for group symmetry of the response
// distribution, built on exchangeable randomizations of the paired data.
template <GroupAction A>
TestResult crt_symmetry_test(const A& action, const PairedDataset<A>& ds,
                             const RandomizationScheme<A>& scheme, const TestStatisticSpec& spec,
                             int num_rounds, double alpha, bool reuse, DataScope scope,
                             std::uint64_t seed, bool distinct_observed_comparison = false) {
    require(ds.n() >= 2, "the conditional test needs n >= 2");
    if constexpr (requires { action.trivial_on_y(); }) {
        require(!(scope == DataScope::y_only && action.trivial_on_y()),
                "response-only scope needs a group acting non-trivially on the responses");
    }

    const TwoSampleStatistic stat =
        build_statistic(spec, conditioning_matrix(ds, scheme.variant, scope));
    const ConditionalRandomizer<A> randomizer(action, ds, scheme, derive_seed(seed, 0x636861));

    const Matrix z_obs = scope == DataScope::pair ? detail::hcat(ds.x, ds.y) : ds.y;
    auto draw = [&](Rng& rng) {
        Matrix xr, yr;
        if (scope == DataScope::pair) {
            randomizer.draw(rng, &xr, yr);
            return detail::hcat(xr, yr);
        }
        randomizer.draw(rng, nullptr, yr);
        return yr;
    };
    return detail::randomization_test_core(
        z_obs, stat, draw, num_rounds, alpha,
        detail::comparison_mode(reuse, distinct_observed_comparison), seed);
}

// Marginal invariance test: each randomization round transforms every
// observation by an independent uniform group element.
template <GroupAction A>
TestResult marginal_invariance_test(const A& action, const Matrix& x, const TestStatisticSpec& spec,
                                    int num_rounds, double alpha, bool reuse, std::uint64_t seed,
                                    bool distinct_observed_comparison = false) {
    if (!A::is_compact)
        throw unsupported_operation_error("marginal invariance tests need a compact group");
    const int n = static_cast<int>(x.rows());
    require(n >= 1, "the invariance test needs data");

    Matrix reps(n, action.orbit_rep(x.row(0)).size());
    for (int i = 0; i < n; ++i) reps.row(i) = action.orbit_rep(x.row(i));

    const TwoSampleStatistic stat = build_statistic(spec, reps);
    auto draw = [&](Rng& rng) {
        Matrix out(n, x.cols());
        for (int i = 0; i < n; ++i)
            out.row(i) = action.act_x(action.sample_haar(rng), x.row(i));
        return out;
    };
    return detail::randomization_test_core(
        x, stat, draw, num_rounds, alpha,
        detail::comparison_mode(reuse, distinct_observed_comparison), seed);
}

// Two-sample permutation test between an observed sample and one
// randomization: the pooled statistic distribution is evaluated over label
// permutations via per-component pooled kernel matrices, so each permutation
// costs one quadratic form per component instead of fresh kernel sums.
inline TestResult two_sample_permutation_test(const Matrix& z_obs, const Matrix& z_rand,
                                              const TwoSampleStatistic& stat, int num_rounds,
                                              double alpha, std::uint64_t seed) {
    const int n = static_cast<int>(z_obs.rows());
    require(z_rand.rows() == n, "permutation test needs equally sized samples");
    require(num_rounds >= 1, "the test needs at least one permutation");

    TestResult result;
    result.seed = seed;
    result.observed_stat = stat.evaluate(z_obs, z_rand).value;

    const int total = 2 * n;
    Matrix pool(total, z_obs.cols());
    pool.topRows(n) = z_obs;
    pool.bottomRows(n) = z_rand;

    const auto& comps = stat.components();
    const int num_comps = static_cast<int>(comps.size());
    const int dim = static_cast<int>(pool.cols());

    detail::FeatureNeeds needs;
    for (const auto& c : comps) {
        needs.sq_euclidean |= c.family == KernelFamily::gaussian;
        needs.manhattan |= c.family == KernelFamily::laplace;
        needs.sq_angle |= c.family == KernelFamily::information_diffusion;
    }
    detail::PairFeatures features;
    detail::cross_pair_features(pool, pool, needs, features);

    // Signed-label quadratic forms: with s in {+/-1}^{2n} and G the pooled
    // kernel matrix, s^T G s = S11 + S22 - 2 S12 and 1^T G 1 = S11 + S22 + 2 S12.
    Matrix signs(total, num_rounds);
    Rng rng = make_rng(seed, 0x706572 /* per-test permutation stream */);
    {
        std::vector<int> idx(total);
        std::iota(idx.begin(), idx.end(), 0);
        for (int b = 0; b < num_rounds; ++b) {
            std::shuffle(idx.begin(), idx.end(), rng);
            for (int i = 0; i < total; ++i)
                signs(idx[i], b) = i < n ? 1.0 : -1.0;
        }
    }

    const double nn = static_cast<double>(n);
    Matrix null_comps(num_comps, num_rounds);
    Eigen::ArrayXXd gram(total, total);
    for (int k = 0; k < num_comps; ++k) {
        const auto& c = comps[k];
        switch (c.family) {
            case KernelFamily::gaussian:
                gram = (features.sq_euclidean * (-0.5 / (c.sigma * c.sigma))).exp();
                break;
            case KernelFamily::laplace:
                gram = (features.manhattan * (-1.0 / c.sigma)).exp();
                break;
            case KernelFamily::information_diffusion:
                gram = kernel_diag(c.family, c.sigma, dim) *
                       (features.sq_angle * (-1.0 / c.sigma)).exp();
                break;
        }
        const double grand = gram.sum();
        const Matrix gs = gram.matrix() * signs;
        for (int b = 0; b < num_rounds; ++b) {
            const double quad = signs.col(b).dot(gs.col(b));
            if (stat.use_vstat() || stat.kind() == StatKind::mmd2_v) {
                null_comps(k, b) = quad / (nn * nn);
            } else {
                const double diag = kernel_diag(c.family, c.sigma, dim);
                const double within = 0.5 * (quad + grand);       // S11 + S22
                const double cross = 0.25 * (grand - quad);       // S12
                null_comps(k, b) = (within - 2.0 * nn * diag) / (nn * (nn - 1.0)) -
                                   2.0 * cross / (nn * nn);
            }
        }
    }

    result.null_stats.resize(num_rounds);
    for (int b = 0; b < num_rounds; ++b) {
        std::vector<double> vals(null_comps.col(b).data(), null_comps.col(b).data() + num_comps);
        switch (stat.kind()) {
            case StatKind::mmd2_u:
            case StatKind::mmd2_v: result.null_stats[b] = vals[0]; break;
            case StatKind::fuse: result.null_stats[b] = fuse_from_components(vals, fuse_omega(n)); break;
            case StatKind::sk: result.null_stats[b] = sk_from_components(vals); break;
        }
    }
    result.p_value = compute_p_value(result.observed_stat, result.null_stats);
    result.reject = result.p_value <= alpha;
    return result;
}

// Baseline for the conditional test: one randomization, then a pooled
// two-sample permutation comparison against the observed data.
template <GroupAction A>
TestResult baseline_permutation_test(const A& action, const PairedDataset<A>& ds,
                                     const RandomizationScheme<A>& scheme,
                                     const TestStatisticSpec& spec, int num_rounds, double alpha,
                                     DataScope scope, std::uint64_t seed) {
    require(ds.n() >= 2, "the baseline test needs n >= 2");
    if constexpr (requires { action.trivial_on_y(); }) {
        require(!(scope == DataScope::y_only && action.trivial_on_y()),
                "response-only scope needs a group acting non-trivially on the responses");
    }

    const TwoSampleStatistic stat =
        build_statistic(spec, conditioning_matrix(ds, scheme.variant, scope));
    const ConditionalRandomizer<A> randomizer(action, ds, scheme, derive_seed(seed, 0x636861));

    const Matrix z_obs = scope == DataScope::pair ? detail::hcat(ds.x, ds.y) : ds.y;
    Rng rng0 = make_rng(seed, 0);
    Matrix xr, yr;
    Matrix z_rand;
    if (scope == DataScope::pair) {
        randomizer.draw(rng0, &xr, yr);
        z_rand = detail::hcat(xr, yr);
    } else {
        randomizer.draw(rng0, nullptr, yr);
        z_rand = yr;
    }
    return two_sample_permutation_test(z_obs, z_rand, stat, num_rounds, alpha, seed);
}

// Baseline for the marginal invariance test: one element-wise uniform
// randomization, then a pooled permutation comparison.
template <GroupAction A>
TestResult baseline_marginal_test(const A& action, const Matrix& x, const TestStatisticSpec& spec,
                                  int num_rounds, double alpha, std::uint64_t seed) {
    if (!A::is_compact)
        throw unsupported_operation_error("marginal invariance tests need a compact group");
    const int n = static_cast<int>(x.rows());
    require(n >= 2, "the baseline test needs n >= 2");

    Matrix reps(n, action.orbit_rep(x.row(0)).size());
    for (int i = 0; i < n; ++i) reps.row(i) = action.orbit_rep(x.row(i));
    const TwoSampleStatistic stat = build_statistic(spec, reps);

    Rng rng0 = make_rng(seed, 0);
    Matrix z_rand(n, x.cols());
    for (int i = 0; i < n; ++i)
        z_rand.row(i) = action.act_x(action.sample_haar(rng0), x.row(i));
    return two_sample_permutation_test(x, z_rand, stat, num_rounds, alpha, seed);
}

}  // namespace symtest

#endif
