#ifndef SYMTEST_RANDOMIZATION_SAMPLERS_HPP
#define SYMTEST_RANDOMIZATION_SAMPLERS_HPP

#include <algorithm>
#include <functional>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "symtest/common.hpp"
#include "symtest/kernels/bandwidth.hpp"
#include "symtest/randomization/dataset.hpp"
#include "symtest/rng.hpp"

namespace symtest {

// Which part of the conditioned data gets resampled per randomization round.
enum class Variant { r1_resample_gamma, r2_resample_ytilde, r3_resample_both };

enum class SamplerKind {
    approx_kernel_weighted,  // weighted-neighbor approximation of the conditionals
    exact_transitive,        // permute the fixed inversion draws
    exact_equivariant,       // permute and correct via a supplied homomorphism
    exact_orbit_kernel       // caller supplies the true group-orbit sampler
};

inline std::string to_string(Variant v) {
    switch (v) {
        case Variant::r1_resample_gamma: return "R1";
        case Variant::r2_resample_ytilde: return "R2";
        case Variant::r3_resample_both: return "R3";
    }
    return "?";
}

inline Variant variant_from_string(const std::string& s) {
    if (s == "R1") return Variant::r1_resample_gamma;
    if (s == "R2") return Variant::r2_resample_ytilde;
    if (s == "R3") return Variant::r3_resample_both;
    throw std::invalid_argument("unknown conditioning variant: " + s);
}

inline std::string to_string(SamplerKind k) {
    switch (k) {
        case SamplerKind::approx_kernel_weighted: return "approx";
        case SamplerKind::exact_transitive: return "exact_transitive";
        case SamplerKind::exact_equivariant: return "exact_equivariant";
        case SamplerKind::exact_orbit_kernel: return "exact_orbit_kernel";
    }
    return "?";
}

inline SamplerKind sampler_kind_from_string(const std::string& s) {
    if (s == "approx") return SamplerKind::approx_kernel_weighted;
    if (s == "exact_transitive") return SamplerKind::exact_transitive;
    if (s == "exact_equivariant") return SamplerKind::exact_equivariant;
    if (s == "exact_orbit_kernel") return SamplerKind::exact_orbit_kernel;
    throw std::invalid_argument("unknown sampler kind: " + s);
}

// How the approximate sampler assigns pool indices to rows. Independent
// draws follow the letter of the weighted-resampling procedure, but their
// bootstrap duplicates give the randomized clouds a clustering structure the
// observed cloud lacks, which the kernel statistics detect: the test then
// severely under-rejects at the null (empirically 0.003-0.012 at n = 100-250
// for the nominal 0.05). The weighted-permutation scheme keeps the same
// kernel-weighted conditioning but assigns the cached draws bijectively,
// which restores the permutation structure the exact schemes rely on and
// reduces to the plain permutation sampler under flat weights.
enum class IndexScheme { weighted_permutation, independent };

template <GroupAction A>
struct RandomizationScheme {
    Variant variant = Variant::r1_resample_gamma;
    SamplerKind sampler = SamplerKind::approx_kernel_weighted;
    IndexScheme index_scheme = IndexScheme::weighted_permutation;
    // exact_orbit_kernel: draw from the true conditional law of the group
    // element given the maximal invariant.
    std::function<typename A::Element(const Vector& minv, Rng&)> orbit_kernel;
    // exact_equivariant: correction element c for rows (i, j = pi(i)) with
    // act_x(c, rep_j) == rep_i.
    std::function<typename A::Element(int i, int j, Rng&)> equivariant_correction;
    // exact_transitive: optional strata labels; rows are permuted within strata.
    std::vector<int> strata;
};

// Gaussian product-kernel weights on the maximal invariants with per-dimension
// bandwidths. Rows whose weights degenerate (all zero or non-finite) fall back
// to uniform; the count is reported so callers can log it.
inline Matrix kernel_weight_matrix(const Matrix& minv, const Vector& bandwidths,
                                   int* degenerate_rows = nullptr) {
    const int n = static_cast<int>(minv.rows());
    const int q = static_cast<int>(minv.cols());
    require(bandwidths.size() == q, "one bandwidth per invariant dimension");
    Matrix w(n, n);
    for (int i = 0; i < n; ++i) {
        w(i, i) = 1.0;
        for (int j = i + 1; j < n; ++j) {
            double e = 0.0;
            for (int k = 0; k < q; ++k) {
                const double d = (minv(i, k) - minv(j, k)) / bandwidths(k);
                e += d * d;
            }
            w(i, j) = w(j, i) = std::exp(-0.5 * e);
        }
    }
    int degenerate = 0;
    for (int i = 0; i < n; ++i) {
        const double s = w.row(i).sum();
        if (!(s > 0.0) || !std::isfinite(s)) {
            w.row(i).setConstant(1.0 / n);
            ++degenerate;
        }
    }
    if (degenerate_rows != nullptr) *degenerate_rows = degenerate;
    return w;
}

namespace detail {

// Row-wise sampling from precomputed cumulative weights.
class RowSampler {
public:
    explicit RowSampler(const Matrix& weights) {
        const int n = static_cast<int>(weights.rows());
        cum_.resize(n, n);
        for (int i = 0; i < n; ++i) {
            double acc = 0.0;
            for (int j = 0; j < n; ++j) {
                acc += weights(i, j);
                cum_(i, j) = acc;
            }
        }
    }

    int draw(int row, Rng& rng) const {
        const int n = static_cast<int>(cum_.cols());
        std::uniform_real_distribution<double> unif(0.0, cum_(row, n - 1));
        const double u = unif(rng);
        const double* begin = cum_.row(row).data();
        const double* it = std::lower_bound(begin, begin + n, u);
        int j = static_cast<int>(it - begin);
        return j < n ? j : n - 1;
    }

private:
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> cum_;
};

// Weighted permutations q(pi) proportional to prod_i w(i, pi(i)), sampled by
// reversible pairwise-swap Metropolis moves. The parallel construction runs
// the chain from the identity assignment to a common hub state once, then
// independently forward from the hub for every randomization round: the
// observed assignment and the sampled ones are exchangeable under the
// smoothed conditional model for any fixed step count.
class WeightedPermutationSampler {
public:
    WeightedPermutationSampler(const Matrix& weights, std::uint64_t chain_seed,
                               std::uint64_t tag) {
        const int n = static_cast<int>(weights.rows());
        log_w_ = weights.array().max(1e-300).log();
        steps_ = 8 * n;
        hub_.resize(n);
        std::iota(hub_.begin(), hub_.end(), 0);
        Rng rng = make_rng(chain_seed, tag);
        advance(hub_, rng);
    }

    std::vector<int> draw(Rng& rng) const {
        std::vector<int> perm = hub_;
        advance(perm, rng);
        return perm;
    }

private:
    void advance(std::vector<int>& perm, Rng& rng) const {
        const int n = static_cast<int>(perm.size());
        if (n < 2) return;
        std::uniform_int_distribution<int> pick(0, n - 1);
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        for (int step = 0; step < steps_; ++step) {
            const int a = pick(rng);
            int b = pick(rng);
            if (a == b) continue;
            const double log_ratio = log_w_(a, perm[b]) + log_w_(b, perm[a]) -
                                     log_w_(a, perm[a]) - log_w_(b, perm[b]);
            if (log_ratio >= 0.0 || unif(rng) < std::exp(log_ratio)) std::swap(perm[a], perm[b]);
        }
    }

    Eigen::ArrayXXd log_w_;
    std::vector<int> hub_;
    int steps_ = 0;
};

inline std::vector<int> stratified_permutation(const std::vector<int>& strata, int n, Rng& rng) {
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    if (strata.empty()) {
        std::shuffle(perm.begin(), perm.end(), rng);
        return perm;
    }
    require(static_cast<int>(strata.size()) == n, "one stratum label per row");
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return strata[a] < strata[b]; });
    std::size_t lo = 0;
    while (lo < order.size()) {
        std::size_t hi = lo;
        while (hi < order.size() && strata[order[hi]] == strata[order[lo]]) ++hi;
        std::vector<int> group(order.begin() + lo, order.begin() + hi);
        std::vector<int> shuffled = group;
        std::shuffle(shuffled.begin(), shuffled.end(), rng);
        for (std::size_t k = 0; k < group.size(); ++k) perm[group[k]] = shuffled[k];
        lo = hi;
    }
    return perm;
}

}  // namespace detail

// Draws conditional randomizations of a paired dataset. The scheme fixes what
// is resampled and how; a draw writes one full randomized sample.
template <GroupAction A>
class ConditionalRandomizer {
public:
    ConditionalRandomizer(const A& action, const PairedDataset<A>& ds,
                          RandomizationScheme<A> scheme, std::uint64_t chain_seed = 0)
        : action_(action), ds_(ds), scheme_(std::move(scheme)) {
        if (scheme_.sampler == SamplerKind::approx_kernel_weighted) {
            const Vector h = silverman_bandwidths(ds_.minv);
            weights_ = kernel_weight_matrix(ds_.minv, h, &degenerate_weight_rows_);
            if (scheme_.index_scheme == IndexScheme::independent) {
                row_sampler_.emplace(weights_);
            } else {
                if (scheme_.variant != Variant::r2_resample_ytilde)
                    gamma_perm_.emplace(weights_, chain_seed, 0x67616D);
                if (scheme_.variant != Variant::r1_resample_gamma)
                    ytilde_perm_.emplace(weights_, chain_seed, 0x795F74);
            }
        } else {
            require(scheme_.variant == Variant::r1_resample_gamma,
                    "exact samplers resample the group element and condition on the "
                    "aligned responses");
        }
        if (scheme_.sampler == SamplerKind::exact_orbit_kernel)
            require(static_cast<bool>(scheme_.orbit_kernel),
                    "exact_orbit_kernel needs an orbit-kernel sampler");
        if (scheme_.sampler == SamplerKind::exact_equivariant)
            require(static_cast<bool>(scheme_.equivariant_correction),
                    "exact_equivariant needs a correction sampler");
    }

    int degenerate_weight_rows() const { return degenerate_weight_rows_; }
    const Matrix& weights() const { return weights_; }

    // Randomized (X', Y'); x_out may be null when only responses are needed.
    void draw(Rng& rng, Matrix* x_out, Matrix& y_out) const {
        const int n = ds_.n();
        if (x_out != nullptr) x_out->resize(n, ds_.x.cols());
        y_out.resize(n, ds_.y.cols());
        switch (scheme_.sampler) {
            case SamplerKind::approx_kernel_weighted: draw_approx(rng, x_out, y_out); break;
            case SamplerKind::exact_transitive: draw_transitive(rng, x_out, y_out); break;
            case SamplerKind::exact_equivariant: draw_equivariant(rng, x_out, y_out); break;
            case SamplerKind::exact_orbit_kernel: draw_orbit_kernel(rng, x_out, y_out); break;
        }
    }

    // Single-row draw of the per-row weighted-resampling procedure (indices
    // sampled independently with the kernel weights, group element drawn
    // fresh from the inversion kernel at the selected neighbor).
    std::pair<Vector, Vector> draw_row(int i, Rng& rng) const {
        require(scheme_.sampler == SamplerKind::approx_kernel_weighted,
                "row-level draws are defined for the approximate sampler");
        if (!row_sampler_) row_sampler_.emplace(weights_);
        typename A::Element g = ds_.gamma_tilde[i];
        Vector ytilde = ds_.y_tilde.row(i);
        const bool fresh_gamma = scheme_.variant != Variant::r2_resample_ytilde;
        const bool fresh_ytilde = scheme_.variant != Variant::r1_resample_gamma;
        if (fresh_gamma) {
            const int j = row_sampler_->draw(i, rng);
            g = action_.sample_inversion(ds_.x.row(j), rng);
        }
        if (fresh_ytilde) {
            const int l = row_sampler_->draw(i, rng);
            ytilde = ds_.y_tilde.row(l);
        }
        return {action_.act_x(g, ds_.rep.row(i)), action_.act_y(g, ytilde)};
    }

private:
    void draw_approx(Rng& rng, Matrix* x_out, Matrix& y_out) const {
        if (scheme_.index_scheme == IndexScheme::independent) {
            for (int i = 0; i < ds_.n(); ++i) {
                auto [xi, yi] = draw_row(i, rng);
                if (x_out != nullptr) x_out->row(i) = xi;
                y_out.row(i) = yi;
            }
            return;
        }
        // weighted-permutation assignment of the cached draws
        std::vector<int> gamma_idx, ytilde_idx;
        if (gamma_perm_) gamma_idx = gamma_perm_->draw(rng);
        if (ytilde_perm_) ytilde_idx = ytilde_perm_->draw(rng);
        for (int i = 0; i < ds_.n(); ++i) {
            const auto& g = ds_.gamma_tilde[gamma_perm_ ? gamma_idx[i] : i];
            const int l = ytilde_perm_ ? ytilde_idx[i] : i;
            if (x_out != nullptr) x_out->row(i) = action_.act_x(g, ds_.rep.row(i));
            y_out.row(i) = action_.act_y(g, ds_.y_tilde.row(l));
        }
    }

    void draw_transitive(Rng& rng, Matrix* x_out, Matrix& y_out) const {
        const auto perm = detail::stratified_permutation(scheme_.strata, ds_.n(), rng);
        for (int i = 0; i < ds_.n(); ++i) {
            const auto& g = ds_.gamma_tilde[perm[i]];
            if (x_out != nullptr) x_out->row(i) = action_.act_x(g, ds_.rep.row(i));
            y_out.row(i) = action_.act_y(g, ds_.y_tilde.row(i));
        }
    }

    void draw_equivariant(Rng& rng, Matrix* x_out, Matrix& y_out) const {
        const auto perm = detail::stratified_permutation({}, ds_.n(), rng);
        for (int i = 0; i < ds_.n(); ++i) {
            const int j = perm[i];
            const auto c = scheme_.equivariant_correction(i, j, rng);
            const auto g = action_.compose(c, ds_.gamma_tilde[j]);
            const Vector xi = action_.act_x(g, ds_.rep.row(i));
            // a valid correction keeps the randomized row on its own orbit
            const Vector corrected_rep = action_.orbit_rep(xi);
            if ((corrected_rep - Vector(ds_.rep.row(i))).norm() > kRoundTripTol)
                throw contract_violation_error(
                    "equivariant correction moved a row off its orbit");
            if (x_out != nullptr) x_out->row(i) = xi;
            y_out.row(i) = action_.act_y(g, ds_.y_tilde.row(i));
        }
    }

    void draw_orbit_kernel(Rng& rng, Matrix* x_out, Matrix& y_out) const {
        for (int i = 0; i < ds_.n(); ++i) {
            const auto g = scheme_.orbit_kernel(ds_.minv.row(i), rng);
            if (x_out != nullptr) x_out->row(i) = action_.act_x(g, ds_.rep.row(i));
            y_out.row(i) = action_.act_y(g, ds_.y_tilde.row(i));
        }
    }

    const A& action_;
    const PairedDataset<A>& ds_;
    RandomizationScheme<A> scheme_;
    Matrix weights_;
    mutable std::optional<detail::RowSampler> row_sampler_;
    std::optional<detail::WeightedPermutationSampler> gamma_perm_;
    std::optional<detail::WeightedPermutationSampler> ytilde_perm_;
    int degenerate_weight_rows_ = 0;
};

}  // namespace symtest

#endif
