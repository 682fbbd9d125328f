#ifndef SYMTEST_KERNELS_MMD_HPP
#define SYMTEST_KERNELS_MMD_HPP

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "symtest/common.hpp"
#include "symtest/kernels/bandwidth.hpp"
#include "symtest/kernels/kernels.hpp"

namespace symtest {

struct KernelComponent {
    KernelFamily family;
    double sigma;
};

struct StatisticValue {
    double value = 0.0;
    std::vector<double> per_bandwidth;  // component MMD^2 values for fuse/sk
};

namespace detail {

// Pairwise interaction matrices between the rows of two point sets, computed
// once and shared by all kernel components of a family. Buffers are reused
// across evaluations; only sizes that change reallocate.
struct PairFeatures {
    Eigen::ArrayXXd sq_euclidean;  // for gaussian
    Eigen::ArrayXXd manhattan;     // for laplace
    Eigen::ArrayXXd sq_angle;      // for information_diffusion
};

struct FeatureNeeds {
    bool sq_euclidean = false;
    bool manhattan = false;
    bool sq_angle = false;
};

// Full rectangular features between the rows of a and b.
inline void cross_pair_features(const Matrix& a, const Matrix& b, const FeatureNeeds& needs,
                                PairFeatures& f) {
    const int n = static_cast<int>(a.rows());
    const int m = static_cast<int>(b.rows());
    if (needs.sq_euclidean) {
        const Vector ra = a.rowwise().squaredNorm();
        const Vector rb = b.rowwise().squaredNorm();
        f.sq_euclidean.resize(n, m);
        f.sq_euclidean.matrix().noalias() = -2.0 * a * b.transpose();
        for (int j = 0; j < m; ++j)
            f.sq_euclidean.col(j) = (f.sq_euclidean.col(j) + ra.array() + rb(j)).max(0.0);
    }
    if (needs.manhattan) {
        f.manhattan.resize(n, m);
        for (int j = 0; j < m; ++j) {
            f.manhattan.col(j) = (a.col(0).array() - b(j, 0)).abs();
            for (int k = 1; k < a.cols(); ++k)
                f.manhattan.col(j) += (a.col(k).array() - b(j, k)).abs();
        }
    }
    if (needs.sq_angle) {
        const Matrix wa = a.array().max(0.0).sqrt().matrix();
        const Matrix wb = b.array().max(0.0).sqrt().matrix();
        f.sq_angle.resize(n, m);
        f.sq_angle.matrix().noalias() = wa * wb.transpose();
        f.sq_angle = f.sq_angle.min(1.0).max(-1.0).acos().square();
    }
}

// Strict lower-triangle features among the rows of a; entries on and above
// the diagonal are left unspecified.
inline void self_pair_features(const Matrix& a, const FeatureNeeds& needs, PairFeatures& f) {
    const int n = static_cast<int>(a.rows());
    if (needs.sq_euclidean) {
        const Vector ra = a.rowwise().squaredNorm();
        f.sq_euclidean.resize(n, n);
        f.sq_euclidean.matrix().noalias() = -2.0 * a * a.transpose();
        for (int j = 0; j + 1 < n; ++j) {
            const int len = n - 1 - j;
            auto seg = f.sq_euclidean.col(j).tail(len);
            seg = (seg + ra.tail(len).array() + ra(j)).max(0.0);
        }
    }
    if (needs.manhattan) {
        f.manhattan.resize(n, n);
        for (int j = 0; j + 1 < n; ++j) {
            const int len = n - 1 - j;
            auto seg = f.manhattan.col(j).tail(len);
            seg = (a.col(0).array().tail(len) - a(j, 0)).abs();
            for (int k = 1; k < a.cols(); ++k)
                seg += (a.col(k).array().tail(len) - a(j, k)).abs();
        }
    }
    if (needs.sq_angle) {
        const Matrix wa = a.array().max(0.0).sqrt().matrix();
        f.sq_angle.resize(n, n);
        f.sq_angle.matrix().noalias() = wa * wa.transpose();
        for (int j = 0; j + 1 < n; ++j) {
            const int len = n - 1 - j;
            auto seg = f.sq_angle.col(j).tail(len);
            seg = seg.min(1.0).max(-1.0).acos().square();
        }
    }
}

// Sum of the component kernel over all entries of rectangular features.
inline double cross_component_sum(const KernelComponent& c, const PairFeatures& f, int dim) {
    switch (c.family) {
        case KernelFamily::gaussian:
            return (f.sq_euclidean * (-0.5 / (c.sigma * c.sigma))).exp().sum();
        case KernelFamily::laplace:
            return (f.manhattan * (-1.0 / c.sigma)).exp().sum();
        case KernelFamily::information_diffusion:
            return kernel_diag(c.family, c.sigma, dim) *
                   (f.sq_angle * (-1.0 / c.sigma)).exp().sum();
    }
    return 0.0;
}

// Sum of the component kernel over all ordered pairs (i, j) of one sample,
// diagonal included, from triangle features.
inline double self_component_sum(const KernelComponent& c, const PairFeatures& f, int dim,
                                 int n) {
    double tri = 0.0;
    switch (c.family) {
        case KernelFamily::gaussian: {
            const double coef = -0.5 / (c.sigma * c.sigma);
            for (int j = 0; j + 1 < n; ++j)
                tri += (f.sq_euclidean.col(j).tail(n - 1 - j) * coef).exp().sum();
            break;
        }
        case KernelFamily::laplace: {
            const double coef = -1.0 / c.sigma;
            for (int j = 0; j + 1 < n; ++j)
                tri += (f.manhattan.col(j).tail(n - 1 - j) * coef).exp().sum();
            break;
        }
        case KernelFamily::information_diffusion: {
            const double coef = -1.0 / c.sigma;
            double acc = 0.0;
            for (int j = 0; j + 1 < n; ++j)
                acc += (f.sq_angle.col(j).tail(n - 1 - j) * coef).exp().sum();
            tri = acc * kernel_diag(c.family, c.sigma, dim);
            break;
        }
    }
    return 2.0 * tri + n * kernel_diag(c.family, c.sigma, dim);
}

}  // namespace detail

namespace detail {

inline FeatureNeeds needs_for(KernelFamily family) {
    FeatureNeeds needs;
    needs.sq_euclidean = family == KernelFamily::gaussian;
    needs.manhattan = family == KernelFamily::laplace;
    needs.sq_angle = family == KernelFamily::information_diffusion;
    return needs;
}

}  // namespace detail

// Unbiased MMD^2 estimate between equally sized samples (rows are points).
inline double mmd2_u(const Matrix& z, const Matrix& zp, KernelFamily family, double sigma) {
    const int n = static_cast<int>(z.rows());
    require(n >= 2, "the unbiased MMD^2 estimate needs n >= 2");
    require(zp.rows() == n, "samples must have equal size");
    require(zp.cols() == z.cols(), "samples must have equal dimension");
    const auto needs = detail::needs_for(family);
    const KernelComponent c{family, sigma};
    const int dim = static_cast<int>(z.cols());
    const double diag = kernel_diag(family, sigma, dim);
    detail::PairFeatures f;
    detail::self_pair_features(z, needs, f);
    const double szz = detail::self_component_sum(c, f, dim, n);
    detail::self_pair_features(zp, needs, f);
    const double spp = detail::self_component_sum(c, f, dim, n);
    detail::cross_pair_features(z, zp, needs, f);
    const double sxy = detail::cross_component_sum(c, f, dim);
    const double nn = static_cast<double>(n);
    return (szz - nn * diag + spp - nn * diag) / (nn * (nn - 1.0)) - 2.0 * sxy / (nn * nn);
}

// Biased MMD^2 estimate; nonnegative by construction.
inline double mmd2_v(const Matrix& z, const Matrix& zp, KernelFamily family, double sigma) {
    const int n = static_cast<int>(z.rows());
    require(n >= 1, "the biased MMD^2 estimate needs n >= 1");
    require(zp.rows() == n, "samples must have equal size");
    require(zp.cols() == z.cols(), "samples must have equal dimension");
    const auto needs = detail::needs_for(family);
    const KernelComponent c{family, sigma};
    const int dim = static_cast<int>(z.cols());
    detail::PairFeatures f;
    detail::self_pair_features(z, needs, f);
    const double szz = detail::self_component_sum(c, f, dim, n);
    detail::self_pair_features(zp, needs, f);
    const double spp = detail::self_component_sum(c, f, dim, n);
    detail::cross_pair_features(z, zp, needs, f);
    const double sxy = detail::cross_component_sum(c, f, dim);
    const double nn = static_cast<double>(n);
    return (szz + spp - 2.0 * sxy) / (nn * nn);
}

inline double fuse_omega(int n) {
    return std::sqrt(static_cast<double>(n) * (static_cast<double>(n) - 1.0));
}

// Softmax aggregation of per-component MMD^2 values, max-shifted so the
// exponentials cannot overflow for large omega.
inline double fuse_from_components(const std::vector<double>& components, double omega) {
    require(!components.empty(), "fuse aggregation needs at least one component");
    require(omega > 0.0, "fuse aggregation needs omega > 0");
    const double shift = *std::max_element(components.begin(), components.end());
    double acc = 0.0;
    for (double v : components) acc += std::exp(omega * (v - shift));
    return shift + (std::log(acc) - std::log(static_cast<double>(components.size()))) / omega;
}

inline double sk_from_components(const std::vector<double>& components) {
    require(!components.empty(), "sup aggregation needs at least one component");
    return *std::max_element(components.begin(), components.end());
}

enum class StatKind { mmd2_u, mmd2_v, fuse, sk };

inline std::string to_string(StatKind k) {
    switch (k) {
        case StatKind::mmd2_u: return "mmd2_u";
        case StatKind::mmd2_v: return "mmd2_v";
        case StatKind::fuse: return "fuse";
        case StatKind::sk: return "sk";
    }
    return "?";
}

inline StatKind stat_kind_from_string(const std::string& s) {
    if (s == "mmd2_u") return StatKind::mmd2_u;
    if (s == "mmd2_v") return StatKind::mmd2_v;
    if (s == "fuse") return StatKind::fuse;
    if (s == "sk") return StatKind::sk;
    throw std::invalid_argument("unknown statistic kind: " + s);
}

// A configured two-sample statistic: a set of kernel components plus an
// aggregation rule. Component sums are computed over shared pairwise features,
// and the self-interaction sums of a fixed comparison sample can be cached
// across evaluations.
class TwoSampleStatistic {
public:
    TwoSampleStatistic(StatKind kind, std::vector<KernelComponent> components,
                       bool use_vstat = false)
        : kind_(kind), components_(std::move(components)), use_vstat_(use_vstat) {
        require(!components_.empty(), "statistic needs at least one kernel component");
        if (kind_ == StatKind::mmd2_u || kind_ == StatKind::mmd2_v) {
            require(components_.size() == 1, "plain MMD^2 takes a single kernel component");
            use_vstat_ = kind_ == StatKind::mmd2_v;
        }
        for (const auto& c : components_) {
            needs_.sq_euclidean |= c.family == KernelFamily::gaussian;
            needs_.manhattan |= c.family == KernelFamily::laplace;
            needs_.sq_angle |= c.family == KernelFamily::information_diffusion;
        }
    }

    // Components from per-family bandwidth grids over a conditioning sample.
    static TwoSampleStatistic from_grids(StatKind kind, const std::vector<KernelFamily>& families,
                                         const Matrix& conditioning_points, int grid_size,
                                         bool use_vstat = false) {
        require(!families.empty(), "statistic needs at least one kernel family");
        require(grid_size >= 1, "bandwidth grid size must be >= 1");
        std::vector<KernelComponent> comps;
        for (KernelFamily fam : families) {
            if (grid_size == 1) {
                const auto d = pairwise_distances(conditioning_points, fam);
                comps.push_back({fam, std::max(quantile(d, 0.5), 1e-12)});
                continue;
            }
            const auto grid =
                bandwidth_grid_from_distances(pairwise_distances(conditioning_points, fam),
                                              grid_size);
            for (double s : grid) comps.push_back({fam, s});
        }
        return TwoSampleStatistic(kind, std::move(comps), use_vstat);
    }

    StatKind kind() const { return kind_; }
    const std::vector<KernelComponent>& components() const { return components_; }
    bool use_vstat() const { return use_vstat_; }

    struct RhsCache {
        Eigen::ArrayXd self_sums;  // per-component full self-interaction sums
        int n = 0;
    };

    RhsCache make_rhs_cache(const Matrix& zp) const {
        RhsCache cache;
        cache.n = static_cast<int>(zp.rows());
        cache.self_sums = self_sums(zp);
        return cache;
    }

    StatisticValue evaluate(const Matrix& z, const Matrix& zp) const {
        return evaluate_with_rhs(z, zp, make_rhs_cache(zp));
    }

    StatisticValue evaluate_with_rhs(const Matrix& z, const Matrix& zp,
                                     const RhsCache& cache) const {
        const int n = static_cast<int>(z.rows());
        require(cache.n == n, "samples must have equal size");
        const int dim = static_cast<int>(z.cols());
        const int minimum = use_vstat_ ? 1 : 2;
        require(n >= minimum, "sample too small for the configured estimator");

        const Eigen::ArrayXd szz = self_sums(z);
        detail::cross_pair_features(z, zp, needs_, ws_cross_);
        const double nn = static_cast<double>(n);

        std::vector<double> comps(components_.size());
        for (std::size_t k = 0; k < components_.size(); ++k) {
            const double sxy = detail::cross_component_sum(components_[k], ws_cross_, dim);
            if (use_vstat_) {
                comps[k] = (szz(k) + cache.self_sums(k) - 2.0 * sxy) / (nn * nn);
            } else {
                const double diag = kernel_diag(components_[k].family, components_[k].sigma, dim);
                comps[k] = (szz(k) - nn * diag + cache.self_sums(k) - nn * diag) /
                               (nn * (nn - 1.0)) -
                           2.0 * sxy / (nn * nn);
            }
        }

        StatisticValue out;
        switch (kind_) {
            case StatKind::mmd2_u:
            case StatKind::mmd2_v: out.value = comps[0]; break;
            case StatKind::fuse: out.value = fuse_from_components(comps, fuse_omega(n)); break;
            case StatKind::sk: out.value = sk_from_components(comps); break;
        }
        out.per_bandwidth = std::move(comps);
        return out;
    }

private:
    Eigen::ArrayXd self_sums(const Matrix& z) const {
        detail::self_pair_features(z, needs_, ws_self_);
        const int n = static_cast<int>(z.rows());
        Eigen::ArrayXd sums(components_.size());
        for (std::size_t k = 0; k < components_.size(); ++k) {
            sums(k) =
                detail::self_component_sum(components_[k], ws_self_, static_cast<int>(z.cols()), n);
        }
        return sums;
    }

    StatKind kind_;
    std::vector<KernelComponent> components_;
    bool use_vstat_;
    detail::FeatureNeeds needs_;
    // scratch reused across evaluations; instances are not meant for
    // concurrent evaluate calls
    mutable detail::PairFeatures ws_self_, ws_cross_;
};

// Spec-facing aggregate entry points over a bandwidth grid of one family set.
inline StatisticValue fuse_statistic(const Matrix& z, const Matrix& zp,
                                     const std::vector<double>& grid,
                                     const std::vector<KernelFamily>& families, double omega,
                                     bool use_vstat = false) {
    require(!grid.empty(), "fuse needs a nonempty bandwidth grid");
    require(omega > 0.0, "fuse needs omega > 0");
    std::vector<KernelComponent> comps;
    for (KernelFamily fam : families)
        for (double s : grid) comps.push_back({fam, s});
    TwoSampleStatistic stat(StatKind::fuse, std::move(comps), use_vstat);
    StatisticValue v = stat.evaluate(z, zp);
    v.value = fuse_from_components(v.per_bandwidth, omega);
    return v;
}

inline StatisticValue sk_statistic(const Matrix& z, const Matrix& zp,
                                   const std::vector<double>& grid,
                                   const std::vector<KernelFamily>& families,
                                   bool use_vstat = false) {
    require(!grid.empty(), "sup statistic needs a nonempty bandwidth grid");
    std::vector<KernelComponent> comps;
    for (KernelFamily fam : families)
        for (double s : grid) comps.push_back({fam, s});
    TwoSampleStatistic stat(StatKind::sk, std::move(comps), use_vstat);
    return stat.evaluate(z, zp);
}

}  // namespace symtest

#endif
