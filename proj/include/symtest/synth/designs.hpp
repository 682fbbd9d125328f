#ifndef SYMTEST_SYNTH_DESIGNS_HPP
#define SYMTEST_SYNTH_DESIGNS_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <utility>

#include "symtest/common.hpp"
#include "symtest/groups/actions.hpp"
#include "symtest/rng.hpp"

namespace symtest {

// d x d covariance with unit diagonal and a constant off-diagonal.
inline Matrix equicorrelation(int d, double off_diagonal) {
    Matrix s = Matrix::Constant(d, d, off_diagonal);
    s.diagonal().setOnes();
    return s;
}

// Multivariate normal sampling through the Cholesky factor; positive
// definiteness is asserted at construction.
class MvnSampler {
public:
    MvnSampler(Vector mean, const Matrix& cov) : mean_(std::move(mean)) {
        Eigen::LLT<Matrix> llt(cov);
        require(llt.info() == Eigen::Success, "covariance must be positive definite");
        chol_ = llt.matrixL();
    }

    Vector draw(Rng& rng) const {
        std::normal_distribution<double> gauss(0.0, 1.0);
        Vector z(mean_.size());
        for (int i = 0; i < z.size(); ++i) z(i) = gauss(rng);
        return mean_ + chol_ * z;
    }

private:
    Vector mean_;
    Matrix chol_;
};

// Planar sample X_i = R(theta_i) Z_i with Z_i ~ N((1,0), I) and theta_i
// uniform on [0, angle_range); the marginal is rotation-invariant exactly at
// angle_range = 2 pi.
inline Matrix gen_rot2d_invariance(int n, double angle_range, Rng& rng) {
    require(n >= 1, "sample size must be positive");
    require(angle_range > 0.0 && angle_range <= 2.0 * std::acos(-1.0) + 1e-12,
            "angle range must lie in (0, 2 pi]");
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, angle_range);
    Matrix x(n, 2);
    for (int i = 0; i < n; ++i) {
        const Vector z = Vector{{1.0 + gauss(rng), gauss(rng)}};
        x.row(i) = rotation_2d(unif(rng)) * z;
    }
    return x;
}

// X ~ N(0, 0.75 equicorrelation), Y | X ~ N(X, equicorrelation(p)); the
// conditional is rotation-equivariant exactly at p = 0.
inline std::pair<Matrix, Matrix> gen_gauss_cov(int n, int d, double p, Rng& rng) {
    require(n >= 1 && d >= 2, "need n >= 1 and d >= 2");
    require(p > -1.0 / (d - 1.0) && p < 1.0, "off-diagonal must keep the covariance PD");
    const MvnSampler x_sampler(Vector::Zero(d), equicorrelation(d, 0.75));
    const MvnSampler noise(Vector::Zero(d), equicorrelation(d, p));
    Matrix x(n, d), y(n, d);
    for (int i = 0; i < n; ++i) {
        x.row(i) = x_sampler.draw(rng);
        y.row(i) = Vector(x.row(i)) + noise.draw(rng);
    }
    return {x, y};
}

// As gen_gauss_cov, but the only conditional correlation sits between the
// first two response dimensions.
inline std::pair<Matrix, Matrix> gen_gauss_pairwise_cov(int n, int d, double p, Rng& rng) {
    require(n >= 1 && d >= 2, "need n >= 1 and d >= 2");
    require(std::abs(p) < 1.0, "pairwise correlation must lie in (-1, 1)");
    Matrix cov = Matrix::Identity(d, d);
    cov(0, 1) = cov(1, 0) = p;
    const MvnSampler x_sampler(Vector::Zero(d), equicorrelation(d, 0.75));
    const MvnSampler noise(Vector::Zero(d), cov);
    Matrix x(n, d), y(n, d);
    for (int i = 0; i < n; ++i) {
        x.row(i) = x_sampler.draw(rng);
        y.row(i) = Vector(x.row(i)) + noise.draw(rng);
    }
    return {x, y};
}

struct ChiExactData {
    Matrix x, y;
    Vector radii;  // the chi draws; equal to the row norms of x
    // True conditional law of the group element given the maximal invariant
    // (the norm); usable as an exact orbit-kernel sampler.
    std::function<Matrix(const Vector& minv, Rng&)> orbit_kernel;
};

// Radius Z ~ chi_1, direction drawn from the inversion kernel at a unit-mean
// Gaussian perturbation of Z 1_d, so the conditional law of the rotation given
// the radius is known exactly. Y | X as in gen_gauss_cov.
inline ChiExactData gen_chi_exact(int n, int d, double p, Rng& rng) {
    require(n >= 1 && d >= 2, "need n >= 1 and d >= 2");
    std::normal_distribution<double> gauss(0.0, 1.0);
    const MvnSampler noise(Vector::Zero(d), equicorrelation(d, p));
    ChiExactData out;
    out.x.resize(n, d);
    out.y.resize(n, d);
    out.radii.resize(n);
    for (int i = 0; i < n; ++i) {
        const double z = std::abs(gauss(rng));
        out.radii(i) = z;
        Vector w = Vector::Constant(d, z);
        for (int k = 0; k < d; ++k) w(k) += gauss(rng);
        Matrix gamma = w.norm() > 0.0 ? so_d_sample_inversion(w, rng) : Matrix::Identity(d, d);
        out.x.row(i) = z * gamma.col(0);  // gamma * (z e1)
        out.y.row(i) = Vector(out.x.row(i)) + noise.draw(rng);
    }
    out.orbit_kernel = [d](const Vector& minv, Rng& r) {
        std::normal_distribution<double> g(0.0, 1.0);
        Vector w = Vector::Constant(d, minv(0));
        for (int k = 0; k < d; ++k) w(k) += g(r);
        return w.norm() > 0.0 ? so_d_sample_inversion(w, r) : Matrix::Identity(d, d);
    };
    return out;
}

// Mean shift by s 1_d applied only when the planar angle of (X1, X2) falls
// below a fraction of pi. The angle arccos(X1 / sqrt(X1^2 + X2^2)) lies in
// [0, pi], so the threshold fraction is mapped to radians as fraction * pi.
inline std::pair<Matrix, Matrix> gen_mean_shift(int n, int d, double threshold_fraction, double s,
                                                Rng& rng) {
    require(n >= 1 && d >= 3, "need n >= 1 and d >= 3");
    require(threshold_fraction >= 0.0 && threshold_fraction <= 1.0,
            "threshold fraction must lie in [0, 1]");
    require(s >= 0.0, "shift scale must be nonnegative");
    const MvnSampler x_sampler(Vector::Zero(d), equicorrelation(d, 0.75));
    std::normal_distribution<double> gauss(0.0, 1.0);
    const double threshold = threshold_fraction * std::acos(-1.0);
    Matrix x(n, d), y(n, d);
    for (int i = 0; i < n; ++i) {
        const Vector xi = x_sampler.draw(rng);
        x.row(i) = xi;
        const double planar = std::sqrt(xi(0) * xi(0) + xi(1) * xi(1));
        const bool shift = planar > 0.0 && std::acos(std::clamp(xi(0) / planar, -1.0, 1.0)) < threshold;
        for (int k = 0; k < d; ++k)
            y(i, k) = xi(k) + (shift ? s : 0.0) + gauss(rng);
    }
    return {x, y};
}

// Mean shift by s e1 applied only when the first coordinate of X is strictly
// the largest; the conditional is permutation-equivariant exactly at s = 0.
inline std::pair<Matrix, Matrix> gen_perm_shift(int n, int d, double s, Rng& rng) {
    require(n >= 1 && d >= 2, "need n >= 1 and d >= 2");
    require(s >= 0.0, "shift scale must be nonnegative");
    const MvnSampler x_sampler(Vector::Zero(d), equicorrelation(d, 0.75));
    std::normal_distribution<double> gauss(0.0, 1.0);
    Matrix x(n, d), y(n, d);
    for (int i = 0; i < n; ++i) {
        const Vector xi = x_sampler.draw(rng);
        x.row(i) = xi;
        bool first_is_max = true;
        for (int k = 1; k < d; ++k) {
            if (xi(k) >= xi(0)) {
                first_is_max = false;
                break;
            }
        }
        for (int k = 0; k < d; ++k)
            y(i, k) = xi(k) + ((first_is_max && k == 0) ? s : 0.0) + gauss(rng);
    }
    return {x, y};
}

// Ring-like planar marginal with a mild angular modulation and an
// equivariant conditional response aligned against the input, shaped like a
// back-to-back jet pair. The modulation keeps the marginal visually ring-like
// while leaving an angular signal that survives response shuffling.
inline std::pair<Matrix, Matrix> gen_ring_equivariant(int n, double modulation, double align,
                                                      double noise_sd, Rng& rng) {
    require(n >= 1, "sample size must be positive");
    require(modulation >= 0.0 && modulation < 1.0, "modulation must lie in [0, 1)");
    require(noise_sd > 0.0, "noise scale must be positive");
    const double two_pi = 2.0 * std::acos(-1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Matrix x(n, 2), y(n, 2);
    for (int i = 0; i < n; ++i) {
        // angle density proportional to 1 + modulation * cos(theta), by rejection
        double theta = 0.0;
        for (;;) {
            theta = two_pi * unif(rng);
            if (unif(rng) * (1.0 + modulation) <= 1.0 + modulation * std::cos(theta)) break;
        }
        const double radius = std::max(0.1, 1.0 + 0.1 * gauss(rng));
        x(i, 0) = radius * std::cos(theta);
        x(i, 1) = radius * std::sin(theta);
        y(i, 0) = align * x(i, 0) + noise_sd * gauss(rng);
        y(i, 1) = align * x(i, 1) + noise_sd * gauss(rng);
    }
    return {x, y};
}

}  // namespace symtest

#endif
