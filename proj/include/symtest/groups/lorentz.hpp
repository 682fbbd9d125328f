#ifndef SYMTEST_GROUPS_LORENTZ_HPP
#define SYMTEST_GROUPS_LORENTZ_HPP

#include <cmath>

#include "symtest/common.hpp"
#include "symtest/groups/rotations.hpp"
#include "symtest/rng.hpp"

namespace symtest {

// numerically lightlike records pass with Q slightly below zero
inline constexpr double kMinkowskiFloor = -1e-6;

// Four-momenta are handled as plain 4-vectors (E, p1, p2, p3) in natural units.

inline Eigen::Matrix4d minkowski_metric() {
    Eigen::Matrix4d eta = Eigen::Matrix4d::Identity();
    eta(1, 1) = eta(2, 2) = eta(3, 3) = -1.0;
    return eta;
}

// Q(x) = E^2 - |p|^2, preserved by every Lorentz transform.
inline double minkowski_invariant(const Eigen::Vector4d& x) {
    return x(0) * x(0) - x(1) * x(1) - x(2) * x(2) - x(3) * x(3);
}

// Lambda^T eta Lambda = eta and Lambda(0,0) >= 1 (restricted component).
inline bool is_restricted_lorentz(const Eigen::Matrix4d& lt, double tol = kOrthogonalityTol) {
    const Eigen::Matrix4d eta = minkowski_metric();
    if (((lt.transpose() * eta * lt - eta).array().abs() > tol).any()) return false;
    return lt(0, 0) >= 1.0 - tol;
}

// Boost along the first momentum axis with velocity beta.
inline Eigen::Matrix4d lorentz_boost(double beta) {
    require_finite(beta, "boost velocity");
    require(std::abs(beta) < 1.0, "boost velocity must lie in (-1, 1)");
    const double gamma = 1.0 / std::sqrt(1.0 - beta * beta);
    Eigen::Matrix4d lt = Eigen::Matrix4d::Identity();
    lt(0, 0) = gamma;
    lt(0, 1) = -gamma * beta;
    lt(1, 0) = -gamma * beta;
    lt(1, 1) = gamma;
    return lt;
}

// Embed a spatial rotation: energy fixed, (p1, p2, p3) rotated by r.
inline Eigen::Matrix4d lorentz_rotation(const Matrix& r) {
    require(r.rows() == 3 && r.cols() == 3 && is_rotation_matrix(r),
            "spatial block must be a 3x3 rotation matrix");
    Eigen::Matrix4d lt = Eigen::Matrix4d::Identity();
    lt.block<3, 3>(1, 1) = r;
    return lt;
}

// Representative (E_rho, 1, 0, 0) on the orbit of x, with E_rho^2 - 1 = Q(x).
inline Eigen::Vector4d lorentz_orbit_rep(const Eigen::Vector4d& x) {
    const double q = minkowski_invariant(x);
    if (q + 1.0 < 0.0)
        throw std::domain_error("no representative of the form (E,1,0,0) for Q(x) < -1");
    return {std::sqrt(std::max(q, kMinkowskiFloor) + 1.0), 1.0, 0.0, 0.0};
}

// Draw from the inversion kernel at x: a boost taking the representative onto
// x's energy shell, a uniform rotation about the first axis (the stabilizer of
// the representative), then the spatial rotation aligning axis 1 with p.
// For zero spatial part the stabilizer of x is all of SO(3), so the draw is a
// pure boost followed by a uniform spatial rotation.
inline Eigen::Matrix4d lorentz_sample_inversion(const Eigen::Vector4d& x, Rng& rng) {
    const double q = minkowski_invariant(x);
    require(q >= kMinkowskiFloor, "inversion sampling needs Q(x) >= 0");
    require(x(0) > 0.0, "inversion sampling needs positive energy");
    const double e_rho = std::sqrt(std::max(q, 0.0) + 1.0);
    const Eigen::Vector3d p = x.tail<3>();
    const double p_norm = p.norm();

    if (p_norm == 0.0) {
        // x = (E, 0, 0, 0); beta solves the pure-boost equation.
        const double beta = 1.0 / e_rho;
        return lorentz_rotation(sample_haar_rotation(3, rng)) * lorentz_boost(beta);
    }

    const double beta = (e_rho - x(0) * p_norm) / (1.0 + x(0) * x(0));
    std::uniform_real_distribution<double> unif(0.0, 2.0 * std::acos(-1.0));
    const double phi = unif(rng);
    Matrix stab = Matrix::Identity(3, 3);
    stab.block(1, 1, 2, 2) = rotation_2d(phi);
    const Matrix align = so_d_representative_inversion(Vector(p));
    return lorentz_rotation(align) * lorentz_rotation(stab) * lorentz_boost(beta);
}

}  // namespace symtest

#endif
