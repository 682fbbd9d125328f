#ifndef SYMTEST_GROUPS_ROTATIONS_HPP
#define SYMTEST_GROUPS_ROTATIONS_HPP

#include <cmath>

#include "symtest/common.hpp"
#include "symtest/rng.hpp"

namespace symtest {

inline constexpr double kOrthogonalityTol = 1e-9;

// R^T R = I and det R = +1, entrywise within tol.
inline bool is_rotation_matrix(const Matrix& r, double tol = kOrthogonalityTol) {
    if (r.rows() != r.cols() || r.rows() == 0) return false;
    const Matrix gram = r.transpose() * r;
    const Matrix eye = Matrix::Identity(r.rows(), r.cols());
    if (((gram - eye).array().abs() > tol).any()) return false;
    return std::abs(r.determinant() - 1.0) <= tol;
}

inline Matrix rotation_2d(double theta) {
    require_finite(theta, "rotation angle");
    Matrix r(2, 2);
    const double c = std::cos(theta), s = std::sin(theta);
    r << c, -s, s, c;
    return r;
}

// Uniform (Haar) rotation via QR of a Gaussian matrix. The R-diagonal sign
// correction makes the factor Haar on O(d); if det = -1, negating one column
// maps it onto SO(d) without disturbing uniformity.
inline Matrix sample_haar_rotation(int d, Rng& rng) {
    require(d >= 2, "Haar rotation needs dimension >= 2");
    std::normal_distribution<double> gauss(0.0, 1.0);
    Matrix a(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) a(i, j) = gauss(rng);
    Eigen::HouseholderQR<Matrix> qr(a);
    Matrix q = qr.householderQ();
    const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int j = 0; j < d; ++j) {
        if (r(j, j) < 0.0) q.col(j) = -q.col(j);
    }
    if (q.determinant() < 0.0) q.col(0) = -q.col(0);
    return q;
}

// Canonical point on the orbit of x under rotations: ||x|| e1.
inline Vector so_d_orbit_rep(const Vector& x) {
    Vector rep = Vector::Zero(x.size());
    if (x.size() > 0) rep(0) = x.norm();
    return rep;
}

// Deterministic rotation taking ||x|| e1 to x: identity off the plane spanned
// by e1 and x, an in-plane rotation on it. x antiparallel to e1 has no
// distinguished plane; we fix the (e1, e2)-plane to keep the map deterministic.
inline Matrix so_d_representative_inversion(const Vector& x) {
    const int d = static_cast<int>(x.size());
    require(d >= 2, "representative inversion needs dimension >= 2");
    const double norm = x.norm();
    if (norm == 0.0) throw degenerate_input_error("representative inversion undefined at x = 0");

    Vector residual = x;
    residual(0) = 0.0;
    const double res_norm = residual.norm();
    const double cos_theta = x(0) / norm;

    if (res_norm <= 1e-14 * norm) {
        if (cos_theta > 0.0) return Matrix::Identity(d, d);
        Matrix r = Matrix::Identity(d, d);
        r(0, 0) = -1.0;
        r(1, 1) = -1.0;
        return r;
    }

    const Vector unit_res = residual / res_norm;
    const double sin_theta = res_norm / norm;

    Matrix basis(d, 2);
    basis.col(0) = Vector::Unit(d, 0);
    basis.col(1) = unit_res;
    Matrix plane_rot(2, 2);
    plane_rot << cos_theta, -sin_theta, sin_theta, cos_theta;

    Matrix tau = Matrix::Identity(d, d);
    tau -= basis.col(0) * basis.col(0).transpose();
    tau -= basis.col(1) * basis.col(1).transpose();
    tau += basis * plane_rot * basis.transpose();
    return tau;
}

// Draw from the inversion kernel at x: the deterministic inversion composed
// with a Haar rotation of the stabilizer of e1 (trivial for d = 2).
inline Matrix so_d_sample_inversion(const Vector& x, Rng& rng) {
    const int d = static_cast<int>(x.size());
    require(d >= 2, "inversion sampling needs dimension >= 2");
    if (x.norm() == 0.0) throw degenerate_input_error("inversion kernel undefined at x = 0");
    const Matrix tau = so_d_representative_inversion(x);
    if (d == 2) return tau;
    Matrix stab = Matrix::Identity(d, d);
    stab.block(1, 1, d - 1, d - 1) = sample_haar_rotation(d - 1, rng);
    return tau * stab;
}

}  // namespace symtest

#endif
