#ifndef SYMTEST_GROUPS_ACTIONS_HPP
#define SYMTEST_GROUPS_ACTIONS_HPP

#include <concepts>
#include <utility>

#include "symtest/common.hpp"
#include "symtest/groups/lorentz.hpp"
#include "symtest/groups/permutations.hpp"
#include "symtest/groups/rotations.hpp"
#include "symtest/rng.hpp"

namespace symtest {

// A group action bundles composition and inversion with an action on the
// X and Y data spaces, an orbit selector, a maximal invariant, and a sampler
// of the inversion kernel (group elements g with g * orbit_rep(x) = x).
// Points are dense vectors; the element type is per-group.
template <typename A>
concept GroupAction = requires(const A a, const typename A::Element& g, const Vector& v, Rng& rng) {
    typename A::Element;
    { a.identity() } -> std::same_as<typename A::Element>;
    { a.compose(g, g) } -> std::same_as<typename A::Element>;
    { a.inverse(g) } -> std::same_as<typename A::Element>;
    { a.act_x(g, v) } -> std::same_as<Vector>;
    { a.act_y(g, v) } -> std::same_as<Vector>;
    { a.orbit_rep(v) } -> std::same_as<Vector>;
    { a.max_invariant(v) } -> std::same_as<Vector>;
    { a.sample_inversion(v, rng) } -> std::same_as<typename A::Element>;
    { a.sample_haar(rng) } -> std::same_as<typename A::Element>;
    { A::is_compact } -> std::convertible_to<bool>;
};

// Rotations of R^d acting on both data spaces; orbits are spheres, the
// maximal invariant is the norm. Optionally acts trivially on Y (conditional
// invariance rather than equivariance).
class RotationAction {
public:
    using Element = Matrix;
    static constexpr bool is_compact = true;

    explicit RotationAction(int dim, bool trivial_on_y = false)
        : dim_(dim), trivial_on_y_(trivial_on_y) {
        require(dim >= 2, "rotation action needs dimension >= 2");
    }

    int dim() const { return dim_; }
    bool trivial_on_y() const { return trivial_on_y_; }

    Element identity() const { return Matrix::Identity(dim_, dim_); }
    Element compose(const Element& g, const Element& h) const { return g * h; }
    Element inverse(const Element& g) const { return g.transpose(); }
    Vector act_x(const Element& g, const Vector& x) const { return g * x; }
    Vector act_y(const Element& g, const Vector& y) const {
        return trivial_on_y_ ? y : Vector(g * y);
    }
    Vector orbit_rep(const Vector& x) const { return so_d_orbit_rep(x); }
    Vector max_invariant(const Vector& x) const {
        Vector m(1);
        m(0) = x.norm();
        return m;
    }
    Element sample_inversion(const Vector& x, Rng& rng) const {
        if (x.norm() == 0.0) return identity();  // stabilizer is the whole group
        return so_d_sample_inversion(x, rng);
    }
    Element sample_haar(Rng& rng) const { return sample_haar_rotation(dim_, rng); }

private:
    int dim_;
    bool trivial_on_y_;
};

// Restricted Lorentz transforms acting on four-momenta (both spaces).
// Non-compact: no uniform sampling.
class LorentzAction {
public:
    using Element = Matrix;
    static constexpr bool is_compact = false;

    Element identity() const { return Matrix::Identity(4, 4); }
    Element compose(const Element& g, const Element& h) const { return g * h; }
    Element inverse(const Element& g) const {
        const Eigen::Matrix4d eta = minkowski_metric();
        return eta * g.transpose() * eta;
    }
    Vector act_x(const Element& g, const Vector& x) const { return g * x; }
    Vector act_y(const Element& g, const Vector& y) const { return g * y; }
    Vector orbit_rep(const Vector& x) const { return lorentz_orbit_rep(Eigen::Vector4d(x)); }
    Vector max_invariant(const Vector& x) const {
        Vector m(1);
        m(0) = minkowski_invariant(Eigen::Vector4d(x));
        return m;
    }
    Element sample_inversion(const Vector& x, Rng& rng) const {
        return lorentz_sample_inversion(Eigen::Vector4d(x), rng);
    }
    Element sample_haar(Rng&) const {
        throw unsupported_operation_error("the restricted Lorentz group is not compact");
    }
};

// Coordinate permutations of R^d; orbits are multisets, the maximal invariant
// is the order statistic.
class PermutationAction {
public:
    using Element = Permutation;
    static constexpr bool is_compact = true;

    explicit PermutationAction(int dim) : dim_(dim) { require(dim >= 1, "dimension >= 1"); }

    int dim() const { return dim_; }

    Element identity() const { return Permutation::identity(dim_); }
    Element compose(const Element& g, const Element& h) const { return g.compose(h); }
    Element inverse(const Element& g) const { return g.inverse(); }
    Vector act_x(const Element& g, const Vector& x) const { return g.apply(x); }
    Vector act_y(const Element& g, const Vector& y) const { return g.apply(y); }
    Vector orbit_rep(const Vector& x) const { return sym_d_orbit_rep(x); }
    Vector max_invariant(const Vector& x) const { return sym_d_orbit_rep(x); }
    Element sample_inversion(const Vector& x, Rng& rng) const {
        return sym_d_sample_inversion(x, rng);
    }
    Element sample_haar(Rng& rng) const { return sample_uniform_permutation(dim_, rng); }

private:
    int dim_;
};

// Group with only the identity element. Randomization degenerates to
// resampling of the conditioned-on pieces.
class TrivialAction {
public:
    using Element = int;
    static constexpr bool is_compact = true;

    explicit TrivialAction(int dim) : dim_(dim) {}

    Element identity() const { return 0; }
    Element compose(Element, Element) const { return 0; }
    Element inverse(Element) const { return 0; }
    Vector act_x(Element, const Vector& x) const { return x; }
    Vector act_y(Element, const Vector& y) const { return y; }
    Vector orbit_rep(const Vector& x) const { return x; }
    Vector max_invariant(const Vector& x) const { return x; }
    Element sample_inversion(const Vector&, Rng&) const { return 0; }
    Element sample_haar(Rng&) const { return 0; }

private:
    int dim_;
};

// One planar rotation applied simultaneously to both halves of R^4 = R^2 x R^2.
// The representative aligns the first half with its axis; the second half is
// carried along, so the maximal invariant is (|a|, rotated b).
class PairedRotation2DAction {
public:
    using Element = Matrix;  // 2x2 rotation, applied blockwise
    static constexpr bool is_compact = true;

    Element identity() const { return Matrix::Identity(2, 2); }
    Element compose(const Element& g, const Element& h) const { return g * h; }
    Element inverse(const Element& g) const { return g.transpose(); }

    Vector act_x(const Element& g, const Vector& x) const {
        Vector out(4);
        out.head(2) = g * x.head(2);
        out.tail(2) = g * x.tail(2);
        return out;
    }
    Vector act_y(const Element& g, const Vector& y) const { return act_x(g, y); }

    Vector orbit_rep(const Vector& x) const {
        const Element g = aligning_rotation(x);
        return act_x(g.transpose(), x);
    }
    Vector max_invariant(const Vector& x) const { return orbit_rep(x); }
    Element sample_inversion(const Vector& x, Rng&) const { return aligning_rotation(x); }
    Element sample_haar(Rng& rng) const {
        std::uniform_real_distribution<double> unif(0.0, 2.0 * std::acos(-1.0));
        return rotation_2d(unif(rng));
    }

private:
    // Rotation g with g^{-1} x canonical: picked from the first nonzero half.
    static Element aligning_rotation(const Vector& x) {
        require(x.size() == 4, "paired rotation acts on R^4");
        const Vector a = x.head(2), b = x.tail(2);
        const Vector& lead = (a.norm() > 0.0) ? a : b;
        if (lead.norm() == 0.0) return Matrix::Identity(2, 2);
        return so_d_representative_inversion(lead);
    }
};

// Independent planar rotations of the two halves of R^4.
class UnpairedRotation2DAction {
public:
    using Element = Matrix;  // 4x4 block-diagonal pair of rotations
    static constexpr bool is_compact = true;

    Element identity() const { return Matrix::Identity(4, 4); }
    Element compose(const Element& g, const Element& h) const { return g * h; }
    Element inverse(const Element& g) const { return g.transpose(); }
    Vector act_x(const Element& g, const Vector& x) const { return g * x; }
    Vector act_y(const Element& g, const Vector& y) const { return g * y; }

    Vector orbit_rep(const Vector& x) const {
        require(x.size() == 4, "unpaired rotations act on R^4");
        Vector rep = Vector::Zero(4);
        rep(0) = x.head(2).norm();
        rep(2) = x.tail(2).norm();
        return rep;
    }
    Vector max_invariant(const Vector& x) const {
        Vector m(2);
        m(0) = x.head(2).norm();
        m(1) = x.tail(2).norm();
        return m;
    }
    Element sample_inversion(const Vector& x, Rng&) const {
        Matrix g = Matrix::Identity(4, 4);
        if (x.head(2).norm() > 0.0)
            g.block(0, 0, 2, 2) = so_d_representative_inversion(Vector(x.head(2)));
        if (x.tail(2).norm() > 0.0)
            g.block(2, 2, 2, 2) = so_d_representative_inversion(Vector(x.tail(2)));
        return g;
    }
    Element sample_haar(Rng& rng) const {
        std::uniform_real_distribution<double> unif(0.0, 2.0 * std::acos(-1.0));
        Matrix g = Matrix::Identity(4, 4);
        g.block(0, 0, 2, 2) = rotation_2d(unif(rng));
        g.block(2, 2, 2, 2) = rotation_2d(unif(rng));
        return g;
    }
};

static_assert(GroupAction<RotationAction>);
static_assert(GroupAction<LorentzAction>);
static_assert(GroupAction<PermutationAction>);
static_assert(GroupAction<TrivialAction>);
static_assert(GroupAction<PairedRotation2DAction>);
static_assert(GroupAction<UnpairedRotation2DAction>);

}  // namespace symtest

#endif
