#ifndef SYMTEST_GROUPS_PERMUTATIONS_HPP
#define SYMTEST_GROUPS_PERMUTATIONS_HPP

#include <algorithm>
#include <numeric>
#include <vector>

#include "symtest/common.hpp"
#include "symtest/rng.hpp"

namespace symtest {

// Permutation of {0,...,d-1}, stored as the image sequence. Acts on vectors by
// moving the entry at j to position image[j]: (pi * v)[pi(j)] = v[j].
class Permutation {
public:
    Permutation() = default;

    explicit Permutation(std::vector<int> image) : image_(std::move(image)) {
        std::vector<bool> seen(image_.size(), false);
        for (int v : image_) {
            require(v >= 0 && v < static_cast<int>(image_.size()) && !seen[v],
                    "permutation image must be a bijection on {0,...,d-1}");
            seen[v] = true;
        }
    }

    static Permutation identity(int d) {
        std::vector<int> img(d);
        std::iota(img.begin(), img.end(), 0);
        return Permutation(std::move(img));
    }

    int size() const { return static_cast<int>(image_.size()); }
    int operator()(int i) const { return image_[i]; }
    const std::vector<int>& image() const { return image_; }

    Permutation inverse() const {
        std::vector<int> inv(image_.size());
        for (int i = 0; i < size(); ++i) inv[image_[i]] = i;
        Permutation p;
        p.image_ = std::move(inv);
        return p;
    }

    // (this * other)(i) = this(other(i))
    Permutation compose(const Permutation& other) const {
        std::vector<int> img(image_.size());
        for (int i = 0; i < size(); ++i) img[i] = image_[other(i)];
        Permutation p;
        p.image_ = std::move(img);
        return p;
    }

    Vector apply(const Vector& v) const {
        Vector out(v.size());
        for (int i = 0; i < size(); ++i) out(image_[i]) = v(i);
        return out;
    }

    bool operator==(const Permutation& other) const { return image_ == other.image_; }

private:
    std::vector<int> image_;
};

// Order statistic: x sorted ascending.
inline Vector sym_d_orbit_rep(const Vector& x) {
    Vector out = x;
    std::sort(out.data(), out.data() + out.size());
    return out;
}

// Uniform draw from the permutations taking sorted(x) to x. Sorting with a
// uniformly random tie-break order makes the draw uniform over the coset when
// x has ties, and recovers the unique unsorting permutation otherwise.
inline Permutation sym_d_sample_inversion(const Vector& x, Rng& rng) {
    const int d = static_cast<int>(x.size());
    std::vector<int> idx(d);
    std::iota(idx.begin(), idx.end(), 0);
    std::shuffle(idx.begin(), idx.end(), rng);
    std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return x(a) < x(b); });
    // idx[j] is the position in x that receives the j-th smallest value.
    std::vector<int> img(d);
    for (int j = 0; j < d; ++j) img[j] = idx[j];
    return Permutation(std::move(img));
}

inline Permutation sample_uniform_permutation(int d, Rng& rng) {
    std::vector<int> img(d);
    std::iota(img.begin(), img.end(), 0);
    std::shuffle(img.begin(), img.end(), rng);
    return Permutation(std::move(img));
}

}  // namespace symtest

#endif
