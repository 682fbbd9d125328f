#ifndef SYMTEST_RANDOMIZATION_DATASET_HPP
#define SYMTEST_RANDOMIZATION_DATASET_HPP

#include <utility>
#include <vector>

#include "symtest/common.hpp"
#include "symtest/groups/actions.hpp"
#include "symtest/rng.hpp"

namespace symtest {

inline constexpr double kRoundTripTol = 1e-6;

// Paired observations with the derived quantities every randomization scheme
// conditions on: orbit representatives, maximal invariants, one fixed draw of
// the inversion kernel per row, and the aligned responses.
template <GroupAction A>
struct PairedDataset {
    Matrix x;        // n x dx observations
    Matrix y;        // n x dy responses
    Matrix rep;      // rep.row(i) = orbit_rep(x_i)
    Matrix minv;     // minv.row(i) = max_invariant(x_i)
    Matrix y_tilde;  // y_tilde.row(i) = gamma_tilde_i^{-1} y_i
    std::vector<typename A::Element> gamma_tilde;

    int n() const { return static_cast<int>(x.rows()); }
};

// Samples the per-row inversion draws once and caches all derived rows.
template <GroupAction A>
PairedDataset<A> make_paired_dataset(const A& action, Matrix x, Matrix y, Rng& rng) {
    require(x.rows() == y.rows(), "paired data needs equally many x and y rows");
    require(x.rows() >= 1, "paired data must be nonempty");
    PairedDataset<A> ds;
    const int n = static_cast<int>(x.rows());
    ds.x = std::move(x);
    ds.y = std::move(y);

    const Vector rep0 = action.orbit_rep(ds.x.row(0));
    const Vector minv0 = action.max_invariant(ds.x.row(0));
    ds.rep.resize(n, rep0.size());
    ds.minv.resize(n, minv0.size());
    ds.y_tilde.resize(n, ds.y.cols());
    ds.gamma_tilde.reserve(n);

    for (int i = 0; i < n; ++i) {
        const Vector xi = ds.x.row(i);
        ds.rep.row(i) = action.orbit_rep(xi);
        ds.minv.row(i) = action.max_invariant(xi);
        auto g = action.sample_inversion(xi, rng);
        const Vector back = action.act_x(g, ds.rep.row(i));
        if ((back - xi).norm() > kRoundTripTol * std::max(1.0, xi.norm()))
            throw contract_violation_error("inversion draw does not map the representative back");
        ds.y_tilde.row(i) = action.act_y(action.inverse(g), ds.y.row(i));
        ds.gamma_tilde.push_back(std::move(g));
    }
    return ds;
}

}  // namespace symtest

#endif
