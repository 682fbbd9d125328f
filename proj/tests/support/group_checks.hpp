#ifndef SYMTEST_TESTS_SUPPORT_GROUP_CHECKS_HPP
#define SYMTEST_TESTS_SUPPORT_GROUP_CHECKS_HPP

// Randomized group-action contract checks shared by the unit and acceptance
// suites.

#include <functional>
#include <string>

#include "symtest/groups/actions.hpp"

namespace testsupport {

struct GroupCheckReport {
    int checks = 0;
    int invariant_failures = 0;   // max-invariant or representative moved
    int round_trip_failures = 0;  // inversion draw missed the data point
    double max_invariant_err = 0.0;
    double max_round_trip_err = 0.0;
};

template <symtest::GroupAction A, typename PointGen, typename ElementGen>
GroupCheckReport check_group_contract(const A& action, PointGen&& point, ElementGen&& element,
                                      int reps, double invariant_tol, double round_trip_tol,
                                      symtest::Rng& rng) {
    GroupCheckReport report;
    for (int rep = 0; rep < reps; ++rep) {
        const symtest::Vector x = point(rng);
        const auto g = element(rng);
        const symtest::Vector gx = action.act_x(g, x);

        const double m_err = (action.max_invariant(gx) - action.max_invariant(x)).norm();
        const double rep_err = (action.orbit_rep(gx) - action.orbit_rep(x)).norm();
        report.max_invariant_err = std::max(report.max_invariant_err, std::max(m_err, rep_err));
        if (m_err > invariant_tol || rep_err > invariant_tol) ++report.invariant_failures;

        const auto gamma = action.sample_inversion(x, rng);
        const double rt_err = (action.act_x(gamma, action.orbit_rep(x)) - x).norm();
        report.max_round_trip_err = std::max(report.max_round_trip_err, rt_err);
        if (rt_err > round_trip_tol) ++report.round_trip_failures;

        ++report.checks;
    }
    return report;
}

}  // namespace testsupport

#endif
