#ifndef SYMTEST_RANDOMIZATION_PVALUE_HPP
#define SYMTEST_RANDOMIZATION_PVALUE_HPP

#include <vector>

#include "symtest/common.hpp"

namespace symtest {

// Randomization p-value (1 + #{b : null_b >= observed}) / (B + 1).
// Ties count toward the numerator.
inline double compute_p_value(double observed, const std::vector<double>& null_stats) {
    require(!null_stats.empty(), "p-value needs at least one null statistic");
    std::size_t count = 0;
    for (double t : null_stats) {
        if (t >= observed) ++count;
    }
    return static_cast<double>(1 + count) / static_cast<double>(null_stats.size() + 1);
}

}  // namespace symtest

#endif
