#ifndef SYMTEST_COMMON_HPP
#define SYMTEST_COMMON_HPP

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <string>

namespace symtest {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Input is structurally valid but lies on a degenerate locus where the
// requested quantity is not defined (e.g. an inversion at the orbit origin).
class degenerate_input_error : public std::runtime_error {
public:
    explicit degenerate_input_error(const std::string& what) : std::runtime_error(what) {}
};

// Operation is not available for the given configuration (e.g. uniform group
// sampling on a non-compact group).
class unsupported_operation_error : public std::runtime_error {
public:
    explicit unsupported_operation_error(const std::string& what) : std::runtime_error(what) {}
};

// A caller-supplied ingredient violated its contract at runtime.
class contract_violation_error : public std::runtime_error {
public:
    explicit contract_violation_error(const std::string& what) : std::runtime_error(what) {}
};

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw std::invalid_argument(msg);
}

inline void require_finite(double x, const std::string& name) {
    if (!std::isfinite(x)) throw std::invalid_argument(name + " must be finite");
}

}  // namespace symtest

#endif
