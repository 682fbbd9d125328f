#ifndef SYMTEST_POWER_BOUNDS_HPP
#define SYMTEST_POWER_BOUNDS_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "symtest/common.hpp"

namespace symtest {

// Finite-sample deviation envelope of the kernel test statistic; every term
// vanishes as n grows.
inline double r_n_eta(int n, double nu, double eta) {
    require(n >= 1, "sample size must be positive");
    require(nu > 0.0, "kernel sup-norm root must be positive");
    require(eta > 0.0, "confidence parameter must be positive");
    const double nn = static_cast<double>(n);
    const double nu2 = nu * nu;
    return 9.0 / (2.0 * nn) * nu2 + 16.0 * nu2 * std::sqrt(2.0) / std::sqrt(nn * nn * nn) +
           6.0 * nu * std::sqrt(2.0 / nn) +
           1.5 * nu * std::sqrt(eta) * std::sqrt(2.0 / nn + 32.0 * std::sqrt(2.0 / (nn * nn * nn))) +
           4.0 * eta * nu / nn;
}

// Probability that one null randomization round beats the observed separation.
inline double success_prob(double delta, int n, double nu, double eta) {
    require(delta >= 0.0, "separation must be nonnegative");
    return std::min(1.0, std::exp(-1.5 * delta + r_n_eta(n, nu, eta)));
}

// Adaptive-statistic variant: a union bound over the L kernel components, with
// the envelope evaluated at the largest component sup-norm root.
inline double adaptive_success_prob(double delta_tilde, int n, double nu_max, double eta, int L) {
    require(L >= 1, "component count must be >= 1");
    require(delta_tilde >= 0.0, "separation must be nonnegative");
    return std::min(1.0, static_cast<double>(L) *
                             std::exp(-1.5 * delta_tilde + r_n_eta(n, nu_max, eta)));
}

// Binomial CDF P(X <= m) by direct log-space summation.
inline double binomial_cdf(int m, int trials, double p) {
    require(trials >= 0, "trial count must be nonnegative");
    require(p >= 0.0 && p <= 1.0, "success probability in [0, 1]");
    if (m < 0) return 0.0;
    if (m >= trials) return 1.0;
    if (p == 0.0) return 1.0;
    if (p == 1.0) return 0.0;
    const double logp = std::log(p), logq = std::log1p(-p);
    double max_term = -std::numeric_limits<double>::infinity();
    std::vector<double> log_terms(m + 1);
    for (int k = 0; k <= m; ++k) {
        log_terms[k] = std::lgamma(trials + 1.0) - std::lgamma(k + 1.0) -
                       std::lgamma(trials - k + 1.0) + k * logp + (trials - k) * logq;
        max_term = std::max(max_term, log_terms[k]);
    }
    double acc = 0.0;
    for (int k = 0; k <= m; ++k) acc += std::exp(log_terms[k] - max_term);
    return std::min(1.0, std::exp(max_term) * acc);
}

struct PowerBoundInputs {
    int n = 100;        // sample size
    int num_rounds = 99;  // randomization count B
    double alpha = 0.05;
    double nu = 1.0;    // kernel sup-norm root (1 for normalized kernels)
    double eta = 1.0;   // confidence parameter
    double delta = 0.0; // separation (mean-aggregated or sup for adaptive statistics)
    int L = 1;          // component count; L = 1 is the single-kernel bound
};

struct PowerBoundReport {
    double r_n = 0.0;
    double success = 0.0;   // p_eta(delta)
    int rejection_quantile = 0;  // floor(alpha (B+1) - 1)
    double bound = 0.0;     // binomial CDF lower bound on the rejection probability
    bool separation_below_threshold = false;  // delta < 2 nu sqrt(2/n): bound still returned
};

inline PowerBoundReport power_lower_bound(const PowerBoundInputs& in) {
    require(in.num_rounds >= 1, "randomization count must be >= 1");
    require(in.alpha > 0.0 && in.alpha < 1.0, "level must lie in (0, 1)");
    require(in.L >= 1, "component count must be >= 1");
    PowerBoundReport rep;
    rep.r_n = r_n_eta(in.n, in.nu, in.eta);
    rep.success = in.L == 1 ? success_prob(in.delta, in.n, in.nu, in.eta)
                            : adaptive_success_prob(in.delta, in.n, in.nu, in.eta, in.L);
    rep.rejection_quantile =
        static_cast<int>(std::floor(in.alpha * (in.num_rounds + 1.0) - 1.0));
    rep.bound = binomial_cdf(rep.rejection_quantile, in.num_rounds, rep.success);
    rep.separation_below_threshold = in.delta < 2.0 * in.nu * std::sqrt(2.0 / in.n);
    return rep;
}

// Smallest separation that guarantees rejection probability >= beta through
// the Chernoff route.
inline double delta_threshold(double beta, int num_rounds, double alpha, int n, double nu,
                              double eta) {
    require(beta > 0.0 && beta < 1.0, "target power must lie in (0, 1)");
    const int b_alpha = static_cast<int>(std::floor(alpha * (num_rounds + 1.0) - 1.0));
    require(b_alpha >= 1, "floor(alpha (B+1) - 1) must be >= 1");
    const double x = -2.0 * std::log1p(-beta) / b_alpha;
    require(x < 1.0, "-2 ln(1-beta) / floor(alpha (B+1) - 1) must be < 1");
    return (2.0 / 3.0) * (r_n_eta(n, nu, eta) -
                          std::log(static_cast<double>(b_alpha) / num_rounds) -
                          std::log1p(-std::sqrt(x)));
}

}  // namespace symtest

#endif
