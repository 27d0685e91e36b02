#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "hdtest/models.hpp"

// Numerical oracles for the moment identities and the Taylor decomposition
// that the power theory rests on. Each check reports a closed form next to a
// Monte-Carlo estimate and the discrepancy in stderr units; thresholds are
// applied by callers, never silently in here.

namespace hdtest::verify {

using models::CovarianceModel;
using models::Sample;

struct MomentReport {
    std::string quantity;
    double closed_form = 0.0;
    double mc_estimate = 0.0;
    double mc_stderr = 0.0;
    long n_draws = 0;
    double z_discrepancy = 0.0;  // (mc - closed) / stderr
};

// Distance kernel of the second-order Taylor term:
// ||x-x'||^2 + ||y-y'||^2 - ||x-y'||^2 - ||x'-y||^2. Identically -2 h_cq.
double h2(const Eigen::VectorXd& x, const Eigen::VectorXd& xp, const Eigen::VectorXd& y,
          const Eigen::VectorXd& yp);

// |h2 + 2 h_cq| for one 4-tuple; algebraically zero, bounded by rounding.
double check_h2_identity(const Eigen::VectorXd& x, const Eigen::VectorXd& xp,
                         const Eigen::VectorXd& y, const Eigen::VectorXd& yp);

// Moments of ||X - Y||^2 for Gaussian X ~ (0, Sigma), Y ~ (shift, Sigma):
//   E   = 2 Tr(Sigma) + ||shift||^2
//   Var = 8 Tr(Sigma^2) + 8 shift^T Sigma shift
//   E^2-moment of the squared distance (fourth moment of the distance)
//       = Var + E^2
// Only the Gaussian family is supported (kurtosis corrections vanish).
std::vector<MomentReport> check_pairwise_moments(const CovarianceModel& cov,
                                                 const Eigen::VectorXd& shift, long draws,
                                                 std::uint64_t seed);

// Moments of quadratic forms in Gaussian vectors, for symmetric positive
// definite `sigma`:
//   difference vector Z' = Z1 - Z2:  E[Z'^T S Z'] = 2 Tr(S), Var = 8 Tr(S^2)
//   standard normal e:  E[(e^T S e)^k], k = 1..4, against the trace formulas
// The Var constant 8 Tr(S^2) is the one the brute-force draws support.
std::vector<MomentReport> check_quadratic_form_moments(const Eigen::MatrixXd& sigma, long draws,
                                                       std::uint64_t seed);

struct TaylorLink {
    double statistic = 0.0;          // quadratic-time statistic
    double taylor = 0.0;             // multiplier * uCQ
    double residual = 0.0;           // statistic - taylor
    double relative_residual = 0.0;  // |residual| / max(|statistic|, |taylor|)
};

// Dominant-term decomposition of the Gaussian-kernel statistic:
// statistic ~ (2 e^{-tau} / bandwidth^2) uCQ with tau = 2 trace_sigma /
// bandwidth^2. Requires bandwidth^2 > 2 trace_sigma.
TaylorLink check_taylor_link(const Sample& x, const Sample& y, double bandwidth,
                             double trace_sigma);

// Same decomposition for the shifted Euclidean distance with multiplier
// 1 / bandwidth (its first-order Taylor constant).
TaylorLink check_taylor_link_shifted(const Sample& x, const Sample& y, double bandwidth_sq,
                                     double trace_sigma);

struct VarianceScalingRow {
    int n = 0;
    double var_null = 0.0;
    double var_alt = 0.0;
};

struct VarianceScalingReport {
    std::vector<VarianceScalingRow> rows;
    double null_exponent = 0.0;  // fitted slope of log Var(uCQ) on log n, null data
    double alt_exponent = 0.0;   // same under the given shift (reported, not asserted)
};

// Variance of uCQ across repetitions on an n-grid; the null slope should sit
// near -2 (degenerate pair kernel), the alternative drifts toward -1 as the
// projection term takes over. reps < 50 is refused (the regression is noise).
VarianceScalingReport check_variance_scaling(const CovarianceModel& cov,
                                             const std::vector<int>& n_grid, int reps,
                                             std::uint64_t seed, const Eigen::VectorXd& alt_shift);

}  // namespace hdtest::verify
