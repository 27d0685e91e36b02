#pragma once

#include <Eigen/Dense>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "hdtest/models.hpp"

// Two-sample U-statistics over paired index pairs (i, j), i != j:
//
//   kernels    h_k = k(X_i,X_j) + k(Y_i,Y_j) - k(X_i,Y_j) - k(X_j,Y_i)
//   distances  h_r = r(X_i,Y_j) + r(X_j,Y_i) - r(X_i,X_j) - r(Y_i,Y_j)
//
// averaged over all n(n-1) ordered pairs. The linear kernel reproduces the
// mean-difference U-statistic (legend name uCQ) exactly; the Gaussian kernel
// gives the quadratic-time MMD; plain and shifted Euclidean distances give
// the energy-distance family. Block and linear-time variants average the
// same statistic over contiguous blocks.

namespace hdtest::stats {

using models::CovarianceModel;
using models::Sample;

struct LinearKernel {
    bool operator==(const LinearKernel&) const = default;
};
struct GaussianKernel {
    double bandwidth = 1.0;  // k(a,b) = exp(-||a-b||^2 / bandwidth^2)
    bool operator==(const GaussianKernel&) const = default;
};
struct EuclideanDistance {
    bool operator==(const EuclideanDistance&) const = default;
};
struct ShiftedEuclidean {
    // r(a,b) = sqrt(bandwidth_sq - 2*trace_sigma + ||a-b||^2), requires
    // bandwidth_sq >= 2*trace_sigma; rounding-negative arguments clamp to 0.
    double bandwidth_sq = 0.0;
    double trace_sigma = 0.0;
    bool operator==(const ShiftedEuclidean&) const = default;
};

using KernelOrDistance = std::variant<LinearKernel, GaussianKernel, EuclideanDistance, ShiftedEuclidean>;

KernelOrDistance make_gaussian(double bandwidth);
KernelOrDistance make_shifted_euclidean(double bandwidth_sq, double trace_sigma);
bool is_distance(const KernelOrDistance& kernel);
std::string kernel_name(const KernelOrDistance& kernel);

struct ComputeBudget {
    enum class Kind { quadratic, block, linear };
    Kind kind = Kind::quadratic;
    int blocks = 1;

    static ComputeBudget quadratic() { return {Kind::quadratic, 1}; }
    static ComputeBudget block(int b) { return {Kind::block, b}; }
    static ComputeBudget linear() { return {Kind::linear, 0}; }
    std::string name() const;
    static ComputeBudget parse(const std::string& text);  // "quadratic" | "block:B" | "linear"
};

struct StatisticValue {
    double value = 0.0;
    KernelOrDistance kernel;
    ComputeBudget budget;
    int n = 0;
    std::vector<double> per_block_values;  // block / linear only
};

// Pair kernel of the mean-difference statistic, dot-product form
// x'x' + y'y' cross-cancelled: equals (x - y)^T (x' - y').
double h_cq(const Eigen::VectorXd& x, const Eigen::VectorXd& xp, const Eigen::VectorXd& y,
            const Eigen::VectorXd& yp);

// Quadratic-time statistic over all pairs; O(n^2 d). Throws on sample size or
// dimension mismatch, or n < 2.
StatisticValue u_statistic(const Sample& x, const Sample& y, const KernelOrDistance& kernel);

// Mean of the quadratic statistic over `blocks` contiguous blocks; blocks
// must divide n (no silent truncation) with n/blocks >= 2. O(n^2 d / blocks).
StatisticValue block_statistic(const Sample& x, const Sample& y, const KernelOrDistance& kernel,
                               int blocks);

// Blocks of size 2 (disjoint index pairs); n even, n >= 4. O(n d).
StatisticValue linear_statistic(const Sample& x, const Sample& y, const KernelOrDistance& kernel);

// h values over the C(n,2) unordered pairs, in (i<j) row-major order.
std::vector<double> pair_kernel_values(const Sample& x, const Sample& y,
                                       const KernelOrDistance& kernel);

// Plug-in estimate of the null variance of the statistic.
//   quadratic:    (2 / (n(n-1))) * mean(h^2) over unordered pairs
//   block/linear: sample variance of per-block values, divided by #blocks
// The quadratic form is approximate (permutation calibration is the exact
// path); the block form is the usual independent-replicates estimate.
double null_variance_estimate(std::span<const double> per_pair_h, int n, const ComputeBudget& budget);

// First-order multiplier m such that the statistic ~ m * uCQ under the
// dominant Taylor term:
//   linear           1
//   gaussian         2 e^{-tau} / bandwidth^2,  tau = 2 trace_sigma / bandwidth^2
//   euclidean        1 / sqrt(2 trace_sigma)
//   shifted          1 / sqrt(bandwidth_sq - 2 trace_sigma_kernel + 2 trace_sigma)
// trace_sigma is the trace of the data covariance.
double taylor_multiplier(const KernelOrDistance& kernel, double trace_sigma);

// Closed-form null variance m^2 * 8 Tr(Sigma^2) / n^2 (asymptotic n^2 form).
double oracle_null_variance(const KernelOrDistance& kernel, const CovarianceModel& cov, int n);

// Same, but with the exact pair count n_b (n_b - 1) per block and averaged
// over blocks; used for studentization in the harness. Equals
// m^2 * 8 Tr(Sigma^2) / (n_b (n_b - 1) B) with n_b the per-block size.
double oracle_null_variance(const KernelOrDistance& kernel, const CovarianceModel& cov, int n,
                            const ComputeBudget& budget);

// --- pooled-pair evaluation -------------------------------------------------
//
// The harness evaluates many statistics and many permutations on one dataset;
// all of them are functions of the pooled squared-distance matrix, computed
// once per dataset.

class PooledPairs {
public:
    PooledPairs(const Sample& x, const Sample& y);

    int per_group() const { return n_; }
    int pooled_size() const { return 2 * n_; }
    const Eigen::MatrixXd& squared_distances() const { return d2_; }

    // Pooled squared distances of all unordered pairs (copy, unsorted).
    std::vector<double> pair_distances() const;

    // Element transform of the squared-distance matrix for one kernel (the
    // linear kernel maps to -d2/2, which reproduces uCQ through the kernel
    // sign convention).
    Eigen::MatrixXd kernel_matrix(const KernelOrDistance& kernel) const;

    // Statistic for a group assignment: xs/ys hold pooled row indices of the
    // two groups (position k of ys is the pair of position k of xs).
    StatisticValue evaluate(const Eigen::MatrixXd& kmat, const KernelOrDistance& kernel,
                            const ComputeBudget& budget, std::span<const int> xs,
                            std::span<const int> ys) const;

    // h values over unordered pairs for the plug-in variance.
    std::vector<double> pair_values(const Eigen::MatrixXd& kmat, const KernelOrDistance& kernel,
                                    std::span<const int> xs, std::span<const int> ys) const;

    // Identity assignment (xs = 0..n-1, ys = n..2n-1).
    std::vector<int> identity_xs() const;
    std::vector<int> identity_ys() const;

private:
    int n_;
    Eigen::MatrixXd d2_;
};

}  // namespace hdtest::stats
