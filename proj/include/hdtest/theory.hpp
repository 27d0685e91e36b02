#pragma once

#include <string>

#include "hdtest/models.hpp"

// Closed-form power expressions for the mean-difference alternative, the
// spherical-covariance special case, the block/linear-time variants, the
// Gaussian approximation of (non)central chi-squared tails, and the matching
// minimax lower bound. All tests are one-sided at level alpha.

namespace hdtest::theory {

// Standard normal CDF (absolute error ~1e-16) and quantile (~1e-14).
double normal_cdf(double x);
double normal_quantile(double p);

struct ProblemParams {
    int n = 0;                      // per-sample size
    int d = 0;                      // dimension
    double trace_sigma = 0.0;       // Tr(Sigma)
    double trace_sigma_sq = 0.0;    // Tr(Sigma^2)
    double delta_sq = 0.0;          // ||mean difference||^2
    double delta_sigma_delta = 0.0; // delta^T Sigma delta
    double alpha = 0.05;
};

// Asymptotic power of the quadratic-time statistics:
//   Phi( -sqrt(T2/n^2) / sqrt(T2/n^2 + S/n) * z_a
//        + delta_sq / sqrt(8 T2/n^2 + 8 S/n) )
// with T2 = Tr(Sigma^2), S = delta^T Sigma delta. The null variance sits in
// the numerator of the z_a coefficient (the corrected form; the variant with
// the roles swapped is wrong in the high-SNR regime).
double power_general(const ProblemParams& p);

// Spherical case Sigma = sigma^2 I with snr = ||delta|| / sigma:
//   Phi( -sqrt(d)/sqrt(d + n snr^2) * z_a + snr^2 / sqrt(8d/n^2 + 8 snr^2/n) )
double power_spherical(int n, int d, double snr, double alpha);

// Block variant over `blocks` blocks (blocks = 1 reduces to power_general).
double power_block(int n, int d, int blocks, double snr, double alpha);
double power_block_general(int n, int blocks, double trace_sigma_sq, double delta_sq,
                           double delta_sigma_delta, double alpha);

// Linear-time variant: Phi( sqrt(n) snr^2 / sqrt(8d + 8 snr^2) - z_a ).
double power_linear(int n, int d, double snr, double alpha);

enum class SnrTag { low, medium, high };

struct SnrRegime {
    SnrTag tag = SnrTag::low;
    double snr = 0.0;
};

std::string snr_tag_name(SnrTag tag);

// Finite-sample proxy for the asymptotic regimes: r = snr / sqrt(d/n);
// r < 1/3 low, r > 3 high, medium otherwise (fixed convention).
SnrRegime snr_regime(int n, int d, double snr);

// Gaussian approximation of the noncentral chi-squared CDF with d degrees of
// freedom and noncentrality r^2: Phi((x - d - r^2) / sqrt(2d + 4 r^2)).
double chi2_gaussian_cdf_approx(double x, int d, double noncentrality);

// Minimax power of the normal-means problem on the radius-rho sphere:
//   Phi( -sqrt(2d)/sqrt(2d + 4 rho_sq) * z_a + rho_sq / sqrt(2d + 4 rho_sq) )
double normal_means_power(int d, double rho_sq, double alpha);

// Two-sample minimax power under Sigma = sigma^2 I, computed through the
// normal-means reduction with rho'^2 = n (rho/sigma)^2 / 2. Must agree with
// power_spherical to ~1e-12 (the upper and lower bounds match, constants
// included); keeping the two routes separate is what makes that a real check.
double minimax_power(int n, int d, double rho, double sigma, double alpha);

}  // namespace hdtest::theory
