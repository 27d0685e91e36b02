#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <utility>

#include "hdtest/rng.hpp"

// Data model: X = factor * z + mean, with z drawn coordinatewise from one of
// four noise families. The factor matrix plays the role of a covariance
// square root (factor * factor^T = sigma); the noise family contributes an
// extra per-coordinate variance on top of sigma, see noise_variance().

namespace hdtest::models {

struct CovarianceModel {
    Eigen::MatrixXd factor;  // d x D, D >= d
    Eigen::MatrixXd sigma;   // factor * factor^T, cached
    double trace_sigma = 0.0;
    double trace_sigma_sq = 0.0;

    int dim() const { return static_cast<int>(factor.rows()); }
    int latent_dim() const { return static_cast<int>(factor.cols()); }

    static CovarianceModel identity(int d);
    static CovarianceModel scaled_identity(int d, double scale);
    // Lower-triangular Cholesky factor; sigma must be symmetric positive definite.
    static CovarianceModel from_sigma(const Eigen::MatrixXd& sigma);
    static CovarianceModel from_factor(const Eigen::MatrixXd& factor);

    // Same covariance scaled by a positive constant.
    CovarianceModel scaled(double scale) const;
};

enum class NoiseFamily {
    gaussian,                // N(0,1) coordinates
    laplace_unit,            // Laplace, scale 1/sqrt(2), unit variance
    uniform_beta11,          // Beta(1,1) = Uniform(0,1); mean 1/2, variance 1/12
    gaussian_scale_mixture,  // equal mixture of N(0, s I) for s in {1,2,3}
};

// Per-coordinate variance of the latent draw.
double noise_variance(NoiseFamily family);
// Per-coordinate mean of the latent draw (nonzero only for uniform_beta11,
// which is deliberately not re-centered; the offset is common to both samples
// of a pair and cancels in every two-sample statistic).
double noise_mean(NoiseFamily family);

std::string family_name(NoiseFamily family);
NoiseFamily family_from_name(const std::string& name);

struct DistributionSpec {
    NoiseFamily noise = NoiseFamily::gaussian;
    CovarianceModel cov;
    Eigen::VectorXd mean;

    // Covariance of the generated rows: noise_variance * sigma.
    double effective_trace_sigma() const { return noise_variance(noise) * cov.trace_sigma; }
    double effective_trace_sigma_sq() const {
        const double v = noise_variance(noise);
        return v * v * cov.trace_sigma_sq;
    }
    CovarianceModel effective_covariance() const { return cov.scaled(noise_variance(noise)); }
};

struct Sample {
    Eigen::MatrixXd data;  // n x d, one observation per row

    int n() const { return static_cast<int>(data.rows()); }
    int dim() const { return static_cast<int>(data.cols()); }
};

// n i.i.d. rows factor*z + mean. Identical (spec, n, seed) triples give
// bit-identical output. Throws std::invalid_argument for non-finite mean or
// factor, or n < 2.
Sample sample(const DistributionSpec& spec, int n, std::uint64_t seed);

// Mean-shift pairs of Experiment 1: P centered, Q shifted so that
// ||shift||^2 / noise_variance = 1 for every family. Both share identity
// factor (covariance = noise_variance * I).
std::pair<DistributionSpec, DistributionSpec> make_experiment1_pair(NoiseFamily family, int d);

// Non-diagonal covariance of Experiment 2: eigenvalues (equally spaced on
// [0.01, 1])^6, rescaled to trace d, rotated by a seeded random orthonormal
// basis (eigenvectors of a symmetrized Gaussian matrix, columns sign-fixed).
CovarianceModel make_experiment2_covariance(int d, std::uint64_t seed);

// Covariance-difference pair of Experiment 4: P = N(0, 50 I / ||S||_F),
// Q = N(0, 50 (S + I) / ||S||_F) with S the un-normalized Experiment-2 matrix.
std::pair<DistributionSpec, DistributionSpec> make_experiment4_pair(int d, std::uint64_t seed);

// Key-value serialization of the generator presets (family, d, shift kind,
// covariance kind, seed); see GeneratorConfig::to_string for the schema.
struct GeneratorConfig {
    std::string family = "gaussian";    // gaussian | laplace_unit | uniform_beta11 | gaussian_scale_mixture
    int d = 1;
    std::string shift_kind = "none";    // none | experiment1
    std::string cov_kind = "identity";  // identity | experiment2 | experiment4
    std::uint64_t seed = 0;             // covariance seed (experiment2/4)

    std::string to_string() const;
    static GeneratorConfig parse(const std::string& text);

    // Builds the (P, Q) pair this config describes.
    std::pair<DistributionSpec, DistributionSpec> build() const;
};

}  // namespace hdtest::models
