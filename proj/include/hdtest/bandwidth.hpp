#pragma once

#include <string>

#include "hdtest/models.hpp"

// Bandwidth selection for the Gaussian kernel and the shifted Euclidean
// distance. The median heuristic takes the empirical median of the pooled
// pairwise *squared* distances (which is the quantity that concentrates at
// 2 Tr(Sigma)); legend names d^p map to power rules.

namespace hdtest::bandwidth {

using models::CovarianceModel;
using models::Sample;

struct BandwidthRule {
    enum class Kind { median, mean, power, fixed };
    Kind kind = Kind::median;
    double exponent = 0.5;  // power rule: bandwidth = scale * d^exponent
    double scale = 1.0;
    double value = 0.0;     // fixed rule

    static BandwidthRule median() { return {Kind::median, 0, 0, 0}; }
    static BandwidthRule mean() { return {Kind::mean, 0, 0, 0}; }
    static BandwidthRule power(double exponent, double scale = 1.0) {
        return {Kind::power, exponent, scale, 0};
    }
    static BandwidthRule fixed(double value) { return {Kind::fixed, 0, 0, value}; }

    // "median" | "mean" | "pow:<p>" | "fixed:<bw>"
    static BandwidthRule parse(const std::string& text);
    std::string name() const;
};

struct MedianHeuristic {
    double bandwidth_sq = 0.0;  // median pooled squared distance
    bool degenerate = false;    // all points identical
};

// Median over all C(nx+ny, 2) unordered pooled pairs; even pair counts
// average the two middle order statistics. Sample sizes may differ.
MedianHeuristic median_heuristic(const Sample& x, const Sample& y);

// Same heuristic from a precomputed list of pooled squared distances
// (consumed, reordered in place).
MedianHeuristic median_of_squared_distances(std::vector<double>& distances);

// Population mean pooled pairwise squared distance for two groups of size n
// with common covariance trace and mean-shift ||delta||^2 = delta_sq:
// within-group pairs contribute 2 Tr(Sigma), cross pairs 2 Tr(Sigma) +
// delta_sq, weighted by their pair counts.
double predicted_mean_pairwise(double trace_sigma, double delta_sq, int n);
double predicted_mean_pairwise(const CovarianceModel& cov, double delta_sq, int n);

// Bandwidth (not squared) for a rule; throws on a degenerate zero bandwidth.
double resolve(const BandwidthRule& rule, const Sample& x, const Sample& y);

}  // namespace hdtest::bandwidth
