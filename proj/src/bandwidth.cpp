#include "hdtest/bandwidth.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "hdtest/rng.hpp"

namespace hdtest::bandwidth {

BandwidthRule BandwidthRule::parse(const std::string& text) {
    if (text == "median") return median();
    if (text == "mean") return mean();
    if (text.rfind("pow:", 0) == 0) return power(std::stod(text.substr(4)));
    if (text.rfind("fixed:", 0) == 0) {
        const double v = std::stod(text.substr(6));
        if (!(v > 0.0)) throw std::invalid_argument("bandwidth rule: fixed value must be > 0");
        return fixed(v);
    }
    throw std::invalid_argument("unknown bandwidth rule: " + text);
}

std::string BandwidthRule::name() const {
    switch (kind) {
        case Kind::median: return "median";
        case Kind::mean: return "mean";
        case Kind::power: {
            std::string s = "pow:" + std::to_string(exponent);
            s.erase(s.find_last_not_of('0') + 1);
            if (!s.empty() && s.back() == '.') s.pop_back();
            return s;
        }
        case Kind::fixed: {
            std::string s = "fixed:" + std::to_string(value);
            s.erase(s.find_last_not_of('0') + 1);
            if (!s.empty() && s.back() == '.') s.pop_back();
            return s;
        }
    }
    throw std::logic_error("unreachable");
}

MedianHeuristic median_of_squared_distances(std::vector<double>& distances) {
    if (distances.empty()) throw std::invalid_argument("median heuristic: no pairs");
    const std::size_t m = distances.size();
    const std::size_t hi = m / 2;
    std::nth_element(distances.begin(), distances.begin() + hi, distances.end());
    double med = distances[hi];
    if (m % 2 == 0) {
        // lower middle order statistic is the max of the left partition
        const double lo = *std::max_element(distances.begin(), distances.begin() + hi);
        med = 0.5 * (lo + med);
    }
    MedianHeuristic out;
    out.bandwidth_sq = med;
    out.degenerate = !(med > 0.0);
    return out;
}

MedianHeuristic median_heuristic(const Sample& x, const Sample& y) {
    if (x.dim() != y.dim()) throw std::invalid_argument("median heuristic: dimension mismatch");
    const int total = x.n() + y.n();
    if (total < 2) throw std::invalid_argument("median heuristic: need at least 2 pooled points");

    Eigen::MatrixXd pooled(total, x.dim());
    pooled.topRows(x.n()) = x.data;
    pooled.bottomRows(y.n()) = y.data;
    std::vector<double> d2;
    d2.reserve(static_cast<std::size_t>(total) * (total - 1) / 2);
    for (int i = 0; i < total; ++i)
        for (int j = i + 1; j < total; ++j)
            d2.push_back((pooled.row(i) - pooled.row(j)).squaredNorm());
    return median_of_squared_distances(d2);
}

double predicted_mean_pairwise(double trace_sigma, double delta_sq, int n) {
    if (delta_sq < 0.0) throw std::invalid_argument("predicted_mean_pairwise: delta_sq < 0");
    if (n < 1) throw std::invalid_argument("predicted_mean_pairwise: need n >= 1");
    const double nn = static_cast<double>(n);
    const double total_pairs = nn * (2.0 * nn - 1.0);       // C(2n, 2)
    const double within = nn * (nn - 1.0) / 2.0;            // C(n, 2), per group
    const double cross = nn * nn;
    return (2.0 * within * 2.0 * trace_sigma + cross * (2.0 * trace_sigma + delta_sq)) / total_pairs;
}

double predicted_mean_pairwise(const CovarianceModel& cov, double delta_sq, int n) {
    return predicted_mean_pairwise(cov.trace_sigma, delta_sq, n);
}

double resolve(const BandwidthRule& rule, const Sample& x, const Sample& y) {
    switch (rule.kind) {
        case BandwidthRule::Kind::median: {
            const MedianHeuristic med = median_heuristic(x, y);
            if (med.degenerate) throw std::domain_error("median heuristic: degenerate zero bandwidth");
            return std::sqrt(med.bandwidth_sq);
        }
        case BandwidthRule::Kind::mean: {
            const int total = x.n() + y.n();
            Eigen::MatrixXd pooled(total, x.dim());
            pooled.topRows(x.n()) = x.data;
            pooled.bottomRows(y.n()) = y.data;
            KahanSum sum;
            std::size_t count = 0;
            for (int i = 0; i < total; ++i)
                for (int j = i + 1; j < total; ++j, ++count)
                    sum.add((pooled.row(i) - pooled.row(j)).squaredNorm());
            const double mean = sum.value() / static_cast<double>(count);
            if (!(mean > 0.0)) throw std::domain_error("mean heuristic: degenerate zero bandwidth");
            return std::sqrt(mean);
        }
        case BandwidthRule::Kind::power: {
            if (!(rule.scale > 0.0)) throw std::invalid_argument("power rule: scale must be > 0");
            return rule.scale * std::pow(static_cast<double>(x.dim()), rule.exponent);
        }
        case BandwidthRule::Kind::fixed:
            if (!(rule.value > 0.0)) throw std::domain_error("fixed rule: bandwidth must be > 0");
            return rule.value;
    }
    throw std::logic_error("unreachable");
}

}  // namespace hdtest::bandwidth
