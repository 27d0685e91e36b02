#include "hdtest/theory.hpp"

#include <cmath>
#include <stdexcept>

namespace hdtest::theory {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

namespace {

// Acklam's rational approximation, then two Halley refinements against
// normal_cdf; accurate to ~1e-14 over (0, 1).
double quantile_initial(double p) {
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double dd[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                2.445134137142996e+00, 3.754408661907416e+00};
    const double plow = 0.02425;
    if (p < plow) {
        const double q = std::sqrt(-2.0 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((dd[0] * q + dd[1]) * q + dd[2]) * q + dd[3]) * q + 1.0);
    }
    if (p > 1.0 - plow) {
        const double q = std::sqrt(-2.0 * std::log(1.0 - p));
        return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((dd[0] * q + dd[1]) * q + dd[2]) * q + dd[3]) * q + 1.0);
    }
    const double q = p - 0.5;
    const double r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

double normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI); }

void check_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
}

}  // namespace

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("normal_quantile: p must lie in (0, 1)");
    double x = quantile_initial(p);
    for (int it = 0; it < 2; ++it) {
        const double e = normal_cdf(x) - p;
        const double u = e / normal_pdf(x);
        x -= u / (1.0 + 0.5 * x * u);  // Halley step
    }
    return x;
}

double power_general(const ProblemParams& p) {
    check_alpha(p.alpha);
    if (p.n < 1) throw std::invalid_argument("power_general: need n >= 1");
    if (p.trace_sigma_sq < 0.0 || p.delta_sq < 0.0 || p.delta_sigma_delta < 0.0)
        throw std::invalid_argument("power_general: negative trace or quadratic form");
    const double z = normal_quantile(1.0 - p.alpha);
    const double nn = static_cast<double>(p.n);
    const double null_var = p.trace_sigma_sq / (nn * nn);
    const double alt_var = null_var + p.delta_sigma_delta / nn;
    return normal_cdf(-std::sqrt(null_var / alt_var) * z + p.delta_sq / std::sqrt(8.0 * alt_var));
}

double power_spherical(int n, int d, double snr, double alpha) {
    check_alpha(alpha);
    if (snr < 0.0) throw std::invalid_argument("power_spherical: snr must be >= 0");
    const double z = normal_quantile(1.0 - alpha);
    const double nn = static_cast<double>(n);
    const double dd = static_cast<double>(d);
    const double s2 = snr * snr;
    return normal_cdf(-std::sqrt(dd / (dd + nn * s2)) * z +
                      s2 / std::sqrt(8.0 * dd / (nn * nn) + 8.0 * s2 / nn));
}

double power_block_general(int n, int blocks, double trace_sigma_sq, double delta_sq,
                           double delta_sigma_delta, double alpha) {
    check_alpha(alpha);
    if (blocks < 1 || blocks > n / 2) throw std::invalid_argument("power_block: need 1 <= blocks <= n/2");
    const double z = normal_quantile(1.0 - alpha);
    const double nn = static_cast<double>(n);
    const double bb = static_cast<double>(blocks);
    const double null_var = 8.0 * bb * bb * trace_sigma_sq / (nn * nn);
    const double alt_var = null_var + 8.0 * bb * delta_sigma_delta / nn;
    return normal_cdf(std::sqrt(bb) * delta_sq / std::sqrt(alt_var) -
                      z * std::sqrt(null_var / alt_var));
}

double power_block(int n, int d, int blocks, double snr, double alpha) {
    const double s2 = snr * snr;
    return power_block_general(n, blocks, static_cast<double>(d), s2, s2, alpha);
}

double power_linear(int n, int d, double snr, double alpha) {
    check_alpha(alpha);
    if (n < 2 || n % 2 != 0) throw std::invalid_argument("power_linear: need even n >= 2");
    const double z = normal_quantile(1.0 - alpha);
    const double s2 = snr * snr;
    return normal_cdf(std::sqrt(static_cast<double>(n)) * s2 / std::sqrt(8.0 * d + 8.0 * s2) - z);
}

std::string snr_tag_name(SnrTag tag) {
    switch (tag) {
        case SnrTag::low: return "low";
        case SnrTag::medium: return "medium";
        case SnrTag::high: return "high";
    }
    throw std::logic_error("unreachable");
}

SnrRegime snr_regime(int n, int d, double snr) {
    if (snr < 0.0) throw std::invalid_argument("snr_regime: snr must be >= 0");
    const double r = snr / std::sqrt(static_cast<double>(d) / static_cast<double>(n));
    SnrRegime out;
    out.snr = snr;
    out.tag = r < 1.0 / 3.0 ? SnrTag::low : (r > 3.0 ? SnrTag::high : SnrTag::medium);
    return out;
}

double chi2_gaussian_cdf_approx(double x, int d, double noncentrality) {
    if (d < 1) throw std::invalid_argument("chi2_gaussian_cdf_approx: need d >= 1");
    if (noncentrality < 0.0) throw std::invalid_argument("chi2_gaussian_cdf_approx: noncentrality < 0");
    const double r2 = noncentrality;
    return normal_cdf((x - d - r2) / std::sqrt(2.0 * d + 4.0 * r2));
}

double normal_means_power(int d, double rho_sq, double alpha) {
    check_alpha(alpha);
    if (d < 1 || rho_sq < 0.0) throw std::invalid_argument("normal_means_power: bad arguments");
    const double z = normal_quantile(1.0 - alpha);
    const double denom = std::sqrt(2.0 * d + 4.0 * rho_sq);
    return normal_cdf(-std::sqrt(2.0 * d) / denom * z + rho_sq / denom);
}

double minimax_power(int n, int d, double rho, double sigma, double alpha) {
    if (!(sigma > 0.0)) throw std::invalid_argument("minimax_power: sigma must be > 0");
    if (rho < 0.0) throw std::invalid_argument("minimax_power: rho must be >= 0");
    const double snr = rho / sigma;
    return normal_means_power(d, 0.5 * n * snr * snr, alpha);
}

}  // namespace hdtest::theory
