#include "hdtest/verify.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <stdexcept>

#include "hdtest/rng.hpp"
#include "hdtest/statistics.hpp"

namespace hdtest::verify {

namespace {

// Running mean/variance plus the central fourth moment, which the delta
// method needs for the stderr of a variance estimate.
struct MomentAccumulator {
    long n = 0;
    double mean = 0.0;
    double m2 = 0.0;
    double m3 = 0.0;
    double m4 = 0.0;

    void add(double x) {
        ++n;
        const double delta = x - mean;
        const double dn = delta / n;
        const double dn2 = dn * dn;
        const double term = delta * dn * (n - 1);
        m4 += term * dn2 * (n * n - 3.0 * n + 3.0) + 6.0 * dn2 * m2 - 4.0 * dn * m3;
        m3 += term * dn * (n - 2.0) - 3.0 * dn * m2;
        m2 += term;
        mean += dn;
    }
    double variance() const { return m2 / (n - 1); }
    double central4() const { return m4 / n; }
    double stderr_of_mean() const { return std::sqrt(variance() / n); }
    // sqrt(Var(s^2)) ~ sqrt((m4 - s^4) / n)
    double stderr_of_variance() const {
        const double s2 = variance();
        const double v = (central4() - s2 * s2) / n;
        return std::sqrt(v > 0.0 ? v : 0.0);
    }
};

MomentReport report_mean(const std::string& name, const MomentAccumulator& acc, double closed) {
    MomentReport r;
    r.quantity = name;
    r.closed_form = closed;
    r.mc_estimate = acc.mean;
    r.mc_stderr = acc.stderr_of_mean();
    r.n_draws = acc.n;
    r.z_discrepancy = (acc.mean - closed) / r.mc_stderr;
    return r;
}

MomentReport report_variance(const std::string& name, const MomentAccumulator& acc, double closed) {
    MomentReport r;
    r.quantity = name;
    r.closed_form = closed;
    r.mc_estimate = acc.variance();
    r.mc_stderr = acc.stderr_of_variance();
    r.n_draws = acc.n;
    r.z_discrepancy = (r.mc_estimate - closed) / r.mc_stderr;
    return r;
}

void check_draw_count(long draws) {
    if (draws < 1000) throw std::invalid_argument("verify: need at least 1e3 draws");
}

}  // namespace

double h2(const Eigen::VectorXd& x, const Eigen::VectorXd& xp, const Eigen::VectorXd& y,
          const Eigen::VectorXd& yp) {
    if (x.size() != xp.size() || x.size() != y.size() || x.size() != yp.size())
        throw std::invalid_argument("h2: dimension mismatch");
    return (x - xp).squaredNorm() + (y - yp).squaredNorm() - (x - yp).squaredNorm() -
           (xp - y).squaredNorm();
}

double check_h2_identity(const Eigen::VectorXd& x, const Eigen::VectorXd& xp,
                         const Eigen::VectorXd& y, const Eigen::VectorXd& yp) {
    return std::fabs(h2(x, xp, y, yp) + 2.0 * stats::h_cq(x, xp, y, yp));
}

std::vector<MomentReport> check_pairwise_moments(const CovarianceModel& cov,
                                                 const Eigen::VectorXd& shift, long draws,
                                                 std::uint64_t seed) {
    check_draw_count(draws);
    const int d = cov.dim();
    if (shift.size() != d) throw std::invalid_argument("check_pairwise_moments: shift dimension");
    if (!(cov.trace_sigma > 0.0)) throw std::invalid_argument("check_pairwise_moments: degenerate covariance");

    Rng rng(seed);
    Eigen::VectorXd z1(cov.latent_dim()), z2(cov.latent_dim());
    MomentAccumulator sq;      // ||X - Y||^2
    MomentAccumulator fourth;  // ||X - Y||^4
    for (long t = 0; t < draws; ++t) {
        for (int k = 0; k < cov.latent_dim(); ++k) z1[k] = rng.normal();
        for (int k = 0; k < cov.latent_dim(); ++k) z2[k] = rng.normal();
        const Eigen::VectorXd diff = cov.factor * (z1 - z2) - shift;
        const double v = diff.squaredNorm();
        sq.add(v);
        fourth.add(v * v);
    }

    const double delta_sq = shift.squaredNorm();
    const double dsd = shift.dot(cov.sigma * shift);
    const double mean_closed = 2.0 * cov.trace_sigma + delta_sq;
    const double var_closed = 8.0 * cov.trace_sigma_sq + 8.0 * dsd;

    std::vector<MomentReport> out;
    out.push_back(report_mean("E||X-Y||^2", sq, mean_closed));
    out.push_back(report_variance("Var(||X-Y||^2)", sq, var_closed));
    out.push_back(report_mean("E||X-Y||^4", fourth, var_closed + mean_closed * mean_closed));
    return out;
}

std::vector<MomentReport> check_quadratic_form_moments(const Eigen::MatrixXd& sigma, long draws,
                                                       std::uint64_t seed) {
    check_draw_count(draws);
    if (sigma.rows() != sigma.cols()) throw std::invalid_argument("quadratic forms: sigma not square");
    if (!sigma.isApprox(sigma.transpose(), 1e-12))
        throw std::invalid_argument("quadratic forms: sigma not symmetric");
    Eigen::LLT<Eigen::MatrixXd> llt(sigma);
    if (llt.info() != Eigen::Success)
        throw std::invalid_argument("quadratic forms: sigma not positive definite");

    const int d = static_cast<int>(sigma.rows());
    const double tr = sigma.trace();
    const double tr2 = sigma.squaredNorm();
    const Eigen::MatrixXd sigma2 = sigma * sigma;
    const double tr3 = sigma2.cwiseProduct(sigma).sum();
    const double tr4 = sigma2.squaredNorm();

    Rng rng(seed);
    Eigen::VectorXd z1(d), z2(d), e(d);
    MomentAccumulator diff_form;  // Z'^T S Z'
    MomentAccumulator q1, q2, q3, q4;
    for (long t = 0; t < draws; ++t) {
        for (int k = 0; k < d; ++k) z1[k] = rng.normal();
        for (int k = 0; k < d; ++k) z2[k] = rng.normal();
        const Eigen::VectorXd zd = z1 - z2;
        diff_form.add(zd.dot(sigma * zd));

        for (int k = 0; k < d; ++k) e[k] = rng.normal();
        const double q = e.dot(sigma * e);
        q1.add(q);
        q2.add(q * q);
        q3.add(q * q * q);
        q4.add(q * q * q * q);
    }

    std::vector<MomentReport> out;
    out.push_back(report_mean("E[Z'^T S Z']", diff_form, 2.0 * tr));
    out.push_back(report_variance("Var(Z'^T S Z')", diff_form, 8.0 * tr2));
    out.push_back(report_mean("E[Q]", q1, tr));
    out.push_back(report_mean("E[Q^2]", q2, tr * tr + 2.0 * tr2));
    out.push_back(report_mean("E[Q^3]", q3, tr * tr * tr + 6.0 * tr2 * tr + 8.0 * tr3));
    out.push_back(report_mean("E[Q^4]", q4,
                              tr * tr * tr * tr + 12.0 * tr2 * tr * tr + 12.0 * tr2 * tr2 +
                                  32.0 * tr * tr3 + 48.0 * tr4));
    return out;
}

namespace {

TaylorLink link_from(const Sample& x, const Sample& y, const stats::KernelOrDistance& kernel,
                     double trace_sigma) {
    TaylorLink out;
    out.statistic = stats::u_statistic(x, y, kernel).value;
    const double ucq = stats::u_statistic(x, y, stats::LinearKernel{}).value;
    out.taylor = stats::taylor_multiplier(kernel, trace_sigma) * ucq;
    out.residual = out.statistic - out.taylor;
    const double scale = std::max(std::fabs(out.statistic), std::fabs(out.taylor));
    out.relative_residual = scale > 0.0 ? std::fabs(out.residual) / scale : 0.0;
    return out;
}

}  // namespace

TaylorLink check_taylor_link(const Sample& x, const Sample& y, double bandwidth,
                             double trace_sigma) {
    if (!(bandwidth * bandwidth > 2.0 * trace_sigma))
        throw std::invalid_argument("check_taylor_link: need bandwidth^2 > 2*trace_sigma");
    return link_from(x, y, stats::GaussianKernel{bandwidth}, trace_sigma);
}

TaylorLink check_taylor_link_shifted(const Sample& x, const Sample& y, double bandwidth_sq,
                                     double trace_sigma) {
    if (!(bandwidth_sq > 2.0 * trace_sigma))
        throw std::invalid_argument("check_taylor_link_shifted: need bandwidth_sq > 2*trace_sigma");
    return link_from(x, y, stats::ShiftedEuclidean{bandwidth_sq, trace_sigma}, trace_sigma);
}

VarianceScalingReport check_variance_scaling(const CovarianceModel& cov,
                                             const std::vector<int>& n_grid, int reps,
                                             std::uint64_t seed,
                                             const Eigen::VectorXd& alt_shift) {
    if (reps < 50) throw std::invalid_argument("check_variance_scaling: need reps >= 50");
    if (n_grid.size() < 2) throw std::invalid_argument("check_variance_scaling: need >= 2 grid points");

    models::DistributionSpec null_spec;
    null_spec.noise = models::NoiseFamily::gaussian;
    null_spec.cov = cov;
    null_spec.mean = Eigen::VectorXd::Zero(cov.dim());
    models::DistributionSpec alt_spec = null_spec;
    alt_spec.mean = alt_shift;

    VarianceScalingReport report;
    for (std::size_t gi = 0; gi < n_grid.size(); ++gi) {
        const int n = n_grid[gi];
        MomentAccumulator null_acc, alt_acc;
        for (int r = 0; r < reps; ++r) {
            const Sample x = models::sample(null_spec, n, derive_seed(seed, gi, r, 0));
            const Sample y0 = models::sample(null_spec, n, derive_seed(seed, gi, r, 1));
            null_acc.add(stats::u_statistic(x, y0, stats::LinearKernel{}).value);
            const Sample x1 = models::sample(null_spec, n, derive_seed(seed, gi, r, 2));
            const Sample y1 = models::sample(alt_spec, n, derive_seed(seed, gi, r, 3));
            alt_acc.add(stats::u_statistic(x1, y1, stats::LinearKernel{}).value);
        }
        report.rows.push_back({n, null_acc.variance(), alt_acc.variance()});
    }

    auto fit_slope = [&](bool alt) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        const double m = static_cast<double>(report.rows.size());
        for (const auto& row : report.rows) {
            const double lx = std::log(static_cast<double>(row.n));
            const double ly = std::log(alt ? row.var_alt : row.var_null);
            sx += lx;
            sy += ly;
            sxx += lx * lx;
            sxy += lx * ly;
        }
        return (m * sxy - sx * sy) / (m * sxx - sx * sx);
    };
    report.null_exponent = fit_slope(false);
    report.alt_exponent = fit_slope(true);
    return report;
}

}  // namespace hdtest::verify
