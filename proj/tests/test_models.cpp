#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>

#include "hdtest/models.hpp"

using namespace hdtest;
using models::CovarianceModel;
using models::DistributionSpec;
using models::NoiseFamily;
using models::Sample;

namespace {

DistributionSpec centered(NoiseFamily family, int d) {
    DistributionSpec spec;
    spec.noise = family;
    spec.cov = CovarianceModel::identity(d);
    spec.mean = Eigen::VectorXd::Zero(d);
    return spec;
}

}  // namespace

TEST_SUITE_BEGIN("models");

TEST_CASE("sample is deterministic in (spec, n, seed)") {
    const DistributionSpec spec = centered(NoiseFamily::gaussian, 2);
    const Sample a = models::sample(spec, 3, 7);
    const Sample b = models::sample(spec, 3, 7);
    CHECK(a.data.rows() == 3);
    CHECK(a.data.cols() == 2);
    CHECK(a.data == b.data);  // bit-identical
    const Sample c = models::sample(spec, 3, 8);
    CHECK(a.data != c.data);
}

TEST_CASE("sample rejects bad input") {
    DistributionSpec spec = centered(NoiseFamily::gaussian, 2);
    CHECK_THROWS(models::sample(spec, 1, 1));
    spec.mean[0] = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS(models::sample(spec, 5, 1));
}

TEST_CASE("per-coordinate variances match the documented values") {
    // Laplace with scale 1/sqrt(2) has unit variance; the scale mixture has
    // variance (1+2+3)/3 = 2.
    const int n = 10000, d = 5;
    const Sample lap = models::sample(centered(NoiseFamily::laplace_unit, d), n, 42);
    for (int j = 0; j < d; ++j) {
        const double m = lap.data.col(j).mean();
        const double v = (lap.data.col(j).array() - m).square().sum() / (n - 1);
        CHECK(v > 0.94);
        CHECK(v < 1.06);
    }
    const Sample mix = models::sample(centered(NoiseFamily::gaussian_scale_mixture, d), n, 42);
    for (int j = 0; j < d; ++j) {
        const double m = mix.data.col(j).mean();
        const double v = (mix.data.col(j).array() - m).square().sum() / (n - 1);
        CHECK(v > 1.9);
        CHECK(v < 2.1);
    }
}

TEST_CASE("standardized latent draws have identity covariance") {
    const int draws = 100000, d = 5;
    for (const NoiseFamily family :
         {NoiseFamily::gaussian, NoiseFamily::laplace_unit, NoiseFamily::uniform_beta11,
          NoiseFamily::gaussian_scale_mixture}) {
        const std::uint64_t seed = family == NoiseFamily::laplace_unit ? 2 : 1;
        const Sample s = models::sample(centered(family, d), draws, seed);
        const double mu = models::noise_mean(family);
        const double sd = std::sqrt(models::noise_variance(family));
        const Eigen::MatrixXd z = (s.data.array() - mu).matrix() / sd;
        const Eigen::MatrixXd cov = z.transpose() * z / static_cast<double>(draws);
        const double band = 3.0 / std::sqrt(static_cast<double>(draws));
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) {
                const double target = i == j ? 1.0 : 0.0;
                INFO("family ", models::family_name(family), " entry ", i, ",", j);
                CHECK(std::fabs(cov(i, j) - target) < band);
            }
    }
}

TEST_CASE("sample mean converges to the spec mean") {
    DistributionSpec spec = centered(NoiseFamily::gaussian, 10);
    spec.mean = Eigen::VectorXd::Constant(10, 0.3);
    for (const int n : {1000, 10000}) {
        const Sample s = models::sample(spec, n, 5);
        const Eigen::VectorXd mean = s.data.colwise().mean();
        const double rate = std::sqrt(spec.cov.trace_sigma / n);
        CHECK((mean - spec.mean).norm() < 3.0 * rate);
    }
}

TEST_CASE("empirical covariance approaches sigma through the factor") {
    Eigen::MatrixXd sigma(3, 3);
    sigma << 2.0, 0.5, 0.2, 0.5, 1.5, 0.1, 0.2, 0.1, 1.0;
    DistributionSpec spec;
    spec.noise = NoiseFamily::gaussian;
    spec.cov = CovarianceModel::from_sigma(sigma);
    spec.mean = Eigen::VectorXd::Zero(3);
    CHECK((spec.cov.factor * spec.cov.factor.transpose() - sigma).norm() / sigma.norm() < 1e-10);
    CHECK(spec.cov.trace_sigma == doctest::Approx(sigma.diagonal().sum()).epsilon(1e-12));

    Eigen::MatrixXd indefinite(2, 2);
    indefinite << 1.0, 2.0, 2.0, 1.0;  // eigenvalues 3, -1
    CHECK_THROWS(CovarianceModel::from_sigma(indefinite));

    double prev = 1e300;
    for (const int n : {1000, 10000}) {
        const Sample s = models::sample(spec, n, 11);
        const Eigen::MatrixXd centered_data = s.data.rowwise() - s.data.colwise().mean();
        const Eigen::MatrixXd emp = centered_data.transpose() * centered_data / (n - 1);
        const double err = (emp - sigma).norm();
        CHECK(err < prev);
        prev = err;
    }
}

TEST_CASE("experiment 1 shifts") {
    auto [p, q] = models::make_experiment1_pair(NoiseFamily::gaussian, 100);
    CHECK((q.mean - p.mean).squaredNorm() == doctest::Approx(1.0).epsilon(1e-12));

    auto [pb, qb] = models::make_experiment1_pair(NoiseFamily::uniform_beta11, 48);
    CHECK((qb.mean - pb.mean).squaredNorm() == doctest::Approx(1.0 / 12.0).epsilon(1e-12));

    auto [p1, q1] = models::make_experiment1_pair(NoiseFamily::gaussian, 1);
    CHECK(q1.mean[0] == doctest::Approx(1.0));

    // same signal-to-noise across families: ||shift||^2 / per-coordinate variance = 1
    for (const NoiseFamily family :
         {NoiseFamily::gaussian, NoiseFamily::laplace_unit, NoiseFamily::uniform_beta11,
          NoiseFamily::gaussian_scale_mixture}) {
        auto [pp, qq] = models::make_experiment1_pair(family, 64);
        const double ratio = (qq.mean - pp.mean).squaredNorm() / models::noise_variance(family);
        CHECK(ratio == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("experiment 2 covariance") {
    const CovarianceModel cov = models::make_experiment2_covariance(40, 1);
    CHECK(cov.trace_sigma == doctest::Approx(40.0).epsilon(1e-8));
    CHECK(cov.sigma.isApprox(cov.sigma.transpose(), 1e-12));
    CHECK((cov.factor * cov.factor.transpose() - cov.sigma).norm() / cov.sigma.norm() < 1e-10);

    const CovarianceModel again = models::make_experiment2_covariance(40, 1);
    CHECK(cov.sigma == again.sigma);

    // d=2: eigenvalues 2*l^6/(l^6+1) for l in {0.01, 1}
    const CovarianceModel tiny = models::make_experiment2_covariance(2, 1);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(tiny.sigma);
    const double l6 = std::pow(0.01, 6);
    CHECK(solver.eigenvalues()[0] == doctest::Approx(2.0 * l6 / (l6 + 1.0)).epsilon(1e-6));
    CHECK(solver.eigenvalues()[1] == doctest::Approx(2.0 / (l6 + 1.0)).epsilon(1e-10));

    // positive definite
    CHECK(solver.eigenvalues()[0] > 0.0);
}

TEST_CASE("experiment 4 pair") {
    auto [p, q] = models::make_experiment4_pair(40, 3);
    CHECK(p.mean.norm() == 0.0);
    CHECK(q.mean.norm() == 0.0);
    const double fro = (q.cov.sigma - p.cov.sigma).norm();
    CHECK(fro == doctest::Approx(50.0).epsilon(1e-10));

    auto [p2, q2] = models::make_experiment4_pair(40, 3);
    CHECK(p.cov.sigma == p2.cov.sigma);
    CHECK(q.cov.sigma == q2.cov.sigma);
}

TEST_CASE("generator config round-trips") {
    models::GeneratorConfig cfg;
    cfg.family = "laplace_unit";
    cfg.d = 24;
    cfg.shift_kind = "experiment1";
    cfg.cov_kind = "identity";
    cfg.seed = 9;
    const models::GeneratorConfig back = models::GeneratorConfig::parse(cfg.to_string());
    CHECK(back.family == cfg.family);
    CHECK(back.d == cfg.d);
    CHECK(back.shift_kind == cfg.shift_kind);
    CHECK(back.cov_kind == cfg.cov_kind);
    CHECK(back.seed == cfg.seed);

    auto [p, q] = back.build();
    CHECK(p.cov.dim() == 24);
    CHECK((q.mean - p.mean).squaredNorm() == doctest::Approx(1.0).epsilon(1e-12));

    CHECK_THROWS(models::GeneratorConfig::parse("family"));
    models::GeneratorConfig bad = cfg;
    bad.family = "cauchy";
    CHECK_THROWS(bad.build());
}

TEST_SUITE_END();
