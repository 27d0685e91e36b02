#include <doctest.h>

#include <cmath>

#include "hdtest/rng.hpp"
#include "hdtest/theory.hpp"
#include "test_support.hpp"

using namespace hdtest;
using theory::ProblemParams;

TEST_SUITE_BEGIN("theory");

TEST_CASE("normal quantile inverts the cdf") {
    for (const double p : {1e-10, 1e-6, 0.01, 0.05, 0.3, 0.5, 0.7, 0.95, 0.999, 1.0 - 1e-9}) {
        CHECK(std::fabs(theory::normal_cdf(theory::normal_quantile(p)) - p) < 1e-12);
    }
    CHECK(theory::normal_quantile(0.5) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK_THROWS(theory::normal_quantile(0.0));
    CHECK_THROWS(theory::normal_quantile(1.0));
}

TEST_CASE("power_general null case and hand value") {
    ProblemParams p;
    p.n = 64;
    p.d = 64;
    p.trace_sigma = 64;
    p.trace_sigma_sq = 64;
    p.delta_sq = 0.0;
    p.delta_sigma_delta = 0.0;
    p.alpha = 0.05;
    CHECK(std::fabs(theory::power_general(p) - 0.05) < 1e-12);

    p.delta_sq = 1.0;
    p.delta_sigma_delta = 1.0;
    CHECK(theory::power_general(p) == doctest::Approx(0.7987).epsilon(2e-4));

    p.alpha = 1.5;
    CHECK_THROWS(theory::power_general(p));
}

TEST_CASE("power_general is monotone in signal and sample size") {
    double prev = 0.0;
    for (int i = 0; i < 20; ++i) {
        ProblemParams p;
        p.n = 50;
        p.trace_sigma_sq = 100;
        p.delta_sq = 0.1 * i;
        p.delta_sigma_delta = 0.1 * i;
        p.alpha = 0.05;
        const double value = theory::power_general(p);
        CHECK(value >= prev - 1e-12);
        prev = value;
    }
    // consistency: power -> 1 as n grows with a fixed alternative
    double last = 0.0;
    for (const int n : {100, 1000, 10000}) {
        ProblemParams p;
        p.n = n;
        p.trace_sigma_sq = 16;
        p.delta_sq = 1.0;
        p.delta_sigma_delta = 1.0;
        p.alpha = 0.05;
        const double value = theory::power_general(p);
        CHECK(value >= last);  // saturates at 1 in floating point
        last = value;
    }
    CHECK(last > 0.999);
}

TEST_CASE("power_spherical equals power_general under substitution") {
    Rng rng(5);
    for (int t = 0; t < 200; ++t) {
        const int n = 10 + static_cast<int>(rng.uniform_below(500));
        const int d = 10 + static_cast<int>(rng.uniform_below(500));
        const double snr = 2.0 * rng.uniform();
        const double alpha = 0.01 + 0.2 * rng.uniform();
        const double sigma = 0.25 + 4.0 * rng.uniform();
        const double s2 = sigma * sigma;
        ProblemParams p;
        p.n = n;
        p.d = d;
        p.trace_sigma = d * s2;
        p.trace_sigma_sq = d * s2 * s2;
        p.delta_sq = snr * snr * s2;
        p.delta_sigma_delta = s2 * s2 * snr * snr;
        p.alpha = alpha;
        CHECK(std::fabs(theory::power_spherical(n, d, snr, alpha) - theory::power_general(p)) <
              1e-12);
    }
    CHECK(std::fabs(theory::power_spherical(64, 64, 0.0, 0.05) - 0.05) < 1e-12);
    CHECK(theory::power_spherical(64, 64, 1.0, 0.05) == doctest::Approx(0.7987).epsilon(2e-4));
}

TEST_CASE("low-snr spherical approximation") {
    const int n = 10000;
    const int d = 1000000;
    const double snr_sq = 0.01;
    const double z = theory::normal_quantile(0.95);
    const double approx = theory::normal_cdf(-z + n * snr_sq / std::sqrt(8.0 * d));
    CHECK(std::fabs(theory::power_spherical(n, d, std::sqrt(snr_sq), 0.05) - approx) < 1e-3);
}

TEST_CASE("power_block") {
    // B = 1 reduces to the quadratic expression
    for (const double snr : {0.0, 0.5, 1.0, 2.0}) {
        CHECK(std::fabs(theory::power_block(64, 64, 1, snr, 0.05) -
                        theory::power_spherical(64, 64, snr, 0.05)) < 1e-12);
    }
    CHECK(theory::power_block(64, 64, 8, 1.0, 0.05) == doctest::Approx(0.2716).epsilon(2e-4));

    // low-snr form Phi(n snr^2 / sqrt(8 B d) - z)
    const int n = 10000, d = 1000000, blocks = 4;
    const double snr_sq = 0.01;
    const double z = theory::normal_quantile(0.95);
    const double approx = theory::normal_cdf(n * snr_sq / std::sqrt(8.0 * blocks * d) - z);
    CHECK(std::fabs(theory::power_block(n, d, blocks, std::sqrt(snr_sq), 0.05) - approx) < 1e-3);

    // more blocks, less power (low-snr regime)
    double prev = 1.0;
    for (const int b : {1, 2, 4, 8, 16}) {
        const double value = theory::power_block(128, 128, b, 0.5, 0.05);
        CHECK(value <= prev + 1e-12);
        prev = value;
    }
    CHECK_THROWS(theory::power_block(64, 64, 40, 1.0, 0.05));  // B > n/2
}

TEST_CASE("power_linear and the budget ordering") {
    CHECK(std::fabs(theory::power_linear(64, 64, 0.0, 0.05) - 0.05) < 1e-12);
    CHECK(theory::power_linear(64, 64, 1.0, 0.05) == doctest::Approx(0.0978).epsilon(2e-3));
    CHECK_THROWS(theory::power_linear(63, 64, 1.0, 0.05));

    const double lin = theory::power_linear(64, 64, 1.0, 0.05);
    const double blk = theory::power_block(64, 64, 16, 1.0, 0.05);
    const double quad = theory::power_spherical(64, 64, 1.0, 0.05);
    CHECK(lin <= blk);
    CHECK(blk <= quad);
}

TEST_CASE("snr regimes") {
    CHECK(theory::snr_regime(100, 100, 0.0).tag == theory::SnrTag::low);
    CHECK(theory::snr_regime(100, 100, 1.0).tag == theory::SnrTag::medium);
    CHECK(theory::snr_regime(100, 100, 10.0).tag == theory::SnrTag::high);
    CHECK(theory::snr_tag_name(theory::SnrTag::medium) == "medium");
}

TEST_CASE("chi-squared gaussian approximation") {
    CHECK(theory::chi2_gaussian_cdf_approx(200.0, 200, 0.0) == doctest::Approx(0.5).epsilon(1e-14));

    const double z = theory::normal_quantile(0.95);
    const double x = 200.0 + z * std::sqrt(400.0);
    CHECK(theory::chi2_gaussian_cdf_approx(x, 200, 0.0) == doctest::Approx(0.95).epsilon(1e-10));

    // against the exact chi-squared quantile at large d
    const int d = 10000;
    const double q95 = testsupport::chi2_quantile(0.95, d);
    CHECK(std::fabs(theory::chi2_gaussian_cdf_approx(q95, d, 0.0) - 0.95) < 0.01);
}

TEST_CASE("normal means and the minimax match") {
    CHECK(std::fabs(theory::normal_means_power(128, 0.0, 0.05) - 0.05) < 1e-12);
    CHECK(theory::normal_means_power(128, 32.0, 0.05) == doctest::Approx(0.6141).epsilon(2e-4));

    CHECK(theory::minimax_power(64, 64, 1.0, 1.0, 0.05) ==
          doctest::Approx(theory::power_spherical(64, 64, 1.0, 0.05)).epsilon(1e-12));
    CHECK(std::fabs(theory::minimax_power(64, 64, 0.0, 1.0, 0.05) - 0.05) < 1e-12);

    // two independent routes agree on a random grid
    Rng rng(17);
    for (int t = 0; t < 1000; ++t) {
        const int n = 10 + static_cast<int>(rng.uniform_below(300));
        const int d = 10 + static_cast<int>(rng.uniform_below(300));
        const double rho = 2.0 * rng.uniform();
        const double sigma = 0.5 + 2.0 * rng.uniform();
        const double alpha = 0.01 + 0.2 * rng.uniform();
        const double lower = theory::minimax_power(n, d, rho, sigma, alpha);
        const double upper = theory::power_spherical(n, d, rho / sigma, alpha);
        CHECK(std::fabs(lower - upper) < 1e-12);
    }
}

TEST_CASE("all power outputs stay within [alpha, 1]") {
    Rng rng(23);
    for (int t = 0; t < 500; ++t) {
        const int n = 10 + 2 * static_cast<int>(rng.uniform_below(200));
        const int d = 10 + static_cast<int>(rng.uniform_below(400));
        const double snr = 3.0 * rng.uniform();
        const double alpha = 0.01 + 0.2 * rng.uniform();
        for (const double value :
             {theory::power_spherical(n, d, snr, alpha), theory::power_linear(n, d, snr, alpha),
              theory::power_block(n, d, 2, snr, alpha)}) {
            CHECK(value >= alpha * (1.0 - 1e-9));
            CHECK(value <= 1.0);
        }
    }
}

TEST_SUITE_END();
