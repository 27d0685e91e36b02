#include <doctest.h>

#include <chrono>
#include <cmath>

#include "hdtest/models.hpp"
#include "hdtest/rng.hpp"
#include "hdtest/statistics.hpp"
#include "test_support.hpp"

using namespace hdtest;
using models::CovarianceModel;
using models::Sample;
using stats::ComputeBudget;
using stats::KernelOrDistance;

namespace {

Sample from_values(std::initializer_list<double> values) {
    Sample s;
    s.data.resize(static_cast<Eigen::Index>(values.size()), 1);
    Eigen::Index i = 0;
    for (double v : values) s.data(i++, 0) = v;
    return s;
}

Sample gaussian_sample(int n, int d, std::uint64_t seed, double shift = 0.0) {
    models::DistributionSpec spec;
    spec.noise = models::NoiseFamily::gaussian;
    spec.cov = CovarianceModel::identity(d);
    spec.mean = Eigen::VectorXd::Constant(d, shift);
    return models::sample(spec, n, seed);
}

}  // namespace

TEST_SUITE_BEGIN("statistics");

TEST_CASE("h_cq hand values") {
    Eigen::VectorXd x(1), xp(1), y(1), yp(1);
    x << 0;
    xp << 0;
    y << 1;
    yp << 1;
    CHECK(stats::h_cq(x, xp, y, yp) == doctest::Approx(1.0));

    Eigen::VectorXd same(3);
    same << 1.5, -2.0, 0.25;
    CHECK(stats::h_cq(same, same, same, same) == 0.0);

    // translation invariance is exact in the paired-difference form
    Eigen::VectorXd v(1);
    v << 5;
    CHECK(stats::h_cq(x + v, xp + v, y + v, yp + v) == stats::h_cq(x, xp, y, yp));

    Eigen::VectorXd wrong(2);
    CHECK_THROWS(stats::h_cq(x, xp, y, wrong));
}

TEST_CASE("h_cq agrees with its squared-distance form") {
    Rng rng(31);
    for (int t = 0; t < 200; ++t) {
        const int d = 1 + static_cast<int>(rng.uniform_below(8));
        const Eigen::VectorXd x = testsupport::random_vector(rng, d, 2.0);
        const Eigen::VectorXd xp = testsupport::random_vector(rng, d, 2.0);
        const Eigen::VectorXd y = testsupport::random_vector(rng, d, 2.0);
        const Eigen::VectorXd yp = testsupport::random_vector(rng, d, 2.0);
        const double direct = stats::h_cq(x, xp, y, yp);
        const double from_distances =
            -0.5 * ((x - xp).squaredNorm() + (y - yp).squaredNorm() - (x - yp).squaredNorm() -
                    (xp - y).squaredNorm());
        CHECK(std::fabs(direct - from_distances) < 1e-9);
    }
}

TEST_CASE("u_statistic hand values") {
    const Sample x = from_values({0, 0});
    const Sample y = from_values({1, 1});

    CHECK(stats::u_statistic(x, y, stats::make_gaussian(1.0)).value ==
          doctest::Approx(2.0 - 2.0 * std::exp(-1.0)).epsilon(1e-12));
    CHECK(stats::u_statistic(x, y, stats::EuclideanDistance{}).value == doctest::Approx(2.0));
    CHECK(stats::u_statistic(x, y, stats::LinearKernel{}).value == doctest::Approx(1.0));

    // identical samples cancel pairwise for every kernel
    const Sample z = gaussian_sample(6, 3, 2);
    for (const KernelOrDistance k :
         {KernelOrDistance(stats::LinearKernel{}), KernelOrDistance(stats::make_gaussian(2.0)),
          KernelOrDistance(stats::EuclideanDistance{})}) {
        CHECK(stats::u_statistic(z, z, k).value == 0.0);
    }

    const Sample longer = from_values({0, 0, 0});
    CHECK_THROWS(stats::u_statistic(x, longer, stats::LinearKernel{}));
    CHECK_THROWS(stats::u_statistic(from_values({0}), from_values({1}), stats::LinearKernel{}));
}

TEST_CASE("block and linear statistics") {
    const Sample x = from_values({0, 0, 0, 0});
    const Sample y = from_values({1, 1, 1, 1});

    const auto blocked = stats::block_statistic(x, y, stats::LinearKernel{}, 2);
    CHECK(blocked.value == doctest::Approx(1.0));
    REQUIRE(blocked.per_block_values.size() == 2);
    CHECK(blocked.per_block_values[0] == doctest::Approx(1.0));
    CHECK(blocked.per_block_values[1] == doctest::Approx(1.0));

    const auto lin = stats::linear_statistic(x, y, stats::LinearKernel{});
    CHECK(lin.value == doctest::Approx(1.0));

    // B = 1 equals the quadratic statistic, B = n/2 equals the linear one
    const Sample gx = gaussian_sample(16, 4, 3);
    const Sample gy = gaussian_sample(16, 4, 4, 0.5);
    const KernelOrDistance k = stats::make_gaussian(3.0);
    CHECK(stats::block_statistic(gx, gy, k, 1).value == stats::u_statistic(gx, gy, k).value);
    CHECK(stats::block_statistic(gx, gy, k, 8).value ==
          stats::linear_statistic(gx, gy, k).value);

    CHECK_THROWS(stats::block_statistic(gx, gy, k, 3));   // 3 does not divide 16
    CHECK_THROWS(stats::block_statistic(gx, gy, k, 16));  // blocks of size 1
    CHECK_THROWS(stats::linear_statistic(from_values({0, 0, 0}), from_values({1, 1, 1}), k));

    // identical samples
    CHECK(stats::linear_statistic(gx, gx, k).value == 0.0);
}

TEST_CASE("linear statistic is unbiased for the squared mean shift") {
    const int reps = 10000, n = 10, d = 5;
    const double shift = 1.0 / std::sqrt(static_cast<double>(d));  // ||delta||^2 = 1
    KahanSum sum, sum_sq;
    for (int r = 0; r < reps; ++r) {
        const Sample x = gaussian_sample(n, d, derive_seed(99, r, 0));
        const Sample y = gaussian_sample(n, d, derive_seed(99, r, 1), shift);
        const double v = stats::linear_statistic(x, y, stats::LinearKernel{}).value;
        sum.add(v);
        sum_sq.add(v * v);
    }
    const double mean = sum.value() / reps;
    const double var = sum_sq.value() / reps - mean * mean;
    const double stderr_ = std::sqrt(var / reps);
    CHECK(std::fabs(mean - 1.0) < 3.0 * stderr_);
}

TEST_CASE("quadratic statistic is unbiased for the squared mean shift") {
    const int reps = 10000, n = 10, d = 5;
    const double shift = 1.0 / std::sqrt(static_cast<double>(d));
    KahanSum sum, sum_sq;
    for (int r = 0; r < reps; ++r) {
        const Sample x = gaussian_sample(n, d, derive_seed(77, r, 0));
        const Sample y = gaussian_sample(n, d, derive_seed(77, r, 1), shift);
        const double v = stats::u_statistic(x, y, stats::LinearKernel{}).value;
        sum.add(v);
        sum_sq.add(v * v);
    }
    const double mean = sum.value() / reps;
    const double var = sum_sq.value() / reps - mean * mean;
    CHECK(std::fabs(mean - 1.0) < 4.0 * std::sqrt(var / reps));
}

TEST_CASE("linear kernel reproduces the mean-difference U-statistic") {
    const Sample x = gaussian_sample(14, 6, 61);
    const Sample y = gaussian_sample(14, 6, 62, 0.3);
    KahanSum sum;
    for (int i = 0; i < 14; ++i)
        for (int j = i + 1; j < 14; ++j)
            sum.add(stats::h_cq(x.data.row(i).transpose(), x.data.row(j).transpose(),
                                y.data.row(i).transpose(), y.data.row(j).transpose()));
    const double from_pairs = sum.value() / (0.5 * 14 * 13);
    const double from_stat = stats::u_statistic(x, y, stats::LinearKernel{}).value;
    CHECK(std::fabs(from_stat - from_pairs) < 1e-9);
}

TEST_CASE("exchange and joint-permutation symmetry") {
    const Sample x = gaussian_sample(12, 6, 5);
    const Sample y = gaussian_sample(12, 6, 6, 0.3);
    for (const KernelOrDistance k :
         {KernelOrDistance(stats::LinearKernel{}), KernelOrDistance(stats::make_gaussian(4.0)),
          KernelOrDistance(stats::EuclideanDistance{}),
          KernelOrDistance(stats::make_shifted_euclidean(30.0, 6.0))}) {
        CHECK(stats::u_statistic(x, y, k).value == stats::u_statistic(y, x, k).value);

        // apply one permutation to the rows of both samples
        std::vector<int> perm{7, 2, 9, 0, 4, 11, 1, 8, 3, 10, 5, 6};
        Sample px, py;
        px.data.resize(12, 6);
        py.data.resize(12, 6);
        for (int i = 0; i < 12; ++i) {
            px.data.row(i) = x.data.row(perm[i]);
            py.data.row(i) = y.data.row(perm[i]);
        }
        const double a = stats::u_statistic(x, y, k).value;
        const double b = stats::u_statistic(px, py, k).value;
        CHECK(std::fabs(a - b) <= 1e-12 * std::max(1.0, std::fabs(a)));
    }
}

TEST_CASE("translation invariance") {
    const Sample x = gaussian_sample(10, 4, 8);
    const Sample y = gaussian_sample(10, 4, 9, 0.4);
    Sample xt = x, yt = y;
    const Eigen::RowVectorXd v = Eigen::RowVectorXd::Constant(4, 17.5);
    xt.data.rowwise() += v;
    yt.data.rowwise() += v;
    for (const KernelOrDistance k :
         {KernelOrDistance(stats::LinearKernel{}), KernelOrDistance(stats::make_gaussian(4.0)),
          KernelOrDistance(stats::EuclideanDistance{})}) {
        const double a = stats::u_statistic(x, y, k).value;
        const double b = stats::u_statistic(xt, yt, k).value;
        CHECK(std::fabs(a - b) < 1e-9);
    }
}

TEST_CASE("bandwidth covariance under rescaling") {
    const Sample x = gaussian_sample(10, 4, 12);
    const Sample y = gaussian_sample(10, 4, 13, 0.4);
    const double c = 3.0;
    Sample xs = x, ys = y;
    xs.data *= c;
    ys.data *= c;
    const double a = stats::u_statistic(x, y, stats::make_gaussian(2.0)).value;
    const double b = stats::u_statistic(xs, ys, stats::make_gaussian(c * 2.0)).value;
    CHECK(std::fabs(a - b) < 1e-9);
}

TEST_CASE("null variance estimate") {
    const std::vector<double> zeros(10, 0.0);
    CHECK(stats::null_variance_estimate(zeros, 5, ComputeBudget::quadratic()) == 0.0);

    const std::vector<double> two_blocks{1.0, -1.0};
    CHECK(stats::null_variance_estimate(two_blocks, 4, ComputeBudget::linear()) ==
          doctest::Approx(1.0));

    CHECK_THROWS(stats::null_variance_estimate({}, 5, ComputeBudget::quadratic()));
    const std::vector<double> one{1.0};
    CHECK_THROWS(stats::null_variance_estimate(one, 4, ComputeBudget::linear()));

    // plug-in vs oracle on a Gaussian null
    const int n = 100, d = 100;
    const Sample x = gaussian_sample(n, d, 21);
    const Sample y = gaussian_sample(n, d, 22);
    const auto h = stats::pair_kernel_values(x, y, stats::LinearKernel{});
    const double est = stats::null_variance_estimate(h, n, ComputeBudget::quadratic());
    const double oracle =
        stats::oracle_null_variance(stats::LinearKernel{}, CovarianceModel::identity(d), n);
    CHECK(est > 0.5 * oracle);
    CHECK(est < 2.0 * oracle);
}

TEST_CASE("oracle null variance") {
    const CovarianceModel id100 = CovarianceModel::identity(100);
    CHECK(stats::oracle_null_variance(stats::LinearKernel{}, id100, 50) ==
          doctest::Approx(0.32).epsilon(1e-12));

    // Sigma = I_d gives 8 d / n^2
    const CovarianceModel id7 = CovarianceModel::identity(7);
    CHECK(stats::oracle_null_variance(stats::LinearKernel{}, id7, 10) ==
          doctest::Approx(8.0 * 7 / 100.0).epsilon(1e-12));

    // wide-bandwidth Gaussian tends to 4/bw^4 of the linear-kernel value
    const double bw = 1e3;
    const double ratio = stats::oracle_null_variance(stats::make_gaussian(bw), id100, 50) /
                         stats::oracle_null_variance(stats::LinearKernel{}, id100, 50);
    CHECK(ratio == doctest::Approx(4.0 / std::pow(bw, 4)).epsilon(1e-3));

    // budget-aware variant: exact pair counts
    const double quad = stats::oracle_null_variance(stats::LinearKernel{}, id100, 50,
                                                    ComputeBudget::quadratic());
    CHECK(quad == doctest::Approx(8.0 * 100.0 / (50.0 * 49.0)).epsilon(1e-12));
    const double lin =
        stats::oracle_null_variance(stats::LinearKernel{}, id100, 50, ComputeBudget::linear());
    CHECK(lin == doctest::Approx(8.0 * 100.0 / (2.0 * 1.0 * 25.0)).epsilon(1e-12));
}

TEST_CASE("shifted euclidean construction guards") {
    CHECK_THROWS(stats::make_shifted_euclidean(5.0, 3.0));  // 5 < 2*3
    CHECK_NOTHROW(stats::make_shifted_euclidean(6.0, 3.0));
    CHECK_THROWS(stats::make_gaussian(0.0));
}

TEST_CASE("budget names round-trip") {
    CHECK(ComputeBudget::parse("quadratic").kind == ComputeBudget::Kind::quadratic);
    CHECK(ComputeBudget::parse("linear").kind == ComputeBudget::Kind::linear);
    const ComputeBudget b = ComputeBudget::parse("block:8");
    CHECK(b.kind == ComputeBudget::Kind::block);
    CHECK(b.blocks == 8);
    CHECK(b.name() == "block:8");
    CHECK_THROWS(ComputeBudget::parse("cubic"));
    CHECK_THROWS(ComputeBudget::parse("block:0"));
}

TEST_CASE("pooled evaluation matches the direct path") {
    const Sample x = gaussian_sample(16, 5, 41);
    const Sample y = gaussian_sample(16, 5, 42, 0.4);
    const stats::PooledPairs pooled(x, y);
    const auto xs = pooled.identity_xs();
    const auto ys = pooled.identity_ys();
    for (const KernelOrDistance k :
         {KernelOrDistance(stats::LinearKernel{}), KernelOrDistance(stats::make_gaussian(3.0)),
          KernelOrDistance(stats::EuclideanDistance{}),
          KernelOrDistance(stats::make_shifted_euclidean(40.0, 5.0))}) {
        const Eigen::MatrixXd kmat = pooled.kernel_matrix(k);
        for (const ComputeBudget budget :
             {ComputeBudget::quadratic(), ComputeBudget::block(4), ComputeBudget::linear()}) {
            const auto fast = pooled.evaluate(kmat, k, budget, xs, ys);
            double direct;
            switch (budget.kind) {
                case ComputeBudget::Kind::quadratic: direct = stats::u_statistic(x, y, k).value; break;
                case ComputeBudget::Kind::block:
                    direct = stats::block_statistic(x, y, k, budget.blocks).value;
                    break;
                default: direct = stats::linear_statistic(x, y, k).value; break;
            }
            CHECK(std::fabs(fast.value - direct) <= 1e-11 * std::max(1.0, std::fabs(direct)));
        }
        // pair values match too
        const auto fast_h = pooled.pair_values(kmat, k, xs, ys);
        const auto direct_h = stats::pair_kernel_values(x, y, k);
        REQUIRE(fast_h.size() == direct_h.size());
        for (std::size_t i = 0; i < fast_h.size(); ++i)
            CHECK(std::fabs(fast_h[i] - direct_h[i]) < 1e-9);
    }
}

TEST_CASE("budget cost ordering at large n") {
    const int n = 2048, d = 8;
    const Sample x = gaussian_sample(n, d, 51);
    const Sample y = gaussian_sample(n, d, 52);
    const KernelOrDistance k = stats::make_gaussian(4.0);

    auto time_of = [&](auto&& fn) {
        double best = 1e300;
        for (int t = 0; t < 3; ++t) {
            const auto start = std::chrono::steady_clock::now();
            fn();
            best = std::min(best,
                            std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                                .count());
        }
        return best;
    };
    const double quad = time_of([&] { stats::u_statistic(x, y, k); });
    const double block = time_of([&] { stats::block_statistic(x, y, k, 8); });
    const double lin = time_of([&] { stats::linear_statistic(x, y, k); });
    CHECK(quad > block);
    CHECK(block > lin);
}

TEST_SUITE_END();
