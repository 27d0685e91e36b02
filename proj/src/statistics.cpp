#include "hdtest/statistics.hpp"

#include <cmath>
#include <stdexcept>

#include "hdtest/rng.hpp"

namespace hdtest::stats {

KernelOrDistance make_gaussian(double bandwidth) {
    if (!(bandwidth > 0.0)) throw std::invalid_argument("gaussian kernel: bandwidth must be > 0");
    return GaussianKernel{bandwidth};
}

KernelOrDistance make_shifted_euclidean(double bandwidth_sq, double trace_sigma) {
    if (!(bandwidth_sq >= 2.0 * trace_sigma))
        throw std::invalid_argument("shifted euclidean: need bandwidth_sq >= 2*trace_sigma");
    return ShiftedEuclidean{bandwidth_sq, trace_sigma};
}

bool is_distance(const KernelOrDistance& kernel) {
    return std::holds_alternative<EuclideanDistance>(kernel) ||
           std::holds_alternative<ShiftedEuclidean>(kernel);
}

std::string kernel_name(const KernelOrDistance& kernel) {
    struct Namer {
        std::string operator()(const LinearKernel&) const { return "linear"; }
        std::string operator()(const GaussianKernel&) const { return "gaussian"; }
        std::string operator()(const EuclideanDistance&) const { return "euclidean"; }
        std::string operator()(const ShiftedEuclidean&) const { return "shifted_euclidean"; }
    };
    return std::visit(Namer{}, kernel);
}

std::string ComputeBudget::name() const {
    switch (kind) {
        case Kind::quadratic: return "quadratic";
        case Kind::block: return "block:" + std::to_string(blocks);
        case Kind::linear: return "linear";
    }
    throw std::logic_error("unreachable");
}

ComputeBudget ComputeBudget::parse(const std::string& text) {
    if (text == "quadratic") return quadratic();
    if (text == "linear") return linear();
    if (text.rfind("block:", 0) == 0) {
        const int b = std::stoi(text.substr(6));
        if (b < 1) throw std::invalid_argument("budget: block count must be >= 1");
        return block(b);
    }
    throw std::invalid_argument("unknown budget: " + text);
}

double h_cq(const Eigen::VectorXd& x, const Eigen::VectorXd& xp, const Eigen::VectorXd& y,
            const Eigen::VectorXd& yp) {
    if (x.size() != xp.size() || x.size() != y.size() || x.size() != yp.size())
        throw std::invalid_argument("h_cq: dimension mismatch");
    return (x - y).dot(xp - yp);
}

namespace {

// Per-pair value as a function of the squared distance.
double transform(const KernelOrDistance& kernel, double d2) {
    struct Eval {
        double d2;
        double operator()(const LinearKernel&) const { return -0.5 * d2; }
        double operator()(const GaussianKernel& k) const {
            return std::exp(-d2 / (k.bandwidth * k.bandwidth));
        }
        double operator()(const EuclideanDistance&) const { return std::sqrt(d2); }
        double operator()(const ShiftedEuclidean& k) const {
            const double arg = k.bandwidth_sq - 2.0 * k.trace_sigma + d2;
            return std::sqrt(arg > 0.0 ? arg : 0.0);
        }
    };
    return std::visit(Eval{d2}, kernel);
}

void check_pair(const Sample& x, const Sample& y) {
    if (x.n() != y.n()) throw std::invalid_argument("statistic: sample sizes must match");
    if (x.dim() != y.dim()) throw std::invalid_argument("statistic: dimensions must match");
    if (x.n() < 2) throw std::invalid_argument("statistic: need n >= 2");
}

// h over one unordered pair of indices, from raw rows.
double pair_h(const Sample& x, const Sample& y, const KernelOrDistance& kernel, int i, int j) {
    if (std::holds_alternative<LinearKernel>(kernel)) {
        // paired-difference form of h_cq, one dot product per pair
        return (x.data.row(i) - y.data.row(i)).dot(x.data.row(j) - y.data.row(j));
    }
    const double dxx = (x.data.row(i) - x.data.row(j)).squaredNorm();
    const double dyy = (y.data.row(i) - y.data.row(j)).squaredNorm();
    const double dxy = (x.data.row(i) - y.data.row(j)).squaredNorm();
    const double dyx = (x.data.row(j) - y.data.row(i)).squaredNorm();
    const double sign = is_distance(kernel) ? -1.0 : 1.0;
    // grouped so that swapping the samples reproduces the value bit-for-bit
    return sign * ((transform(kernel, dxx) + transform(kernel, dyy)) -
                   (transform(kernel, dxy) + transform(kernel, dyx)));
}

// Average of h over unordered pairs in the index block [lo, hi).
double block_average(const Sample& x, const Sample& y, const KernelOrDistance& kernel, int lo,
                     int hi) {
    KahanSum sum;
    for (int i = lo; i < hi; ++i)
        for (int j = i + 1; j < hi; ++j) sum.add(pair_h(x, y, kernel, i, j));
    const double pairs = 0.5 * static_cast<double>(hi - lo) * static_cast<double>(hi - lo - 1);
    return sum.value() / pairs;
}

}  // namespace

StatisticValue u_statistic(const Sample& x, const Sample& y, const KernelOrDistance& kernel) {
    check_pair(x, y);
    StatisticValue out;
    out.value = block_average(x, y, kernel, 0, x.n());
    out.kernel = kernel;
    out.budget = ComputeBudget::quadratic();
    out.n = x.n();
    return out;
}

StatisticValue block_statistic(const Sample& x, const Sample& y, const KernelOrDistance& kernel,
                               int blocks) {
    check_pair(x, y);
    const int n = x.n();
    if (blocks < 1) throw std::invalid_argument("block_statistic: need blocks >= 1");
    if (n % blocks != 0)
        throw std::invalid_argument("block_statistic: blocks must divide n (truncate explicitly)");
    const int size = n / blocks;
    if (size < 2) throw std::invalid_argument("block_statistic: need n/blocks >= 2");

    StatisticValue out;
    out.kernel = kernel;
    out.budget = ComputeBudget::block(blocks);
    out.n = n;
    out.per_block_values.reserve(blocks);
    KahanSum sum;
    for (int b = 0; b < blocks; ++b) {
        const double v = block_average(x, y, kernel, b * size, (b + 1) * size);
        out.per_block_values.push_back(v);
        sum.add(v);
    }
    out.value = sum.value() / blocks;
    if (blocks == 1) out.per_block_values.clear();
    return out;
}

StatisticValue linear_statistic(const Sample& x, const Sample& y, const KernelOrDistance& kernel) {
    check_pair(x, y);
    const int n = x.n();
    if (n % 2 != 0 || n < 4) throw std::invalid_argument("linear_statistic: need even n >= 4");
    StatisticValue out = block_statistic(x, y, kernel, n / 2);
    out.budget = ComputeBudget::linear();
    return out;
}

std::vector<double> pair_kernel_values(const Sample& x, const Sample& y,
                                       const KernelOrDistance& kernel) {
    check_pair(x, y);
    const int n = x.n();
    std::vector<double> values;
    values.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) values.push_back(pair_h(x, y, kernel, i, j));
    return values;
}

double null_variance_estimate(std::span<const double> per_pair_h, int n,
                              const ComputeBudget& budget) {
    if (per_pair_h.empty()) throw std::invalid_argument("null_variance_estimate: empty input");
    if (budget.kind == ComputeBudget::Kind::quadratic) {
        KahanSum sq;
        for (double h : per_pair_h) sq.add(h * h);
        const double mean_sq = sq.value() / static_cast<double>(per_pair_h.size());
        return 2.0 / (static_cast<double>(n) * (n - 1)) * mean_sq;
    }
    // block / linear: independent per-block replicates
    const std::size_t b = per_pair_h.size();
    if (b < 2) throw std::invalid_argument("null_variance_estimate: need at least 2 blocks");
    KahanSum mean_sum;
    for (double v : per_pair_h) mean_sum.add(v);
    const double mean = mean_sum.value() / static_cast<double>(b);
    KahanSum dev;
    for (double v : per_pair_h) dev.add((v - mean) * (v - mean));
    const double sample_var = dev.value() / static_cast<double>(b - 1);
    return sample_var / static_cast<double>(b);
}

double taylor_multiplier(const KernelOrDistance& kernel, double trace_sigma) {
    struct Eval {
        double trace_sigma;
        double operator()(const LinearKernel&) const { return 1.0; }
        double operator()(const GaussianKernel& k) const {
            const double bw_sq = k.bandwidth * k.bandwidth;
            const double tau = 2.0 * trace_sigma / bw_sq;
            return 2.0 * std::exp(-tau) / bw_sq;
        }
        double operator()(const EuclideanDistance&) const {
            return 1.0 / std::sqrt(2.0 * trace_sigma);
        }
        double operator()(const ShiftedEuclidean& k) const {
            return 1.0 / std::sqrt(k.bandwidth_sq - 2.0 * k.trace_sigma + 2.0 * trace_sigma);
        }
    };
    return std::visit(Eval{trace_sigma}, kernel);
}

double oracle_null_variance(const KernelOrDistance& kernel, const CovarianceModel& cov, int n) {
    if (n < 2) throw std::invalid_argument("oracle_null_variance: need n >= 2");
    const double m = taylor_multiplier(kernel, cov.trace_sigma);
    return m * m * 8.0 * cov.trace_sigma_sq / (static_cast<double>(n) * n);
}

double oracle_null_variance(const KernelOrDistance& kernel, const CovarianceModel& cov, int n,
                            const ComputeBudget& budget) {
    int blocks = 1;
    switch (budget.kind) {
        case ComputeBudget::Kind::quadratic: blocks = 1; break;
        case ComputeBudget::Kind::block: blocks = budget.blocks; break;
        case ComputeBudget::Kind::linear: blocks = n / 2; break;
    }
    if (blocks < 1 || n % blocks != 0) throw std::invalid_argument("oracle_null_variance: bad budget");
    const double size = static_cast<double>(n / blocks);
    if (size < 2) throw std::invalid_argument("oracle_null_variance: block size < 2");
    const double m = taylor_multiplier(kernel, cov.trace_sigma);
    // exact pair count per block, averaged over blocks
    return m * m * 8.0 * cov.trace_sigma_sq / (size * (size - 1.0) * static_cast<double>(blocks));
}

PooledPairs::PooledPairs(const Sample& x, const Sample& y) {
    check_pair(x, y);
    n_ = x.n();
    const int total = 2 * n_;
    Eigen::MatrixXd pooled(total, x.dim());
    pooled.topRows(n_) = x.data;
    pooled.bottomRows(n_) = y.data;
    const Eigen::VectorXd row_sq = pooled.rowwise().squaredNorm();
    d2_ = -2.0 * (pooled * pooled.transpose());
    d2_.colwise() += row_sq;
    d2_.rowwise() += row_sq.transpose();
    d2_ = d2_.cwiseMax(0.0);
    d2_.diagonal().setZero();
}

std::vector<double> PooledPairs::pair_distances() const {
    const int total = pooled_size();
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(total) * (total - 1) / 2);
    for (int i = 0; i < total; ++i)
        for (int j = i + 1; j < total; ++j) out.push_back(d2_(i, j));
    return out;
}

Eigen::MatrixXd PooledPairs::kernel_matrix(const KernelOrDistance& kernel) const {
    const int total = pooled_size();
    Eigen::MatrixXd k(total, total);
    for (int j = 0; j < total; ++j) {
        k(j, j) = 0.0;
        for (int i = j + 1; i < total; ++i) {
            const double v = transform(kernel, d2_(i, j));
            k(i, j) = v;
            k(j, i) = v;
        }
    }
    return k;
}

namespace {

// h-sum over the unordered pairs of one block of positions [lo, hi).
double block_average_from_matrix(const Eigen::MatrixXd& kmat, double sign,
                                 std::span<const int> xs, std::span<const int> ys, int lo, int hi) {
    KahanSum sum;
    for (int p = lo; p < hi; ++p) {
        const int xi = xs[p];
        const int yi = ys[p];
        for (int q = p + 1; q < hi; ++q) {
            const int xj = xs[q];
            const int yj = ys[q];
            sum.add((kmat(xi, xj) + kmat(yi, yj)) - (kmat(xi, yj) + kmat(xj, yi)));
        }
    }
    const double pairs = 0.5 * static_cast<double>(hi - lo) * static_cast<double>(hi - lo - 1);
    return sign * sum.value() / pairs;
}

}  // namespace

StatisticValue PooledPairs::evaluate(const Eigen::MatrixXd& kmat, const KernelOrDistance& kernel,
                                     const ComputeBudget& budget, std::span<const int> xs,
                                     std::span<const int> ys) const {
    if (static_cast<int>(xs.size()) != n_ || static_cast<int>(ys.size()) != n_)
        throw std::invalid_argument("PooledPairs::evaluate: bad group assignment");
    const double sign = is_distance(kernel) ? -1.0 : 1.0;

    StatisticValue out;
    out.kernel = kernel;
    out.budget = budget;
    out.n = n_;
    switch (budget.kind) {
        case ComputeBudget::Kind::quadratic:
            out.value = block_average_from_matrix(kmat, sign, xs, ys, 0, n_);
            return out;
        case ComputeBudget::Kind::block:
        case ComputeBudget::Kind::linear: {
            const int blocks = budget.kind == ComputeBudget::Kind::linear ? n_ / 2 : budget.blocks;
            if (blocks < 1 || n_ % blocks != 0 || n_ / blocks < 2)
                throw std::invalid_argument("PooledPairs::evaluate: bad block budget");
            const int size = n_ / blocks;
            KahanSum sum;
            out.per_block_values.reserve(blocks);
            for (int b = 0; b < blocks; ++b) {
                const double v = block_average_from_matrix(kmat, sign, xs, ys, b * size, (b + 1) * size);
                out.per_block_values.push_back(v);
                sum.add(v);
            }
            out.value = sum.value() / blocks;
            return out;
        }
    }
    throw std::logic_error("unreachable");
}

std::vector<double> PooledPairs::pair_values(const Eigen::MatrixXd& kmat,
                                             const KernelOrDistance& kernel,
                                             std::span<const int> xs,
                                             std::span<const int> ys) const {
    const double sign = is_distance(kernel) ? -1.0 : 1.0;
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(n_) * (n_ - 1) / 2);
    for (int p = 0; p < n_; ++p)
        for (int q = p + 1; q < n_; ++q)
            out.push_back(sign * ((kmat(xs[p], xs[q]) + kmat(ys[p], ys[q])) -
                                  (kmat(xs[p], ys[q]) + kmat(xs[q], ys[p]))));
    return out;
}

std::vector<int> PooledPairs::identity_xs() const {
    std::vector<int> xs(n_);
    for (int i = 0; i < n_; ++i) xs[i] = i;
    return xs;
}

std::vector<int> PooledPairs::identity_ys() const {
    std::vector<int> ys(n_);
    for (int i = 0; i < n_; ++i) ys[i] = n_ + i;
    return ys;
}

}  // namespace hdtest::stats
