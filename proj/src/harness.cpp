#include "hdtest/harness.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "hdtest/rng.hpp"
#include "hdtest/theory.hpp"

namespace hdtest::harness {

namespace {

// Seed-stream tags; one per purpose, never shared.
enum SeedStream : std::uint64_t {
    kStreamX = 0,
    kStreamY = 1,
    kStreamPermutation = 2,
    kStreamNullX = 4,
    kStreamNullY = 5,
    kStreamCovariance = 6,
};

}  // namespace

std::string stat_family_name(StatFamily family) {
    switch (family) {
        case StatFamily::ucq: return "ucq";
        case StatFamily::gmmd: return "gmmd";
        case StatFamily::eed: return "eed";
        case StatFamily::eed_gamma: return "eed_gamma";
    }
    throw std::logic_error("unreachable");
}

StatFamily stat_family_from_name(const std::string& name) {
    if (name == "ucq") return StatFamily::ucq;
    if (name == "gmmd") return StatFamily::gmmd;
    if (name == "eed") return StatFamily::eed;
    if (name == "eed_gamma") return StatFamily::eed_gamma;
    throw std::invalid_argument("unknown statistic family: " + name);
}

std::string StatisticSpec::name() const {
    std::string prefix;
    switch (budget.kind) {
        case stats::ComputeBudget::Kind::quadratic: prefix = "u"; break;
        case stats::ComputeBudget::Kind::linear: prefix = "l"; break;
        case stats::ComputeBudget::Kind::block: prefix = "b" + std::to_string(budget.blocks); break;
    }
    std::string suffix;
    if (family == StatFamily::gmmd || family == StatFamily::eed_gamma) {
        switch (rule.kind) {
            case bandwidth::BandwidthRule::Kind::power: {
                std::string e = std::to_string(rule.exponent);
                e.erase(e.find_last_not_of('0') + 1);
                if (!e.empty() && e.back() == '.') e.pop_back();
                suffix = e;
                break;
            }
            case bandwidth::BandwidthRule::Kind::median: suffix = "_median"; break;
            case bandwidth::BandwidthRule::Kind::mean: suffix = "_mean"; break;
            case bandwidth::BandwidthRule::Kind::fixed: suffix = "_fixed"; break;
        }
    }
    switch (family) {
        case StatFamily::ucq: return prefix + "CQ";
        case StatFamily::gmmd: return prefix + "MMD" + suffix;
        case StatFamily::eed:
            return budget.kind == stats::ComputeBudget::Kind::quadratic ? "ED" : prefix + "ED";
        case StatFamily::eed_gamma: return prefix + "EDg" + suffix;
    }
    throw std::logic_error("unreachable");
}

std::vector<StatisticSpec> legend_specs() {
    using bandwidth::BandwidthRule;
    using stats::ComputeBudget;
    std::vector<StatisticSpec> specs;
    specs.push_back({StatFamily::gmmd, BandwidthRule::power(0.5), ComputeBudget::quadratic()});
    specs.push_back({StatFamily::gmmd, BandwidthRule::median(), ComputeBudget::quadratic()});
    specs.push_back({StatFamily::gmmd, BandwidthRule::power(0.75), ComputeBudget::quadratic()});
    specs.push_back({StatFamily::eed, BandwidthRule::median(), ComputeBudget::quadratic()});
    specs.push_back({StatFamily::ucq, BandwidthRule::median(), ComputeBudget::quadratic()});
    specs.push_back({StatFamily::gmmd, BandwidthRule::power(0.5), ComputeBudget::linear()});
    specs.push_back({StatFamily::gmmd, BandwidthRule::median(), ComputeBudget::linear()});
    specs.push_back({StatFamily::gmmd, BandwidthRule::power(0.75), ComputeBudget::linear()});
    specs.push_back({StatFamily::ucq, BandwidthRule::median(), ComputeBudget::linear()});
    return specs;
}

Calibration Calibration::permutation(int k) {
    if (k < 100) throw std::invalid_argument("permutation: need K >= 100");
    Calibration c;
    c.kind = Kind::permutation;
    c.resamples = k;
    return c;
}

Calibration Calibration::gaussian_plugin() {
    Calibration c;
    c.kind = Kind::gaussian_plugin;
    return c;
}

Calibration Calibration::oracle_theory() {
    Calibration c;
    c.kind = Kind::oracle_theory;
    return c;
}

Calibration Calibration::oracle_theory(models::CovarianceModel cov) {
    Calibration c;
    c.kind = Kind::oracle_theory;
    c.cov = std::move(cov);
    return c;
}

Calibration Calibration::mc_null(int k) {
    if (k < 100) throw std::invalid_argument("mc_null: need K >= 100");
    Calibration c;
    c.kind = Kind::mc_null;
    c.resamples = k;
    return c;
}

std::string Calibration::name() const {
    switch (kind) {
        case Kind::permutation: return "permutation:" + std::to_string(resamples);
        case Kind::gaussian_plugin: return "plugin";
        case Kind::oracle_theory: return "oracle";
        case Kind::mc_null: return "mc_null:" + std::to_string(resamples);
    }
    throw std::logic_error("unreachable");
}

int default_threads() {
    if (const char* env = std::getenv("HDTEST_THREADS")) {
        const int t = std::atoi(env);
        if (t > 0) return t;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

void parallel_for(int count, int threads, const std::function<void(int)>& fn) {
    if (threads <= 0) threads = default_threads();
    threads = std::min(threads, count);
    if (threads <= 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&]() {
        for (;;) {
            const int i = next.fetch_add(1);
            if (i >= count) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

namespace {

// Trace of the pooled sample covariance, the plug-in for eed_gamma.
double pooled_trace_estimate(const Sample& x, const Sample& y) {
    const int total = x.n() + y.n();
    Eigen::RowVectorXd mean = (x.data.colwise().sum() + y.data.colwise().sum()) / total;
    double ss = 0.0;
    ss += (x.data.rowwise() - mean).squaredNorm();
    ss += (y.data.rowwise() - mean).squaredNorm();
    return ss / (total - 1);
}

// Covariance used by oracle calibration when none was supplied: average of
// the effective covariances of the two generating specs.
models::CovarianceModel oracle_cov_from_specs(const DistributionSpec& p,
                                              const DistributionSpec& q) {
    const double vp = models::noise_variance(p.noise);
    const double vq = models::noise_variance(q.noise);
    const Eigen::MatrixXd avg = 0.5 * (vp * p.cov.sigma + vq * q.cov.sigma);
    // Factor through the eigendecomposition; LLT is not reliable for the
    // near-singular rotated constructions.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(avg);
    const Eigen::VectorXd ev = solver.eigenvalues().cwiseMax(0.0);
    models::CovarianceModel cov;
    cov.factor = solver.eigenvectors() * ev.cwiseSqrt().asDiagonal();
    cov.sigma = avg;
    cov.trace_sigma = avg.trace();
    cov.trace_sigma_sq = avg.squaredNorm();
    return cov;
}

// Data-driven bandwidths computed at most once per dataset, shared by all
// statistic specs of one repetition.
class BandwidthCache {
public:
    explicit BandwidthCache(const stats::PooledPairs& pooled) : pooled_(pooled) {}

    double resolve(const bandwidth::BandwidthRule& rule, int dim) {
        switch (rule.kind) {
            case bandwidth::BandwidthRule::Kind::median:
                if (!median_) {
                    std::vector<double> d2 = pooled_.pair_distances();
                    const auto med = bandwidth::median_of_squared_distances(d2);
                    if (med.degenerate) throw std::domain_error("degenerate zero bandwidth");
                    median_ = std::sqrt(med.bandwidth_sq);
                }
                return *median_;
            case bandwidth::BandwidthRule::Kind::mean:
                if (!mean_) {
                    KahanSum sum;
                    const std::vector<double> d2 = pooled_.pair_distances();
                    for (double v : d2) sum.add(v);
                    const double m = sum.value() / static_cast<double>(d2.size());
                    if (!(m > 0.0)) throw std::domain_error("degenerate zero bandwidth");
                    mean_ = std::sqrt(m);
                }
                return *mean_;
            case bandwidth::BandwidthRule::Kind::power:
                return rule.scale * std::pow(static_cast<double>(dim), rule.exponent);
            case bandwidth::BandwidthRule::Kind::fixed:
                if (!(rule.value > 0.0)) throw std::domain_error("fixed bandwidth must be > 0");
                return rule.value;
        }
        throw std::logic_error("unreachable");
    }

private:
    const stats::PooledPairs& pooled_;
    std::optional<double> median_;
    std::optional<double> mean_;
};

stats::KernelOrDistance resolve_kernel(const StatisticSpec& spec, const Sample& x, const Sample& y,
                                       BandwidthCache& bandwidths,
                                       const models::CovarianceModel* oracle_cov) {
    switch (spec.family) {
        case StatFamily::ucq: return stats::LinearKernel{};
        case StatFamily::eed: return stats::EuclideanDistance{};
        case StatFamily::gmmd:
            return stats::make_gaussian(bandwidths.resolve(spec.rule, x.dim()));
        case StatFamily::eed_gamma: {
            const double bw = bandwidths.resolve(spec.rule, x.dim());
            const double trace =
                oracle_cov ? oracle_cov->trace_sigma : pooled_trace_estimate(x, y);
            return stats::make_shifted_euclidean(bw * bw, trace);
        }
    }
    throw std::logic_error("unreachable");
}

// One-sided p-value from a studentized statistic.
TestResult z_test_result(double value, double variance, double alpha, const std::string& cal_name) {
    TestResult r;
    r.statistic_value = value;
    r.variance_estimate = variance;
    if (variance > 0.0) {
        r.z_score = value / std::sqrt(variance);
    } else {
        r.z_score = value > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
    }
    r.p_value = theory::normal_cdf(-r.z_score);
    r.reject = r.p_value <= alpha;
    r.calibration = cal_name;
    r.alpha = alpha;
    return r;
}

// Shared permutation machinery: evaluates `eval` (which returns the statistic
// value under a relabeling) for K seeded relabelings of 2n pooled indices.
template <typename Eval>
TestResult permutation_result(int n, int resamples, std::uint64_t seed, double observed,
                              double alpha, const std::string& cal_name, Eval&& eval) {
    Rng rng(seed);
    std::vector<int> labels(2 * n);
    for (int i = 0; i < 2 * n; ++i) labels[i] = i;
    int at_or_above = 0;
    KahanSum sum, sum_sq;
    for (int k = 0; k < resamples; ++k) {
        rng.shuffle(labels);
        const double v = eval(std::span<const int>(labels.data(), n),
                              std::span<const int>(labels.data() + n, n));
        if (v >= observed) ++at_or_above;
        sum.add(v);
        sum_sq.add(v * v);
    }
    TestResult r;
    r.statistic_value = observed;
    const double mean = sum.value() / resamples;
    r.variance_estimate = std::max(0.0, sum_sq.value() / resamples - mean * mean);
    r.z_score = r.variance_estimate > 0.0 ? observed / std::sqrt(r.variance_estimate)
                                          : (observed > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
    r.p_value = static_cast<double>(1 + at_or_above) / static_cast<double>(resamples + 1);
    r.reject = r.p_value <= alpha;
    r.calibration = cal_name;
    r.alpha = alpha;
    return r;
}

}  // namespace

TestResult run_test(const Sample& x, const Sample& y, const StatisticSpec& spec,
                    const Calibration& cal, double alpha, std::uint64_t seed) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("run_test: alpha in (0,1)");
    if (cal.kind == Calibration::Kind::mc_null)
        throw std::invalid_argument("run_test: mc_null needs the generating spec; use estimate_power");
    if (cal.kind == Calibration::Kind::oracle_theory && !cal.cov)
        throw std::invalid_argument("run_test: oracle_theory needs a covariance model");

    const stats::PooledPairs pooled(x, y);
    const models::CovarianceModel* oracle = cal.cov ? &*cal.cov : nullptr;
    BandwidthCache bandwidths(pooled);
    const stats::KernelOrDistance kernel = resolve_kernel(spec, x, y, bandwidths, oracle);
    const Eigen::MatrixXd kmat = pooled.kernel_matrix(kernel);
    const std::vector<int> xs = pooled.identity_xs();
    const std::vector<int> ys = pooled.identity_ys();
    const stats::StatisticValue observed = pooled.evaluate(kmat, kernel, spec.budget, xs, ys);

    switch (cal.kind) {
        case Calibration::Kind::permutation:
            return permutation_result(
                x.n(), cal.resamples, derive_seed(seed, kStreamPermutation), observed.value, alpha,
                cal.name(), [&](std::span<const int> pxs, std::span<const int> pys) {
                    return pooled.evaluate(kmat, kernel, spec.budget, pxs, pys).value;
                });
        case Calibration::Kind::gaussian_plugin: {
            double variance;
            if (spec.budget.kind == stats::ComputeBudget::Kind::quadratic) {
                const std::vector<double> h = pooled.pair_values(kmat, kernel, xs, ys);
                variance = stats::null_variance_estimate(h, x.n(), spec.budget);
            } else {
                variance =
                    stats::null_variance_estimate(observed.per_block_values, x.n(), spec.budget);
            }
            return z_test_result(observed.value, variance, alpha, cal.name());
        }
        case Calibration::Kind::oracle_theory: {
            const double variance = stats::oracle_null_variance(kernel, *cal.cov, x.n(), spec.budget);
            return z_test_result(observed.value, variance, alpha, cal.name());
        }
        case Calibration::Kind::mc_null: break;
    }
    throw std::logic_error("unreachable");
}

std::vector<PowerRow> estimate_power_set(const DistributionSpec& p, const DistributionSpec& q,
                                         int n, std::span<const StatisticSpec> specs,
                                         const Calibration& cal, double alpha, int reps,
                                         std::uint64_t master_seed, int threads) {
    if (reps < 1) throw std::invalid_argument("estimate_power: need reps >= 1");
    const std::size_t m = specs.size();

    Calibration effective = cal;
    if (cal.kind == Calibration::Kind::oracle_theory && !cal.cov)
        effective.cov = oracle_cov_from_specs(p, q);

    std::vector<std::uint8_t> rejected(static_cast<std::size_t>(reps) * m, 0);

    parallel_for(reps, threads, [&](int r) {
        const Sample x = models::sample(p, n, derive_seed(master_seed, r, kStreamX));
        const Sample y = models::sample(q, n, derive_seed(master_seed, r, kStreamY));
        const stats::PooledPairs pooled(x, y);
        const models::CovarianceModel* oracle = effective.cov ? &*effective.cov : nullptr;
        BandwidthCache bandwidths(pooled);

        // Kernel matrices are shared between statistics with equal kernels
        // (quadratic and linear variants of the same bandwidth rule).
        std::vector<stats::KernelOrDistance> kernels(m);
        std::vector<const Eigen::MatrixXd*> mats(m, nullptr);
        std::vector<std::pair<stats::KernelOrDistance, Eigen::MatrixXd>> cache;
        cache.reserve(m);
        for (std::size_t s = 0; s < m; ++s) {
            kernels[s] = resolve_kernel(specs[s], x, y, bandwidths, oracle);
            bool found = false;
            for (auto& entry : cache) {
                if (entry.first == kernels[s]) {
                    found = true;
                    break;
                }
            }
            if (!found) cache.emplace_back(kernels[s], pooled.kernel_matrix(kernels[s]));
        }
        for (std::size_t s = 0; s < m; ++s) {
            for (auto& entry : cache)
                if (entry.first == kernels[s]) mats[s] = &entry.second;
        }

        const std::vector<int> xs = pooled.identity_xs();
        const std::vector<int> ys = pooled.identity_ys();
        std::vector<double> observed(m);
        std::vector<stats::StatisticValue> values(m);
        for (std::size_t s = 0; s < m; ++s) {
            values[s] = pooled.evaluate(*mats[s], kernels[s], specs[s].budget, xs, ys);
            observed[s] = values[s].value;
        }

        auto mark = [&](std::size_t s, bool rej) {
            rejected[static_cast<std::size_t>(r) * m + s] = rej ? 1 : 0;
        };

        switch (effective.kind) {
            case Calibration::Kind::permutation: {
                Rng rng(derive_seed(master_seed, r, kStreamPermutation));
                std::vector<int> labels(2 * n);
                for (int i = 0; i < 2 * n; ++i) labels[i] = i;
                std::vector<int> at_or_above(m, 0);
                for (int k = 0; k < effective.resamples; ++k) {
                    rng.shuffle(labels);
                    const std::span<const int> pxs(labels.data(), n);
                    const std::span<const int> pys(labels.data() + n, n);
                    for (std::size_t s = 0; s < m; ++s) {
                        const double v =
                            pooled.evaluate(*mats[s], kernels[s], specs[s].budget, pxs, pys).value;
                        if (v >= observed[s]) ++at_or_above[s];
                    }
                }
                for (std::size_t s = 0; s < m; ++s) {
                    const double pval = static_cast<double>(1 + at_or_above[s]) /
                                        static_cast<double>(effective.resamples + 1);
                    mark(s, pval <= alpha);
                }
                return;
            }
            case Calibration::Kind::gaussian_plugin: {
                for (std::size_t s = 0; s < m; ++s) {
                    double variance;
                    if (specs[s].budget.kind == stats::ComputeBudget::Kind::quadratic) {
                        const std::vector<double> h = pooled.pair_values(*mats[s], kernels[s], xs, ys);
                        variance = stats::null_variance_estimate(h, n, specs[s].budget);
                    } else {
                        variance = stats::null_variance_estimate(values[s].per_block_values, n,
                                                                 specs[s].budget);
                    }
                    mark(s, z_test_result(observed[s], variance, alpha, "").reject);
                }
                return;
            }
            case Calibration::Kind::oracle_theory: {
                for (std::size_t s = 0; s < m; ++s) {
                    const double variance =
                        stats::oracle_null_variance(kernels[s], *effective.cov, n, specs[s].budget);
                    mark(s, z_test_result(observed[s], variance, alpha, "").reject);
                }
                return;
            }
            case Calibration::Kind::mc_null: {
                // Fresh null draws: both groups from P.
                std::vector<int> at_or_above(m, 0);
                for (int k = 0; k < effective.resamples; ++k) {
                    const Sample x0 =
                        models::sample(p, n, derive_seed(master_seed, r, kStreamNullX, k));
                    const Sample y0 =
                        models::sample(p, n, derive_seed(master_seed, r, kStreamNullY, k));
                    const stats::PooledPairs null_pooled(x0, y0);
                    BandwidthCache null_bandwidths(null_pooled);
                    const std::vector<int> nxs = null_pooled.identity_xs();
                    const std::vector<int> nys = null_pooled.identity_ys();
                    for (std::size_t s = 0; s < m; ++s) {
                        const stats::KernelOrDistance nk =
                            resolve_kernel(specs[s], x0, y0, null_bandwidths, oracle);
                        const Eigen::MatrixXd nkm = null_pooled.kernel_matrix(nk);
                        const double v =
                            null_pooled.evaluate(nkm, nk, specs[s].budget, nxs, nys).value;
                        if (v >= observed[s]) ++at_or_above[s];
                    }
                }
                for (std::size_t s = 0; s < m; ++s) {
                    const double pval = static_cast<double>(1 + at_or_above[s]) /
                                        static_cast<double>(effective.resamples + 1);
                    mark(s, pval <= alpha);
                }
                return;
            }
        }
    });

    std::vector<PowerRow> rows(m);
    for (std::size_t s = 0; s < m; ++s) {
        int count = 0;
        for (int r = 0; r < reps; ++r) count += rejected[static_cast<std::size_t>(r) * m + s];
        PowerRow& row = rows[s];
        row.statistic = specs[s].name();
        row.d = p.cov.dim();
        row.n = n;
        const bool uses_rule =
            specs[s].family == StatFamily::gmmd || specs[s].family == StatFamily::eed_gamma;
        row.bandwidth_rule = uses_rule ? specs[s].rule.name() : "-";
        row.budget = specs[s].budget.name();
        row.calibration = cal.name();
        row.alpha = alpha;
        row.reps = reps;
        row.power = static_cast<double>(count) / reps;
        row.stderr_ = std::sqrt(row.power * (1.0 - row.power) / reps);
        row.master_seed = master_seed;
    }
    return rows;
}

PowerRow estimate_power(const DistributionSpec& p, const DistributionSpec& q, int n,
                        const StatisticSpec& spec, const Calibration& cal, double alpha, int reps,
                        std::uint64_t master_seed, int threads) {
    const StatisticSpec specs[] = {spec};
    return estimate_power_set(p, q, n, specs, cal, alpha, reps, master_seed, threads).front();
}

std::string preset_name(Preset preset) {
    switch (preset) {
        case Preset::exp1_normal: return "exp1_normal";
        case Preset::exp1_laplace: return "exp1_laplace";
        case Preset::exp1_beta: return "exp1_beta";
        case Preset::exp1_mixture: return "exp1_mixture";
        case Preset::exp2: return "exp2";
        case Preset::exp4: return "exp4";
        case Preset::exp5_diag: return "exp5_diag";
        case Preset::exp5_nondiag: return "exp5_nondiag";
    }
    throw std::logic_error("unreachable");
}

Preset preset_from_name(const std::string& name) {
    for (Preset p : {Preset::exp1_normal, Preset::exp1_laplace, Preset::exp1_beta,
                     Preset::exp1_mixture, Preset::exp2, Preset::exp4, Preset::exp5_diag,
                     Preset::exp5_nondiag}) {
        if (preset_name(p) == name) return p;
    }
    throw std::invalid_argument("unknown preset: " + name);
}

std::pair<DistributionSpec, DistributionSpec> preset_pair(Preset preset, int d,
                                                          std::uint64_t master_seed) {
    using models::NoiseFamily;
    switch (preset) {
        case Preset::exp1_normal: return models::make_experiment1_pair(NoiseFamily::gaussian, d);
        case Preset::exp1_laplace:
            return models::make_experiment1_pair(NoiseFamily::laplace_unit, d);
        case Preset::exp1_beta:
            return models::make_experiment1_pair(NoiseFamily::uniform_beta11, d);
        case Preset::exp1_mixture:
            return models::make_experiment1_pair(NoiseFamily::gaussian_scale_mixture, d);
        case Preset::exp2:
        case Preset::exp5_nondiag: {
            auto pair = models::make_experiment1_pair(NoiseFamily::gaussian, d);
            const models::CovarianceModel cov = models::make_experiment2_covariance(
                d, derive_seed(master_seed, kStreamCovariance, static_cast<std::uint64_t>(d)));
            pair.first.cov = cov;
            pair.second.cov = cov;
            return pair;
        }
        case Preset::exp4:
            return models::make_experiment4_pair(
                d, derive_seed(master_seed, kStreamCovariance, static_cast<std::uint64_t>(d)));
        case Preset::exp5_diag: return models::make_experiment1_pair(NoiseFamily::gaussian, d);
    }
    throw std::logic_error("unreachable");
}

std::vector<PowerCurve> run_experiment(Preset preset, const ExperimentOptions& options) {
    const bool vary_n = preset == Preset::exp5_diag || preset == Preset::exp5_nondiag;
    std::vector<int> grid = options.grid;
    if (grid.empty()) grid = {40, 80, 120, 160, 200};
    for (int g : grid)
        if (g < 4 || g % 2 != 0)
            throw std::invalid_argument("run_experiment: grid values must be even and >= 4");

    const std::vector<StatisticSpec> specs = legend_specs();
    std::vector<PowerCurve> curves(specs.size());
    for (std::size_t s = 0; s < specs.size(); ++s) curves[s].statistic = specs[s].name();

    for (std::size_t ci = 0; ci < grid.size(); ++ci) {
        const int d = vary_n ? 40 : grid[ci];
        const int n = grid[ci];
        const auto pair = preset_pair(preset, d, options.master_seed);
        const std::vector<PowerRow> rows =
            estimate_power_set(pair.first, pair.second, n, specs, options.cal, options.alpha,
                               options.reps, derive_seed(options.master_seed, ci), options.threads);
        for (std::size_t s = 0; s < specs.size(); ++s) {
            PowerRow row = rows[s];
            row.master_seed = options.master_seed;
            curves[s].rows.push_back(row);
        }
    }
    return curves;
}

}  // namespace hdtest::harness
