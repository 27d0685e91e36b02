#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hdtest/bandwidth.hpp"
#include "hdtest/models.hpp"
#include "hdtest/statistics.hpp"

// Monte-Carlo engine: single tests with a chosen calibration, power
// estimation over seeded repetitions, and the experiment presets. Every
// repetition derives its own seeds from the master seed, so results are
// bit-identical for a fixed (inputs, seed) regardless of thread count.

namespace hdtest::harness {

using models::DistributionSpec;
using models::Sample;

enum class StatFamily { ucq, gmmd, eed, eed_gamma };

std::string stat_family_name(StatFamily family);
StatFamily stat_family_from_name(const std::string& name);

struct StatisticSpec {
    StatFamily family = StatFamily::ucq;
    bandwidth::BandwidthRule rule = bandwidth::BandwidthRule::median();  // gmmd / eed_gamma only
    stats::ComputeBudget budget = stats::ComputeBudget::quadratic();

    // Legend-style name: uCQ, lCQ, uMMD0.5, uMMD_median, uMMD0.75, ED,
    // lMMD..., block budgets get a b<B> prefix.
    std::string name() const;
};

// The statistic set of the experiment figures.
std::vector<StatisticSpec> legend_specs();

struct Calibration {
    enum class Kind { permutation, gaussian_plugin, oracle_theory, mc_null };
    Kind kind = Kind::permutation;
    int resamples = 199;  // permutation / mc_null, >= 100
    std::optional<models::CovarianceModel> cov;  // oracle_theory; auto-filled in simulations

    static Calibration permutation(int k);
    static Calibration gaussian_plugin();
    static Calibration oracle_theory();
    static Calibration oracle_theory(models::CovarianceModel cov);
    static Calibration mc_null(int k);
    std::string name() const;
};

struct TestResult {
    double statistic_value = 0.0;
    double variance_estimate = 0.0;
    double z_score = 0.0;
    double p_value = 1.0;
    bool reject = false;
    std::string calibration;
    double alpha = 0.05;
};

// One two-sample test. Rejection is one-sided (upper tail). Permutation uses
// K seeded relabelings of the pooled sample with p = (1 + #{perm >= obs}) /
// (K + 1); plugin and oracle studentize and compare one-sided. The bandwidth
// is resolved once on the original data and held fixed across relabelings.
// mc_null needs the generating spec and is only available via estimate_power.
TestResult run_test(const Sample& x, const Sample& y, const StatisticSpec& spec,
                    const Calibration& cal, double alpha, std::uint64_t seed);

struct PowerRow {
    std::string statistic;
    int d = 0;
    int n = 0;
    std::string bandwidth_rule;
    std::string budget;
    std::string calibration;
    double alpha = 0.05;
    int reps = 0;
    double power = 0.0;
    double stderr_ = 0.0;  // sqrt(p (1-p) / reps)
    std::uint64_t master_seed = 0;
};

struct PowerCurve {
    std::string statistic;
    std::vector<PowerRow> rows;
};

// Rejection rate of one statistic over `reps` independent dataset draws.
PowerRow estimate_power(const DistributionSpec& p, const DistributionSpec& q, int n,
                        const StatisticSpec& spec, const Calibration& cal, double alpha, int reps,
                        std::uint64_t master_seed, int threads = 0);

// Same, for several statistics evaluated on shared per-repetition data (and
// shared permutation relabelings), the way the experiment figures are drawn.
std::vector<PowerRow> estimate_power_set(const DistributionSpec& p, const DistributionSpec& q,
                                         int n, std::span<const StatisticSpec> specs,
                                         const Calibration& cal, double alpha, int reps,
                                         std::uint64_t master_seed, int threads = 0);

enum class Preset {
    exp1_normal,
    exp1_laplace,
    exp1_beta,
    exp1_mixture,
    exp2,
    exp4,
    exp5_diag,
    exp5_nondiag,
};

std::string preset_name(Preset preset);
Preset preset_from_name(const std::string& name);

struct ExperimentOptions {
    std::vector<int> grid;  // d values (n = d), or n values for exp5; empty = default
    int reps = 100;
    std::uint64_t master_seed = 1;
    Calibration cal = Calibration::permutation(199);
    double alpha = 0.05;
    int threads = 0;  // 0 = hardware default (HDTEST_THREADS overrides)
};

// Runs the legend statistic set over the preset grid, one PowerCurve per
// statistic.
std::vector<PowerCurve> run_experiment(Preset preset, const ExperimentOptions& options);

// Builds the (P, Q) pair of one preset condition; the covariance seed of the
// random-rotation constructions is derived from the master seed and d.
std::pair<DistributionSpec, DistributionSpec> preset_pair(Preset preset, int d,
                                                          std::uint64_t master_seed);

// Chunked parallel loop; fn(i) for i in [0, count). Exceptions propagate.
void parallel_for(int count, int threads, const std::function<void(int)>& fn);
int default_threads();

}  // namespace hdtest::harness
