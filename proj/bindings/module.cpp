// Python bindings for the main operations: sampling under the data model,
// the quadratic/block/linear statistics, bandwidth selection, closed-form
// power, and single tests / power estimation.

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "hdtest/bandwidth.hpp"
#include "hdtest/harness.hpp"
#include "hdtest/models.hpp"
#include "hdtest/statistics.hpp"
#include "hdtest/theory.hpp"
#include "hdtest/verify.hpp"

namespace py = pybind11;
using namespace hdtest;

namespace {

models::Sample as_sample(const Eigen::MatrixXd& data) { return models::Sample{data}; }

stats::KernelOrDistance kernel_from(const std::string& name, double bandwidth,
                                    double trace_sigma) {
    if (name == "linear") return stats::LinearKernel{};
    if (name == "gaussian") return stats::make_gaussian(bandwidth);
    if (name == "euclidean") return stats::EuclideanDistance{};
    if (name == "shifted_euclidean")
        return stats::make_shifted_euclidean(bandwidth * bandwidth, trace_sigma);
    throw std::invalid_argument("unknown kernel: " + name);
}

harness::Calibration calibration_from(const std::string& name, int resamples) {
    if (name == "permutation") return harness::Calibration::permutation(resamples);
    if (name == "plugin") return harness::Calibration::gaussian_plugin();
    if (name == "oracle") return harness::Calibration::oracle_theory();
    if (name == "mc_null") return harness::Calibration::mc_null(resamples);
    throw std::invalid_argument("unknown calibration: " + name);
}

py::dict result_dict(const harness::TestResult& r) {
    py::dict d;
    d["statistic_value"] = r.statistic_value;
    d["variance_estimate"] = r.variance_estimate;
    d["z_score"] = r.z_score;
    d["p_value"] = r.p_value;
    d["reject"] = r.reject;
    d["calibration"] = r.calibration;
    d["alpha"] = r.alpha;
    return d;
}

py::dict row_dict(const harness::PowerRow& row) {
    py::dict d;
    d["statistic"] = row.statistic;
    d["d"] = row.d;
    d["n"] = row.n;
    d["bandwidth_rule"] = row.bandwidth_rule;
    d["budget"] = row.budget;
    d["calibration"] = row.calibration;
    d["alpha"] = row.alpha;
    d["reps"] = row.reps;
    d["power"] = row.power;
    d["stderr"] = row.stderr_;
    d["master_seed"] = row.master_seed;
    return d;
}

}  // namespace

PYBIND11_MODULE(_hdtest, m) {
    m.doc() = "Kernel, distance and mean-difference two-sample tests for high-dimensional data";
    m.attr("__version__") = "0.1.0";

    // sampling
    m.def(
        "sample_gaussian_shift",
        [](int n, int d, double shift_per_coordinate, std::uint64_t seed) {
            models::DistributionSpec spec;
            spec.noise = models::NoiseFamily::gaussian;
            spec.cov = models::CovarianceModel::identity(d);
            spec.mean = Eigen::VectorXd::Constant(d, shift_per_coordinate);
            return models::sample(spec, n, seed).data;
        },
        py::arg("n"), py::arg("d"), py::arg("shift_per_coordinate") = 0.0, py::arg("seed") = 1,
        "n x d Gaussian sample with identity covariance and a constant mean shift");

    m.def(
        "sample_family",
        [](const std::string& family, int n, int d, std::uint64_t seed) {
            models::DistributionSpec spec;
            spec.noise = models::family_from_name(family);
            spec.cov = models::CovarianceModel::identity(d);
            spec.mean = Eigen::VectorXd::Zero(d);
            return models::sample(spec, n, seed).data;
        },
        py::arg("family"), py::arg("n"), py::arg("d"), py::arg("seed") = 1,
        "Centered n x d sample from one of the noise families");

    m.def(
        "experiment2_covariance",
        [](int d, std::uint64_t seed) { return models::make_experiment2_covariance(d, seed).sigma; },
        py::arg("d"), py::arg("seed") = 1);

    // statistics
    m.def(
        "u_statistic",
        [](const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, const std::string& kernel,
           double bandwidth, double trace_sigma) {
            return stats::u_statistic(as_sample(x), as_sample(y),
                                      kernel_from(kernel, bandwidth, trace_sigma))
                .value;
        },
        py::arg("x"), py::arg("y"), py::arg("kernel") = "gaussian", py::arg("bandwidth") = 1.0,
        py::arg("trace_sigma") = 0.0,
        "Quadratic-time two-sample U-statistic; kernel is linear | gaussian | euclidean | "
        "shifted_euclidean");

    m.def(
        "block_statistic",
        [](const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, const std::string& kernel,
           int blocks, double bandwidth, double trace_sigma) {
            const auto v = stats::block_statistic(as_sample(x), as_sample(y),
                                                  kernel_from(kernel, bandwidth, trace_sigma), blocks);
            return py::make_tuple(v.value, v.per_block_values);
        },
        py::arg("x"), py::arg("y"), py::arg("kernel"), py::arg("blocks"), py::arg("bandwidth") = 1.0,
        py::arg("trace_sigma") = 0.0);

    m.def(
        "linear_statistic",
        [](const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, const std::string& kernel,
           double bandwidth, double trace_sigma) {
            return stats::linear_statistic(as_sample(x), as_sample(y),
                                           kernel_from(kernel, bandwidth, trace_sigma))
                .value;
        },
        py::arg("x"), py::arg("y"), py::arg("kernel") = "linear", py::arg("bandwidth") = 1.0,
        py::arg("trace_sigma") = 0.0);

    m.def(
        "median_heuristic",
        [](const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) {
            const auto med = bandwidth::median_heuristic(as_sample(x), as_sample(y));
            return py::make_tuple(med.bandwidth_sq, med.degenerate);
        },
        py::arg("x"), py::arg("y"),
        "Median pooled pairwise squared distance; returns (bandwidth_sq, degenerate)");

    // theory
    m.def("power_general",
          [](int n, double trace_sigma_sq, double delta_sq, double delta_sigma_delta, double alpha) {
              theory::ProblemParams p;
              p.n = n;
              p.trace_sigma_sq = trace_sigma_sq;
              p.delta_sq = delta_sq;
              p.delta_sigma_delta = delta_sigma_delta;
              p.alpha = alpha;
              return theory::power_general(p);
          },
          py::arg("n"), py::arg("trace_sigma_sq"), py::arg("delta_sq"),
          py::arg("delta_sigma_delta"), py::arg("alpha") = 0.05);
    m.def("power_spherical", &theory::power_spherical, py::arg("n"), py::arg("d"), py::arg("psi"),
          py::arg("alpha") = 0.05);
    m.def("power_block", &theory::power_block, py::arg("n"), py::arg("d"), py::arg("blocks"),
          py::arg("psi"), py::arg("alpha") = 0.05);
    m.def("power_linear", &theory::power_linear, py::arg("n"), py::arg("d"), py::arg("psi"),
          py::arg("alpha") = 0.05);
    m.def("minimax_power", &theory::minimax_power, py::arg("n"), py::arg("d"), py::arg("rho"),
          py::arg("sigma"), py::arg("alpha") = 0.05);
    m.def("normal_means_power", &theory::normal_means_power, py::arg("d"), py::arg("rho_sq"),
          py::arg("alpha") = 0.05);
    m.def("chi2_gaussian_cdf_approx", &theory::chi2_gaussian_cdf_approx, py::arg("x"), py::arg("d"),
          py::arg("noncentrality") = 0.0);
    m.def(
        "snr_regime",
        [](int n, int d, double psi) { return theory::snr_tag_name(theory::snr_regime(n, d, psi).tag); },
        py::arg("n"), py::arg("d"), py::arg("psi"));

    // harness
    m.def(
        "run_test",
        [](const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, const std::string& statistic,
           const std::string& rule, const std::string& budget, const std::string& calibration,
           int resamples, double alpha, std::uint64_t seed) {
            harness::StatisticSpec spec;
            spec.family = harness::stat_family_from_name(statistic);
            spec.rule = bandwidth::BandwidthRule::parse(rule);
            spec.budget = stats::ComputeBudget::parse(budget);
            return result_dict(harness::run_test(as_sample(x), as_sample(y), spec,
                                                 calibration_from(calibration, resamples), alpha,
                                                 seed));
        },
        py::arg("x"), py::arg("y"), py::arg("statistic") = "gmmd", py::arg("rule") = "median",
        py::arg("budget") = "quadratic", py::arg("calibration") = "permutation",
        py::arg("resamples") = 199, py::arg("alpha") = 0.05, py::arg("seed") = 1);

    m.def(
        "estimate_power_experiment1",
        [](const std::string& family, int d, int n, const std::string& statistic,
           const std::string& rule, const std::string& budget, const std::string& calibration,
           int resamples, double alpha, int reps, std::uint64_t master_seed) {
            const auto pair = models::make_experiment1_pair(models::family_from_name(family), d);
            harness::StatisticSpec spec;
            spec.family = harness::stat_family_from_name(statistic);
            spec.rule = bandwidth::BandwidthRule::parse(rule);
            spec.budget = stats::ComputeBudget::parse(budget);
            return row_dict(harness::estimate_power(pair.first, pair.second, n, spec,
                                                    calibration_from(calibration, resamples), alpha,
                                                    reps, master_seed));
        },
        py::arg("family"), py::arg("d"), py::arg("n"), py::arg("statistic") = "ucq",
        py::arg("rule") = "median", py::arg("budget") = "quadratic",
        py::arg("calibration") = "oracle", py::arg("resamples") = 199, py::arg("alpha") = 0.05,
        py::arg("reps") = 100, py::arg("master_seed") = 1,
        "Monte-Carlo power on the Experiment-1 mean-shift pair");

    // verify
    m.def(
        "check_h2_identity",
        [](const Eigen::VectorXd& x, const Eigen::VectorXd& xp, const Eigen::VectorXd& y,
           const Eigen::VectorXd& yp) { return verify::check_h2_identity(x, xp, y, yp); },
        py::arg("x"), py::arg("xp"), py::arg("y"), py::arg("yp"));
}
