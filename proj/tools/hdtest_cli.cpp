// Command-line surface: run a two-sample test on delimited data files, run
// the experiment presets, evaluate the closed-form power expressions, or run
// the verification oracles.
//
// Exit codes: 0 = success / no rejection, 3 = test rejected, 2 = input or
// usage error, 1 = verification threshold failure.

#include <chrono>
#include <filesystem>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "hdtest/harness.hpp"
#include "hdtest/io.hpp"
#include "hdtest/models.hpp"
#include "hdtest/theory.hpp"
#include "hdtest/verify.hpp"

namespace {

constexpr const char* kVersion = "0.1.0";

using namespace hdtest;

harness::StatisticSpec parse_statistic(const std::string& family, const std::string& rule,
                                       const std::string& budget) {
    harness::StatisticSpec spec;
    spec.family = harness::stat_family_from_name(family);
    spec.rule = bandwidth::BandwidthRule::parse(rule);
    spec.budget = stats::ComputeBudget::parse(budget);
    return spec;
}

harness::Calibration parse_calibration(const std::string& text) {
    if (text.rfind("permutation:", 0) == 0)
        return harness::Calibration::permutation(std::stoi(text.substr(12)));
    if (text == "permutation") return harness::Calibration::permutation(199);
    if (text == "plugin") return harness::Calibration::gaussian_plugin();
    throw CLI::ValidationError("calibration",
                               "expected permutation[:K] or plugin (oracle and mc_null need a "
                               "known generating model and are simulation-only)");
}

int cmd_test(const std::string& x_path, const std::string& y_path, const std::string& family,
             const std::string& rule, const std::string& budget, const std::string& calibration,
             double alpha, std::uint64_t seed) {
    models::Sample x{io::read_matrix(x_path)};
    models::Sample y{io::read_matrix(y_path)};
    if (x.n() != y.n())
        throw std::runtime_error("sample sizes differ: " + std::to_string(x.n()) + " vs " +
                                 std::to_string(y.n()));
    if (x.dim() != y.dim())
        throw std::runtime_error("dimensions differ: " + std::to_string(x.dim()) + " vs " +
                                 std::to_string(y.dim()));
    if (x.n() < 2) throw std::runtime_error("need at least 2 rows per sample");

    const harness::StatisticSpec spec = parse_statistic(family, rule, budget);
    const harness::Calibration cal = parse_calibration(calibration);
    const harness::TestResult result = harness::run_test(x, y, spec, cal, alpha, seed);

    std::cout << spec.name() << ": statistic=" << io::format_double(result.statistic_value)
              << " p=" << io::format_double(result.p_value)
              << " reject=" << (result.reject ? "true" : "false") << "\n";
    std::cout << "statistic,n,d,bandwidth_rule,budget,calibration,alpha,value,variance,z,p_value,"
                 "reject,seed\n";
    const bool uses_rule = spec.family == harness::StatFamily::gmmd ||
                           spec.family == harness::StatFamily::eed_gamma;
    std::cout << spec.name() << ',' << x.n() << ',' << x.dim() << ','
              << (uses_rule ? spec.rule.name() : "-") << ',' << spec.budget.name() << ','
              << cal.name() << ',' << io::format_double(alpha) << ','
              << io::format_double(result.statistic_value) << ','
              << io::format_double(result.variance_estimate) << ','
              << io::format_double(result.z_score) << ',' << io::format_double(result.p_value)
              << ',' << (result.reject ? 1 : 0) << ',' << seed << "\n";
    return result.reject ? 3 : 0;
}

int cmd_experiment(const std::string& preset_name, const std::vector<int>& grid, int reps,
                   std::uint64_t seed, const std::string& calibration, double alpha,
                   const std::string& out_dir, bool svg, int threads,
                   const std::string& command_line) {
    const auto start = std::chrono::steady_clock::now();
    const harness::Preset preset = harness::preset_from_name(preset_name);

    harness::ExperimentOptions options;
    options.grid = grid;
    options.reps = reps;
    options.master_seed = seed;
    options.alpha = alpha;
    options.threads = threads;
    if (calibration == "oracle") {
        options.cal = harness::Calibration::oracle_theory();
    } else if (calibration.rfind("mc_null:", 0) == 0) {
        options.cal = harness::Calibration::mc_null(std::stoi(calibration.substr(8)));
    } else {
        options.cal = parse_calibration(calibration);
    }

    const std::vector<harness::PowerCurve> curves = harness::run_experiment(preset, options);

    std::filesystem::create_directories(out_dir);
    const std::string base = (std::filesystem::path(out_dir) / preset_name).string();
    const std::string csv_path = base + ".csv";
    io::write_file(csv_path, io::power_csv(curves));

    std::string svg_path;
    const bool x_is_n =
        preset == harness::Preset::exp5_diag || preset == harness::Preset::exp5_nondiag;
    if (svg) {
        svg_path = base + ".svg";
        io::write_file(svg_path, io::power_svg(curves, x_is_n, preset_name));
    }

    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    io::Manifest manifest;
    manifest.add("tool", std::string("hdtest ") + kVersion);
    manifest.add("command", command_line);
    manifest.add("preset", preset_name);
    manifest.add("calibration", options.cal.name());
    manifest.add("alpha", alpha);
    manifest.add("reps", static_cast<long long>(reps));
    manifest.add("master_seed", std::to_string(seed));
    std::ostringstream grid_text;
    for (std::size_t i = 0; i < curves.front().rows.size(); ++i) {
        if (i) grid_text << " ";
        grid_text << (x_is_n ? curves.front().rows[i].n : curves.front().rows[i].d);
    }
    manifest.add("grid", grid_text.str());
    manifest.add("csv", csv_path);
    if (!svg_path.empty()) manifest.add("svg", svg_path);
    manifest.add("wall_time_seconds", wall);
    io::write_file(base + ".manifest", manifest.to_string());

    std::cout << "wrote " << csv_path << (svg ? " (+svg)" : "") << "\n";
    return 0;
}

int cmd_theory(const std::string& formula, int n, int d, int blocks, double snr, double alpha,
               double trace_sigma, double trace_sigma_sq, double delta_sq,
               double delta_sigma_delta, double rho, double sigma, double rho_sq, double x,
               double noncentrality) {
    std::ostringstream row;
    row << formula << ',';
    if (formula == "power_general") {
        theory::ProblemParams p;
        p.n = n;
        p.d = d;
        p.trace_sigma = trace_sigma;
        p.trace_sigma_sq = trace_sigma_sq;
        p.delta_sq = delta_sq;
        p.delta_sigma_delta = delta_sigma_delta;
        p.alpha = alpha;
        row << "n=" << n << ",trace_sigma_sq=" << io::format_double(trace_sigma_sq)
            << ",delta_sq=" << io::format_double(delta_sq)
            << ",delta_sigma_delta=" << io::format_double(delta_sigma_delta)
            << ",alpha=" << io::format_double(alpha) << ','
            << io::format_double(theory::power_general(p));
    } else if (formula == "power_spherical") {
        row << "n=" << n << ",d=" << d << ",psi=" << io::format_double(snr)
            << ",alpha=" << io::format_double(alpha) << ','
            << io::format_double(theory::power_spherical(n, d, snr, alpha));
    } else if (formula == "power_block") {
        row << "n=" << n << ",d=" << d << ",B=" << blocks << ",psi=" << io::format_double(snr)
            << ",alpha=" << io::format_double(alpha) << ','
            << io::format_double(theory::power_block(n, d, blocks, snr, alpha));
    } else if (formula == "power_linear") {
        row << "n=" << n << ",d=" << d << ",psi=" << io::format_double(snr)
            << ",alpha=" << io::format_double(alpha) << ','
            << io::format_double(theory::power_linear(n, d, snr, alpha));
    } else if (formula == "minimax") {
        row << "n=" << n << ",d=" << d << ",rho=" << io::format_double(rho)
            << ",sigma=" << io::format_double(sigma) << ",alpha=" << io::format_double(alpha) << ','
            << io::format_double(theory::minimax_power(n, d, rho, sigma, alpha));
    } else if (formula == "normal_means") {
        row << "d=" << d << ",rho_sq=" << io::format_double(rho_sq)
            << ",alpha=" << io::format_double(alpha) << ','
            << io::format_double(theory::normal_means_power(d, rho_sq, alpha));
    } else if (formula == "chi2_approx") {
        row << "x=" << io::format_double(x) << ",d=" << d
            << ",noncentrality=" << io::format_double(noncentrality) << ','
            << io::format_double(theory::chi2_gaussian_cdf_approx(x, d, noncentrality));
    } else if (formula == "snr_regime") {
        row << "n=" << n << ",d=" << d << ",psi=" << io::format_double(snr) << ','
            << theory::snr_tag_name(theory::snr_regime(n, d, snr).tag);
    } else if (formula == "median_prediction") {
        row << "trace_sigma=" << io::format_double(trace_sigma)
            << ",delta_sq=" << io::format_double(delta_sq) << ",n=" << n << ','
            << io::format_double(bandwidth::predicted_mean_pairwise(trace_sigma, delta_sq, n));
    } else {
        throw CLI::ValidationError("formula", "unknown formula: " + formula);
    }
    std::cout << row.str() << "\n";
    return 0;
}

int cmd_verify(const std::string& suite, long draws, std::uint64_t seed) {
    using Eigen::MatrixXd;
    using Eigen::VectorXd;
    bool pass = true;

    if (suite == "pairwise_moments" || suite == "quadratic_forms") {
        std::vector<std::pair<std::string, models::CovarianceModel>> sigmas;
        sigmas.emplace_back("identity5", models::CovarianceModel::identity(5));
        VectorXd diag(5);
        diag << 1, 2, 3, 4, 5;
        sigmas.emplace_back("diag1to5",
                            models::CovarianceModel::from_sigma(MatrixXd(diag.asDiagonal())));
        sigmas.emplace_back("experiment2_d20", models::make_experiment2_covariance(20, seed));

        std::vector<verify::MomentReport> all;
        int idx = 0;
        for (const auto& [name, cov] : sigmas) {
            std::vector<verify::MomentReport> reports;
            if (suite == "pairwise_moments") {
                for (int shifted = 0; shifted < 2; ++shifted) {
                    VectorXd delta = VectorXd::Zero(cov.dim());
                    if (shifted) delta[0] = 1.0;
                    auto batch =
                        verify::check_pairwise_moments(cov, delta, draws, derive_seed(seed, idx++));
                    for (auto& r : batch) r.quantity = name + (shifted ? "/shift:" : "/null:") + r.quantity;
                    reports.insert(reports.end(), batch.begin(), batch.end());
                }
            } else {
                auto batch =
                    verify::check_quadratic_form_moments(cov.sigma, draws, derive_seed(seed, idx++));
                for (auto& r : batch) r.quantity = name + ":" + r.quantity;
                reports = std::move(batch);
            }
            all.insert(all.end(), reports.begin(), reports.end());
        }
        for (const auto& r : all) pass = pass && std::fabs(r.z_discrepancy) < 4.0;
        std::cout << io::moment_csv(all);
        return pass ? 0 : 1;
    }

    if (suite == "taylor_link") {
        // Aggregate relative residual over seeded datasets for a bandwidth
        // sweep; the pass threshold applies at bandwidth_sq = 100 Tr(Sigma).
        const int d = 50, n = 50;
        const models::CovarianceModel cov = models::CovarianceModel::identity(d);
        models::DistributionSpec p, q;
        p.noise = q.noise = models::NoiseFamily::gaussian;
        p.cov = q.cov = cov;
        p.mean = VectorXd::Zero(d);
        q.mean = VectorXd::Constant(d, 1.0 / std::sqrt(static_cast<double>(d)));
        std::cout << "bandwidth_sq_over_trace,aggregate_relative_residual\n";
        for (const double factor : {5.0, 20.0, 100.0}) {
            const double bw = std::sqrt(factor * cov.trace_sigma);
            double res_sum = 0.0, ref_sum = 0.0;
            for (int s = 0; s < 100; ++s) {
                const models::Sample x = models::sample(p, n, derive_seed(seed, 11, s));
                const models::Sample y = models::sample(q, n, derive_seed(seed, 12, s));
                const auto link = verify::check_taylor_link(x, y, bw, cov.trace_sigma);
                res_sum += std::fabs(link.residual);
                ref_sum += std::max(std::fabs(link.statistic), std::fabs(link.taylor));
            }
            const double rel = res_sum / ref_sum;
            std::cout << io::format_double(factor) << ',' << io::format_double(rel) << "\n";
            if (factor == 100.0) pass = rel <= 0.05;
        }
        return pass ? 0 : 1;
    }

    if (suite == "h2_identity") {
        Rng rng(seed);
        double worst = 0.0;
        for (int t = 0; t < 10000; ++t) {
            VectorXd x(7), xp(7), y(7), yp(7);
            for (int k = 0; k < 7; ++k) {
                x[k] = 3.0 * rng.normal();
                xp[k] = 3.0 * rng.normal();
                y[k] = 3.0 * rng.normal();
                yp[k] = 3.0 * rng.normal();
            }
            worst = std::max(worst, verify::check_h2_identity(x, xp, y, yp));
        }
        std::cout << "max_abs_deviation," << io::format_double(worst) << "\n";
        return worst <= 1e-9 ? 0 : 1;
    }

    if (suite == "variance_scaling") {
        const models::CovarianceModel cov = models::CovarianceModel::identity(32);
        VectorXd shift = VectorXd::Constant(32, 0.5);
        const auto report =
            verify::check_variance_scaling(cov, {32, 64, 128, 256}, 500, seed, shift);
        std::cout << "n,var_null,var_alt\n";
        for (const auto& row : report.rows)
            std::cout << row.n << ',' << io::format_double(row.var_null) << ','
                      << io::format_double(row.var_alt) << "\n";
        std::cout << "fitted_null_exponent," << io::format_double(report.null_exponent) << "\n";
        std::cout << "fitted_alt_exponent," << io::format_double(report.alt_exponent) << "\n";
        return (report.null_exponent > -2.3 && report.null_exponent < -1.7) ? 0 : 1;
    }

    throw CLI::ValidationError("suite", "unknown suite: " + suite);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"High-dimensional two-sample testing: kernel, distance and mean-difference "
                 "statistics, closed-form power, and Monte-Carlo experiments"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);
    app.footer("Exit codes: 0 success / no rejection, 3 test rejected, 2 input or usage error,\n"
               "1 verification threshold failure.");

    std::ostringstream command_line;
    for (int i = 0; i < argc; ++i) command_line << (i ? " " : "") << argv[i];

    // test
    auto* test = app.add_subcommand("test", "Two-sample test on two delimited data files");
    std::string x_path, y_path;
    std::string family = "gmmd", rule = "median", budget = "quadratic", calibration = "permutation:199";
    double alpha = 0.05;
    std::uint64_t seed = 1;
    test->add_option("x", x_path, "sample X, one observation per row")->required();
    test->add_option("y", y_path, "sample Y, one observation per row")->required();
    test->add_option("--statistic", family, "ucq | gmmd | eed | eed_gamma");
    test->add_option("--bandwidth", rule, "median | mean | pow:<p> | fixed:<bw>");
    test->add_option("--budget", budget, "quadratic | block:<B> | linear");
    test->add_option("--calibration", calibration, "permutation[:K] | plugin");
    test->add_option("--alpha", alpha, "level, default 0.05");
    test->add_option("--seed", seed, "resampling seed");

    // experiment
    auto* experiment = app.add_subcommand("experiment", "Run an experiment preset, emit CSV (+SVG)");
    std::string preset;
    std::vector<int> grid;
    int reps = 100;
    std::uint64_t master_seed = 1;
    std::string exp_cal = "permutation:199";
    double exp_alpha = 0.05;
    std::string out_dir = ".";
    bool svg = false;
    int threads = 0;
    experiment
        ->add_option("preset", preset,
                     "exp1_normal | exp1_laplace | exp1_beta | exp1_mixture | exp2 | exp4 | "
                     "exp5_diag | exp5_nondiag")
        ->required();
    experiment->add_option("--grid", grid, "d grid (n grid for exp5); default 40 80 120 160 200");
    experiment->add_option("--reps", reps, "Monte-Carlo repetitions per grid point");
    experiment->add_option("--seed", master_seed, "master seed");
    experiment->add_option("--calibration", exp_cal, "permutation[:K] | plugin | oracle | mc_null:<K>");
    experiment->add_option("--alpha", exp_alpha, "level");
    experiment->add_option("--out", out_dir, "output directory (default: HDTEST_OUT_DIR or '.')");
    experiment->add_flag("--svg", svg, "also write an SVG line chart");
    experiment->add_option("--threads", threads, "worker threads (0 = hardware)");

    // theory
    auto* theory_cmd = app.add_subcommand("theory", "Evaluate one closed-form expression as a CSV row");
    std::string formula;
    int tn = 100, td = 100, tblocks = 1;
    double tsnr = 0.0, talpha = 0.05, ttrace = 0.0, ttrace_sq = 0.0, tdelta_sq = 0.0, tdsd = 0.0;
    double trho = 0.0, tsigma = 1.0, trho_sq = 0.0, tx = 0.0, tnc = 0.0;
    theory_cmd
        ->add_option("formula", formula,
                     "power_general | power_spherical | power_block | power_linear | minimax | "
                     "normal_means | chi2_approx | snr_regime | median_prediction")
        ->required();
    theory_cmd->add_option("--n", tn);
    theory_cmd->add_option("--d", td);
    theory_cmd->add_option("--blocks,--B", tblocks);
    theory_cmd->add_option("--psi", tsnr, "signal-to-noise ratio");
    theory_cmd->add_option("--alpha", talpha);
    theory_cmd->add_option("--trace-sigma", ttrace);
    theory_cmd->add_option("--trace-sigma-sq", ttrace_sq);
    theory_cmd->add_option("--delta-sq", tdelta_sq);
    theory_cmd->add_option("--delta-sigma-delta", tdsd);
    theory_cmd->add_option("--rho", trho);
    theory_cmd->add_option("--sigma", tsigma);
    theory_cmd->add_option("--rho-sq", trho_sq);
    theory_cmd->add_option("--x", tx);
    theory_cmd->add_option("--noncentrality", tnc);

    // verify
    auto* verify_cmd = app.add_subcommand("verify", "Run a verification oracle suite");
    std::string suite;
    long draws = 100000;
    std::uint64_t vseed = 1;
    verify_cmd
        ->add_option("suite", suite,
                     "pairwise_moments | quadratic_forms | taylor_link | h2_identity | "
                     "variance_scaling")
        ->required();
    verify_cmd->add_option("--draws", draws);
    verify_cmd->add_option("--seed", vseed);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*test) return cmd_test(x_path, y_path, family, rule, budget, calibration, alpha, seed);
        if (*experiment) {
            if (experiment->count("--out") == 0) {
                if (const char* env = std::getenv("HDTEST_OUT_DIR")) out_dir = env;
            }
            return cmd_experiment(preset, grid, reps, master_seed, exp_cal, exp_alpha, out_dir, svg,
                                  threads, command_line.str());
        }
        if (*theory_cmd)
            return cmd_theory(formula, tn, td, tblocks, tsnr, talpha, ttrace, ttrace_sq, tdelta_sq,
                              tdsd, trho, tsigma, trho_sq, tx, tnc);
        if (*verify_cmd) return cmd_verify(suite, draws, vseed);
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
