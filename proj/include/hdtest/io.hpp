#pragma once

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

#include "hdtest/harness.hpp"
#include "hdtest/verify.hpp"

// File surfaces of the CLI: delimited numeric input, the power-curve CSV
// schema, the run manifest, and a dependency-free SVG line chart. All output
// uses '.' decimals, LF line endings and fixed formats, so repeated runs are
// byte-identical.

namespace hdtest::io {

// Numeric matrix from delimited text (commas and/or whitespace), one
// observation per row. Throws std::runtime_error with a line/column
// diagnostic on ragged rows or non-numeric cells.
Eigen::MatrixXd read_matrix(const std::string& path);

// Shortest-round-trip formatting ("%.17g" trimmed) for statistic values.
std::string format_double(double v);
// Fixed six decimals, for power/stderr columns.
std::string format_fixed(double v);

inline constexpr const char* kPowerCsvHeader =
    "statistic,d,n,bandwidth_rule,budget,calibration,alpha,reps,power,stderr,master_seed";

std::string power_csv(const std::vector<harness::PowerCurve>& curves);

inline constexpr const char* kMomentCsvHeader =
    "quantity,closed_form,mc_estimate,mc_stderr,n_draws,z_discrepancy";

std::string moment_csv(const std::vector<verify::MomentReport>& reports);

struct Manifest {
    std::vector<std::pair<std::string, std::string>> entries;

    void add(const std::string& key, const std::string& value);
    void add(const std::string& key, double value);
    void add(const std::string& key, long long value);
    std::string to_string() const;  // "key = value" lines
};

void write_file(const std::string& path, const std::string& content);

// Single-plot SVG 1.1 line chart; one polyline per curve, x from the rows'
// d (or n when x_is_n), y = power in [0, 1].
std::string power_svg(const std::vector<harness::PowerCurve>& curves, bool x_is_n,
                      const std::string& title);

}  // namespace hdtest::io
