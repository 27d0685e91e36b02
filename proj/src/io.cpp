#include "hdtest/io.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace hdtest::io {

Eigen::MatrixXd read_matrix(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);

    std::vector<std::vector<double>> rows;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        // commas are treated as whitespace
        for (char& c : line)
            if (c == ',') c = ' ';
        std::istringstream cells(line);
        std::vector<double> row;
        std::string cell;
        int col = 0;
        while (cells >> cell) {
            ++col;
            try {
                std::size_t used = 0;
                const double v = std::stod(cell, &used);
                if (used != cell.size()) throw std::invalid_argument(cell);
                row.push_back(v);
            } catch (const std::exception&) {
                throw std::runtime_error(path + ":" + std::to_string(line_no) + ": column " +
                                         std::to_string(col) + ": not a number: '" + cell + "'");
            }
        }
        if (row.empty()) continue;  // blank line
        if (!rows.empty() && row.size() != rows.front().size())
            throw std::runtime_error(path + ":" + std::to_string(line_no) + ": ragged row, expected " +
                                     std::to_string(rows.front().size()) + " columns, got " +
                                     std::to_string(row.size()));
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw std::runtime_error(path + ": no data rows");

    Eigen::MatrixXd m(rows.size(), rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows.front().size(); ++j) m(i, j) = rows[i][j];
    if (!m.allFinite()) throw std::runtime_error(path + ": non-finite entries");
    return m;
}

std::string format_double(double v) {
    // shortest of %.15g / %.16g / %.17g that round-trips
    for (int prec = 15; prec <= 17; ++prec) {
        char probe[40];
        std::snprintf(probe, sizeof(probe), "%.*g", prec, v);
        double back = 0.0;
        std::sscanf(probe, "%lf", &back);
        if (back == v || prec == 17) return probe;
    }
    return {};
}

std::string format_fixed(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

std::string power_csv(const std::vector<harness::PowerCurve>& curves) {
    std::ostringstream out;
    out << kPowerCsvHeader << "\n";
    for (const auto& curve : curves) {
        for (const auto& row : curve.rows) {
            out << row.statistic << ',' << row.d << ',' << row.n << ',' << row.bandwidth_rule << ','
                << row.budget << ',' << row.calibration << ',' << format_double(row.alpha) << ','
                << row.reps << ',' << format_fixed(row.power) << ',' << format_fixed(row.stderr_)
                << ',' << row.master_seed << "\n";
        }
    }
    return out.str();
}

std::string moment_csv(const std::vector<verify::MomentReport>& reports) {
    std::ostringstream out;
    out << kMomentCsvHeader << "\n";
    for (const auto& r : reports) {
        out << r.quantity << ',' << format_double(r.closed_form) << ','
            << format_double(r.mc_estimate) << ',' << format_double(r.mc_stderr) << ',' << r.n_draws
            << ',' << format_double(r.z_discrepancy) << "\n";
    }
    return out.str();
}

void Manifest::add(const std::string& key, const std::string& value) {
    entries.emplace_back(key, value);
}
void Manifest::add(const std::string& key, double value) { entries.emplace_back(key, format_double(value)); }
void Manifest::add(const std::string& key, long long value) {
    entries.emplace_back(key, std::to_string(value));
}

std::string Manifest::to_string() const {
    std::ostringstream out;
    for (const auto& [key, value] : entries) out << key << " = " << value << "\n";
    return out.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << content;
    if (!out) throw std::runtime_error("write failed: " + path);
}

namespace {

const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                          "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

}  // namespace

std::string power_svg(const std::vector<harness::PowerCurve>& curves, bool x_is_n,
                      const std::string& title) {
    const double width = 640, height = 480;
    const double left = 64, right = 160, top = 40, bottom = 48;
    const double plot_w = width - left - right;
    const double plot_h = height - top - bottom;

    double x_min = 1e300, x_max = -1e300;
    for (const auto& c : curves)
        for (const auto& row : c.rows) {
            const double x = x_is_n ? row.n : row.d;
            x_min = std::min(x_min, x);
            x_max = std::max(x_max, x);
        }
    if (!(x_max > x_min)) {
        x_min -= 1.0;
        x_max += 1.0;
    }
    auto sx = [&](double x) { return left + (x - x_min) / (x_max - x_min) * plot_w; };
    auto sy = [&](double p) { return top + (1.0 - p) * plot_h; };

    std::ostringstream out;
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << width
        << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
    out << "  <rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height
        << "\" fill=\"white\"/>\n";
    out << "  <text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">"
        << title << "</text>\n";

    // axes
    out << "  <line x1=\"" << left << "\" y1=\"" << top + plot_h << "\" x2=\"" << left + plot_w
        << "\" y2=\"" << top + plot_h << "\" stroke=\"black\"/>\n";
    out << "  <line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\""
        << top + plot_h << "\" stroke=\"black\"/>\n";
    for (int t = 0; t <= 5; ++t) {
        const double p = t / 5.0;
        out << "  <text x=\"" << left - 8 << "\" y=\"" << sy(p) + 4
            << "\" text-anchor=\"end\" font-size=\"11\">" << format_fixed(p).substr(0, 3)
            << "</text>\n";
        out << "  <line x1=\"" << left - 4 << "\" y1=\"" << sy(p) << "\" x2=\"" << left << "\" y2=\""
            << sy(p) << "\" stroke=\"black\"/>\n";
    }
    out << "  <text x=\"" << left + plot_w / 2 << "\" y=\"" << height - 12
        << "\" text-anchor=\"middle\" font-size=\"13\">" << (x_is_n ? "sample size" : "dimension")
        << "</text>\n";
    out << "  <text x=\"18\" y=\"" << top + plot_h / 2
        << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 18 "
        << top + plot_h / 2 << ")\">power</text>\n";

    for (std::size_t c = 0; c < curves.size(); ++c) {
        const char* color = kPalette[c % 10];
        out << "  <polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (const auto& row : curves[c].rows)
            out << sx(x_is_n ? row.n : row.d) << "," << sy(row.power) << " ";
        out << "\"/>\n";
        for (const auto& row : curves[c].rows)
            out << "  <circle cx=\"" << sx(x_is_n ? row.n : row.d) << "\" cy=\"" << sy(row.power)
                << "\" r=\"2.5\" fill=\"" << color << "\"/>\n";
        const double ly = top + 16 + 16 * static_cast<double>(c);
        out << "  <line x1=\"" << left + plot_w + 12 << "\" y1=\"" << ly - 4 << "\" x2=\""
            << left + plot_w + 34 << "\" y2=\"" << ly - 4 << "\" stroke=\"" << color
            << "\" stroke-width=\"1.5\"/>\n";
        out << "  <text x=\"" << left + plot_w + 40 << "\" y=\"" << ly
            << "\" font-size=\"11\">" << curves[c].statistic << "</text>\n";
    }
    out << "</svg>\n";
    return out.str();
}

}  // namespace hdtest::io
