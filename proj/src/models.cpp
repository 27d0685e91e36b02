#include "hdtest/models.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <sstream>
#include <stdexcept>

namespace hdtest::models {

namespace {

void require_finite(const Eigen::MatrixXd& m, const char* what) {
    if (!m.allFinite()) throw std::invalid_argument(std::string("non-finite ") + what);
}

}  // namespace

CovarianceModel CovarianceModel::identity(int d) { return scaled_identity(d, 1.0); }

CovarianceModel CovarianceModel::scaled_identity(int d, double scale) {
    if (d < 1 || scale <= 0.0) throw std::invalid_argument("scaled_identity: need d >= 1 and scale > 0");
    CovarianceModel m;
    m.factor = std::sqrt(scale) * Eigen::MatrixXd::Identity(d, d);
    m.sigma = scale * Eigen::MatrixXd::Identity(d, d);
    m.trace_sigma = scale * d;
    m.trace_sigma_sq = scale * scale * d;
    return m;
}

CovarianceModel CovarianceModel::from_sigma(const Eigen::MatrixXd& sigma) {
    require_finite(sigma, "sigma");
    if (sigma.rows() != sigma.cols()) throw std::invalid_argument("from_sigma: sigma must be square");
    Eigen::LLT<Eigen::MatrixXd> llt(sigma);
    if (llt.info() != Eigen::Success) throw std::invalid_argument("from_sigma: sigma is not positive definite");
    CovarianceModel m;
    m.factor = llt.matrixL();
    m.sigma = sigma;
    m.trace_sigma = sigma.trace();
    m.trace_sigma_sq = sigma.squaredNorm();  // Tr(S^2) = ||S||_F^2 for symmetric S
    return m;
}

CovarianceModel CovarianceModel::from_factor(const Eigen::MatrixXd& factor) {
    require_finite(factor, "factor");
    if (factor.cols() < factor.rows()) throw std::invalid_argument("from_factor: latent dim must be >= data dim");
    CovarianceModel m;
    m.factor = factor;
    m.sigma = factor * factor.transpose();
    m.trace_sigma = m.sigma.trace();
    m.trace_sigma_sq = m.sigma.squaredNorm();
    return m;
}

CovarianceModel CovarianceModel::scaled(double scale) const {
    if (scale <= 0.0) throw std::invalid_argument("scaled: scale must be > 0");
    CovarianceModel m;
    m.factor = std::sqrt(scale) * factor;
    m.sigma = scale * sigma;
    m.trace_sigma = scale * trace_sigma;
    m.trace_sigma_sq = scale * scale * trace_sigma_sq;
    return m;
}

double noise_variance(NoiseFamily family) {
    switch (family) {
        case NoiseFamily::gaussian: return 1.0;
        case NoiseFamily::laplace_unit: return 1.0;
        case NoiseFamily::uniform_beta11: return 1.0 / 12.0;
        case NoiseFamily::gaussian_scale_mixture: return 2.0;  // (1+2+3)/3
    }
    throw std::logic_error("unreachable");
}

double noise_mean(NoiseFamily family) {
    return family == NoiseFamily::uniform_beta11 ? 0.5 : 0.0;
}

std::string family_name(NoiseFamily family) {
    switch (family) {
        case NoiseFamily::gaussian: return "gaussian";
        case NoiseFamily::laplace_unit: return "laplace_unit";
        case NoiseFamily::uniform_beta11: return "uniform_beta11";
        case NoiseFamily::gaussian_scale_mixture: return "gaussian_scale_mixture";
    }
    throw std::logic_error("unreachable");
}

NoiseFamily family_from_name(const std::string& name) {
    if (name == "gaussian") return NoiseFamily::gaussian;
    if (name == "laplace_unit") return NoiseFamily::laplace_unit;
    if (name == "uniform_beta11") return NoiseFamily::uniform_beta11;
    if (name == "gaussian_scale_mixture") return NoiseFamily::gaussian_scale_mixture;
    throw std::invalid_argument("unknown noise family: " + name);
}

namespace {

// One latent row, filled coordinate by coordinate. The mixture draws its
// scale once per row (the mixture is over whole vectors, so coordinates are
// uncorrelated but share the scale).
void draw_latent_row(NoiseFamily family, Rng& rng, Eigen::VectorXd& row) {
    const auto dim = row.size();
    switch (family) {
        case NoiseFamily::gaussian:
            for (Eigen::Index k = 0; k < dim; ++k) row[k] = rng.normal();
            return;
        case NoiseFamily::laplace_unit: {
            const double scale = 1.0 / std::sqrt(2.0);  // variance 2*scale^2 = 1
            for (Eigen::Index k = 0; k < dim; ++k) row[k] = rng.laplace(scale);
            return;
        }
        case NoiseFamily::uniform_beta11:
            for (Eigen::Index k = 0; k < dim; ++k) row[k] = rng.uniform();
            return;
        case NoiseFamily::gaussian_scale_mixture: {
            const double u = rng.uniform();
            const double scale = u < 1.0 / 3.0 ? 1.0 : (u < 2.0 / 3.0 ? 2.0 : 3.0);
            const double sd = std::sqrt(scale);
            for (Eigen::Index k = 0; k < dim; ++k) row[k] = sd * rng.normal();
            return;
        }
    }
    throw std::logic_error("unreachable");
}

}  // namespace

Sample sample(const DistributionSpec& spec, int n, std::uint64_t seed) {
    if (n < 2) throw std::invalid_argument("sample: need n >= 2");
    require_finite(spec.cov.factor, "factor");
    if (!spec.mean.allFinite()) throw std::invalid_argument("sample: non-finite mean");
    const int d = spec.cov.dim();
    if (spec.mean.size() != d) throw std::invalid_argument("sample: mean dimension mismatch");

    const bool identity_factor = spec.cov.factor.isIdentity(0.0);
    Rng rng(seed);
    Eigen::VectorXd z(spec.cov.latent_dim());
    Sample out;
    out.data.resize(n, d);
    for (int i = 0; i < n; ++i) {
        draw_latent_row(spec.noise, rng, z);
        if (identity_factor) {
            out.data.row(i) = (z + spec.mean).transpose();
        } else {
            out.data.row(i) = (spec.cov.factor * z + spec.mean).transpose();
        }
    }
    return out;
}

std::pair<DistributionSpec, DistributionSpec> make_experiment1_pair(NoiseFamily family, int d) {
    if (d < 1) throw std::invalid_argument("make_experiment1_pair: need d >= 1");
    double shift = 0.0;
    switch (family) {
        case NoiseFamily::gaussian:
        case NoiseFamily::laplace_unit:
            shift = 1.0 / std::sqrt(static_cast<double>(d));
            break;
        case NoiseFamily::uniform_beta11:
            shift = 1.0 / std::sqrt(12.0 * d);
            break;
        case NoiseFamily::gaussian_scale_mixture:
            shift = std::sqrt(2.0 / d);
            break;
    }
    DistributionSpec p;
    p.noise = family;
    p.cov = CovarianceModel::identity(d);
    p.mean = Eigen::VectorXd::Zero(d);
    DistributionSpec q = p;
    q.mean = Eigen::VectorXd::Constant(d, shift);
    return {p, q};
}

namespace {

// Diagonal of sixth powers of an equally spaced grid on [0.01, 1].
Eigen::VectorXd experiment_lambda(int d) {
    Eigen::VectorXd lam(d);
    for (int i = 0; i < d; ++i) {
        const double x = 0.01 + (1.0 - 0.01) * static_cast<double>(i) / static_cast<double>(d - 1);
        lam[i] = std::pow(x, 6);
    }
    return lam;
}

// Orthonormal basis from the eigenvectors of (G + G^T)/2 with G a seeded
// Gaussian matrix. Columns get a deterministic sign: first entry with
// magnitude above a tiny threshold is made positive.
Eigen::MatrixXd random_orthonormal(int d, std::uint64_t seed) {
    Rng rng(seed);
    Eigen::MatrixXd g(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) g(i, j) = rng.normal();
    const Eigen::MatrixXd sym = 0.5 * (g + g.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym);
    Eigen::MatrixXd u = solver.eigenvectors();
    for (int j = 0; j < d; ++j) {
        for (int i = 0; i < d; ++i) {
            if (std::fabs(u(i, j)) > 1e-12) {
                if (u(i, j) < 0.0) u.col(j) = -u.col(j);
                break;
            }
        }
    }
    return u;
}

}  // namespace

CovarianceModel make_experiment2_covariance(int d, std::uint64_t seed) {
    if (d < 2) throw std::invalid_argument("make_experiment2_covariance: need d >= 2");
    Eigen::VectorXd lam = experiment_lambda(d);
    lam *= static_cast<double>(d) / lam.sum();  // trace d
    const Eigen::MatrixXd u = random_orthonormal(d, seed);
    const Eigen::MatrixXd sigma = u * lam.asDiagonal() * u.transpose();
    CovarianceModel m;
    // U sqrt(L) is an exact factor; Cholesky of the assembled sigma is not
    // reliable here (eigenvalues span ~1e-12 .. 2).
    m.factor = u * lam.cwiseSqrt().asDiagonal();
    m.sigma = sigma;
    m.trace_sigma = lam.sum();
    m.trace_sigma_sq = lam.squaredNorm();
    return m;
}

std::pair<DistributionSpec, DistributionSpec> make_experiment4_pair(int d, std::uint64_t seed) {
    if (d < 2) throw std::invalid_argument("make_experiment4_pair: need d >= 2");
    const Eigen::VectorXd lam = experiment_lambda(d);  // un-normalized here
    const Eigen::MatrixXd u = random_orthonormal(d, seed);
    const double fro = lam.norm();  // ||U L U^T||_F = ||L||_F
    const double a = 50.0 / fro;

    DistributionSpec p;
    p.noise = NoiseFamily::gaussian;
    p.cov = CovarianceModel::scaled_identity(d, a);
    p.mean = Eigen::VectorXd::Zero(d);

    const Eigen::VectorXd lam2 = a * (lam.array() + 1.0).matrix();
    const Eigen::MatrixXd sigma2 = u * lam2.asDiagonal() * u.transpose();
    DistributionSpec q;
    q.noise = NoiseFamily::gaussian;
    q.cov.factor = u * lam2.cwiseSqrt().asDiagonal();
    q.cov.sigma = sigma2;
    q.cov.trace_sigma = lam2.sum();
    q.cov.trace_sigma_sq = lam2.squaredNorm();
    q.mean = Eigen::VectorXd::Zero(d);
    return {p, q};
}

std::string GeneratorConfig::to_string() const {
    std::ostringstream out;
    out << "family=" << family << " d=" << d << " shift=" << shift_kind << " cov=" << cov_kind
        << " seed=" << seed;
    return out.str();
}

GeneratorConfig GeneratorConfig::parse(const std::string& text) {
    GeneratorConfig cfg;
    std::istringstream in(text);
    std::string token;
    while (in >> token) {
        const auto eq = token.find('=');
        if (eq == std::string::npos) throw std::invalid_argument("GeneratorConfig: expected key=value, got " + token);
        const std::string key = token.substr(0, eq);
        const std::string value = token.substr(eq + 1);
        if (key == "family") cfg.family = value;
        else if (key == "d") cfg.d = std::stoi(value);
        else if (key == "shift") cfg.shift_kind = value;
        else if (key == "cov") cfg.cov_kind = value;
        else if (key == "seed") cfg.seed = std::stoull(value);
        else throw std::invalid_argument("GeneratorConfig: unknown key " + key);
    }
    return cfg;
}

std::pair<DistributionSpec, DistributionSpec> GeneratorConfig::build() const {
    const NoiseFamily fam = family_from_name(family);
    if (cov_kind == "experiment4") {
        if (shift_kind != "none") throw std::invalid_argument("experiment4 has no mean shift");
        return make_experiment4_pair(d, seed);
    }

    std::pair<DistributionSpec, DistributionSpec> pair = make_experiment1_pair(fam, d);
    if (cov_kind == "experiment2") {
        const CovarianceModel cov = make_experiment2_covariance(d, seed);
        pair.first.cov = cov;
        pair.second.cov = cov;
    } else if (cov_kind != "identity") {
        throw std::invalid_argument("unknown covariance kind: " + cov_kind);
    }
    if (shift_kind == "none") {
        pair.second.mean = pair.first.mean;
    } else if (shift_kind != "experiment1") {
        throw std::invalid_argument("unknown shift kind: " + shift_kind);
    }
    return pair;
}

}  // namespace hdtest::models
