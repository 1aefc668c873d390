#include "wprime/discretize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace wprime {

namespace {

void require_in_domain(const LpvStateSpace& model, std::span<const double> p) {
    if (!validate_point(model.domain(), p)) {
        std::ostringstream os;
        os << "scheduling point (";
        for (std::size_t i = 0; i < p.size(); ++i) os << (i ? ", " : "") << p[i];
        os << ") lies outside the scheduling domain";
        throw DomainError(os.str());
    }
}

Matrix loop_free_matrix(const Matrix& a_p, double ts) {
    return Matrix::Identity(a_p.rows(), a_p.cols()) - a_p * (ts / 2.0);
}

/// Factorizes I - A Ts/2 and rejects it when numerically singular.
Eigen::PartialPivLU<Matrix> factor_checked(const Matrix& a_p, double ts) {
    Eigen::PartialPivLU<Matrix> lu(loop_free_matrix(a_p, ts));
    const double det = lu.determinant();
    if (!(std::abs(det) >= singularity_threshold(a_p, ts))) {
        std::ostringstream os;
        os << "I - A(p) Ts/2 is singular (|det| = " << std::abs(det) << ", Ts = " << ts << ")";
        throw WellposednessError(os.str(), a_p, ts);
    }
    return lu;
}

}  // namespace

DiscretizationConfig::DiscretizationConfig(double ts) : ts_(ts) {
    if (!(ts > 0.0) || !std::isfinite(ts)) {
        std::ostringstream os;
        os << "sampling time must be positive and finite (got " << ts << ")";
        throw DomainError(os.str());
    }
}

double singularity_threshold(const Matrix& a_p, double ts) {
    const double scale = a_p.size() == 0 ? 0.0 : a_p.cwiseAbs().maxCoeff() * ts / 2.0;
    return 1e-12 * std::max(1.0, scale);
}

Matrix phi(const Matrix& a_p, const DiscretizationConfig& cfg) {
    if (a_p.rows() != a_p.cols()) throw ModelError(ErrorCode::Dim, "phi needs a square matrix");
    const auto lu = factor_checked(a_p, cfg.ts());
    return lu.solve(Matrix::Identity(a_p.rows(), a_p.cols()));
}

SigmaRealization sigma_step(const LpvStateSpace& model, std::span<const double> p,
                            const DiscretizationConfig& cfg) {
    require_in_domain(model, p);
    const double ts = cfg.ts();
    const Matrix a = model.A()(p);
    const Matrix ph = phi(a, cfg);
    const Matrix half = ph * (ts / 2.0);
    SigmaRealization s;
    s.m11 = Matrix::Identity(a.rows(), a.cols()) + ph * a * ts;
    s.m12 = 2.0 * ph;
    s.m21 = half;
    s.m22 = half;
    return s;
}

StepMatrices dt_step_matrices(const LpvStateSpace& model, std::span<const double> p,
                              const DiscretizationConfig& cfg) {
    const SigmaRealization s = sigma_step(model, p, cfg);
    const Matrix b = model.B()(p);
    const Matrix c = model.C()(p);
    const Matrix d = model.D()(p);
    StepMatrices m;
    m.Axi = s.m11;
    m.Bxi = s.m12 * b;
    m.Cxi = c * s.m21;
    m.Xu = s.m22 * b;
    m.Dxi = c * m.Xu + d;
    m.Xxi = s.m21;
    return m;
}

StepMatrices tustin_frozen(const LpvStateSpace& model, std::span<const double> p,
                           const DiscretizationConfig& cfg) {
    require_in_domain(model, p);
    const double ts = cfg.ts();
    const Matrix a = model.A()(p);
    const Matrix b = model.B()(p);
    const Matrix c = model.C()(p);
    const Matrix d = model.D()(p);
    const auto lu = factor_checked(a, ts);
    const auto n = a.rows();
    const Matrix ph = lu.solve(Matrix::Identity(n, n));
    const Matrix phi_b = lu.solve(b);

    StepMatrices m;
    m.Axi = lu.solve(Matrix::Identity(n, n) + a * (ts / 2.0));
    m.Bxi = phi_b * ts;
    m.Cxi = c * ph;
    m.Dxi = d + c * phi_b * (ts / 2.0);
    m.Xxi = Matrix::Identity(n, n);
    m.Xu = Matrix::Zero(n, b.cols());
    return m;
}

double similarity_residual(const StepMatrices& w, const StepMatrices& t, const DiscretizationConfig& cfg) {
    const double ts = cfg.ts();
    auto block = [](const Matrix& got, const Matrix& ref) {
        if (got.rows() != ref.rows() || got.cols() != ref.cols()) {
            throw ModelError(ErrorCode::Dim, "step matrices differ in shape");
        }
        if (ref.size() == 0) return 0.0;
        return (got - ref).cwiseAbs().maxCoeff() / std::max(1.0, ref.cwiseAbs().maxCoeff());
    };
    return std::max({block(w.Axi, t.Axi), block(w.Bxi, (2.0 / ts) * t.Bxi), block(w.Cxi, (ts / 2.0) * t.Cxi),
                     block(w.Dxi, t.Dxi)});
}

Matrix rinv_matrices(std::size_t n_x, const DiscretizationConfig& cfg) {
    if (n_x == 0) throw ModelError(ErrorCode::Dim, "rinv_matrices needs n_x >= 1");
    const auto n = static_cast<Eigen::Index>(n_x);
    const Matrix eye = Matrix::Identity(n, n);
    Matrix out(2 * n, 2 * n);
    out << eye, 2.0 * eye, (cfg.ts() / 2.0) * eye, (cfg.ts() / 2.0) * eye;
    return out;
}

double unit_uniform(std::uint64_t bits) noexcept {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

WellposednessReport wellposedness_check(const LpvStateSpace& model, const DiscretizationConfig& cfg,
                                        std::size_t grid_per_dim, std::size_t random_samples,
                                        std::uint64_t seed) {
    if (grid_per_dim < 2) throw DomainError("grid_per_dim must be at least 2");
    const auto& dom = model.domain();
    const std::size_t n_p = dom.dim();
    const double ts = cfg.ts();

    WellposednessReport report;
    report.ts = ts;
    report.min_abs_det = std::numeric_limits<double>::infinity();

    auto visit = [&](const std::vector<double>& p) {
        const Matrix a = model.A()(p);
        const Matrix m = loop_free_matrix(a, ts);
        const double abs_det = std::abs(Eigen::PartialPivLU<Matrix>(m).determinant());
        const Eigen::VectorXd sv = Eigen::JacobiSVD<Matrix>(m).singularValues();
        const double smin = sv(sv.size() - 1);
        const double cond = smin > 0.0 ? sv(0) / smin : std::numeric_limits<double>::infinity();

        ++report.samples_checked;
        if (abs_det < report.min_abs_det) {
            report.min_abs_det = abs_det;
            report.argmin_p = p;
        }
        if (!(cond <= report.max_condition_number)) report.max_condition_number = cond;
        if (abs_det < singularity_threshold(a, ts)) report.singular_points.push_back(p);
    };

    for (const auto& v : dom.vertices()) visit(v);

    std::vector<std::size_t> idx(n_p, 0);
    std::vector<double> p(n_p);
    for (bool done = false; !done;) {
        for (std::size_t i = 0; i < n_p; ++i) {
            const double frac = static_cast<double>(idx[i]) / static_cast<double>(grid_per_dim - 1);
            p[i] = idx[i] + 1 == grid_per_dim ? dom.upper()[i]
                                              : dom.lower()[i] + (dom.upper()[i] - dom.lower()[i]) * frac;
        }
        visit(p);
        std::size_t d = n_p;
        while (d > 0) {
            --d;
            if (++idx[d] < grid_per_dim) break;
            idx[d] = 0;
            if (d == 0) done = true;
        }
    }

    std::mt19937_64 rng(seed);
    for (std::size_t s = 0; s < random_samples; ++s) {
        for (std::size_t i = 0; i < n_p; ++i) {
            p[i] = dom.lower()[i] + (dom.upper()[i] - dom.lower()[i]) * unit_uniform(rng());
        }
        visit(p);
    }

    report.passed = report.singular_points.empty();
    return report;
}

}  // namespace wprime
