#include "wprime/simulate.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "wprime/io.hpp"

namespace wprime {

namespace {

std::span<const double> row_span(const Matrix& m, Eigen::Index k, std::vector<double>& buf) {
    buf.resize(static_cast<std::size_t>(m.cols()));
    for (Eigen::Index j = 0; j < m.cols(); ++j) buf[static_cast<std::size_t>(j)] = m(k, j);
    return buf;
}

std::string point_str(std::span<const double> p) {
    std::string s = "(";
    for (std::size_t i = 0; i < p.size(); ++i) s += (i ? ", " : "") + format_number(p[i]);
    return s + ")";
}

void check_inputs(const LpvStateSpace& model, const DiscretizationConfig& cfg, const Trajectory& traj,
                  const Vector& x0) {
    if (static_cast<std::size_t>(traj.p.cols()) != model.n_p()) {
        throw ModelError(ErrorCode::Dim, "trajectory has " + std::to_string(traj.p.cols()) +
                                             " scheduling channels, model has n_p = " + std::to_string(model.n_p()));
    }
    if (static_cast<std::size_t>(traj.u.cols()) != model.n_u()) {
        throw ModelError(ErrorCode::Dim, "trajectory has " + std::to_string(traj.u.cols()) +
                                             " input channels, model has n_u = " + std::to_string(model.n_u()));
    }
    if (static_cast<std::size_t>(x0.size()) != model.n_x()) {
        throw ModelError(ErrorCode::Dim, "initial state has " + std::to_string(x0.size()) + " entries, model has n_x = " +
                                             std::to_string(model.n_x()));
    }
    if (std::abs(traj.ts - cfg.ts()) > 1e-12 * cfg.ts()) {
        throw DomainError("trajectory sampling time " + format_number(traj.ts) +
                          " differs from the configured Ts " + format_number(cfg.ts()));
    }
    if (traj.size() == 0) throw DomainError("trajectory is empty");
    std::vector<double> buf;
    for (Eigen::Index k = 0; k < traj.size(); ++k) {
        const auto p = row_span(traj.p, k, buf);
        if (!validate_point(model.domain(), p)) {
            throw DomainError("step " + std::to_string(k) + ": p = " + point_str(p) +
                              " lies outside the scheduling domain");
        }
    }
}

[[noreturn]] void rethrow_at_step(const WellposednessError& e, Eigen::Index k, std::span<const double> p) {
    throw WellposednessError("step " + std::to_string(k) + ", p = " + point_str(p) + ": " + e.what(), e.a_p(),
                             e.ts());
}

}  // namespace

Trajectory::Trajectory(double ts_, Matrix p_, Matrix u_) : ts(ts_), p(std::move(p_)), u(std::move(u_)) {
    if (p.rows() != u.rows()) {
        throw ModelError(ErrorCode::Dim, "p has " + std::to_string(p.rows()) + " samples but u has " +
                                             std::to_string(u.rows()));
    }
}

const Matrix& Trajectory::channel(std::string_view name) const {
    auto need = [&](const std::optional<Matrix>& m) -> const Matrix& {
        if (!m) throw ModelError(ErrorCode::Dim, "trajectory has no '" + std::string(name) + "' channel");
        return *m;
    };
    if (name == "p") return p;
    if (name == "u") return u;
    if (name == "x") return need(x);
    if (name == "xi") return need(xi);
    if (name == "y") return need(y);
    throw ModelError(ErrorCode::Dim, "unknown channel '" + std::string(name) + "'");
}

Vector initial_xi(const LpvStateSpace& model, std::span<const double> p0, const Vector& u0, const Vector& x0,
                  const DiscretizationConfig& cfg) {
    return (2.0 / cfg.ts()) * x0 - model.A()(p0) * x0 - model.B()(p0) * u0;
}

Trajectory step_trajectory(const Trajectory& traj, const StepSource& source, const Vector& state0) {
    const Eigen::Index n = traj.size();
    const Eigen::Index n_s = state0.size();
    Trajectory out = traj;
    Matrix xs(n, n_s);
    Matrix ss(n, n_s);
    Matrix ys;
    Vector s = state0;
    for (Eigen::Index k = 0; k < n; ++k) {
        const StepMatrices m = source(k);
        const Vector u = traj.u.row(k).transpose();
        if (k == 0) ys.resize(n, m.Cxi.rows());
        ss.row(k) = s.transpose();
        xs.row(k) = (m.Xxi * s + m.Xu * u).transpose();
        ys.row(k) = (m.Cxi * s + m.Dxi * u).transpose();
        s = m.Axi * s + m.Bxi * u;
    }
    out.x = std::move(xs);
    out.xi = std::move(ss);
    out.y = std::move(ys);
    return out;
}

Trajectory simulate_dt_from_xi(const LpvStateSpace& model, const DiscretizationConfig& cfg, const Trajectory& traj,
                               const Vector& xi0) {
    check_inputs(model, cfg, traj, xi0);
    return step_trajectory(
        traj,
        [&](Eigen::Index k) {
            std::vector<double> pk;
            const auto p = row_span(traj.p, k, pk);
            try {
                return dt_step_matrices(model, p, cfg);
            } catch (const WellposednessError& e) {
                rethrow_at_step(e, k, p);
            }
        },
        xi0);
}

Trajectory simulate_dt(const LpvStateSpace& model, const DiscretizationConfig& cfg, const Trajectory& traj,
                       const Vector& x0) {
    check_inputs(model, cfg, traj, x0);
    std::vector<double> buf;
    const auto p0 = row_span(traj.p, 0, buf);
    return simulate_dt_from_xi(model, cfg, traj, initial_xi(model, p0, traj.u.row(0).transpose(), x0, cfg));
}

Trajectory simulate_tustin(const LpvStateSpace& model, const DiscretizationConfig& cfg, const Trajectory& traj,
                           const Vector& x0) {
    check_inputs(model, cfg, traj, x0);
    std::vector<double> buf;
    const auto p0 = row_span(traj.p, 0, buf);
    const Vector state0 = (cfg.ts() / 2.0) * initial_xi(model, p0, traj.u.row(0).transpose(), x0, cfg);
    return step_trajectory(
        traj,
        [&](Eigen::Index k) {
            std::vector<double> pk;
            const auto p = row_span(traj.p, k, pk);
            try {
                return tustin_frozen(model, p, cfg);
            } catch (const WellposednessError& e) {
                rethrow_at_step(e, k, p);
            }
        },
        state0);
}

Trajectory simulate_dt_loop_oracle(const LpvStateSpace& model, const DiscretizationConfig& cfg,
                                   const Trajectory& traj, const Vector& x0) {
    check_inputs(model, cfg, traj, x0);
    std::vector<double> buf;
    const auto p0 = row_span(traj.p, 0, buf);
    return simulate_dt_loop_oracle_from_xi(model, cfg, traj,
                                           initial_xi(model, p0, traj.u.row(0).transpose(), x0, cfg));
}

Trajectory simulate_dt_loop_oracle_from_xi(const LpvStateSpace& model, const DiscretizationConfig& cfg,
                                           const Trajectory& traj, const Vector& xi0) {
    check_inputs(model, cfg, traj, xi0);
    const double h = cfg.ts() / 2.0;
    const auto n_x = static_cast<Eigen::Index>(model.n_x());
    const Eigen::Index n = traj.size();
    const Matrix eye = Matrix::Identity(n_x, n_x);

    std::vector<double> buf;
    Vector xi = xi0;

    Trajectory out = traj;
    Matrix xs(n, n_x), xis(n, n_x), ys(n, static_cast<Eigen::Index>(model.n_y()));
    Matrix loop(2 * n_x, 2 * n_x);
    Vector rhs(2 * n_x);
    for (Eigen::Index k = 0; k < n; ++k) {
        const auto p = row_span(traj.p, k, buf);
        const Matrix a = model.A()(p);
        const Vector u = traj.u.row(k).transpose();

        // unknowns z = [x; rx]:  -A x + rx = B u,   x - (Ts/2) rx = (Ts/2) xi
        loop << -a, eye, eye, -h * eye;
        rhs << model.B()(p) * u, h * xi;
        Eigen::PartialPivLU<Matrix> lu(loop);
        // |det(loop)| = |det(I - A Ts/2)|
        if (!(std::abs(lu.determinant()) >= singularity_threshold(a, cfg.ts()))) {
            throw WellposednessError("step " + std::to_string(k) + ", p = " + point_str(p) +
                                         ": algebraic loop is singular (det(I - A(p) Ts/2) = 0)",
                                     a, cfg.ts());
        }
        const Vector z = lu.solve(rhs);
        const auto x = z.head(n_x);
        const auto rx = z.tail(n_x);

        xis.row(k) = xi.transpose();
        xs.row(k) = x.transpose();
        ys.row(k) = (model.C()(p) * x + model.D()(p) * u).transpose();
        xi += 2.0 * rx;
    }
    out.x = std::move(xs);
    out.xi = std::move(xis);
    out.y = std::move(ys);
    return out;
}

Matrix sample_signals(const std::vector<SignalSpec>& signals, double ts, Eigen::Index n) {
    Matrix out(n, static_cast<Eigen::Index>(signals.size()));
    for (std::size_t j = 0; j < signals.size(); ++j) {
        signals[j].validate();
        for (Eigen::Index k = 0; k < n; ++k) out(k, static_cast<Eigen::Index>(j)) = signals[j](static_cast<double>(k) * ts);
    }
    return out;
}

Trajectory trajectory_from_signals(const std::vector<SignalSpec>& p_signals, const std::vector<SignalSpec>& u_signals,
                                   double ts, Eigen::Index n) {
    return Trajectory(ts, sample_signals(p_signals, ts, n), sample_signals(u_signals, ts, n));
}

Trajectory simulate_ct_reference(const LpvStateSpace& model, const std::vector<SignalSpec>& p_signals,
                                 const std::vector<SignalSpec>& u_signals, const Vector& x0, double t_end,
                                 int oversample, const DiscretizationConfig& cfg) {
    if (oversample < 1) throw DomainError("oversample must be >= 1");
    if (!(t_end >= 0.0)) throw DomainError("T_end must be non-negative");
    if (p_signals.size() != model.n_p() || u_signals.size() != model.n_u()) {
        throw ModelError(ErrorCode::Dim, "need one signal per scheduling channel and per input channel");
    }
    if (static_cast<std::size_t>(x0.size()) != model.n_x()) throw ModelError(ErrorCode::Dim, "x0 has the wrong length");
    for (const auto& s : p_signals) s.validate();
    for (const auto& s : u_signals) s.validate();

    const double ts = cfg.ts();
    const auto n = static_cast<Eigen::Index>(std::llround(t_end / ts)) + 1;
    const double h = ts / oversample;

    std::vector<double> p(model.n_p());
    Vector u(static_cast<Eigen::Index>(model.n_u()));
    auto eval_inputs = [&](double t) {
        for (std::size_t i = 0; i < p.size(); ++i) p[i] = p_signals[i](t);
        for (std::size_t i = 0; i < u_signals.size(); ++i) u(static_cast<Eigen::Index>(i)) = u_signals[i](t);
        if (!validate_point(model.domain(), p)) {
            throw DomainError("t = " + format_number(t) + ": p = " + point_str(p) + " lies outside the scheduling domain");
        }
    };
    auto rhs = [&](double t, const Vector& x) -> Vector {
        eval_inputs(t);
        return model.A()(p) * x + model.B()(p) * u;
    };

    Trajectory out(ts, Matrix(n, p.size()), Matrix(n, u.size()));
    Matrix xs(n, x0.size()), ys(n, static_cast<Eigen::Index>(model.n_y()));
    Vector x = x0;
    for (Eigen::Index k = 0; k < n; ++k) {
        const double tk = static_cast<double>(k) * ts;
        eval_inputs(tk);
        for (std::size_t i = 0; i < p.size(); ++i) out.p(k, static_cast<Eigen::Index>(i)) = p[i];
        out.u.row(k) = u.transpose();
        xs.row(k) = x.transpose();
        ys.row(k) = (model.C()(p) * x + model.D()(p) * u).transpose();
        if (k + 1 == n) break;
        for (int s = 0; s < oversample; ++s) {
            const double t = tk + s * h;
            const Vector k1 = rhs(t, x);
            const Vector k2 = rhs(t + h / 2.0, x + (h / 2.0) * k1);
            const Vector k3 = rhs(t + h / 2.0, x + (h / 2.0) * k2);
            const Vector k4 = rhs(t + h, x + h * k3);
            x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
    }
    out.x = std::move(xs);
    out.y = std::move(ys);
    return out;
}

Trajectory parse_trajectory_csv(std::string_view text, const LpvStateSpace& model, double ts,
                                const std::string& origin) {
    const CsvTable csv = parse_csv(text, origin);
    std::vector<std::string> expected{"k", "t"};
    for (std::size_t i = 1; i <= model.n_p(); ++i) expected.push_back("p" + std::to_string(i));
    for (std::size_t i = 1; i <= model.n_u(); ++i) expected.push_back("u" + std::to_string(i));
    if (csv.header != expected) {
        std::string want;
        for (const auto& h : expected) want += (want.empty() ? "" : ",") + h;
        throw IoError(origin + ": header must be '" + want + "'");
    }
    const auto n = static_cast<Eigen::Index>(csv.rows.size());
    const auto n_p = static_cast<Eigen::Index>(model.n_p());
    const auto n_u = static_cast<Eigen::Index>(model.n_u());
    Trajectory traj(ts, Matrix(n, n_p), Matrix(n, n_u));
    for (Eigen::Index k = 0; k < n; ++k) {
        const auto& row = csv.rows[static_cast<std::size_t>(k)];
        if (row[0] != static_cast<double>(k)) {
            throw IoError(origin + ": row " + std::to_string(k) + " has k = " + format_number(row[0]) +
                          "; rows must be numbered 0, 1, 2, ...");
        }
        if (std::abs(row[1] - static_cast<double>(k) * ts) > 1e-9) {
            throw IoError(origin + ": row " + std::to_string(k) + " has t = " + format_number(row[1]) +
                          ", expected k*Ts = " + format_number(static_cast<double>(k) * ts));
        }
        for (Eigen::Index j = 0; j < n_p; ++j) traj.p(k, j) = row[static_cast<std::size_t>(2 + j)];
        for (Eigen::Index j = 0; j < n_u; ++j) traj.u(k, j) = row[static_cast<std::size_t>(2 + n_p + j)];
    }
    return traj;
}

Trajectory read_trajectory_csv(const std::string& path, const LpvStateSpace& model, double ts) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_trajectory_csv(ss.str(), model, ts, path);
}

std::string format_trajectory_csv(const Trajectory& traj, bool emit_state) {
    const Matrix& y = traj.channel("y");
    std::ostringstream os;
    os << "k,t";
    for (Eigen::Index j = 0; j < y.cols(); ++j) os << ",y" << j + 1;
    const Matrix* x = nullptr;
    const Matrix* xi = nullptr;
    if (emit_state) {
        x = &traj.channel("x");
        xi = &traj.channel("xi");
        for (Eigen::Index j = 0; j < x->cols(); ++j) os << ",x" << j + 1;
        for (Eigen::Index j = 0; j < xi->cols(); ++j) os << ",xi" << j + 1;
    }
    os << '\n';
    for (Eigen::Index k = 0; k < traj.size(); ++k) {
        os << k << ',' << format_number(traj.time(k));
        for (Eigen::Index j = 0; j < y.cols(); ++j) os << ',' << format_number(y(k, j));
        if (emit_state) {
            for (Eigen::Index j = 0; j < x->cols(); ++j) os << ',' << format_number((*x)(k, j));
            for (Eigen::Index j = 0; j < xi->cols(); ++j) os << ',' << format_number((*xi)(k, j));
        }
        os << '\n';
    }
    return os.str();
}

}  // namespace wprime
