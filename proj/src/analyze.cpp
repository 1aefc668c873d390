#include "wprime/analyze.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "wprime/io.hpp"

namespace wprime {

namespace {

using cd = std::complex<double>;

void check_grid(const std::vector<double>& omegas) {
    for (std::size_t i = 0; i < omegas.size(); ++i) {
        if (!(omegas[i] > 0.0)) throw DomainError("frequency grid must be positive");
        if (i > 0 && !(omegas[i] > omegas[i - 1])) throw DomainError("frequency grid must be strictly increasing");
    }
}

ComplexMatrix resolvent_gain(const ComplexMatrix& shifted, const Matrix& b, const Matrix& c, const Matrix& d,
                             std::string_view what) {
    Eigen::PartialPivLU<ComplexMatrix> lu(shifted);
    if (!(lu.rcond() > 1e-14)) throw DomainError(std::string(what) + ": resolvent is singular");
    return c.cast<cd>() * lu.solve(b.cast<cd>()) + d.cast<cd>();
}

}  // namespace

std::vector<double> log_grid(double w_min, double w_max, int points_per_decade) {
    if (!(w_min > 0.0) || !(w_max > w_min) || points_per_decade < 1) {
        throw DomainError("log grid needs 0 < w_min < w_max and a positive density");
    }
    const double decades = std::log10(w_max / w_min);
    const auto n = static_cast<std::size_t>(std::ceil(decades * points_per_decade)) + 1;
    return log_grid_n(w_min, w_max, std::max<std::size_t>(n, 2));
}

std::vector<double> log_grid_n(double w_min, double w_max, std::size_t n) {
    if (!(w_min > 0.0) || !(w_max > w_min) || n < 2) throw DomainError("log grid needs 0 < w_min < w_max and n >= 2");
    std::vector<double> out(n);
    const double lo = std::log10(w_min);
    const double hi = std::log10(w_max);
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = std::pow(10.0, lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1));
    }
    out.front() = w_min;
    out.back() = w_max;
    return out;
}

ComplexMatrix transfer_ct(const LpvStateSpace& model, std::span<const double> p, cd s) {
    const Matrix a = model.A()(p);
    const ComplexMatrix shifted = s * ComplexMatrix::Identity(a.rows(), a.cols()) - a.cast<cd>();
    std::ostringstream what;
    what << "s = " << s;
    return resolvent_gain(shifted, model.B()(p), model.C()(p), model.D()(p), what.str());
}

ComplexMatrix transfer_dt(const StepMatrices& step, cd z) {
    const ComplexMatrix shifted = z * ComplexMatrix::Identity(step.Axi.rows(), step.Axi.cols()) - step.Axi.cast<cd>();
    std::ostringstream what;
    what << "z = " << z;
    return resolvent_gain(shifted, step.Bxi, step.Cxi, step.Dxi, what.str());
}

FrequencyResponse freqresp_ct(const LpvStateSpace& model, std::span<const double> p, const std::vector<double>& omegas) {
    if (!validate_point(model.domain(), p)) throw DomainError("frozen point lies outside the scheduling domain");
    check_grid(omegas);
    FrequencyResponse r;
    r.omegas = omegas;
    r.values.reserve(omegas.size());
    for (double w : omegas) {
        try {
            r.values.push_back(transfer_ct(model, p, cd(0.0, w)));
        } catch (const DomainError&) {
            throw DomainError("CT resolvent is singular at omega = " + format_number(w) + " rad/s");
        }
    }
    return r;
}

FrequencyResponse freqresp_dt(const StepMatrices& step, const DiscretizationConfig& cfg,
                              const std::vector<double>& omegas) {
    check_grid(omegas);
    const double ts = cfg.ts();
    FrequencyResponse r;
    r.omegas = omegas;
    r.values.reserve(omegas.size());
    for (double w : omegas) {
        if (!(w * ts < std::numbers::pi)) {
            throw DomainError("omega = " + format_number(w) + " rad/s is at or above the Nyquist frequency " +
                              format_number(std::numbers::pi / ts));
        }
        try {
            r.values.push_back(transfer_dt(step, std::polar(1.0, w * ts)));
        } catch (const DomainError&) {
            throw DomainError("DT resolvent is singular at omega = " + format_number(w) + " rad/s");
        }
    }
    return r;
}

double warping_residual(const LpvStateSpace& model, std::span<const double> p, const DiscretizationConfig& cfg,
                        const std::vector<double>& omegas) {
    const double ts = cfg.ts();
    const FrequencyResponse dt = freqresp_dt(dt_step_matrices(model, p, cfg), cfg, omegas);
    std::vector<double> warped(omegas.size());
    for (std::size_t i = 0; i < omegas.size(); ++i) warped[i] = (2.0 / ts) * std::tan(omegas[i] * ts / 2.0);
    const FrequencyResponse ct = freqresp_ct(model, p, warped);
    double worst = 0.0;
    for (std::size_t i = 0; i < omegas.size(); ++i) {
        worst = std::max(worst, (dt.values[i] - ct.values[i]).cwiseAbs().maxCoeff());
    }
    return worst;
}

double peak_magnitude(const FrequencyResponse& r) {
    double peak = 0.0;
    for (const auto& v : r.values) {
        if (v.size() > 0) peak = std::max(peak, v.cwiseAbs().maxCoeff());
    }
    return peak;
}

ComparisonMetrics compare_traj(const Trajectory& a, const Trajectory& b, std::string_view channel) {
    if (a.size() != b.size()) {
        throw ModelError(ErrorCode::Dim, "trajectories differ in length (" + std::to_string(a.size()) + " vs " +
                                             std::to_string(b.size()) + ")");
    }
    if (std::abs(a.ts - b.ts) > 1e-12) throw ModelError(ErrorCode::Dim, "trajectories differ in sampling time");
    const Matrix& ma = a.channel(channel);
    const Matrix& mb = b.channel(channel);
    if (ma.rows() != mb.rows() || ma.cols() != mb.cols()) {
        throw ModelError(ErrorCode::Dim, "channel '" + std::string(channel) + "' differs in width");
    }
    ComparisonMetrics m;
    m.relative_to = std::max(1.0, ma.size() ? ma.cwiseAbs().maxCoeff() : 0.0);
    if (ma.size() == 0) return m;
    const Matrix diff = (ma - mb).cwiseAbs();
    m.max_abs_error = diff.maxCoeff();
    m.rms_error = std::sqrt(diff.squaredNorm() / static_cast<double>(diff.size()));
    for (Eigen::Index j = 0; j < diff.cols(); ++j) {
        m.per_channel.push_back({diff.col(j).maxCoeff(),
                                 std::sqrt(diff.col(j).squaredNorm() / static_cast<double>(diff.rows()))});
    }
    return m;
}

ConvergenceResult convergence_order(const LpvStateSpace& model, const ConvergenceScenario& scenario,
                                    const std::vector<double>& ts_list, int oversample) {
    if (ts_list.size() < 3) throw DomainError("convergence sweep needs at least 3 sampling times");
    for (std::size_t i = 0; i < ts_list.size(); ++i) {
        if (!(ts_list[i] > 0.0)) throw DomainError("sampling times must be positive");
        if (i > 0 && std::abs(ts_list[i - 1] / ts_list[i] - 2.0) > 1e-9) {
            throw DomainError("sampling times must halve successively");
        }
        const double steps = scenario.t_end / ts_list[i];
        if (std::abs(steps - std::round(steps)) > 1e-9 * std::max(1.0, steps)) {
            throw DomainError("Ts = " + format_number(ts_list[i]) + " does not divide T_end = " +
                              format_number(scenario.t_end));
        }
    }

    const double ts_min = ts_list.back();
    const DiscretizationConfig fine(ts_min);
    const Trajectory ref = simulate_ct_reference(model, scenario.p_signals, scenario.u_signals, scenario.x0,
                                                 scenario.t_end, oversample, fine);
    const Matrix& y_ref = ref.channel("y");
    const double scale = std::max(1.0, y_ref.cwiseAbs().maxCoeff());

    ConvergenceResult result;
    for (double ts : ts_list) {
        const DiscretizationConfig cfg(ts);
        const auto stride = static_cast<Eigen::Index>(std::llround(ts / ts_min));
        const auto n = static_cast<Eigen::Index>(std::llround(scenario.t_end / ts)) + 1;
        const Trajectory traj = trajectory_from_signals(scenario.p_signals, scenario.u_signals, ts, n);
        const Trajectory dt = simulate_dt(model, cfg, traj, scenario.x0);
        const Matrix& y = dt.channel("y");
        double err = 0.0;
        for (Eigen::Index k = 0; k < n; ++k) {
            err = std::max(err, (y.row(k) - y_ref.row(k * stride)).cwiseAbs().maxCoeff());
        }
        ConvergencePoint pt{ts, err, std::numeric_limits<double>::quiet_NaN()};
        if (!result.points.empty()) {
            const auto& prev = result.points.back();
            pt.pairwise_order = std::log(prev.max_error / err) / std::log(prev.ts / ts);
        }
        result.points.push_back(pt);
        if (err <= 1e-12 * scale) result.degenerate = true;
    }

    if (result.degenerate) {
        result.fitted_order = std::numeric_limits<double>::quiet_NaN();
        for (auto& pt : result.points) pt.pairwise_order = std::numeric_limits<double>::quiet_NaN();
        return result;
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(result.points.size());
    for (const auto& pt : result.points) {
        const double lx = std::log(pt.ts);
        const double ly = std::log(pt.max_error);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    result.fitted_order = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    return result;
}

std::string format_freqresp_csv(const FrequencyResponse& r) {
    std::ostringstream os;
    os << "omega_rads";
    const Eigen::Index rows = r.values.empty() ? 0 : r.values.front().rows();
    const Eigen::Index cols = r.values.empty() ? 0 : r.values.front().cols();
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < cols; ++j) {
            os << ",reOut" << i + 1 << "In" << j + 1 << ",imOut" << i + 1 << "In" << j + 1;
        }
    }
    os << '\n';
    for (std::size_t k = 0; k < r.omegas.size(); ++k) {
        os << format_number(r.omegas[k]);
        for (Eigen::Index i = 0; i < rows; ++i) {
            for (Eigen::Index j = 0; j < cols; ++j) {
                os << ',' << format_number(r.values[k](i, j).real()) << ',' << format_number(r.values[k](i, j).imag());
            }
        }
        os << '\n';
    }
    return os.str();
}

std::string format_convergence_report(const ConvergenceResult& r) {
    std::ostringstream os;
    os << "Ts, max_error, pairwise_order\n";
    for (const auto& pt : r.points) {
        os << format_number(pt.ts) << ", " << format_number(pt.max_error) << ", " << format_number(pt.pairwise_order)
           << '\n';
    }
    if (r.degenerate) os << "degenerate=true\n";
    os << "fitted_order=" << format_number(r.fitted_order) << '\n';
    return os.str();
}

}  // namespace wprime
