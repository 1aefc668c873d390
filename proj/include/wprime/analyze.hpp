#pragma once

#include <complex>
#include <string>
#include <string_view>
#include <vector>

#include "wprime/simulate.hpp"

namespace wprime {

using ComplexMatrix = Eigen::MatrixXcd;

/// Frequency response on a grid of CT angular frequencies (rad/s).
struct FrequencyResponse {
    std::vector<double> omegas;
    std::vector<ComplexMatrix> values;
};

/// Logarithmic grid from w_min to w_max (inclusive) with the given density.
std::vector<double> log_grid(double w_min, double w_max, int points_per_decade = 50);
/// Logarithmic grid with exactly n points, n >= 2.
std::vector<double> log_grid_n(double w_min, double w_max, std::size_t n);

/// C (sI - A)^{-1} B + D at a frozen p and any complex s.
ComplexMatrix transfer_ct(const LpvStateSpace& model, std::span<const double> p, std::complex<double> s);
/// Cxi (zI - Axi)^{-1} Bxi + Dxi at any complex z.
ComplexMatrix transfer_dt(const StepMatrices& step, std::complex<double> z);

FrequencyResponse freqresp_ct(const LpvStateSpace& model, std::span<const double> p,
                              const std::vector<double>& omegas);

/// Evaluates at z = exp(j w Ts). Throws DomainError when some w Ts >= pi.
FrequencyResponse freqresp_dt(const StepMatrices& step, const DiscretizationConfig& cfg,
                              const std::vector<double>& omegas);

/// max over w of |G_dt(exp(j w Ts)) - G_ct(j (2/Ts) tan(w Ts / 2))|, entrywise,
/// with G_dt the w' discretization at the frozen point p.
double warping_residual(const LpvStateSpace& model, std::span<const double> p, const DiscretizationConfig& cfg,
                        const std::vector<double>& omegas);

/// Largest entrywise magnitude over a response.
double peak_magnitude(const FrequencyResponse& r);

struct ChannelMetrics {
    double max_abs_error = 0.0;
    double rms_error = 0.0;
};

struct ComparisonMetrics {
    double max_abs_error = 0.0;
    double rms_error = 0.0;
    double relative_to = 1.0;  ///< max(1, max |a_channel|)
    std::vector<ChannelMetrics> per_channel;
};

ComparisonMetrics compare_traj(const Trajectory& a, const Trajectory& b, std::string_view channel);

struct ConvergenceScenario {
    std::vector<SignalSpec> p_signals;
    std::vector<SignalSpec> u_signals;
    Vector x0;
    double t_end = 0.0;
};

struct ConvergencePoint {
    double ts = 0.0;
    double max_error = 0.0;
    double pairwise_order = 0.0;  ///< against the previous entry; NaN for the first
};

struct ConvergenceResult {
    std::vector<ConvergencePoint> points;
    double fitted_order = 0.0;
    /// Set when some error is at round-off level (the scheme is exact for the
    /// scenario); fitted_order is NaN then.
    bool degenerate = false;
};

/// Runs simulate_dt at every Ts in ts_list (each half the previous, each
/// dividing t_end) against one RK4 reference at step min(Ts)/oversample, and
/// fits log(error) against log(Ts) by least squares.
ConvergenceResult convergence_order(const LpvStateSpace& model, const ConvergenceScenario& scenario,
                                    const std::vector<double>& ts_list, int oversample);

/// Header `omega_rads,reOut1In1,imOut1In1,...` (output-major), one row per w.
std::string format_freqresp_csv(const FrequencyResponse& r);

/// `Ts, max_error, pairwise_order` table followed by `fitted_order=`.
std::string format_convergence_report(const ConvergenceResult& r);

}  // namespace wprime
