#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wprime/discretize.hpp"
#include "wprime/signal.hpp"

namespace wprime {

/// Uniformly sampled multichannel signal; row k is the sample at t = k Ts.
/// `p` and `u` are inputs; `x`, `xi` and `y` are filled in by the engines.
struct Trajectory {
    double ts = 0.0;
    Matrix p;
    Matrix u;
    std::optional<Matrix> x;
    std::optional<Matrix> xi;
    std::optional<Matrix> y;

    Trajectory() = default;
    /// Throws ModelError when p and u differ in length.
    Trajectory(double ts, Matrix p, Matrix u);

    Eigen::Index size() const noexcept { return p.rows(); }
    double time(Eigen::Index k) const noexcept { return static_cast<double>(k) * ts; }

    /// Channel by name: "p", "u", "x", "xi" or "y". Throws ModelError when the
    /// channel is unknown or absent.
    const Matrix& channel(std::string_view name) const;
};

/// xi(0) = (2/Ts) x0 - A(p0) x0 - B(p0) u0, which reconstructs x(0) = x0.
Vector initial_xi(const LpvStateSpace& model, std::span<const double> p0, const Vector& u0,
                  const Vector& x0, const DiscretizationConfig& cfg);

/// Produces the step matrices for sample k.
using StepSource = std::function<StepMatrices(Eigen::Index k)>;

/// Runs s(k+1) = Axi s(k) + Bxi u(k) from s(0) = state0 and records the
/// stored state as `xi`, the reconstruction as `x` and the output as `y`.
Trajectory step_trajectory(const Trajectory& traj, const StepSource& source, const Vector& state0);

/// Steps the loop-free subsystem with matrices recomputed at every p(k).
/// Throws DomainError or WellposednessError naming the failing step.
Trajectory simulate_dt(const LpvStateSpace& model, const DiscretizationConfig& cfg,
                       const Trajectory& traj, const Vector& x0);

/// As simulate_dt, starting from an explicit xi(0) instead of a physical x0.
Trajectory simulate_dt_from_xi(const LpvStateSpace& model, const DiscretizationConfig& cfg,
                               const Trajectory& traj, const Vector& xi0);

/// Independent engine: solves the raw algebraic loop of the w' interconnection
///   rx = A x + B u,   x = Ts/2 (xi + rx)
/// with one (2 n_x) x (2 n_x) linear solve per step, then xi(k+1) = xi + 2 rx.
Trajectory simulate_dt_loop_oracle(const LpvStateSpace& model, const DiscretizationConfig& cfg,
                                   const Trajectory& traj, const Vector& x0);

Trajectory simulate_dt_loop_oracle_from_xi(const LpvStateSpace& model, const DiscretizationConfig& cfg,
                                           const Trajectory& traj, const Vector& xi0);

/// Steps the frozen Tustin matrices evaluated at each p(k). The stored state
/// starts at (Ts/2) xi(0), the Tustin state consistent with x0. `x` holds the
/// stored state.
Trajectory simulate_tustin(const LpvStateSpace& model, const DiscretizationConfig& cfg,
                           const Trajectory& traj, const Vector& x0);

/// Samples one signal per column at t = k Ts, k = 0..n-1.
Matrix sample_signals(const std::vector<SignalSpec>& signals, double ts, Eigen::Index n);

/// Builds a DT input trajectory from signal specs.
Trajectory trajectory_from_signals(const std::vector<SignalSpec>& p_signals,
                                   const std::vector<SignalSpec>& u_signals, double ts, Eigen::Index n);

/// Continuous-time reference: classical fixed-step RK4 at step Ts/oversample
/// with p and u evaluated exactly at the stage times. Returns samples at
/// t = k Ts for k = 0..round(t_end/Ts).
Trajectory simulate_ct_reference(const LpvStateSpace& model, const std::vector<SignalSpec>& p_signals,
                                 const std::vector<SignalSpec>& u_signals, const Vector& x0, double t_end,
                                 int oversample, const DiscretizationConfig& cfg);

/// Reads `k,t,p1..p{np},u1..u{nu}`; t must equal k Ts within 1e-9.
Trajectory parse_trajectory_csv(std::string_view text, const LpvStateSpace& model, double ts,
                                const std::string& origin = "<text>");
Trajectory read_trajectory_csv(const std::string& path, const LpvStateSpace& model, double ts);

/// Writes `k,t,y1..[,x1..][,xi1..]`; state columns only when emit_state is set.
std::string format_trajectory_csv(const Trajectory& traj, bool emit_state);

}  // namespace wprime
