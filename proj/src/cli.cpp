#include "wprime/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <numbers>

#include <CLI11.hpp>
#include <json.hpp>

#include "wprime/analyze.hpp"
#include "wprime/io.hpp"

namespace wprime::cli {

namespace {

using json = nlohmann::ordered_json;

constexpr const char* kSignalHelp =
    "Signal specs: kind[:key=value,...]\n"
    "  kinds : const | step | sine | chirp | csv\n"
    "  keys  : amp, offset, f (Hz), f1 (chirp end Hz), T (chirp duration s),\n"
    "          phase (rad), t0 (step time s), col (csv column, needs --signal-table)\n"
    "  e.g.  --u \"sine:amp=1,f=0.5\"  --p-signal \"sine:amp=1,f=0.159,offset=2\"\n";

std::vector<double> parse_list(const std::string& text, const char* what) {
    std::vector<double> out;
    if (text.empty()) return out;
    for (const auto& item : split(text, ',')) {
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
        if (ec != std::errc{} || ptr != item.data() + item.size() || item.empty()) {
            throw Error(ErrorCode::Parse, std::string(what) + ": '" + item + "' is not a number");
        }
        out.push_back(v);
    }
    return out;
}

json matrix_json(const Matrix& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

void write_json(const std::string& path, const json& doc) { write_text_file(path, doc.dump(2) + "\n"); }

double require_ts(const RunConfig& c) {
    if (c.ts == 0.0) throw Error(ErrorCode::Parse, "--Ts is required for '" + c.command + "'");
    return c.ts;
}

std::vector<double> frozen_point(const RunConfig& c, const LpvStateSpace& model) {
    if (!c.frozen_p) throw Error(ErrorCode::Parse, "--p is required for '" + c.command + "'");
    auto p = parse_list(*c.frozen_p, "--p");
    if (p.empty()) {
        if (!model.is_constant()) {
            throw ModelError(ErrorCode::Dim, "--p may only be empty for models without scheduling dependence");
        }
        return model.domain().lower();
    }
    if (p.size() != model.n_p()) {
        throw ModelError(ErrorCode::Dim, "--p has " + std::to_string(p.size()) + " entries, model has n_p = " +
                                             std::to_string(model.n_p()));
    }
    return p;
}

Vector initial_state(const RunConfig& c, const LpvStateSpace& model) {
    const auto values = parse_list(c.x0, "--x0");
    if (values.empty()) return Vector::Zero(static_cast<Eigen::Index>(model.n_x()));
    if (values.size() != model.n_x()) {
        throw ModelError(ErrorCode::Dim, "--x0 has " + std::to_string(values.size()) + " entries, model has n_x = " +
                                             std::to_string(model.n_x()));
    }
    return Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
}

struct Signals {
    SignalTable table;
    std::vector<SignalSpec> p;
    std::vector<SignalSpec> u;
};

Signals parse_signals(const RunConfig& c, const LpvStateSpace& model) {
    Signals s;
    if (!c.signal_table.empty()) s.table = read_signal_table(c.signal_table);
    for (const auto& text : c.p_signals) s.p.push_back(parse_signal_spec(text));
    for (const auto& text : c.u_signals) s.u.push_back(parse_signal_spec(text));
    if (s.p.size() != model.n_p()) {
        throw ModelError(ErrorCode::Dim, "need " + std::to_string(model.n_p()) + " --p-signal specs, got " +
                                             std::to_string(s.p.size()));
    }
    if (s.u.size() != model.n_u()) {
        throw ModelError(ErrorCode::Dim, "need " + std::to_string(model.n_u()) + " --u specs, got " +
                                             std::to_string(s.u.size()));
    }
    return s;
}

/// Points csv-column signals at the table. Called after the Signals object has
/// reached its final address.
void attach_table(Signals& s) {
    for (auto* group : {&s.p, &s.u}) {
        for (auto& spec : *group) {
            if (spec.kind == SignalSpec::Kind::CsvColumn) {
                spec.table = &s.table;
                spec.validate();
            }
        }
    }
}

Trajectory input_trajectory(const RunConfig& c, const LpvStateSpace& model, double ts) {
    if (!c.traj_path.empty()) {
        if (!c.p_signals.empty() || !c.u_signals.empty()) {
            throw Error(ErrorCode::Parse, "use either --traj or signal specs, not both");
        }
        return read_trajectory_csv(c.traj_path, model, ts);
    }
    Signals s = parse_signals(c, model);
    attach_table(s);
    Eigen::Index n = 0;
    if (c.n_samples) {
        if (*c.n_samples < 1) throw DomainError("--N must be positive");
        n = static_cast<Eigen::Index>(*c.n_samples);
    } else if (c.t_end) {
        if (!(*c.t_end >= 0.0)) throw DomainError("--T-end must be non-negative");
        n = static_cast<Eigen::Index>(std::llround(*c.t_end / ts)) + 1;
    } else {
        throw Error(ErrorCode::Parse, "signal-driven runs need --N or --T-end");
    }
    return trajectory_from_signals(s.p, s.u, ts, n);
}

json report_json(const WellposednessReport& r, const RunConfig& c) {
    json points = json::array();
    for (const auto& p : r.singular_points) points.push_back(p);
    json doc;
    doc["schema_version"] = 1;
    doc["command"] = "check";
    doc["Ts"] = r.ts;
    doc["grid_per_dim"] = c.grid_per_dim;
    doc["random_samples"] = c.random_samples;
    doc["seed"] = c.seed;
    doc["samples_checked"] = r.samples_checked;
    doc["min_abs_det"] = r.min_abs_det;
    doc["argmin_p"] = r.argmin_p;
    doc["max_condition_number"] = finite_or_null(r.max_condition_number);
    doc["singular_points"] = std::move(points);
    doc["passed"] = r.passed;
    doc["note"] = "sampled check over vertices, grid and random draws; not a certificate for every p";
    return doc;
}

json step_json(const StepMatrices& m, bool tustin) {
    json doc;
    if (tustin) {
        doc["Ad"] = matrix_json(m.Axi);
        doc["Bd"] = matrix_json(m.Bxi);
        doc["Cd"] = matrix_json(m.Cxi);
        doc["Dd"] = matrix_json(m.Dxi);
    } else {
        doc["Axi"] = matrix_json(m.Axi);
        doc["Bxi"] = matrix_json(m.Bxi);
        doc["Cxi"] = matrix_json(m.Cxi);
        doc["Dxi"] = matrix_json(m.Dxi);
        doc["Xxi"] = matrix_json(m.Xxi);
        doc["Xu"] = matrix_json(m.Xu);
    }
    return doc;
}

std::string sibling(const std::string& path, const std::string& suffix) {
    std::filesystem::path p(path);
    return (p.parent_path() / (p.stem().string() + suffix)).string();
}

int cmd_check(const RunConfig& c, const LpvStateSpace& model, std::ostream& err) {
    const DiscretizationConfig cfg(require_ts(c));
    const auto report = wellposedness_check(model, cfg, c.grid_per_dim, c.random_samples, c.seed);
    write_json(c.output_path, report_json(report, c));
    if (!report.passed) {
        err << "E_THRESHOLD: det(I - A(p) Ts/2) is singular at " << report.singular_points.size()
            << " sampled point(s); min |det| = " << format_number(report.min_abs_det) << "\n";
        return kThreshold;
    }
    return kOk;
}

int cmd_discretize(const RunConfig& c, const LpvStateSpace& model) {
    const DiscretizationConfig cfg(require_ts(c));
    const auto p = frozen_point(c, model);
    const auto sigma = sigma_step(model, p, cfg);
    const auto w = dt_step_matrices(model, p, cfg);
    const auto t = tustin_frozen(model, p, cfg);
    json doc;
    doc["schema_version"] = 1;
    doc["command"] = "discretize";
    doc["Ts"] = cfg.ts();
    doc["p"] = p;
    doc["sigma"] = {{"M11", matrix_json(sigma.m11)},
                    {"M12", matrix_json(sigma.m12)},
                    {"M21", matrix_json(sigma.m21)},
                    {"M22", matrix_json(sigma.m22)}};
    doc["wprime"] = step_json(w, false);
    doc["tustin"] = step_json(t, true);
    doc["similarity_residual"] = similarity_residual(w, t, cfg);
    write_json(c.output_path, doc);
    return kOk;
}

int cmd_simulate(const RunConfig& c, const LpvStateSpace& model, bool loop) {
    const DiscretizationConfig cfg(require_ts(c));
    const Trajectory in = input_trajectory(c, model, cfg.ts());
    const Vector x0 = initial_state(c, model);
    const Trajectory out = loop ? simulate_dt_loop_oracle(model, cfg, in, x0) : simulate_dt(model, cfg, in, x0);
    write_text_file(c.output_path, format_trajectory_csv(out, c.emit_state));
    return kOk;
}

int cmd_freqresp(const RunConfig& c, const LpvStateSpace& model) {
    const DiscretizationConfig cfg(require_ts(c));
    const auto p = frozen_point(c, model);
    const double w_min = c.w_min.value_or(1e-2);
    const double w_max = c.w_max.value_or(0.9 * std::numbers::pi / cfg.ts());
    const auto grid = c.points ? log_grid_n(w_min, w_max, *c.points) : log_grid(w_min, w_max, c.points_per_decade);
    const auto ct = freqresp_ct(model, p, grid);
    const auto dt = freqresp_dt(dt_step_matrices(model, p, cfg), cfg, grid);
    const double residual = warping_residual(model, p, cfg, grid);
    const std::string ct_path = sibling(c.output_path, "_ct.csv");
    const std::string dt_path = sibling(c.output_path, "_dt.csv");
    write_text_file(ct_path, format_freqresp_csv(ct));
    write_text_file(dt_path, format_freqresp_csv(dt));
    json doc;
    doc["schema_version"] = 1;
    doc["command"] = "freqresp";
    doc["Ts"] = cfg.ts();
    doc["p"] = p;
    doc["points"] = grid.size();
    doc["omega_min"] = grid.front();
    doc["omega_max"] = grid.back();
    doc["ct_csv"] = std::filesystem::path(ct_path).filename().string();
    doc["dt_csv"] = std::filesystem::path(dt_path).filename().string();
    doc["peak_magnitude"] = std::max(peak_magnitude(ct), peak_magnitude(dt));
    doc["warping_residual"] = residual;
    write_json(c.output_path, doc);
    return kOk;
}

int cmd_compare(const RunConfig& c, const LpvStateSpace& model, std::ostream& err) {
    const DiscretizationConfig cfg(require_ts(c));
    const Trajectory in = input_trajectory(c, model, cfg.ts());
    const Vector x0 = initial_state(c, model);
    const Trajectory sigma = simulate_dt(model, cfg, in, x0);
    const Trajectory loop = simulate_dt_loop_oracle(model, cfg, in, x0);
    const auto m = compare_traj(sigma, loop, "y");
    const bool passed = m.max_abs_error <= c.tol * m.relative_to;
    json channels = json::array();
    for (const auto& ch : m.per_channel) channels.push_back({{"max_abs_error", ch.max_abs_error}, {"rms_error", ch.rms_error}});
    json doc;
    doc["schema_version"] = 1;
    doc["command"] = "compare";
    doc["Ts"] = cfg.ts();
    doc["samples"] = in.size();
    doc["channel"] = "y";
    doc["max_abs_error"] = m.max_abs_error;
    doc["rms_error"] = m.rms_error;
    doc["relative_to"] = m.relative_to;
    doc["per_channel"] = std::move(channels);
    doc["tol"] = c.tol;
    doc["passed"] = passed;
    write_json(c.output_path, doc);
    if (!passed) {
        err << "E_THRESHOLD: engines disagree by " << format_number(m.max_abs_error) << " > tol * "
            << format_number(m.relative_to) << "\n";
        return kThreshold;
    }
    return kOk;
}

int cmd_converge(const RunConfig& c, const LpvStateSpace& model) {
    const auto ts_list = parse_list(c.ts_list, "--Ts-list");
    if (!c.t_end) throw Error(ErrorCode::Parse, "converge needs --T-end");
    if (!c.traj_path.empty()) throw Error(ErrorCode::Parse, "converge is driven by signal specs, not --traj");
    Signals s = parse_signals(c, model);
    attach_table(s);
    ConvergenceScenario scenario{s.p, s.u, initial_state(c, model), *c.t_end};
    const auto result = convergence_order(model, scenario, ts_list, c.oversample);
    write_text_file(c.output_path, format_convergence_report(result));
    return kOk;
}

int exit_for(ErrorCode code) {
    switch (code) {
        case ErrorCode::Wellposed: return kWellposed;
        case ErrorCode::Threshold: return kThreshold;
        default: return kUsage;
    }
}

}  // namespace

int execute(const RunConfig& c, std::ostream& err) {
    try {
        if (c.model_path.empty()) throw Error(ErrorCode::Parse, "--model is required");
        if (c.output_path.empty()) throw Error(ErrorCode::Parse, "--out is required");
        const LpvStateSpace model = load_model(c.model_path);
        if (c.command == "check") return cmd_check(c, model, err);
        if (c.command == "discretize") return cmd_discretize(c, model);
        if (c.command == "simulate") return cmd_simulate(c, model, false);
        if (c.command == "loop-simulate") return cmd_simulate(c, model, true);
        if (c.command == "freqresp") return cmd_freqresp(c, model);
        if (c.command == "compare") return cmd_compare(c, model, err);
        if (c.command == "converge") return cmd_converge(c, model);
        throw Error(ErrorCode::Parse, "unknown command '" + c.command + "'");
    } catch (const Error& e) {
        err << to_string(e.code()) << ": " << e.what() << "\n";
        return exit_for(e.code());
    } catch (const std::exception& e) {
        err << "E_IO: " << e.what() << "\n";
        return kUsage;
    }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Discretize, simulate and verify continuous-time LPV state-space models with the w' method"};
    app.require_subcommand(1, 1);
    app.footer(kSignalHelp);

    RunConfig c;
    auto common = [&](CLI::App* sub, bool needs_ts) {
        sub->add_option("--model,-m", c.model_path, "Model JSON file")->required();
        auto* ts = sub->add_option("--Ts", c.ts, "Sampling time [s]");
        if (needs_ts) ts->required();
        sub->add_option("--out,-o", c.output_path, "Output file")->required();
        sub->add_option("--seed", c.seed, "Random seed")->capture_default_str();
    };
    auto scenario = [&](CLI::App* sub) {
        sub->add_option("--traj", c.traj_path, "Input trajectory CSV (k,t,p1..,u1..)");
        sub->add_option("--p-signal", c.p_signals, "Scheduling signal spec, one per p channel");
        sub->add_option("--u", c.u_signals, "Input signal spec, one per u channel");
        sub->add_option("--signal-table", c.signal_table, "CSV with a t column for csv-kind signals");
        sub->add_option("--N", c.n_samples, "Number of samples for signal-driven runs");
        sub->add_option("--T-end", c.t_end, "Final time [s] for signal-driven runs");
        sub->add_option("--x0", c.x0, "Initial state x0 as v1,v2,... (default zero)");
    };

    auto* check = app.add_subcommand("check", "Sampled well-posedness check of det(I - A(p) Ts/2)");
    common(check, true);
    check->add_option("--grid", c.grid_per_dim, "Grid points per scheduling dimension")->capture_default_str();
    check->add_option("--random", c.random_samples, "Number of random samples")->capture_default_str();

    auto* disc = app.add_subcommand("discretize", "Step matrices at a frozen scheduling point");
    common(disc, true);
    disc->add_option("--p", c.frozen_p, "Frozen scheduling point v1,v2,...")->required();

    auto* sim = app.add_subcommand("simulate", "Simulate the loop-free discretization");
    common(sim, true);
    scenario(sim);
    sim->add_flag("--emit-state", c.emit_state, "Also write x and xi columns");

    auto* loop = app.add_subcommand("loop-simulate", "Simulate by solving the algebraic loop every step");
    common(loop, true);
    scenario(loop);
    loop->add_flag("--emit-state", c.emit_state, "Also write x and xi columns");

    auto* fr = app.add_subcommand("freqresp", "CT and DT frequency responses and the warping residual");
    common(fr, true);
    fr->add_option("--p", c.frozen_p, "Frozen scheduling point v1,v2,...")->required();
    fr->add_option("--w-min", c.w_min, "Lowest frequency [rad/s] (default 0.01)");
    fr->add_option("--w-max", c.w_max, "Highest frequency [rad/s] (default 0.9 pi/Ts)");
    fr->add_option("--ppd", c.points_per_decade, "Points per decade")->capture_default_str();
    fr->add_option("--points", c.points, "Total number of grid points (overrides --ppd)");

    auto* cmp = app.add_subcommand("compare", "Compare the two DT engines on one scenario");
    common(cmp, true);
    scenario(cmp);
    cmp->add_option("--tol", c.tol, "Relative tolerance on max |y_sigma - y_loop|")->capture_default_str();

    auto* conv = app.add_subcommand("converge", "Empirical convergence order against an RK4 reference");
    common(conv, false);
    scenario(conv);
    conv->add_option("--Ts-list", c.ts_list, "Halving sampling times, e.g. 0.2,0.1,0.05,0.025")->required();
    conv->add_option("--oversample", c.oversample, "RK4 substeps per smallest Ts")->capture_default_str();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        err << "E_PARSE: " << e.what() << "\n";
        return kUsage;
    }
    for (auto* sub : app.get_subcommands()) c.command = sub->get_name();
    return execute(c, err);
}

}  // namespace wprime::cli
