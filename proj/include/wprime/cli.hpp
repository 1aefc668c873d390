#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace wprime::cli {

/// Exit statuses of the command-line tool.
enum ExitCode : int { kOk = 0, kUsage = 1, kWellposed = 2, kThreshold = 3 };

struct RunConfig {
    std::string command;
    std::string model_path;
    double ts = 0.0;
    std::string output_path;
    std::uint64_t seed = 42;

    // frozen scheduling point, as given by --p (may be empty for constant models)
    std::optional<std::string> frozen_p;

    // check
    std::size_t grid_per_dim = 5;
    std::size_t random_samples = 100;

    // simulate / loop-simulate / compare / converge
    std::string traj_path;
    std::vector<std::string> p_signals;
    std::vector<std::string> u_signals;
    std::string signal_table;
    std::optional<long long> n_samples;
    std::optional<double> t_end;
    std::string x0;
    bool emit_state = false;
    double tol = 1e-9;

    // freqresp
    std::optional<double> w_min;
    std::optional<double> w_max;
    int points_per_decade = 50;
    std::optional<std::size_t> points;

    // converge
    std::string ts_list;
    int oversample = 100;
};

/// Executes one command. Diagnostics go to `err` as a single line starting
/// with the failure code (E_PARSE, E_DIM, ...). Returns the exit status.
int execute(const RunConfig& config, std::ostream& err);

/// Parses argv with CLI11 and executes. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace wprime::cli
