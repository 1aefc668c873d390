#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace wprime {

/// Sampled columns read from a CSV with a `t` column; used by csv-column signals.
struct SignalTable {
    std::vector<double> t;
    std::map<std::string, std::vector<double>> columns;
};

SignalTable read_signal_table(const std::string& path);

/// Continuous-time test signal.
///
///   constant : offset + amp
///   step     : 0 for t < t0, offset + amp for t >= t0
///   sine     : offset + amp sin(2 pi f t + phase)
///   chirp    : offset + amp sin(theta(t) + phase), frequency sweeping
///              linearly from f to f1 over [0, duration], held at f1 after
///   csv      : linear interpolation of `column` in the attached table
struct SignalSpec {
    enum class Kind { Constant, Step, Sine, Chirp, CsvColumn };

    Kind kind = Kind::Constant;
    double amp = 0.0;
    double f = 0.0;
    double f1 = 0.0;
    double phase = 0.0;
    double t0 = 0.0;
    double offset = 0.0;
    double duration = 1.0;
    std::string column;
    const SignalTable* table = nullptr;

    /// Throws DomainError on negative frequencies or a descending chirp.
    void validate() const;
    double operator()(double t) const;
};

/// Parses the inline grammar `kind[:key=value,...]`, e.g. `sine:amp=1,f=0.5`.
/// Kinds: const|constant, step, sine, chirp, csv. Keys: amp, f, f1, phase, t0,
/// offset, T (chirp duration), col (csv column). Unknown keys are rejected.
SignalSpec parse_signal_spec(std::string_view text);

std::vector<double> generate_signal(const SignalSpec& spec, const std::vector<double>& times);

}  // namespace wprime
