#include "wprime/signal.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>

#include "wprime/errors.hpp"
#include "wprime/io.hpp"

namespace wprime {

namespace {

double parse_number(std::string_view text, std::string_view key) {
    double value = 0.0;
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc{} || ptr != end || !std::isfinite(value)) {
        throw Error(ErrorCode::Parse, "signal parameter '" + std::string(key) + "' is not a number: '" +
                                          std::string(text) + "'");
    }
    return value;
}

}  // namespace

void SignalSpec::validate() const {
    if (f < 0.0 || f1 < 0.0) throw DomainError("signal frequency must be non-negative");
    if (kind == Kind::Chirp) {
        if (f1 < f) throw DomainError("chirp end frequency must be >= start frequency");
        if (!(duration > 0.0)) throw DomainError("chirp duration must be positive");
    }
    if (kind == Kind::CsvColumn) {
        if (table == nullptr) throw IoError("csv signal '" + column + "' has no attached table");
        if (!table->columns.contains(column)) throw IoError("signal table has no column '" + column + "'");
    }
}

double SignalSpec::operator()(double t) const {
    using std::numbers::pi;
    switch (kind) {
        case Kind::Constant:
            return offset + amp;
        case Kind::Step:
            return t < t0 ? 0.0 : offset + amp;
        case Kind::Sine:
            return offset + amp * std::sin(2.0 * pi * f * t + phase);
        case Kind::Chirp: {
            const double rate = (f1 - f) / duration;
            const double theta = t <= duration
                                     ? 2.0 * pi * (f * t + 0.5 * rate * t * t)
                                     : 2.0 * pi * (f * duration + 0.5 * rate * duration * duration +
                                                   f1 * (t - duration));
            return offset + amp * std::sin(theta + phase);
        }
        case Kind::CsvColumn: {
            if (table == nullptr) throw IoError("csv signal '" + column + "' has no attached table");
            auto it = table->columns.find(column);
            if (it == table->columns.end()) throw IoError("signal table has no column '" + column + "'");
            const auto& ts = table->t;
            const auto& vs = it->second;
            if (ts.empty()) throw IoError("signal table is empty");
            if (t < ts.front() - 1e-12 || t > ts.back() + 1e-12) {
                throw IoError("time " + format_number(t) + " outside signal table range");
            }
            auto hi = std::lower_bound(ts.begin(), ts.end(), t);
            if (hi == ts.end()) return vs.back();
            const auto j = static_cast<std::size_t>(hi - ts.begin());
            if (j == 0 || *hi == t) return vs[j];
            const double w = (t - ts[j - 1]) / (ts[j] - ts[j - 1]);
            return vs[j - 1] + w * (vs[j] - vs[j - 1]);
        }
    }
    return 0.0;
}

SignalSpec parse_signal_spec(std::string_view text) {
    SignalSpec spec;
    const auto colon = text.find(':');
    const std::string_view kind = text.substr(0, colon);
    if (kind == "const" || kind == "constant") {
        spec.kind = SignalSpec::Kind::Constant;
    } else if (kind == "step") {
        spec.kind = SignalSpec::Kind::Step;
    } else if (kind == "sine") {
        spec.kind = SignalSpec::Kind::Sine;
    } else if (kind == "chirp") {
        spec.kind = SignalSpec::Kind::Chirp;
    } else if (kind == "csv") {
        spec.kind = SignalSpec::Kind::CsvColumn;
    } else {
        throw Error(ErrorCode::Parse, "unknown signal kind '" + std::string(kind) + "'");
    }

    if (colon != std::string_view::npos) {
        for (const auto& item : split(text.substr(colon + 1), ',')) {
            const auto eq = item.find('=');
            if (eq == std::string::npos) throw Error(ErrorCode::Parse, "signal parameter '" + item + "' lacks '='");
            const std::string key = item.substr(0, eq);
            const std::string_view value = std::string_view(item).substr(eq + 1);
            if (key == "col") {
                spec.column = std::string(value);
            } else if (key == "amp") {
                spec.amp = parse_number(value, key);
            } else if (key == "f") {
                spec.f = parse_number(value, key);
            } else if (key == "f1") {
                spec.f1 = parse_number(value, key);
            } else if (key == "phase") {
                spec.phase = parse_number(value, key);
            } else if (key == "t0") {
                spec.t0 = parse_number(value, key);
            } else if (key == "offset") {
                spec.offset = parse_number(value, key);
            } else if (key == "T") {
                spec.duration = parse_number(value, key);
            } else {
                throw Error(ErrorCode::Parse, "unknown signal parameter '" + key + "'");
            }
        }
    }
    if (spec.kind == SignalSpec::Kind::CsvColumn && spec.column.empty()) {
        throw Error(ErrorCode::Parse, "csv signal needs col=<name>");
    }
    if (spec.kind != SignalSpec::Kind::CsvColumn) spec.validate();
    return spec;
}

std::vector<double> generate_signal(const SignalSpec& spec, const std::vector<double>& times) {
    spec.validate();
    std::vector<double> out;
    out.reserve(times.size());
    for (double t : times) out.push_back(spec(t));
    return out;
}

SignalTable read_signal_table(const std::string& path) {
    const CsvTable csv = read_csv(path);
    auto t_col = std::find(csv.header.begin(), csv.header.end(), "t");
    if (t_col == csv.header.end()) throw IoError("signal table '" + path + "' has no 't' column");
    const auto ti = static_cast<std::size_t>(t_col - csv.header.begin());
    SignalTable table;
    for (const auto& row : csv.rows) table.t.push_back(row[ti]);
    for (std::size_t c = 0; c < csv.header.size(); ++c) {
        if (c == ti) continue;
        auto& col = table.columns[csv.header[c]];
        for (const auto& row : csv.rows) col.push_back(row[c]);
    }
    if (!std::is_sorted(table.t.begin(), table.t.end())) {
        throw IoError("signal table '" + path + "' has non-increasing t");
    }
    return table;
}

}  // namespace wprime
