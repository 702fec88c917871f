#include "qbroker/trace.hpp"

#include "qbroker/csv.hpp"
#include "qbroker/errors.hpp"
#include "qbroker/rng.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace qbroker {

double DemandTrace::peak() const {
    double m = 0;
    for (double d : slots) m = std::max(m, d);
    return m;
}

DemandTrace load_trace_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open trace file: " + path.string());
    DemandTrace trace;
    std::string line;
    int lineno = 0;
    long long prev_t = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto ctx = path.string() + ":" + std::to_string(lineno);
        auto text = csv::trim(line);
        if (text.empty() || text.front() == '#') continue;
        const auto fields = csv::split(text, ',');
        if (fields.size() != 2) throw IoError(ctx + ": expected 't,demand'");
        const long long t = csv::parse_int(fields[0], ctx);
        const double demand = csv::parse_double(fields[1], ctx);
        if (t <= prev_t)
            throw IoError(ctx + ": slot index " + std::to_string(t) +
                          " not strictly increasing (previous " + std::to_string(prev_t) + ")");
        if (demand < 0) throw IoError(ctx + ": negative demand");
        trace.slots.resize(static_cast<std::size_t>(t), 0.0);  // gap fill
        trace.slots[static_cast<std::size_t>(t - 1)] = demand;
        prev_t = t;
    }
    return trace;
}

void write_trace_csv(const DemandTrace& trace, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    for (int t = 1; t <= trace.horizon(); ++t)
        out << t << ',' << csv::format_double(trace.at(t)) << '\n';
    if (!out) throw IoError("write failed: " + path.string());
}

DemandTrace bin_events(std::span<const UsageEvent> events, double slot_seconds) {
    if (!(slot_seconds > 0)) throw std::invalid_argument("bin_events: slot_seconds > 0 required");
    DemandTrace trace;
    if (events.empty()) return trace;
    double last_end = 0;
    for (std::size_t i = 0; i < events.size(); ++i) {
        if (events[i].end < events[i].start)
            throw std::invalid_argument("bin_events: event ends before it starts");
        if (i > 0 && events[i].start < events[i - 1].start)
            throw std::invalid_argument("bin_events: events not sorted by start time");
        last_end = std::max(last_end, events[i].end);
    }
    const int horizon = static_cast<int>(std::ceil(last_end / slot_seconds));
    trace.slots.assign(static_cast<std::size_t>(std::max(horizon, 0)), 0.0);

    // Concurrency is a step function changing at starts (+1) and ends (-1);
    // end-at-x drops before start-at-x counts ([start, end) intervals).
    struct Change {
        double time;
        int delta;
    };
    std::vector<Change> changes;
    changes.reserve(events.size() * 2);
    for (const auto& e : events) {
        if (e.end > e.start) {
            changes.push_back({e.start, +1});
            changes.push_back({e.end, -1});
        }
    }
    std::sort(changes.begin(), changes.end(), [](const Change& a, const Change& b) {
        if (a.time != b.time) return a.time < b.time;
        return a.delta < b.delta;
    });

    int current = 0;
    std::size_t next_change = 0;
    for (int t = 1; t <= horizon; ++t) {
        const double slot_end = t * slot_seconds;
        int peak = current;  // carry-in concurrency at the slot boundary
        while (next_change < changes.size() && changes[next_change].time < slot_end) {
            current += changes[next_change].delta;
            peak = std::max(peak, current);
            ++next_change;
        }
        trace.slots[static_cast<std::size_t>(t - 1)] = peak;
    }
    return trace;
}

DemandTrace generate_spiky_trace(std::uint64_t seed, int horizon, double base, double spike_prob,
                                 double spike_height) {
    if (horizon < 0) throw std::invalid_argument("generate_spiky_trace: horizon >= 0 required");
    if (base < 0 || spike_height < 0 || spike_prob < 0 || spike_prob > 1)
        throw std::invalid_argument("generate_spiky_trace: invalid parameters");
    Rng rng(seed, RngStream::trace_generation);
    DemandTrace trace;
    trace.slot_length = "synthetic";
    trace.slots.reserve(static_cast<std::size_t>(horizon));
    for (int t = 0; t < horizon; ++t)
        trace.slots.push_back(base + (rng.bernoulli(spike_prob) ? spike_height : 0.0));
    return trace;
}

} // namespace qbroker
