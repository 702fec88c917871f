#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace qbroker {

/// Per-slot actual demand d*_t (VM-equivalents), 1-based over t = 1..T.
struct DemandTrace {
    std::vector<double> slots;
    std::string slot_length;  ///< duration label, metadata only

    int horizon() const { return static_cast<int>(slots.size()); }
    /// d*_t with zero outside [1, T].
    double at(int t) const {
        return (t >= 1 && t <= horizon()) ? slots[static_cast<std::size_t>(t - 1)] : 0.0;
    }
    double peak() const;
};

/// One VM-usage interval [start, end) in seconds.
struct UsageEvent {
    double start;
    double end;
};

/// Reads rows `t,demand` with t strictly increasing from 1; missing t are
/// filled with 0, `#` lines are ignored. Malformed rows are rejected with
/// their line number.
DemandTrace load_trace_csv(const std::filesystem::path& path);

void write_trace_csv(const DemandTrace& trace, const std::filesystem::path& path);

/// Bins usage intervals into slots of `slot_seconds`; d*_t is the peak
/// concurrency inside slot t (capacity has to cover the peak, not the mean).
/// Events must be sorted by start time.
DemandTrace bin_events(std::span<const UsageEvent> events, double slot_seconds);

/// Constant baseline with occasional spikes of the given height.
/// Deterministic per seed.
DemandTrace generate_spiky_trace(std::uint64_t seed, int horizon, double base, double spike_prob,
                                 double spike_height);

} // namespace qbroker
