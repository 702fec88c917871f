#include "qbroker/trace.hpp"

#include "qbroker/errors.hpp"
#include "qbroker/rng.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

using namespace qbroker;

namespace {

namespace fs = std::filesystem;

fs::path write_temp(const std::string& name, const std::string& body) {
    const fs::path dir = fs::temp_directory_path() / "qbroker_trace_io";
    fs::create_directories(dir);
    const fs::path file = dir / name;
    std::ofstream out(file);
    out << body;
    return file;
}

/// O(n^2) overlap counter: peak concurrency in a slot, probing every event
/// start and the slot boundary.
double overlap_peak(std::span<const UsageEvent> events, double slot_seconds, int t) {
    const double lo = (t - 1) * slot_seconds;
    const double hi = t * slot_seconds;
    std::vector<double> probes{lo};
    for (const auto& e : events)
        if (e.start >= lo && e.start < hi) probes.push_back(e.start);
    int best = 0;
    for (double x : probes) {
        int count = 0;
        for (const auto& e : events)
            if (e.start <= x && x < e.end) ++count;
        best = std::max(best, count);
    }
    return best;
}

} // namespace

TEST_SUITE("trace") {

TEST_CASE("csv loading: empty, gap fill, comments, errors") {
    CHECK(load_trace_csv(write_temp("empty.csv", "")).horizon() == 0);

    const auto gaps = load_trace_csv(write_temp("gaps.csv", "# comment\n1,2\n3,7.5\n"));
    REQUIRE(gaps.horizon() == 3);
    CHECK(gaps.at(1) == 2.0);
    CHECK(gaps.at(2) == 0.0);
    CHECK(gaps.at(3) == 7.5);
    CHECK(gaps.at(0) == 0.0);
    CHECK(gaps.at(4) == 0.0);

    CHECK_THROWS_AS(load_trace_csv("/nonexistent/trace.csv"), IoError);
    CHECK_THROWS_WITH_AS(load_trace_csv(write_temp("bad.csv", "1,2\nx,3\n")),
                         doctest::Contains("bad.csv:2"), IoError);
    CHECK_THROWS_AS(load_trace_csv(write_temp("order.csv", "2,1\n1,2\n")), IoError);
    CHECK_THROWS_AS(load_trace_csv(write_temp("neg.csv", "1,-2\n")), IoError);
}

TEST_CASE("trace csv round-trips") {
    DemandTrace trace;
    trace.slots = {2, 0, 7.5, 0.125, 10};
    const auto file = write_temp("roundtrip.csv", "");
    write_trace_csv(trace, file);
    const auto loaded = load_trace_csv(file);
    REQUIRE(loaded.horizon() == trace.horizon());
    for (int t = 1; t <= trace.horizon(); ++t) CHECK(loaded.at(t) == trace.at(t));
}

TEST_CASE("event binning takes the slot peak") {
    SUBCASE("one event per slot") {
        std::vector<UsageEvent> events{{10, 50}, {70, 110}, {130, 170}};
        const auto trace = bin_events(events, 60.0);
        REQUIRE(trace.horizon() == 3);
        for (int t = 1; t <= 3; ++t) CHECK(trace.at(t) == 1.0);
    }
    SUBCASE("all events in one slot") {
        std::vector<UsageEvent> events{{1, 5}, {2, 6}, {3, 7}, {4, 8}};
        const auto trace = bin_events(events, 60.0);
        REQUIRE(trace.horizon() == 1);
        CHECK(trace.at(1) == 4.0);
    }
    SUBCASE("carry-over across slot boundaries") {
        std::vector<UsageEvent> events{{0, 150}, {100, 130}};
        const auto trace = bin_events(events, 60.0);
        REQUIRE(trace.horizon() == 3);
        CHECK(trace.at(1) == 1.0);
        CHECK(trace.at(2) == 2.0);
        CHECK(trace.at(3) == 2.0);  // both still active at the 120s boundary
    }
    SUBCASE("unsorted input rejected") {
        std::vector<UsageEvent> events{{10, 20}, {5, 8}};
        CHECK_THROWS_AS(bin_events(events, 60.0), std::invalid_argument);
    }
}

TEST_CASE("event binning matches the quadratic overlap counter") {
    Rng rng(3, 55);
    for (int round = 0; round < 40; ++round) {
        const double slot = rng.uniform(5.0, 30.0);
        std::vector<UsageEvent> events;
        const int n = static_cast<int>(rng.uniform_int(1, 40));
        for (int i = 0; i < n; ++i) {
            const double start = rng.uniform(0.0, 200.0);
            events.push_back({start, start + rng.uniform(0.0, 80.0)});
        }
        std::sort(events.begin(), events.end(),
                  [](const UsageEvent& a, const UsageEvent& b) { return a.start < b.start; });
        const auto trace = bin_events(events, slot);
        for (int t = 1; t <= trace.horizon(); ++t)
            REQUIRE(trace.at(t) == overlap_peak(events, slot, t));
    }
}

TEST_CASE("spiky generator: determinism, flat baseline, spike frequency") {
    const auto a = generate_spiky_trace(9, 500, 2.0, 0.1, 8.0);
    const auto b = generate_spiky_trace(9, 500, 2.0, 0.1, 8.0);
    REQUIRE(a.horizon() == 500);
    for (int t = 1; t <= 500; ++t) CHECK(a.at(t) == b.at(t));

    const auto flat = generate_spiky_trace(9, 100, 3.5, 0.0, 8.0);
    for (int t = 1; t <= 100; ++t) CHECK(flat.at(t) == 3.5);

    // Binomial check: spike count within 3 sigma of p*T.
    const int horizon = 10000;
    const double p = 0.08;
    const auto big = generate_spiky_trace(123, horizon, 2.0, p, 8.0);
    int spikes = 0;
    for (int t = 1; t <= horizon; ++t)
        if (big.at(t) > 2.0) ++spikes;
    const double sigma = std::sqrt(p * (1 - p) * horizon);
    CHECK(std::abs(spikes - p * horizon) <= 3 * sigma);
}

} // TEST_SUITE
