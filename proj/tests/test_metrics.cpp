#include "qbroker/ledger.hpp"

#include "qbroker/battery.hpp"
#include "qbroker/csv.hpp"
#include "qbroker/errors.hpp"
#include "qbroker/oracle.hpp"
#include "qbroker/rng.hpp"
#include "qbroker/scaler.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace qbroker;

namespace {

/// Ledger replay of the motivating example's dynamic-pricing case: prices
/// 0.03/0.045/0.03/0.03/0.038/0.03 against actual demands 2,10,4,3,8,4,
/// serving 2,6,4,3,6,4 with 6 VMs bought.
RunLedger case2_ledger() {
    RunLedger ledger;
    ledger.gamma_star = 0.03;
    ledger.cost = 0.132;
    const double d_star[] = {2, 10, 4, 3, 8, 4};
    const double d[] = {2, 6, 4, 3, 6, 4};
    const double gamma[] = {0.03, 0.045, 0.03, 0.03, 0.038, 0.03};
    const int v[] = {2, 4, 0, 0, 0, 0};
    const int x[] = {2, 6, 6, 6, 6, 6};
    for (int t = 0; t < 6; ++t) {
        ledger.rows.push_back({t + 1, d_star[t], d[t], gamma[t], v[t], x[t],
                               0.03 * d_star[t] - gamma[t] * d[t], v[t] * 0.132});
    }
    return ledger;
}

} // namespace

TEST_SUITE("metrics") {

TEST_CASE("static-pricing case loses $0.39") {
    DemandTrace trace;
    trace.slots = {2, 10, 4, 3, 8, 4};
    const auto ledger = run_static(qbtest::example_curve(), qbtest::example_billing(), trace);
    CHECK(profit(ledger) == doctest::Approx(-0.39).epsilon(1e-9));
    CHECK(ledger.vms_bought() == 10);
    for (const auto& row : ledger.rows) CHECK(row.demand_loss == 0.0);
    CHECK(check_duality(ledger));
    // Loss is the VM spend alone.
    CHECK(loss(ledger) == doctest::Approx(1.32).epsilon(1e-12));
}

TEST_CASE("dynamic-pricing case earns $0.096") {
    const auto ledger = case2_ledger();
    CHECK(profit(ledger) == doctest::Approx(0.096).epsilon(1e-9));
    // Duality pins the loss: 0.93 - 0.096; directly, 0.042 + 0.792.
    CHECK(loss(ledger) == doctest::Approx(0.834).epsilon(1e-9));
    CHECK(check_duality(ledger));
}

TEST_CASE("empty ledger totals are zero") {
    RunLedger empty;
    empty.gamma_star = 0.3;
    CHECK(profit(empty) == 0.0);
    CHECK(loss(empty) == 0.0);
    CHECK(check_duality(empty));
}

TEST_CASE("an inconsistent demand-loss column breaks duality") {
    auto ledger = case2_ledger();
    ledger.rows[1].demand_loss += 0.01;
    CHECK_FALSE(check_duality(ledger));
}

TEST_CASE("duality holds across algorithms on random instances") {
    int ledgers_checked = 0;
    for (long long id = 0; id < 60; ++id) {
        BatteryParams params;
        params.d_max = 3;
        const auto instance = make_random_instance(404, id, params);
        OracleParams oracle_params;
        oracle_params.d_max = 3;

        const auto fixed = run_static(instance.curve, instance.billing, instance.trace);
        CHECK(check_duality(fixed));
        ++ledgers_checked;
        for (int w = 0; w < instance.billing.tau; ++w) {
            const auto online =
                run_partial_online(instance.curve, instance.billing, ScalerConfig{w}, instance.trace);
            CHECK(check_duality(online));
            ++ledgers_checked;
        }
        const auto opt = opt_dp(instance.curve, instance.billing, instance.trace, oracle_params);
        const auto oracle_ledger =
            schedule_to_ledger(opt, instance.curve, instance.billing, instance.trace);
        CHECK(check_duality(oracle_ledger));
        CHECK(loss(oracle_ledger) == doctest::Approx(opt.total_loss).epsilon(1e-9));
        ++ledgers_checked;
    }
    CHECK(ledgers_checked >= 240);
}

TEST_CASE("ledger csv round-trips including deferred slots") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "qbroker_ledger_io";
    fs::create_directories(dir);

    DemandTrace trace;
    trace.slots = {0, 3, 3, 3, 1, 0, 2};
    const auto curve = synthesize_curve(qbtest::paper_spec(77));
    const BillingConfig billing{12, 1.0, 0.3};
    auto ledger = run_partial_online(curve, billing, ScalerConfig{0}, trace);
    ledger.meta.run_id = "io_check";

    const fs::path file = dir / "ledger.csv";
    write_ledger_csv(ledger, file);
    const auto loaded = read_ledger_csv(file);
    REQUIRE(loaded.rows.size() == ledger.rows.size());
    for (std::size_t i = 0; i < ledger.rows.size(); ++i) {
        CHECK(loaded.rows[i].gamma == ledger.rows[i].gamma);  // inf survives
        CHECK(loaded.rows[i].demand_loss == ledger.rows[i].demand_loss);
        CHECK(loaded.rows[i].v == ledger.rows[i].v);
    }
    CHECK(loaded.gamma_star == ledger.gamma_star);
    CHECK(profit(loaded) == doctest::Approx(profit(ledger)).epsilon(1e-12));
}

TEST_CASE("emit_report writes ledgers plus a summary and refuses clobbering") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "qbroker_report";
    fs::remove_all(dir);

    DemandTrace trace;
    trace.slots = {1, 2, 1};
    const auto curve = qbtest::finite_curve();
    const BillingConfig billing = qbtest::finite_billing();
    auto a = run_partial_online(curve, billing, ScalerConfig{0}, trace);
    a.meta.run_id = "w0";
    auto b = run_partial_online(curve, billing, ScalerConfig{1}, trace);
    b.meta.run_id = "w1";
    const std::vector<RunLedger> runs{a, b};

    emit_report(runs, dir, false);
    CHECK(fs::exists(dir / "w0_ledger.csv"));
    CHECK(fs::exists(dir / "w1_ledger.csv"));
    CHECK(fs::exists(dir / "summary.csv"));
    CHECK_THROWS_AS(emit_report(runs, dir, false), IoError);

    // Deterministic re-emit: identical bytes.
    std::stringstream before;
    before << std::ifstream(dir / "summary.csv").rdbuf();
    emit_report(runs, dir, true);
    std::stringstream after;
    after << std::ifstream(dir / "summary.csv").rdbuf();
    CHECK(before.str() == after.str());

    // Summary profit matches the ledger's.
    std::ifstream summary(dir / "summary.csv");
    std::string header, line;
    std::getline(summary, header);
    CHECK(header == "run_id,w,p_m,p_M,P,L,vms_bought");
    std::getline(summary, line);
    const auto fields = csv::split(line, ',');
    REQUIRE(fields.size() == 7);
    CHECK(fields[0] == "w0");
    CHECK(csv::parse_double(fields[4], "P") == doctest::Approx(profit(a)).epsilon(1e-12));
}

} // TEST_SUITE
