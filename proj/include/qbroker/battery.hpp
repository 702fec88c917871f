#pragma once

#include "qbroker/billing.hpp"
#include "qbroker/demand_curve.hpp"
#include "qbroker/oracle.hpp"
#include "qbroker/rng.hpp"
#include "qbroker/trace.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace qbroker {

/// Random finite-zone curve whose marginal unit revenue lies in [p_m, p_M]
/// everywhere including the closure at zero demand (demand vanishes at a
/// finite gamma_op <= p_M, so the ski-rental renting-cost bounds hold for
/// every reduction, down to zero served units). gamma_star lands in
/// (p_m, p_M] by construction. These are the instances the worst-case ratio
/// guarantee is stated for.
PriceDemandCurve make_closed_curve(Rng& rng, double p_m, double p_M);

struct VerifyInstance {
    DemandTrace trace;
    PriceDemandCurve curve;
    BillingConfig billing;
};

struct BatteryParams {
    long long instances = 500;
    std::uint64_t seed = 1;
    int t_max = 10;
    int d_max = 3;
    std::vector<int> taus = {3, 4};
    /// w values to test per instance; empty means every w in [0, tau-1].
    std::optional<std::vector<int>> w_values = std::vector<int>{0};
    bool cross_check_bruteforce = false;
    int jobs = 1;  ///< instances evaluated concurrently
};

/// Deterministic instance for a given (seed, id): random integer demands up
/// to d_max over a horizon up to t_max, a random tau, and a closed curve with
/// sampled (p_m, p_M) satisfying cost/tau < p_m <= p_M < cost.
VerifyInstance make_random_instance(std::uint64_t seed, long long id, const BatteryParams& params);

struct BatteryResult {
    std::vector<RatioReport> reports;  ///< ordered by (instance_id, w)
    bool all_pass = true;
    double max_ratio = 0;
};

/// Runs check_competitiveness over the whole battery. With
/// cross_check_bruteforce the DP optimum is additionally required to equal
/// the brute-force optimum bit-exactly (reported as a failure otherwise).
BatteryResult run_ratio_battery(const BatteryParams& params);

void write_ratio_report_csv(const std::vector<RatioReport>& reports,
                            const std::filesystem::path& path);

struct SweepParams {
    std::vector<int> w_values;
    std::vector<double> p_m_values;
    double p_M = 0.8;
    double gamma_star = 0.3;
    double gamma_max = 6.0;
    int grid_steps = 200;
    int tau = 12;
    double cost = 1.0;
    int horizon = 288;
    int seeds = 24;
    std::uint64_t seed = 1;
    double base_demand = 2.0;
    double spike_prob = 0.08;
    double spike_height = 8.0;
    int jobs = 1;
};

struct SweepPoint {
    std::string run_id;
    int w = 0;
    double p_m = 0;
    double p_M = 0;
    std::uint64_t seed = 0;
    double profit = 0;
    double loss = 0;
    long long vms_bought = 0;
    double mean_markup = 0;   ///< mean gamma_t - gamma_star over finitely-priced slots
    long long deferred_slots = 0;
    bool duality_ok = true;
};

/// One partial-online run per (w, p_m, seed) on a fresh spiky trace and
/// synthesized curve. Deterministic per master seed; output ordered by
/// (p_m, w, seed) regardless of execution order.
std::vector<SweepPoint> run_sweep(const SweepParams& params);

void write_sweep_summary_csv(const std::vector<SweepPoint>& points,
                             const std::filesystem::path& path);

} // namespace qbroker
