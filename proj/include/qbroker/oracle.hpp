#pragma once

#include "qbroker/billing.hpp"
#include "qbroker/demand_curve.hpp"
#include "qbroker/ledger.hpp"
#include "qbroker/trace.hpp"

#include <cstdint>
#include <vector>

namespace qbroker {

/// Offline-optimal purchase schedule: the loss-minimizing integer purchase
/// vector with its per-slot served demands. The price decision is eliminated
/// analytically — serving d_t = min(d*_t, capacity_t) at g(d*_t, d_t) is
/// loss-minimal because marginal unit revenue is positive.
struct OptSchedule {
    std::vector<int> v;         ///< purchases per slot, 1-based externally
    std::vector<double> served; ///< d_t per slot
    double total_loss = 0;      ///< L_opt

    long long vms_bought() const;
};

struct OracleParams {
    int d_max = -1;                       ///< per-slot purchase cap; -1 = ceil(peak demand)
    std::uint64_t state_budget = 10'000'000;  ///< cap on T * (d_max+1)^(tau-1)
};

/// Exact minimizer by dynamic programming over the purchases of the last
/// tau-1 slots. Throws BudgetError when T * (d_max+1)^(tau-1) exceeds the
/// configured budget ("instance too large for exact oracle").
OptSchedule opt_dp(const PriceDemandCurve& curve, const BillingConfig& billing,
                   const DemandTrace& trace, const OracleParams& params = {});

/// Exhaustive minimum over all (d_max+1)^T purchase vectors; ties broken by
/// fewest total VMs, then lexicographically smallest vector. Independent
/// cross-check of opt_dp.
OptSchedule opt_bruteforce(const PriceDemandCurve& curve, const BillingConfig& billing,
                           const DemandTrace& trace, const OracleParams& params = {});

/// Expands a purchase schedule into a full per-slot ledger (prices derived
/// from the curve) so one metrics path serves every algorithm.
RunLedger schedule_to_ledger(const OptSchedule& schedule, const PriceDemandCurve& curve,
                             const BillingConfig& billing, const DemandTrace& trace);

/// Worst-case loss ratio bound of the lookahead-w scaler:
/// 1 + min(1, p_M * tau * (1 - w/tau)), with the buy threshold at `cost`.
/// 2 exactly at w = 0.
double theoretical_ratio(double p_M, int tau, int w, double cost = 1.0);

/// One empirical competitiveness measurement against the exact oracle.
struct RatioReport {
    long long instance_id = 0;
    int w = 0;
    double loss_online = 0;       ///< L_A
    double loss_opt = 0;          ///< L_OPT
    double ratio = 1;             ///< L_A / L_OPT (1 when both are zero)
    double c_alpha = 2;           ///< theoretical bound
    bool pass = false;            ///< L_A <= c_alpha * L_OPT + 1e-9 and N_w <= N_OPT
    long long vms_online = 0;     ///< N_w
    long long vms_opt = 0;        ///< N_OPT
};

/// Runs the online scaler and the exact oracle on one instance and compares
/// the losses against the theoretical bound (and the purchase counts:
/// the online scaler never buys more than the optimum).
RatioReport check_competitiveness(const PriceDemandCurve& curve, const BillingConfig& billing,
                                  const DemandTrace& trace, int w,
                                  const OracleParams& params = {});

} // namespace qbroker
