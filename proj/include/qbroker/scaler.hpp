#pragma once

#include "qbroker/billing.hpp"
#include "qbroker/demand_curve.hpp"
#include "qbroker/fleet.hpp"
#include "qbroker/ledger.hpp"
#include "qbroker/trace.hpp"

#include <span>

namespace qbroker {

/// Lookahead window for the partial online scaler; w = 0 is the fully online
/// case and runs through the same code path.
struct ScalerConfig {
    int w = 0;

    double alpha(int tau) const { return static_cast<double>(w) / tau; }
    void validate(int tau) const;  // requires 0 <= w < tau
};

/// Net renting cost of one more unit per slot over a window: sums
/// R(d*_i, x_i + 1, 1) over the slots where x_i + 1 <= d*_i (slots already at
/// or above demand contribute nothing). `demand` and `capacity` are zipped
/// per-slot views of equal length.
double net_renting_cost(const PriceDemandCurve& curve, std::span<const double> demand,
                        std::span<const int> capacity);

/// Decisions of one processed slot.
struct StepResult {
    double gamma = 0;        ///< posted price (+inf when all demand deferred)
    int bought = 0;          ///< v_t
    double served = 0;       ///< d_t = min(d*_t, x_t)
    double demand_loss = 0;  ///< gamma_star * d*_t - revenue
    int capacity = 0;        ///< planned x_t, equals the fleet's active count
};

/// Price, served demand and loss for a slot with planned capacity x: serve
/// min(d*, x); price g(d*, x) when capacity binds, the nominal price
/// otherwise. Capacity 0 against positive demand on a semi-infinite curve is
/// the all-deferred slot (price +inf, served 0, loss gamma_star * d*).
StepResult price_slot(const PriceDemandCurve& curve, double d_star, int x);

/// Break-even scaler with lookahead w: keeps reducing demand via price until
/// the net renting cost over the sliding window [t+w-tau+1, t+w] reaches one
/// VM's cost, then buys, crediting the VM to the current and future slots and
/// marking the mistake corrected over the window's past part. Window indices
/// outside [1, T] contribute zero. State-carrying; one instance per run.
class PartialOnlineScaler {
public:
    PartialOnlineScaler(const PriceDemandCurve& curve, const BillingConfig& billing,
                        const ScalerConfig& scaler, const DemandTrace& trace);

    bool done() const { return t_ > trace_->horizon(); }
    int slot() const { return t_; }

    /// Processes slot t and advances. Requires !done().
    StepResult step();

    const FleetState& fleet() const { return fleet_; }

private:
    const PriceDemandCurve* curve_;
    const DemandTrace* trace_;
    BillingConfig billing_;
    int w_;
    int t_ = 1;
    std::vector<int> capacity_;  // planned x_i, 1-based, extends tau-1 past T
    FleetState fleet_;
};

/// Runs the partial online scaler over the whole trace. Validates the curve
/// against the billing config first.
RunLedger run_partial_online(const PriceDemandCurve& curve, const BillingConfig& billing,
                             const ScalerConfig& scaler, const DemandTrace& trace);

/// Static-pricing baseline: gamma_t = gamma_star always, buys whatever
/// capacity is missing (v_t = max(0, ceil(d*_t) - x_t)), serves everything.
RunLedger run_static(const PriceDemandCurve& curve, const BillingConfig& billing,
                     const DemandTrace& trace);

} // namespace qbroker
