#include "qbroker/scaler.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace qbroker {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

void require_valid(const PriceDemandCurve& curve, const BillingConfig& billing) {
    billing.validate();
    const auto report = validate(curve, billing);
    if (!report.all_pass()) {
        for (const auto& check : report.checks)
            if (!check.pass)
                throw std::invalid_argument("curve failed validation (" + check.name +
                                            "): " + check.detail);
    }
    if (curve.gamma_star() != billing.gamma_star)
        throw std::invalid_argument("curve nominal price does not match billing gamma_star");
}

} // namespace

StepResult price_slot(const PriceDemandCurve& curve, double d_star, int x) {
    StepResult r;
    r.capacity = x;
    if (static_cast<double>(x) <= d_star) {
        r.served = x;
        if (x == 0 && d_star > 0 && !curve.finite_zone()) {
            r.gamma = kInf;  // all demand deferred; no finite price reaches 0
        } else {
            r.gamma = price_for_demand(curve, d_star, r.served);
        }
    } else {
        r.gamma = curve.gamma_star();
        r.served = d_star;
    }
    r.demand_loss = demand_loss(curve, d_star, r.served);
    return r;
}

void ScalerConfig::validate(int tau) const {
    if (w < 0) throw std::invalid_argument("scaler: w >= 0 required");
    if (w >= tau) throw std::invalid_argument("scaler: w < tau required");
}

double net_renting_cost(const PriceDemandCurve& curve, std::span<const double> demand,
                        std::span<const int> capacity) {
    if (demand.size() != capacity.size())
        throw std::invalid_argument("net_renting_cost: demand/capacity length mismatch");
    double l = 0;
    for (std::size_t i = 0; i < demand.size(); ++i) {
        if (capacity[i] + 1 <= demand[i])
            l += renting_cost(curve, demand[i], capacity[i] + 1, 1.0);
    }
    return l;
}

PartialOnlineScaler::PartialOnlineScaler(const PriceDemandCurve& curve,
                                         const BillingConfig& billing, const ScalerConfig& scaler,
                                         const DemandTrace& trace)
    : curve_(&curve),
      trace_(&trace),
      billing_(billing),
      w_(scaler.w),
      fleet_(billing.tau, billing.cost) {
    scaler.validate(billing.tau);
    // Planned capacity extends tau-1 slots past the horizon: a purchase near
    // the end still credits its whole cycle.
    capacity_.assign(static_cast<std::size_t>(trace.horizon() + billing.tau + 1), 0);
}

StepResult PartialOnlineScaler::step() {
    if (done()) throw std::logic_error("scaler: stepping past the end of the trace");
    const int t = t_;
    const int horizon = trace_->horizon();
    const int tau = billing_.tau;

    // Sliding window [t+w-tau+1, t+w], clipped to the trace (outside slots
    // have zero demand and can never pass the buy guard).
    const int win_lo = std::max(1, t + w_ - tau + 1);
    const int win_hi = std::min(horizon, t + w_);

    int bought = 0;
    while (true) {
        double l = 0;
        for (int i = win_lo; i <= win_hi; ++i) {
            const double d_star = trace_->at(i);
            const int x = capacity_[static_cast<std::size_t>(i)];
            if (x + 1 <= d_star) l += renting_cost(*curve_, d_star, x + 1, 1.0);
        }
        if (l < billing_.cost) break;
        // Renting this window already costs a VM: buy one. It serves the
        // current and the next tau-1 slots, and the window's past entries are
        // bumped to mark those rentals as corrected.
        ++bought;
        const int credit_lo = std::max(1, t + w_ - tau + 1);
        const int credit_hi = std::min(static_cast<int>(capacity_.size()) - 1, t + tau - 1);
        for (int i = credit_lo; i <= credit_hi; ++i) ++capacity_[static_cast<std::size_t>(i)];
    }

    fleet_.buy(bought);
    const int x_t = capacity_[static_cast<std::size_t>(t)];
    if (x_t != fleet_.active())
        throw std::logic_error("scaler: planned capacity diverged from the fleet's active count");

    StepResult result = price_slot(*curve_, trace_->at(t), x_t);
    result.bought = bought;

    fleet_.advance();
    ++t_;
    return result;
}

RunLedger run_partial_online(const PriceDemandCurve& curve, const BillingConfig& billing,
                             const ScalerConfig& scaler, const DemandTrace& trace) {
    require_valid(curve, billing);
    PartialOnlineScaler engine(curve, billing, scaler, trace);
    RunLedger ledger;
    ledger.gamma_star = billing.gamma_star;
    ledger.cost = billing.cost;
    ledger.meta.w = scaler.w;
    ledger.meta.p_m = curve.declared_p_m();
    ledger.meta.p_M = curve.declared_p_M();
    ledger.rows.reserve(static_cast<std::size_t>(trace.horizon()));
    while (!engine.done()) {
        const int t = engine.slot();
        const StepResult s = engine.step();
        if (s.served > s.capacity) throw std::logic_error("scaler: served demand exceeds capacity");
        ledger.rows.push_back({t, trace.at(t), s.served, s.gamma, s.bought, s.capacity,
                               s.demand_loss, s.bought * billing.cost});
    }
    return ledger;
}

RunLedger run_static(const PriceDemandCurve& curve, const BillingConfig& billing,
                     const DemandTrace& trace) {
    require_valid(curve, billing);
    FleetState fleet(billing.tau, billing.cost);
    RunLedger ledger;
    ledger.gamma_star = billing.gamma_star;
    ledger.cost = billing.cost;
    ledger.meta.p_m = curve.declared_p_m();
    ledger.meta.p_M = curve.declared_p_M();
    ledger.rows.reserve(static_cast<std::size_t>(trace.horizon()));
    for (int t = 1; t <= trace.horizon(); ++t) {
        const double d_star = trace.at(t);
        const int needed = static_cast<int>(std::ceil(d_star));
        const int v = std::max(0, needed - fleet.active());
        fleet.buy(v);
        ledger.rows.push_back(
            {t, d_star, d_star, billing.gamma_star, v, fleet.active(), 0.0, v * billing.cost});
        fleet.advance();
    }
    return ledger;
}

} // namespace qbroker
