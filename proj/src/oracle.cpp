#include "qbroker/oracle.hpp"

#include "qbroker/errors.hpp"
#include "qbroker/scaler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace qbroker {

namespace {

int resolve_d_max(const DemandTrace& trace, const OracleParams& params) {
    if (params.d_max >= 0) return params.d_max;
    return static_cast<int>(std::ceil(trace.peak()));
}

/// Loss contribution of one slot given capacity X and purchases v. Shared by
/// the DP and the brute force so both accumulate bit-identical path sums.
double stage_cost(const PriceDemandCurve& curve, const BillingConfig& billing, double d_star,
                  int capacity, int v) {
    const double served = std::min(d_star, static_cast<double>(capacity));
    return demand_loss(curve, d_star, served) + billing.cost * v;
}

/// (d_max+1)^exp with saturation.
std::uint64_t pow_sat(std::uint64_t base, int exp) {
    std::uint64_t out = 1;
    for (int i = 0; i < exp; ++i) {
        if (out > std::numeric_limits<std::uint64_t>::max() / base)
            return std::numeric_limits<std::uint64_t>::max();
        out *= base;
    }
    return out;
}

void fill_served(OptSchedule& schedule, const BillingConfig& billing, const DemandTrace& trace) {
    const int horizon = trace.horizon();
    schedule.served.assign(static_cast<std::size_t>(horizon), 0.0);
    for (int t = 1; t <= horizon; ++t) {
        int capacity = 0;
        for (int i = std::max(1, t - billing.tau + 1); i <= t; ++i)
            capacity += schedule.v[static_cast<std::size_t>(i - 1)];
        schedule.served[static_cast<std::size_t>(t - 1)] =
            std::min(trace.at(t), static_cast<double>(capacity));
    }
}

} // namespace

long long OptSchedule::vms_bought() const {
    long long sum = 0;
    for (int x : v) sum += x;
    return sum;
}

OptSchedule opt_dp(const PriceDemandCurve& curve, const BillingConfig& billing,
                   const DemandTrace& trace, const OracleParams& params) {
    billing.validate();
    const int horizon = trace.horizon();
    OptSchedule schedule;
    if (horizon == 0) return schedule;

    const int d_max = resolve_d_max(trace, params);
    const std::uint64_t actions = static_cast<std::uint64_t>(d_max) + 1;
    const std::uint64_t states = pow_sat(actions, billing.tau - 1);
    if (states == std::numeric_limits<std::uint64_t>::max() ||
        states > params.state_budget / std::max(1, horizon))
        throw BudgetError("instance too large for exact oracle: T * (d_max+1)^(tau-1) exceeds " +
                          std::to_string(params.state_budget));

    // State encodes the purchases of the last tau-1 slots, most recent in the
    // lowest digit (base d_max+1).
    const std::uint64_t drop_div = pow_sat(actions, billing.tau - 2);
    std::vector<int> state_sum(states, 0);
    for (std::uint64_t s = 0; s < states; ++s) {
        std::uint64_t rest = s;
        int sum = 0;
        while (rest > 0) {
            sum += static_cast<int>(rest % actions);
            rest /= actions;
        }
        state_sum[s] = sum;
    }

    struct Cell {
        double value;
        long long vms;
    };
    const Cell unreachable{std::numeric_limits<double>::infinity(), 0};
    std::vector<Cell> current(states, unreachable);
    std::vector<Cell> next(states);
    current[0] = {0.0, 0};

    // Backtracking tables: chosen purchase per (t, state).
    std::vector<std::vector<int>> chosen(static_cast<std::size_t>(horizon),
                                         std::vector<int>(states, -1));
    std::vector<std::vector<std::uint64_t>> parent(static_cast<std::size_t>(horizon),
                                                   std::vector<std::uint64_t>(states, 0));

    for (int t = 1; t <= horizon; ++t) {
        std::fill(next.begin(), next.end(), unreachable);
        const double d_star = trace.at(t);
        for (std::uint64_t s = 0; s < states; ++s) {
            if (std::isinf(current[s].value)) continue;
            for (int v = 0; v <= d_max; ++v) {
                const int capacity = state_sum[s] + v;
                const double value =
                    current[s].value + stage_cost(curve, billing, d_star, capacity, v);
                const long long vms = current[s].vms + v;
                const std::uint64_t ns =
                    billing.tau >= 2 ? (s % drop_div) * actions + static_cast<std::uint64_t>(v)
                                     : 0;
                Cell& cell = next[ns];
                if (value < cell.value || (value == cell.value && vms < cell.vms)) {
                    cell = {value, vms};
                    chosen[static_cast<std::size_t>(t - 1)][ns] = v;
                    parent[static_cast<std::size_t>(t - 1)][ns] = s;
                }
            }
        }
        std::swap(current, next);
    }

    std::uint64_t best_state = 0;
    Cell best = unreachable;
    for (std::uint64_t s = 0; s < states; ++s) {
        if (current[s].value < best.value ||
            (current[s].value == best.value && current[s].vms < best.vms)) {
            best = current[s];
            best_state = s;
        }
    }

    schedule.total_loss = best.value;
    schedule.v.assign(static_cast<std::size_t>(horizon), 0);
    std::uint64_t s = best_state;
    for (int t = horizon; t >= 1; --t) {
        schedule.v[static_cast<std::size_t>(t - 1)] = chosen[static_cast<std::size_t>(t - 1)][s];
        s = parent[static_cast<std::size_t>(t - 1)][s];
    }
    fill_served(schedule, billing, trace);
    return schedule;
}

OptSchedule opt_bruteforce(const PriceDemandCurve& curve, const BillingConfig& billing,
                           const DemandTrace& trace, const OracleParams& params) {
    billing.validate();
    const int horizon = trace.horizon();
    OptSchedule schedule;
    if (horizon == 0) return schedule;

    const int d_max = resolve_d_max(trace, params);
    const std::uint64_t actions = static_cast<std::uint64_t>(d_max) + 1;
    if (pow_sat(actions, horizon) > 10'000'000ULL)
        throw BudgetError("instance too large for brute force: (d_max+1)^T exceeds 10^7");

    std::vector<int> v(static_cast<std::size_t>(horizon), 0);
    std::vector<int> best_v;
    double best_loss = std::numeric_limits<double>::infinity();
    long long best_vms = 0;

    // Depth-first in lexicographic order; pruning only on strictly worse
    // partial sums keeps every tying vector reachable, so the first minimum
    // found is the lexicographically smallest.
    auto recurse = [&](auto&& self, int t, double partial, long long vms) -> void {
        if (partial > best_loss) return;
        if (t > horizon) {
            if (partial < best_loss || (partial == best_loss && vms < best_vms)) {
                best_loss = partial;
                best_vms = vms;
                best_v = v;
            }
            return;
        }
        const double d_star = trace.at(t);
        for (int vt = 0; vt <= d_max; ++vt) {
            int capacity = vt;
            for (int i = std::max(1, t - billing.tau + 1); i < t; ++i)
                capacity += v[static_cast<std::size_t>(i - 1)];
            v[static_cast<std::size_t>(t - 1)] = vt;
            self(self, t + 1, partial + stage_cost(curve, billing, d_star, capacity, vt),
                 vms + vt);
        }
        v[static_cast<std::size_t>(t - 1)] = 0;
    };
    recurse(recurse, 1, 0.0, 0);

    schedule.v = best_v;
    schedule.total_loss = best_loss;
    fill_served(schedule, billing, trace);
    return schedule;
}

RunLedger schedule_to_ledger(const OptSchedule& schedule, const PriceDemandCurve& curve,
                             const BillingConfig& billing, const DemandTrace& trace) {
    RunLedger ledger;
    ledger.gamma_star = billing.gamma_star;
    ledger.cost = billing.cost;
    ledger.meta.p_m = curve.declared_p_m();
    ledger.meta.p_M = curve.declared_p_M();
    FleetState fleet(billing.tau, billing.cost);
    for (int t = 1; t <= trace.horizon(); ++t) {
        const int v = schedule.v[static_cast<std::size_t>(t - 1)];
        fleet.buy(v);
        const StepResult s = price_slot(curve, trace.at(t), fleet.active());
        ledger.rows.push_back(
            {t, trace.at(t), s.served, s.gamma, v, s.capacity, s.demand_loss, v * billing.cost});
        fleet.advance();
    }
    return ledger;
}

double theoretical_ratio(double p_M, int tau, int w, double cost) {
    if (tau < 2) throw std::domain_error("theoretical_ratio: tau >= 2 required");
    if (w < 0 || w >= tau) throw std::domain_error("theoretical_ratio: 0 <= w < tau required");
    if (!(p_M * tau > cost))
        throw std::domain_error("theoretical_ratio: p_M * tau > cost required");
    const double alpha = static_cast<double>(w) / tau;
    return 1.0 + std::min(1.0, p_M * tau * (1.0 - alpha) / cost);
}

RatioReport check_competitiveness(const PriceDemandCurve& curve, const BillingConfig& billing,
                                  const DemandTrace& trace, int w, const OracleParams& params) {
    RatioReport report;
    report.w = w;
    report.c_alpha = theoretical_ratio(curve.declared_p_M(), billing.tau, w, billing.cost);

    const RunLedger online = run_partial_online(curve, billing, ScalerConfig{w}, trace);
    report.loss_online = loss(online);
    report.vms_online = online.vms_bought();

    const OptSchedule opt = opt_dp(curve, billing, trace, params);
    report.loss_opt = opt.total_loss;
    report.vms_opt = opt.vms_bought();

    if (report.loss_opt > 0) {
        report.ratio = report.loss_online / report.loss_opt;
    } else {
        report.ratio = report.loss_online <= 1e-9
                           ? 1.0
                           : std::numeric_limits<double>::infinity();
    }
    report.pass = report.loss_online <= report.c_alpha * report.loss_opt + 1e-9 &&
                  report.vms_online <= report.vms_opt;
    return report;
}

} // namespace qbroker
