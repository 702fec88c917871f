#include "qbroker/battery.hpp"

#include "qbroker/csv.hpp"
#include "qbroker/errors.hpp"
#include "qbroker/scaler.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <functional>
#include <mutex>
#include <thread>

namespace qbroker {

namespace {

/// Runs fn(i) for i in [0, count) across `jobs` threads. Results must be
/// slotted by index inside fn; ordering of output never depends on timing.
void parallel_for(long long count, int jobs, const std::function<void(long long)>& fn) {
    jobs = std::max(1, jobs);
    if (jobs == 1 || count <= 1) {
        for (long long i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<long long> cursor{0};
    std::vector<std::thread> workers;
    std::exception_ptr error;
    std::mutex error_mutex;
    for (int j = 0; j < jobs; ++j) {
        workers.emplace_back([&] {
            while (true) {
                const long long i = cursor.fetch_add(1);
                if (i >= count) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!error) error = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& worker : workers) worker.join();
    if (error) std::rethrow_exception(error);
}

} // namespace

PriceDemandCurve make_closed_curve(Rng& rng, double p_m, double p_M) {
    if (!(p_m < p_M)) throw std::invalid_argument("closed curve: p_m < p_M required");
    // Work upward from zero demand. The closing segment's marginal revenue
    // runs linearly from gamma_op (at zero) down to q = 2*gamma_1 - gamma_op;
    // interior segments get constant marginal revenues drawn at or below q,
    // non-increasing in ratio, which keeps the implied price strictly
    // decreasing in ratio and every marginal revenue inside [p_m, p_M].
    const double gamma_op = rng.uniform(p_m + 0.6 * (p_M - p_m), p_M);
    const double mid = 0.5 * (p_m + gamma_op);
    const double gamma_1 = rng.uniform(mid + 0.1 * (gamma_op - mid), mid + 0.9 * (gamma_op - mid));
    const double q = 2 * gamma_1 - gamma_op;  // in (p_m, gamma_1)

    const double r_1 = rng.uniform(0.1, 0.4);
    const int interior = static_cast<int>(rng.uniform_int(2, 5));
    std::vector<double> breaks;  // ratios r_1 < ... < 1
    breaks.push_back(r_1);
    for (int i = 0; i < interior - 1; ++i) breaks.push_back(rng.uniform(r_1 + 1e-3, 1.0 - 1e-3));
    breaks.push_back(1.0);
    std::sort(breaks.begin(), breaks.end());

    std::vector<double> marginal(static_cast<std::size_t>(interior));
    for (auto& p : marginal) p = rng.uniform(p_m, q);
    std::sort(marginal.begin(), marginal.end(), std::greater<>());  // largest nearest r_1

    // Knots from low ratio to high, then reversed into price order.
    std::vector<CurvePoint> knots;
    knots.push_back({gamma_op, 0.0});
    knots.push_back({gamma_1, r_1});
    double revenue = gamma_1 * r_1;
    for (int i = 0; i < interior; ++i) {
        const double r = breaks[static_cast<std::size_t>(i + 1)];
        revenue += marginal[static_cast<std::size_t>(i)] * (r - breaks[static_cast<std::size_t>(i)]);
        knots.push_back({revenue / r, r});
    }
    std::reverse(knots.begin(), knots.end());
    return PriceDemandCurve(std::move(knots), p_m, p_M);
}

VerifyInstance make_random_instance(std::uint64_t seed, long long id,
                                    const BatteryParams& params) {
    Rng rng(seed, RngStream::instance_sampling, static_cast<std::uint64_t>(id));
    const int tau =
        params.taus[static_cast<std::size_t>(rng.uniform_int(0, static_cast<long long>(params.taus.size()) - 1))];
    const double cost = 1.0;
    const double p_m = cost / tau + (0.7 - cost / tau) * rng.uniform(0.05, 1.0);
    const double p_M = p_m + (0.97 - p_m) * rng.uniform(0.1, 1.0);

    VerifyInstance instance{DemandTrace{}, make_closed_curve(rng, p_m, p_M), BillingConfig{}};
    instance.billing = {tau, cost, instance.curve.gamma_star()};

    const int horizon = static_cast<int>(rng.uniform_int(1, params.t_max));
    instance.trace.slots.reserve(static_cast<std::size_t>(horizon));
    for (int t = 0; t < horizon; ++t)
        instance.trace.slots.push_back(static_cast<double>(rng.uniform_int(0, params.d_max)));
    return instance;
}

BatteryResult run_ratio_battery(const BatteryParams& params) {
    std::vector<std::vector<RatioReport>> per_instance(
        static_cast<std::size_t>(params.instances));
    std::atomic<long long> mismatches{0};

    parallel_for(params.instances, params.jobs, [&](long long id) {
        const VerifyInstance instance = make_random_instance(params.seed, id, params);
        OracleParams oracle_params;
        oracle_params.d_max = params.d_max;

        std::vector<int> w_values;
        if (params.w_values) {
            w_values = *params.w_values;
        } else {
            for (int w = 0; w < instance.billing.tau; ++w) w_values.push_back(w);
        }

        bool dp_ok = true;
        if (params.cross_check_bruteforce) {
            const OptSchedule dp =
                opt_dp(instance.curve, instance.billing, instance.trace, oracle_params);
            const OptSchedule bf =
                opt_bruteforce(instance.curve, instance.billing, instance.trace, oracle_params);
            if (dp.total_loss != bf.total_loss) {  // bit-exact by construction
                dp_ok = false;
                ++mismatches;
            }
        }

        auto& reports = per_instance[static_cast<std::size_t>(id)];
        for (int w : w_values) {
            if (w >= instance.billing.tau) continue;
            RatioReport report = check_competitiveness(instance.curve, instance.billing,
                                                       instance.trace, w, oracle_params);
            report.instance_id = id;
            report.pass = report.pass && dp_ok;
            reports.push_back(report);
        }
    });

    BatteryResult result;
    for (const auto& reports : per_instance) {
        for (const auto& report : reports) {
            result.all_pass = result.all_pass && report.pass;
            if (std::isfinite(report.ratio)) result.max_ratio = std::max(result.max_ratio, report.ratio);
            result.reports.push_back(report);
        }
    }
    if (mismatches > 0) result.all_pass = false;
    return result;
}

void write_ratio_report_csv(const std::vector<RatioReport>& reports,
                            const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    out << "instance_id,w,L_A,L_OPT,ratio,c_alpha,pass,N_w,N_OPT\n";
    for (const auto& r : reports) {
        out << r.instance_id << ',' << r.w << ',' << csv::format_double(r.loss_online) << ','
            << csv::format_double(r.loss_opt) << ',' << csv::format_double(r.ratio) << ','
            << csv::format_double(r.c_alpha) << ',' << (r.pass ? 1 : 0) << ',' << r.vms_online
            << ',' << r.vms_opt << '\n';
    }
    if (!out) throw IoError("write failed: " + path.string());
}

std::vector<SweepPoint> run_sweep(const SweepParams& params) {
    if (params.w_values.empty()) throw std::invalid_argument("sweep: empty w list");
    if (params.p_m_values.empty()) throw std::invalid_argument("sweep: empty p_m list");
    if (params.seeds < 1) throw std::invalid_argument("sweep: seeds >= 1 required");

    struct Task {
        std::size_t pi;
        std::size_t wi;
        int si;
    };
    std::vector<Task> tasks;
    for (std::size_t pi = 0; pi < params.p_m_values.size(); ++pi)
        for (std::size_t wi = 0; wi < params.w_values.size(); ++wi)
            for (int si = 0; si < params.seeds; ++si) tasks.push_back({pi, wi, si});

    std::vector<SweepPoint> points(tasks.size());
    parallel_for(static_cast<long long>(tasks.size()), params.jobs, [&](long long idx) {
        const Task task = tasks[static_cast<std::size_t>(idx)];
        const double p_m = params.p_m_values[task.pi];
        const int w = params.w_values[task.wi];

        // Traces are paired across (w, p_m) by the per-seed stream; the curve
        // realization is paired across w for a fixed p_m.
        const DemandTrace trace =
            generate_spiky_trace(detail::splitmix64(params.seed) + static_cast<std::uint64_t>(task.si),
                                 params.horizon, params.base_demand, params.spike_prob,
                                 params.spike_height);
        CurveSpec spec;
        spec.p_m = p_m;
        spec.p_M = params.p_M;
        spec.gamma_star = params.gamma_star;
        spec.gamma_max = params.gamma_max;
        spec.grid_steps = params.grid_steps;
        spec.tau = params.tau;
        spec.cost = params.cost;
        spec.seed = detail::splitmix64(params.seed ^ (0x9e3779b97f4a7c15ULL * (task.pi + 1))) +
                    static_cast<std::uint64_t>(task.si);
        const PriceDemandCurve curve = synthesize_curve(spec);
        const BillingConfig billing{params.tau, params.cost, params.gamma_star};

        RunLedger ledger = run_partial_online(curve, billing, ScalerConfig{w}, trace);
        ledger.meta.run_id = "pm" + csv::format_double(p_m) + "_w" + std::to_string(w) + "_s" +
                             std::to_string(task.si);

        SweepPoint point;
        point.run_id = ledger.meta.run_id;
        point.w = w;
        point.p_m = p_m;
        point.p_M = params.p_M;
        point.seed = static_cast<std::uint64_t>(task.si);
        point.profit = profit(ledger);
        point.loss = loss(ledger);
        point.vms_bought = ledger.vms_bought();
        point.duality_ok = check_duality(ledger);

        double markup_sum = 0;
        long long priced = 0;
        for (const auto& row : ledger.rows) {
            if (!std::isfinite(row.gamma)) {
                ++point.deferred_slots;
                continue;
            }
            if (row.d_star > 0) {
                markup_sum += row.gamma - billing.gamma_star;
                ++priced;
            }
        }
        point.mean_markup = priced > 0 ? markup_sum / priced : 0.0;
        points[static_cast<std::size_t>(idx)] = point;
    });
    return points;
}

void write_sweep_summary_csv(const std::vector<SweepPoint>& points,
                             const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    out << "run_id,w,p_m,p_M,P,L,vms_bought\n";
    for (const auto& p : points) {
        out << p.run_id << ',' << p.w << ',' << csv::format_double(p.p_m) << ','
            << csv::format_double(p.p_M) << ',' << csv::format_double(p.profit) << ','
            << csv::format_double(p.loss) << ',' << p.vms_bought << '\n';
    }
    if (!out) throw IoError("write failed: " + path.string());
}

} // namespace qbroker
