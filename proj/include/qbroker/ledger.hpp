#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace qbroker {

/// One simulated slot: actual demand, served demand, posted price, purchases,
/// planned capacity, and the slot's two loss components. `gamma` is +inf on
/// slots where all demand was deferred on a semi-infinite curve (served 0).
struct LedgerRow {
    int t = 0;
    double d_star = 0;
    double d = 0;
    double gamma = 0;
    int v = 0;
    int x = 0;
    double demand_loss = 0;
    double vm_cost = 0;
};

/// Identifies a run in reports and sweep summaries.
struct RunMeta {
    std::string run_id;
    int w = 0;
    double p_m = 0;
    double p_M = 0;
};

struct RunLedger {
    std::vector<LedgerRow> rows;
    double gamma_star = 0;
    double cost = 1.0;
    RunMeta meta;

    double total_actual_demand() const;
    long long vms_bought() const;
};

/// OP1 total: sum over slots of (revenue - cost * v). Revenue is gamma * d
/// with served demand 0 contributing 0 (never evaluates inf * 0).
double profit(const RunLedger& ledger);

/// OP2 total: sum of per-slot demand losses plus VM cost.
double loss(const RunLedger& ledger);

/// Profit/loss complementarity: P + L must equal gamma_star * sum(d*) within
/// 1e-9 relative. Holds for any consistently-built ledger regardless of the
/// pricing policy that produced it.
bool check_duality(const RunLedger& ledger);

/// Header `t,d_star,d,gamma,v,x,demand_loss,vm_cost`, one row per slot,
/// totals as trailing `# P=` / `# L=` comment lines.
void write_ledger_csv(const RunLedger& ledger, const std::filesystem::path& path);
RunLedger read_ledger_csv(const std::filesystem::path& path);

/// Writes one `<run_id>_ledger.csv` per run plus `summary.csv`
/// (`run_id,w,p_m,p_M,P,L,vms_bought`). Refuses to clobber existing files
/// unless `overwrite`.
void emit_report(std::span<const RunLedger> ledgers, const std::filesystem::path& out_dir,
                 bool overwrite);

} // namespace qbroker
