#include "qbroker/ledger.hpp"

#include "qbroker/csv.hpp"
#include "qbroker/errors.hpp"

#include <cmath>
#include <fstream>

namespace qbroker {

double RunLedger::total_actual_demand() const {
    double sum = 0;
    for (const auto& row : rows) sum += row.d_star;
    return sum;
}

long long RunLedger::vms_bought() const {
    long long sum = 0;
    for (const auto& row : rows) sum += row.v;
    return sum;
}

double profit(const RunLedger& ledger) {
    double total = 0;
    for (const auto& row : ledger.rows) {
        const double revenue = row.d > 0 ? row.gamma * row.d : 0.0;
        total += revenue - row.vm_cost;
    }
    return total;
}

double loss(const RunLedger& ledger) {
    double total = 0;
    for (const auto& row : ledger.rows) total += row.demand_loss + row.vm_cost;
    return total;
}

bool check_duality(const RunLedger& ledger) {
    const double nominal = ledger.gamma_star * ledger.total_actual_demand();
    return std::abs(profit(ledger) + loss(ledger) - nominal) <= 1e-9 * (1 + std::abs(nominal));
}

void write_ledger_csv(const RunLedger& ledger, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    out << "t,d_star,d,gamma,v,x,demand_loss,vm_cost\n";
    for (const auto& r : ledger.rows) {
        out << r.t << ',' << csv::format_double(r.d_star) << ',' << csv::format_double(r.d) << ','
            << csv::format_double(r.gamma) << ',' << r.v << ',' << r.x << ','
            << csv::format_double(r.demand_loss) << ',' << csv::format_double(r.vm_cost) << '\n';
    }
    out << "# P=" << csv::format_double(profit(ledger)) << '\n';
    out << "# L=" << csv::format_double(loss(ledger)) << '\n';
    out << "# gamma_star=" << csv::format_double(ledger.gamma_star) << '\n';
    out << "# cost=" << csv::format_double(ledger.cost) << '\n';
    if (!out) throw IoError("write failed: " + path.string());
}

RunLedger read_ledger_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open ledger file: " + path.string());
    RunLedger ledger;
    ledger.meta.run_id = path.stem().string();
    std::string line;
    int lineno = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++lineno;
        const auto ctx = path.string() + ":" + std::to_string(lineno);
        auto text = csv::trim(line);
        if (text.empty()) continue;
        if (text.front() == '#') {
            auto body = csv::trim(text.substr(1));
            const auto eq = body.find('=');
            if (eq == std::string_view::npos) continue;
            const auto key = csv::trim(body.substr(0, eq));
            const auto value = csv::trim(body.substr(eq + 1));
            if (key == "gamma_star") ledger.gamma_star = csv::parse_double(value, ctx);
            if (key == "cost") ledger.cost = csv::parse_double(value, ctx);
            continue;
        }
        if (!header_seen) {
            if (text != "t,d_star,d,gamma,v,x,demand_loss,vm_cost")
                throw IoError(ctx + ": unexpected ledger header");
            header_seen = true;
            continue;
        }
        const auto f = csv::split(text, ',');
        if (f.size() != 8) throw IoError(ctx + ": expected 8 fields");
        LedgerRow row;
        row.t = static_cast<int>(csv::parse_int(f[0], ctx));
        row.d_star = csv::parse_double(f[1], ctx);
        row.d = csv::parse_double(f[2], ctx);
        row.gamma = csv::parse_double(f[3], ctx);
        row.v = static_cast<int>(csv::parse_int(f[4], ctx));
        row.x = static_cast<int>(csv::parse_int(f[5], ctx));
        row.demand_loss = csv::parse_double(f[6], ctx);
        row.vm_cost = csv::parse_double(f[7], ctx);
        ledger.rows.push_back(row);
    }
    return ledger;
}

void emit_report(std::span<const RunLedger> ledgers, const std::filesystem::path& out_dir,
                 bool overwrite) {
    std::filesystem::create_directories(out_dir);
    std::vector<std::filesystem::path> targets;
    for (const auto& ledger : ledgers)
        targets.push_back(out_dir / (ledger.meta.run_id + "_ledger.csv"));
    targets.push_back(out_dir / "summary.csv");
    if (!overwrite) {
        for (const auto& target : targets)
            if (std::filesystem::exists(target))
                throw IoError("refusing to overwrite " + target.string() +
                              " (pass the overwrite flag)");
    }
    for (std::size_t i = 0; i < ledgers.size(); ++i) write_ledger_csv(ledgers[i], targets[i]);

    std::ofstream summary(targets.back());
    if (!summary) throw IoError("cannot open for writing: " + targets.back().string());
    summary << "run_id,w,p_m,p_M,P,L,vms_bought\n";
    for (const auto& ledger : ledgers) {
        summary << ledger.meta.run_id << ',' << ledger.meta.w << ','
                << csv::format_double(ledger.meta.p_m) << ','
                << csv::format_double(ledger.meta.p_M) << ','
                << csv::format_double(profit(ledger)) << ',' << csv::format_double(loss(ledger))
                << ',' << ledger.vms_bought() << '\n';
    }
    if (!summary) throw IoError("write failed: " + targets.back().string());
}

} // namespace qbroker
