#pragma once

#include <vector>

namespace qbroker {

/// Active-VM tracker under quantized billing. Purchases expire exactly tau
/// slots after they were made; there is no early return (keeping an idle VM
/// to the end of its cycle costs nothing extra). Single-owner mutable state:
/// one simulation run owns one FleetState.
class FleetState {
public:
    FleetState(int tau, double cost);

    /// Number of VMs active in the current slot.
    int active() const { return active_; }

    /// Current slot index (1-based).
    int slot() const { return slot_; }

    /// Buys n VMs in the current slot.
    void buy(int n);

    /// Moves to the next slot; purchases made tau slots ago expire.
    void advance();

    long long total_bought() const { return total_bought_; }
    double total_cost() const { return total_cost_; }

private:
    std::vector<int> ring_;  // per-slot purchase counts for the last tau slots
    int head_ = 0;           // ring position of the current slot
    int slot_ = 1;
    int active_ = 0;
    long long total_bought_ = 0;
    double cost_per_vm_;
    double total_cost_ = 0;
};

} // namespace qbroker
