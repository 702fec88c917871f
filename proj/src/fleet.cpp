#include "qbroker/fleet.hpp"

#include <stdexcept>

namespace qbroker {

FleetState::FleetState(int tau, double cost) : cost_per_vm_(cost) {
    if (tau < 1) throw std::invalid_argument("fleet: tau >= 1 required");
    ring_.assign(static_cast<std::size_t>(tau), 0);
}

void FleetState::buy(int n) {
    if (n < 0) throw std::invalid_argument("fleet: cannot buy a negative number of VMs");
    ring_[static_cast<std::size_t>(head_)] += n;
    active_ += n;
    total_bought_ += n;
    total_cost_ += n * cost_per_vm_;
}

void FleetState::advance() {
    ++slot_;
    head_ = (head_ + 1) % static_cast<int>(ring_.size());
    // The slot entering the ring window replaces the one bought tau slots ago.
    active_ -= ring_[static_cast<std::size_t>(head_)];
    ring_[static_cast<std::size_t>(head_)] = 0;
}

} // namespace qbroker
