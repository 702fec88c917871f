#pragma once

#include <stdexcept>
#include <string>

namespace qbroker {

/// Billing-cycle terms between the broker and the provider: a VM bought in
/// slot t is paid for `cost` and stays active through slot t+tau-1, in full,
/// regardless of use.
struct BillingConfig {
    int tau = 2;              ///< billing-cycle length in slots
    double cost = 1.0;        ///< VM cost price per billing cycle
    double gamma_star = 0.0;  ///< nominal selling price per VM per slot

    void validate() const {
        if (tau < 2) throw std::invalid_argument("billing: tau >= 2 required");
        if (!(cost > 0)) throw std::invalid_argument("billing: cost > 0 required");
        if (!(gamma_star * tau > cost))
            throw std::invalid_argument(
                "billing: gamma_star * tau > cost required (cycle revenue at the nominal price "
                "must exceed the VM cost), got gamma_star*tau = " +
                std::to_string(gamma_star * tau) + " vs cost = " + std::to_string(cost));
    }
};

} // namespace qbroker
