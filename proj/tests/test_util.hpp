#pragma once

#include "qbroker/billing.hpp"
#include "qbroker/demand_curve.hpp"

namespace qbtest {

/// Calibration fixture for the motivating example: a $0.03 nominal price,
/// $0.045 cuts demand 10 -> 6 (ratio 0.6), $0.038 cuts 8 -> 6 (ratio 0.75).
/// Semi-infinite; declared bounds cover the implied segment revenues
/// (0.0075 and 0.01).
inline qbroker::PriceDemandCurve example_curve() {
    return qbroker::PriceDemandCurve({{0.03, 1.0}, {0.038, 0.75}, {0.045, 0.6}}, 0.005, 0.012);
}

inline qbroker::BillingConfig example_billing() { return {6, 0.132, 0.03}; }

/// Hand-built finite-zone fixture: demand vanishes at gamma_op = 0.7.
/// Segment marginal revenues: 0.425, 0.51428..., and [0.5, 0.7] on the
/// closing segment; declared bounds 0.4 / 0.75.
inline qbroker::PriceDemandCurve finite_curve() {
    return qbroker::PriceDemandCurve({{0.5, 1.0}, {0.55, 0.6}, {0.6, 0.25}, {0.7, 0.0}}, 0.4,
                                     0.75);
}

inline qbroker::BillingConfig finite_billing() { return {3, 0.8, 0.5}; }

/// The simulation-study parameters: tau = 12 slots per cycle, unit cost,
/// nominal price 0.3, marginal revenue in [1/12, 0.8].
inline qbroker::CurveSpec paper_spec(std::uint64_t seed, double p_m = 1.0 / 12) {
    qbroker::CurveSpec spec;
    spec.p_m = p_m;
    spec.p_M = 0.8;
    spec.gamma_star = 0.3;
    spec.gamma_max = 6.0;
    spec.grid_steps = 200;
    spec.seed = seed;
    spec.tau = 12;
    spec.cost = 1.0;
    return spec;
}

} // namespace qbtest
