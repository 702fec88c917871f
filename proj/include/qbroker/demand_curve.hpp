#pragma once

#include "qbroker/billing.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace qbroker {

/// Parameters for synthesizing a price-demand curve.
///
/// The marginal unit revenue p(d*,d) = d/dd [d * g(d*,d)] of the generated
/// curve is kept inside [p_m, p_M], which must satisfy
///
///     cost/tau < p_m <= p_M < cost
///
/// (renting one unit for a whole cycle beats buying; renting for one slot is
/// cheaper than buying). gamma_star > p_m is required for the slope interval
/// to be nonempty, and gamma_star * tau > cost for the broker to profit at
/// the nominal price.
struct CurveSpec {
    double p_m = 0;
    double p_M = 0;
    double gamma_star = 0;
    double gamma_max = 0;      ///< upper end of the uniform price grid
    int grid_steps = 64;       ///< number of uniform price subdivisions
    std::uint64_t seed = 0;
    int tau = 2;
    double cost = 1.0;

    /// Throws std::invalid_argument naming the violated inequality.
    void validate() const;
};

struct CurvePoint {
    double gamma;  ///< posted price per VM per slot
    double ratio;  ///< served fraction d/d* in [0, 1]
};

struct ValidationCheck {
    std::string name;
    bool pass;
    std::string detail;
};

struct ValidationReport {
    std::vector<ValidationCheck> checks;
    bool all_pass() const;
    std::string summary() const;  ///< one line per check
};

/// Tabulated monotone price-demand relation, normalized by the actual demand:
/// ratio(gamma) = d/d*. The table starts at (gamma_star, 1) and is strictly
/// decreasing in ratio.
///
/// Between knots, revenue gamma*ratio is linear in ratio, i.e. the marginal
/// unit revenue is a per-segment constant
///
///     p_k = (gamma_{k+1} r_{k+1} - gamma_k r_k) / (r_{k+1} - r_k),
///
/// which makes the knot secants the exact marginal revenue and the inverse
/// g(d*, d) closed-form. Two zone shapes:
///
///  - finite zone: the last knot has ratio 0; its price is gamma_op, demand
///    vanishes there, and the closing segment interpolates the price linearly
///    in ratio (marginal revenue runs linearly up to gamma_op);
///  - semi-infinite zone: every knot has ratio > 0; below the last knot the
///    final segment's constant-marginal-revenue hyperbola extends the table,
///    so every served demand in (0, d*] is priceable and the price grows
///    without bound as the served fraction goes to 0.
///
/// Revenue at exactly zero served units is 0 in both shapes. Curves are
/// immutable after construction and safe to share across threads.
class PriceDemandCurve {
public:
    /// Requires at least two knots with strictly increasing prices (otherwise
    /// interpolation is meaningless, throws std::invalid_argument).
    /// Ratio-shape violations are left to validate() so broken tables can be
    /// constructed and flagged.
    PriceDemandCurve(std::vector<CurvePoint> points, double declared_p_m, double declared_p_M);

    double gamma_star() const { return pts_.front().gamma; }
    bool finite_zone() const { return pts_.back().ratio == 0.0; }
    /// First price with zero demand; +inf on semi-infinite curves.
    double gamma_op() const;

    double declared_p_m() const { return p_m_; }
    double declared_p_M() const { return p_M_; }
    const std::vector<CurvePoint>& points() const { return pts_; }

    /// Forward evaluation d/d* = f(gamma). Constant 1 below gamma_star.
    double ratio_at(double gamma) const;

    /// Inverse: the price at which the served fraction equals `ratio`.
    /// ratio = 0 returns gamma_op on a finite-zone curve and throws
    /// std::domain_error on a semi-infinite one (no finite price defers
    /// everything).
    double price_at_ratio(double ratio) const;

    /// gamma(r) * r, with value 0 at r = 0. Nondecreasing in r.
    double normalized_revenue(double ratio) const;

    /// Marginal revenue implied by segment k's knots.
    double segment_marginal_revenue(std::size_t k) const { return seg_p_[k]; }
    std::size_t segment_count() const { return seg_p_.size(); }

    /// Min/max implied marginal revenue over the table (the measured
    /// counterparts of the declared bounds).
    double measured_p_m() const;
    double measured_p_M() const;

private:
    std::size_t segment_for_gamma(double gamma) const;
    std::size_t segment_for_ratio(double ratio) const;

    std::vector<CurvePoint> pts_;
    std::vector<double> seg_p_;  ///< per-segment implied marginal revenue
    double p_m_, p_M_;
};

/// Builds a curve on the uniform price grid [gamma_star, gamma_max]: starting
/// from ratio 1, each grid step draws a demand-curve slope uniformly from the
/// admissible interval [(p_m-gamma)/d, min(0, (p_M-gamma)/d)) — equivalently
/// a marginal revenue uniform in [p_m, min(gamma, p_M)) — and steps the ratio
/// down so that the segment realizes exactly that marginal revenue.
/// Deterministic per spec.seed.
PriceDemandCurve synthesize_curve(const CurveSpec& spec);

/// gamma = g(d*, d): the price that reduces demand d* to d.
double price_for_demand(const PriceDemandCurve& curve, double d_star, double d);

/// p(d*, d): central finite difference of d * g(d*, d) with step
/// h = min(0.5, d/10) (backward difference at the d = d* edge).
double marginal_unit_revenue(const PriceDemandCurve& curve, double d_star, double d);

/// Revenue sacrificed by pricing demand down from d* to d:
/// gamma_star * d* - g(d*, d) * d >= 0.
double demand_loss(const PriceDemandCurve& curve, double d_star, double d);

/// R(d*, d, n): demand loss of one slot when a demand already reduced to d is
/// reduced further by n units. Equals g(d*,d)*d - g(d*,d-n)*(d-n).
double renting_cost(const PriceDemandCurve& curve, double d_star, double d, double n);

/// Checks ratio bounds, price/ratio monotonicity, revenue monotonicity,
/// marginal-revenue bounds against the declared (p_m, p_M), and
/// gamma_star * tau > cost. All-pass is required before simulation.
ValidationReport validate(const PriceDemandCurve& curve, const BillingConfig& config);

/// Plain-text persistence: `# key=value` headers (gamma_star, p_m, p_M,
/// gamma_op) followed by `gamma,ratio` rows, shortest-round-trip decimals.
void write_curve_csv(const PriceDemandCurve& curve, const std::filesystem::path& path);
PriceDemandCurve read_curve_csv(const std::filesystem::path& path);

} // namespace qbroker
