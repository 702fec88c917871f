#include "qbroker/demand_curve.hpp"

#include "qbroker/csv.hpp"
#include "qbroker/errors.hpp"
#include "qbroker/rng.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace qbroker {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kValidationTol = 1e-6;

std::string num(double v) { return csv::format_double(v); }
} // namespace

void CurveSpec::validate() const {
    if (tau < 2) throw std::invalid_argument("curve spec: tau >= 2 required");
    if (!(cost > 0)) throw std::invalid_argument("curve spec: cost > 0 required");
    if (!(cost / tau <= p_m))
        throw std::invalid_argument("curve spec: cost/tau <= p_m violated (got p_m = " + num(p_m) +
                                    ", cost/tau = " + num(cost / tau) + ")");
    if (!(p_m <= p_M))
        throw std::invalid_argument("curve spec: p_m <= p_M violated (got p_m = " + num(p_m) +
                                    ", p_M = " + num(p_M) + ")");
    if (!(p_M < cost))
        throw std::invalid_argument("curve spec: p_M < cost violated (got p_M = " + num(p_M) +
                                    ", cost = " + num(cost) + ")");
    if (!(gamma_star > p_m))
        throw std::invalid_argument("curve spec: gamma_star > p_m violated (got gamma_star = " +
                                    num(gamma_star) + ", p_m = " + num(p_m) + ")");
    if (!(gamma_star * tau > cost))
        throw std::invalid_argument("curve spec: gamma_star * tau > cost violated (got " +
                                    num(gamma_star * tau) + " vs cost = " + num(cost) + ")");
    if (!(gamma_max > gamma_star))
        throw std::invalid_argument("curve spec: gamma_max > gamma_star required");
    if (grid_steps < 1) throw std::invalid_argument("curve spec: grid_steps >= 1 required");
}

bool ValidationReport::all_pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.pass; });
}

std::string ValidationReport::summary() const {
    std::ostringstream out;
    for (const auto& c : checks) {
        out << (c.pass ? "PASS " : "FAIL ") << c.name;
        if (!c.pass && !c.detail.empty()) out << ": " << c.detail;
        out << '\n';
    }
    return out.str();
}

PriceDemandCurve::PriceDemandCurve(std::vector<CurvePoint> points, double declared_p_m,
                                   double declared_p_M)
    : pts_(std::move(points)), p_m_(declared_p_m), p_M_(declared_p_M) {
    if (pts_.size() < 2) throw std::invalid_argument("curve: at least two knots required");
    for (std::size_t k = 0; k + 1 < pts_.size(); ++k) {
        if (!(pts_[k].gamma < pts_[k + 1].gamma))
            throw std::invalid_argument("curve: knot prices must be strictly increasing");
    }
    seg_p_.resize(pts_.size() - 1);
    for (std::size_t k = 0; k + 1 < pts_.size(); ++k) {
        const auto& a = pts_[k];
        const auto& b = pts_[k + 1];
        // Secant of the revenue table; exact marginal revenue of the segment
        // except on a closing segment (handled point-wise where it matters).
        seg_p_[k] = (b.gamma * b.ratio - a.gamma * a.ratio) / (b.ratio - a.ratio);
    }
}

double PriceDemandCurve::gamma_op() const {
    return finite_zone() ? pts_.back().gamma : kInf;
}

std::size_t PriceDemandCurve::segment_for_gamma(double gamma) const {
    // First knot with price > gamma; segment index is one before it.
    auto it = std::upper_bound(pts_.begin(), pts_.end(), gamma,
                               [](double g, const CurvePoint& p) { return g < p.gamma; });
    if (it == pts_.begin()) return 0;
    std::size_t idx = static_cast<std::size_t>(it - pts_.begin()) - 1;
    return std::min(idx, seg_p_.size() - 1);
}

std::size_t PriceDemandCurve::segment_for_ratio(double ratio) const {
    // Knot ratios are strictly decreasing: find the segment whose ratio range
    // contains `ratio`; below the table, the last segment extends.
    auto it = std::lower_bound(pts_.begin(), pts_.end(), ratio,
                               [](const CurvePoint& p, double r) { return p.ratio > r; });
    if (it == pts_.begin()) return 0;
    std::size_t idx = static_cast<std::size_t>(it - pts_.begin()) - 1;
    return std::min(idx, seg_p_.size() - 1);
}

double PriceDemandCurve::ratio_at(double gamma) const {
    if (gamma <= gamma_star()) return 1.0;  // price cuts below nominal leave demand at d*
    if (finite_zone() && gamma >= pts_.back().gamma) return 0.0;
    const std::size_t k = segment_for_gamma(gamma);
    const auto& a = pts_[k];
    const auto& b = pts_[k + 1];
    if (finite_zone() && k + 2 == pts_.size()) {
        // Closing segment: price linear in ratio down to (gamma_op, 0).
        return a.ratio * (b.gamma - gamma) / (b.gamma - a.gamma);
    }
    // Constant-marginal-revenue hyperbola through both knots (also the tail
    // extension beyond the last knot on semi-infinite curves).
    const double p = seg_p_[k];
    return a.ratio * (a.gamma - p) / (gamma - p);
}

double PriceDemandCurve::price_at_ratio(double ratio) const {
    if (ratio >= 1.0) return gamma_star();
    if (ratio == 0.0) {
        if (finite_zone()) return pts_.back().gamma;
        throw std::domain_error("curve: demand 0 is unreachable on a semi-infinite curve");
    }
    const std::size_t k = segment_for_ratio(ratio);
    const auto& a = pts_[k];
    const auto& b = pts_[k + 1];
    if (finite_zone() && k + 2 == pts_.size()) {
        return b.gamma - (b.gamma - a.gamma) * (ratio / a.ratio);
    }
    const double p = seg_p_[k];
    return p + a.ratio * (a.gamma - p) / ratio;
}

double PriceDemandCurve::normalized_revenue(double ratio) const {
    if (ratio <= 0.0) return 0.0;  // zero served units earn nothing
    if (ratio >= 1.0) return gamma_star();
    const std::size_t k = segment_for_ratio(ratio);
    const auto& a = pts_[k];
    const auto& b = pts_[k + 1];
    if (finite_zone() && k + 2 == pts_.size()) {
        const double gamma = b.gamma - (b.gamma - a.gamma) * (ratio / a.ratio);
        return gamma * ratio;
    }
    const double p = seg_p_[k];
    return p * ratio + a.ratio * (a.gamma - p);
}

double PriceDemandCurve::measured_p_m() const {
    double lo = kInf;
    for (std::size_t k = 0; k < seg_p_.size(); ++k) {
        if (finite_zone() && k + 2 == pts_.size()) {
            // Marginal revenue on the closing segment runs linearly between
            // its endpoint values.
            lo = std::min(lo, std::min(2 * pts_[k].gamma - pts_[k + 1].gamma, pts_[k + 1].gamma));
        } else {
            lo = std::min(lo, seg_p_[k]);
        }
    }
    return lo;
}

double PriceDemandCurve::measured_p_M() const {
    double hi = -kInf;
    for (std::size_t k = 0; k < seg_p_.size(); ++k) {
        if (finite_zone() && k + 2 == pts_.size()) {
            hi = std::max(hi, std::max(2 * pts_[k].gamma - pts_[k + 1].gamma, pts_[k + 1].gamma));
        } else {
            hi = std::max(hi, seg_p_[k]);
        }
    }
    return hi;
}

PriceDemandCurve synthesize_curve(const CurveSpec& spec) {
    spec.validate();
    Rng rng(spec.seed, RngStream::curve_synthesis);
    const double h = (spec.gamma_max - spec.gamma_star) / spec.grid_steps;
    std::vector<CurvePoint> pts;
    pts.reserve(static_cast<std::size_t>(spec.grid_steps) + 1);
    pts.push_back({spec.gamma_star, 1.0});
    double r = 1.0;
    for (int k = 0; k < spec.grid_steps; ++k) {
        const double gamma = spec.gamma_star + k * h;
        // Drawing the marginal revenue uniformly on [p_m, min(gamma, p_M)) is
        // the slope draw of the admissible interval, mapped linearly.
        const double p = rng.uniform(spec.p_m, std::min(gamma, spec.p_M));
        const double next = r * (gamma - p) / (gamma + h - p);
        if (!(next > 0)) {  // clamp at zero demand; unreachable with p < gamma
            pts.push_back({gamma + h, 0.0});
            break;
        }
        pts.push_back({gamma + h, next});
        r = next;
    }
    return PriceDemandCurve(std::move(pts), spec.p_m, spec.p_M);
}

double price_for_demand(const PriceDemandCurve& curve, double d_star, double d) {
    if (d_star < 0 || d < 0) throw std::domain_error("price_for_demand: negative demand");
    if (d > d_star)
        throw std::domain_error("price_for_demand: d > d_star (demand cannot exceed d*)");
    if (d_star == 0) return curve.gamma_star();
    return curve.price_at_ratio(d / d_star);
}

double marginal_unit_revenue(const PriceDemandCurve& curve, double d_star, double d) {
    if (!(d > 0) || !(d <= d_star))
        throw std::domain_error("marginal_unit_revenue: need 0 < d <= d_star");
    const double h = std::min(0.5, d / 10);
    const auto rev = [&](double x) { return d_star * curve.normalized_revenue(x / d_star); };
    if (d + h <= d_star) return (rev(d + h) - rev(d - h)) / (2 * h);
    return (rev(d) - rev(d - h)) / h;
}

double demand_loss(const PriceDemandCurve& curve, double d_star, double d) {
    if (d < 0 || d_star < 0) throw std::domain_error("demand_loss: negative demand");
    if (d > d_star) throw std::domain_error("demand_loss: d > d_star");
    if (d_star == 0) return 0.0;
    return curve.gamma_star() * d_star - d_star * curve.normalized_revenue(d / d_star);
}

double renting_cost(const PriceDemandCurve& curve, double d_star, double d, double n) {
    if (n < 0) throw std::domain_error("renting_cost: n < 0");
    if (n > d) throw std::domain_error("renting_cost: n > d (cannot reduce below zero)");
    if (d > d_star) throw std::domain_error("renting_cost: d > d_star");
    if (d_star == 0) return 0.0;
    return d_star *
           (curve.normalized_revenue(d / d_star) - curve.normalized_revenue((d - n) / d_star));
}

ValidationReport validate(const PriceDemandCurve& curve, const BillingConfig& config) {
    ValidationReport report;
    const auto& pts = curve.points();

    {
        bool ok = true;
        std::string detail;
        for (const auto& p : pts) {
            if (p.ratio < -kValidationTol || p.ratio > 1 + kValidationTol) {
                ok = false;
                detail = "ratio " + num(p.ratio) + " at gamma " + num(p.gamma) + " outside [0, 1]";
                break;
            }
        }
        if (ok && std::abs(pts.front().ratio - 1.0) > kValidationTol) {
            ok = false;
            detail = "ratio at gamma_star is " + num(pts.front().ratio) + ", expected 1";
        }
        report.checks.push_back({"ratio_bounds", ok, detail});
    }

    {
        bool ok = true;
        std::string detail;
        for (std::size_t k = 0; k + 1 < pts.size() && ok; ++k) {
            if (!(pts[k].gamma < pts[k + 1].gamma)) {
                ok = false;
                detail = "prices not strictly increasing at knot " + std::to_string(k + 1);
            } else if (!(pts[k + 1].ratio < pts[k].ratio)) {
                ok = false;
                detail = "ratio not strictly decreasing at knot " + std::to_string(k + 1) +
                         " (gamma " + num(pts[k + 1].gamma) + ")";
            }
        }
        report.checks.push_back({"ratio_monotone", ok, detail});
    }

    {
        bool ok = true;
        std::string detail;
        for (std::size_t k = 0; k + 1 < pts.size() && ok; ++k) {
            const double reva = pts[k].gamma * pts[k].ratio;
            const double revb = pts[k + 1].gamma * pts[k + 1].ratio;
            if (revb > reva + kValidationTol) {
                ok = false;
                detail = "revenue rises from " + num(reva) + " to " + num(revb) + " at gamma " +
                         num(pts[k + 1].gamma);
            }
        }
        report.checks.push_back({"revenue_monotone", ok, detail});
    }

    {
        bool ok = true;
        std::string detail;
        const double lo = curve.declared_p_m() - kValidationTol;
        const double hi = curve.declared_p_M() + kValidationTol;
        for (std::size_t k = 0; k < curve.segment_count() && ok; ++k) {
            double seg_lo, seg_hi;
            if (curve.finite_zone() && k + 2 == pts.size()) {
                const double at_zero = pts[k + 1].gamma;
                const double at_top = 2 * pts[k].gamma - pts[k + 1].gamma;
                seg_lo = std::min(at_zero, at_top);
                seg_hi = std::max(at_zero, at_top);
            } else {
                seg_lo = seg_hi = curve.segment_marginal_revenue(k);
            }
            if (seg_lo < lo || seg_hi > hi) {
                ok = false;
                detail = "segment " + std::to_string(k) + " marginal revenue in [" + num(seg_lo) +
                         ", " + num(seg_hi) + "] outside declared [" + num(curve.declared_p_m()) +
                         ", " + num(curve.declared_p_M()) + "]";
            }
        }
        report.checks.push_back({"marginal_revenue_bounds", ok, detail});
    }

    {
        const bool ok = curve.gamma_star() * config.tau > config.cost;
        report.checks.push_back(
            {"cycle_profitability", ok,
             ok ? "" : "gamma_star * tau = " + num(curve.gamma_star() * config.tau) +
                       " does not exceed cost = " + num(config.cost)});
    }

    return report;
}

void write_curve_csv(const PriceDemandCurve& curve, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    out << "# gamma_star=" << num(curve.gamma_star()) << '\n';
    out << "# p_m=" << num(curve.declared_p_m()) << '\n';
    out << "# p_M=" << num(curve.declared_p_M()) << '\n';
    out << "# gamma_op=" << (curve.finite_zone() ? num(curve.gamma_op()) : "inf") << '\n';
    for (const auto& p : curve.points()) out << num(p.gamma) << ',' << num(p.ratio) << '\n';
    if (!out) throw IoError("write failed: " + path.string());
}

PriceDemandCurve read_curve_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open curve file: " + path.string());
    double p_m = 0, p_M = 0;
    bool have_pm = false, have_pM = false;
    std::vector<CurvePoint> pts;
    std::string line;
    int lineno = 0;
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
            if (key == "p_m") {
                p_m = csv::parse_double(value, ctx);
                have_pm = true;
            } else if (key == "p_M") {
                p_M = csv::parse_double(value, ctx);
                have_pM = true;
            }
            // gamma_star / gamma_op are derived from the knots on read.
            continue;
        }
        const auto fields = csv::split(text, ',');
        if (fields.size() != 2) throw IoError(ctx + ": expected 'gamma,ratio'");
        pts.push_back({csv::parse_double(fields[0], ctx), csv::parse_double(fields[1], ctx)});
    }
    if (!have_pm || !have_pM) throw IoError(path.string() + ": missing '# p_m=' / '# p_M=' header");
    if (pts.size() < 2) throw IoError(path.string() + ": fewer than two knots");
    return PriceDemandCurve(std::move(pts), p_m, p_M);
}

} // namespace qbroker
