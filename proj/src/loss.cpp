#include "pathways/loss.hpp"

#include "pathways/errors.hpp"
#include "pathways/special.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <ostream>
#include <string>

namespace pathways::loss {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Below this |xi| the s/xi terms of the closed form lose too many digits.
constexpr double kClosedFormMinShape = 1e-6;

void require_finite(double v, const char* what) {
    if (!std::isfinite(v)) throw DomainError(std::string(what) + " must be finite");
}

// t(x) with H(x) = exp(-t); +inf below a lower endpoint, 0 above an upper endpoint.
double t_of(double x, double alpha, double s, double xi) {
    const double z = (x - alpha) / s;
    if (std::fabs(xi) < evt::kGumbelShape) return std::exp(-z);
    const double arg = xi * z;
    if (arg <= -1.0) return xi > 0.0 ? kInf : 0.0;
    return std::exp(-std::log1p(arg) / xi);
}

// Inverse of t_of: M(t) = alpha + s (t^{-xi} - 1) / xi.
double level_of(double t, double alpha, double s, double xi) {
    if (std::fabs(xi) < evt::kGumbelShape) return alpha - s * std::log(t);
    return alpha + s * std::expm1(-xi * std::log(t)) / xi;
}

void check_moments(double shape, const LossCurve& curve) {
    if (const auto* q = std::get_if<QuadraticLoss>(&curve)) {
        if (q->a() != 0.0 && !(shape < 0.5))
            throw DomainError("expected damage: quadratic coefficient a != 0 requires shape xi < 1/2");
        if (q->a() == 0.0 && q->b() != 0.0 && !(shape < 1.0))
            throw DomainError("expected damage: linear coefficient b != 0 requires shape xi < 1");
    }
}

double closed_quadratic(double x, double alpha, double s, double xi, const QuadraticLoss& q) {
    const double xe = std::max(x, q.threshold());
    const double B = s / xi;
    const double A = alpha - B;  // support endpoint
    if (xi < 0.0 && xe >= A) return 0.0;
    const double t = (xi > 0.0 && xe <= A) ? kInf : t_of(xe, alpha, s, xi);
    if (t == 0.0) return 0.0;
    const double a = q.a(), b = q.b(), c = q.c();
    const double tail = std::isinf(t) ? 1.0 : -std::expm1(-t);
    const double g1 = special::lower_gamma(1.0 - xi, t);
    const double g2 = a != 0.0 ? special::lower_gamma(1.0 - 2.0 * xi, t) : 0.0;
    return a * B * B * g2 + (2.0 * a * A * B + b * B) * g1 + (a * A * A + b * A + c) * tail;
}

double telescoping_step(double x, double alpha, double s, double xi, const StepLoss& st) {
    double d = 0.0;
    double prev = 0.0;
    const auto& bp = st.breakpoints();
    const auto& lv = st.levels();
    for (std::size_t i = 0; i < bp.size(); ++i) {
        const double t = t_of(std::max(x, bp[i]), alpha, s, xi);
        const double sf = std::isinf(t) ? 1.0 : -std::expm1(-t);
        d += (lv[i] - prev) * sf;
        prev = lv[i];
    }
    return d;
}

double integrate_segment(const std::function<double(double)>& f, double lo, double hi, double tol,
                         double& err_total) {
    if (!(hi > lo)) return 0.0;
    double err = 0.0;
    double value = 0.0;
    if (std::isinf(hi)) {
        boost::math::quadrature::exp_sinh<double> es;
        value = es.integrate([&](double v) { return f(lo + v); }, 0.0, kInf, tol, &err);
    } else {
        boost::math::quadrature::tanh_sinh<double> ts;
        value = ts.integrate(f, lo, hi, tol, &err);
    }
    err_total += err;
    return value;
}

} // namespace

// ---------------------------------------------------------------------------
// Curves

QuadraticLoss QuadraticLoss::from_threshold(double a, double b, double u_star) {
    require_finite(a, "quadratic coefficient a");
    require_finite(b, "linear coefficient b");
    require_finite(u_star, "threshold u_star");
    if (a < 0.0) throw DomainError("quadratic loss: a must be non-negative");
    if (2.0 * a * u_star + b < 0.0) throw DomainError("quadratic loss: curve must be nondecreasing above u_star");
    return QuadraticLoss(a, b, -(a * u_star * u_star + b * u_star), u_star);
}

double QuadraticLoss::operator()(double level) const {
    if (level < u_star_) return 0.0;
    return factor_ * ((a_ * level + b_) * level + c_);
}

QuadraticLoss QuadraticLoss::scaled(double factor) const {
    if (!(factor >= 0.0) || !std::isfinite(factor)) throw DomainError("loss scale factor must be finite and non-negative");
    QuadraticLoss out = *this;
    out.factor_ *= factor;
    return out;
}

double QuadraticLoss::inverse(double value) const {
    if (value <= 0.0) return u_star_;
    if (std::isinf(value) || factor_ == 0.0) return kInf;
    value /= factor_;
    if (a_ == 0.0) return b_ > 0.0 ? (value - c_) / b_ : kInf;
    const double disc = b_ * b_ - 4.0 * a_ * (c_ - value);
    return (-b_ + std::sqrt(disc)) / (2.0 * a_);
}

StepLoss::StepLoss(std::vector<double> breakpoints, std::vector<double> levels)
    : breakpoints_(std::move(breakpoints)), levels_(std::move(levels)) {
    if (breakpoints_.empty() || breakpoints_.size() != levels_.size())
        throw DomainError("step loss: breakpoints and levels must be non-empty and of equal length");
    for (std::size_t i = 0; i < breakpoints_.size(); ++i) {
        require_finite(breakpoints_[i], "step loss breakpoint");
        require_finite(levels_[i], "step loss level");
        if (i > 0 && !(breakpoints_[i] > breakpoints_[i - 1]))
            throw DomainError("step loss: breakpoints must be strictly ascending");
        if (levels_[i] < (i > 0 ? levels_[i - 1] : 0.0))
            throw DomainError("step loss: levels must be non-negative and nondecreasing");
    }
}

std::vector<double> StepLoss::levels() const {
    auto lv = levels_;
    for (auto& v : lv) v *= factor_;
    return lv;
}

double StepLoss::operator()(double level) const {
    const auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), level);
    if (it == breakpoints_.begin()) return 0.0;
    return factor_ * levels_[static_cast<std::size_t>(it - breakpoints_.begin()) - 1];
}

StepLoss StepLoss::scaled(double factor) const {
    if (!(factor >= 0.0) || !std::isfinite(factor)) throw DomainError("loss scale factor must be finite and non-negative");
    StepLoss out = *this;
    out.factor_ *= factor;
    return out;
}

double StepLoss::inverse(double value) const {
    for (std::size_t i = 0; i < levels_.size(); ++i)
        if (factor_ * levels_[i] >= value) return breakpoints_[i];
    return kInf;
}

double loss_eval(double level, const LossCurve& curve) {
    require_finite(level, "water level");
    return std::visit([&](const auto& c) { return c(level); }, curve);
}

double threshold(const LossCurve& curve) {
    return std::visit([](const auto& c) { return c.threshold(); }, curve);
}

LossCurve scaled(const LossCurve& curve, double factor) {
    return std::visit([&](const auto& c) -> LossCurve { return c.scaled(factor); }, curve);
}

double loss_factor(const LossCurve& curve) {
    return std::visit([](const auto& c) { return c.factor(); }, curve);
}

LossCurve unit_curve(const LossCurve& curve) {
    return std::visit([](const auto& c) -> LossCurve { return c.unit(); }, curve);
}

// ---------------------------------------------------------------------------
// Expected damage

DamageModel::DamageModel(double scale, double shape, LossCurve curve)
    : scale_(scale), shape_(shape), curve_(std::move(curve)), unit_(unit_curve(curve_)), factor_(loss_factor(curve_)) {
    evt::GevParams{0.0, scale_, shape_}.validate();
    check_moments(shape_, unit_);
}

double DamageModel::operator()(double x, double alpha) const { return factor_ * unit(x, alpha); }

double DamageModel::unit(double x, double alpha) const {
    if (std::isnan(x) || !std::isfinite(alpha)) throw DomainError("expected damage: non-finite argument");
    if (std::isinf(x)) return 0.0;
    if (const auto* q = std::get_if<QuadraticLoss>(&unit_)) {
        if (std::fabs(shape_) < kClosedFormMinShape)
            return expected_damage_quadrature(x, {alpha, scale_, shape_}, unit_);
        return closed_quadratic(x, alpha, scale_, shape_, *q);
    }
    return telescoping_step(x, alpha, scale_, shape_, std::get<StepLoss>(unit_));
}

double expected_damage_closed(double x, const evt::HighWaterMarkDist& dist, const QuadraticLoss& curve) {
    return DamageModel(dist.scale, dist.shape, curve)(x, dist.alpha);
}

double expected_damage_quadrature(double x, const evt::HighWaterMarkDist& dist, const LossCurve& curve,
                                  double abs_tolerance) {
    const double s = dist.scale, xi = dist.shape, alpha = dist.alpha;
    evt::GevParams{alpha, s, xi}.validate();
    check_moments(xi, curve);
    if (std::isnan(x)) throw DomainError("expected damage: non-finite argument");

    // Integrand in t = -log H(M); M(t) decreases from the upper tail at t = 0.
    std::vector<double> cuts;  // t-values bounding smooth pieces, descending levels
    const double xe = std::max(x, threshold(curve));
    cuts.push_back(0.0);
    if (const auto* st = std::get_if<StepLoss>(&curve)) {
        for (auto it = st->breakpoints().rbegin(); it != st->breakpoints().rend(); ++it)
            if (*it > xe) cuts.push_back(t_of(*it, alpha, s, xi));
    }
    const double t_hi = t_of(xe, alpha, s, xi);
    if (t_hi == 0.0) return 0.0;
    cuts.push_back(t_hi);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    auto f = [&](double t) {
        if (!(t > 0.0)) return 0.0;
        const double m = level_of(t, alpha, s, xi);
        return loss_eval(std::min(m, std::numeric_limits<double>::max()), curve) * std::exp(-t);
    };

    constexpr double rel_tol = 1e-13;
    double err = 0.0;
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        double lo = cuts[i], hi = cuts[i + 1];
        if (std::isinf(hi) && lo < 1.0) {
            total += integrate_segment(f, lo, 1.0, rel_tol, err);
            lo = 1.0;
        }
        total += integrate_segment(f, lo, hi, rel_tol, err);
    }
    if (!(err <= abs_tolerance) || !std::isfinite(total))
        throw NumericError("expected damage quadrature did not reach tolerance (error estimate " +
                           std::to_string(err) + ")");
    return total;
}

// ---------------------------------------------------------------------------
// Premiums

void PremiumSpec::validate() const {
    if (!(loading >= 0.0) || !std::isfinite(loading)) throw DomainError("premium loading delta must be >= 0");
    if (!std::isfinite(exposure_growth)) throw DomainError("exposure growth gamma must be finite");
}

double PremiumSpec::factor(double t) const { return (1.0 + loading) * std::exp(exposure_growth * t); }

double premium(double u, double t, const evt::HighWaterMarkDist& dist, const PremiumSpec& spec,
               const LossCurve& curve) {
    spec.validate();
    require_finite(t, "time");
    return spec.factor(t) * DamageModel(dist.scale, dist.shape, curve)(u, dist.alpha);
}

double premium_capped(double u, double limit, double t, const evt::HighWaterMarkDist& dist,
                      const PremiumSpec& spec, const LossCurve& curve) {
    if (!(limit >= 0.0)) throw DomainError("cover limit must be non-negative");
    const double m = std::visit([&](const auto& c) { return c.inverse(limit); }, curve);
    if (m <= u) return 0.0;
    const DamageModel dm(dist.scale, dist.shape, curve);
    spec.validate();
    return spec.factor(t) * (dm(u, dist.alpha) - dm(m, dist.alpha));
}

void write_damage_table(std::ostream& os, const LossCurve& curve, double from_mm, double to_mm, double step_mm) {
    if (!(step_mm > 0.0)) throw DomainError("damage table step must be positive");
    os << "level_mm,loss_B\n";
    const auto n = static_cast<long>(std::floor((to_mm - from_mm) / step_mm + 1e-9));
    for (long i = 0; i <= n; ++i) {
        const double level = from_mm + static_cast<double>(i) * step_mm;
        os << level << ',' << loss_eval(level, curve) << '\n';
    }
}

} // namespace pathways::loss
