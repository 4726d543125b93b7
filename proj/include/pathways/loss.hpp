#ifndef PATHWAYS_LOSS_HPP
#define PATHWAYS_LOSS_HPP

#include "pathways/evt.hpp"

#include <iosfwd>
#include <variant>
#include <vector>

namespace pathways::loss {

// L(M) = a M^2 + b M + c for M >= u_star, zero below. Water in mm, money in $B.
class QuadraticLoss {
public:
    // c is derived so that L(u_star) = 0. Requires a >= 0 and 2 a u_star + b >= 0.
    static QuadraticLoss from_threshold(double a, double b, double u_star);

    double a() const { return factor_ * a_; }
    double b() const { return factor_ * b_; }
    double c() const { return factor_ * c_; }
    double threshold() const { return u_star_; }
    // The curve is factor() times unit().
    double factor() const { return factor_; }
    QuadraticLoss unit() const { return QuadraticLoss(a_, b_, c_, u_star_); }

    double operator()(double level) const;
    QuadraticLoss scaled(double factor) const;
    // Smallest M >= u_star with L(M) = value; +inf if the curve never reaches it.
    double inverse(double value) const;

private:
    QuadraticLoss(double a, double b, double c, double u) : a_(a), b_(b), c_(c), u_star_(u) {}
    double a_, b_, c_, u_star_;
    double factor_ = 1.0;
};

// Piecewise-constant loss: 0 below breakpoints[0] (= u_star), levels[i] on
// [breakpoints[i], breakpoints[i+1]).
class StepLoss {
public:
    StepLoss(std::vector<double> breakpoints, std::vector<double> levels);

    const std::vector<double>& breakpoints() const { return breakpoints_; }
    std::vector<double> levels() const;
    double threshold() const { return breakpoints_.front(); }
    double factor() const { return factor_; }
    StepLoss unit() const { return StepLoss(breakpoints_, levels_); }

    double operator()(double level) const;
    StepLoss scaled(double factor) const;
    // Smallest breakpoint whose level is >= value; +inf if none.
    double inverse(double value) const;

private:
    std::vector<double> breakpoints_;
    std::vector<double> levels_;
    double factor_ = 1.0;
};

using LossCurve = std::variant<QuadraticLoss, StepLoss>;

double loss_eval(double level, const LossCurve& curve);
double threshold(const LossCurve& curve);
LossCurve scaled(const LossCurve& curve, double factor);
double loss_factor(const LossCurve& curve);
LossCurve unit_curve(const LossCurve& curve);

// Expected damage D(x, alpha) = ∫_x^∞ L(M) dH(M; alpha, s, xi) for a fixed curve and
// fixed (s, xi). Moment conditions are checked at construction: xi < 1/2 when a != 0,
// xi < 1 when only b != 0.
class DamageModel {
public:
    DamageModel(double scale, double shape, LossCurve curve);

    double operator()(double x, double alpha) const;
    // Damage of the unit curve; operator() is curve_factor() times this.
    double unit(double x, double alpha) const;
    double curve_factor() const { return factor_; }

    double scale() const { return scale_; }
    double shape() const { return shape_; }
    const LossCurve& curve() const { return curve_; }

private:
    double scale_;
    double shape_;
    LossCurve curve_;
    LossCurve unit_;
    double factor_;
};

// Case table of the closed form; throws DomainError on violated moment conditions.
double expected_damage_closed(double x, const evt::HighWaterMarkDist& dist, const QuadraticLoss& curve);

// Same integral by tanh-sinh / exp-sinh quadrature in t = -log H(M); any curve.
// Throws NumericError if the error estimate exceeds `abs_tolerance`.
double expected_damage_quadrature(double x, const evt::HighWaterMarkDist& dist, const LossCurve& curve,
                                  double abs_tolerance = 1e-10);

struct PremiumSpec {
    double loading = 0.03;          // delta
    double exposure_growth = 0.01;  // gamma, 1/yr

    void validate() const;
    double factor(double t) const;  // (1 + delta) e^{gamma t}
};

// (1 + delta) e^{gamma t} D(u, alpha)
double premium(double u, double t, const evt::HighWaterMarkDist& dist, const PremiumSpec& spec,
               const LossCurve& curve);

// Top-cover-limit premium: premium(u) - premium(m) with L(m) = limit. Zero when m <= u.
double premium_capped(double u, double limit, double t, const evt::HighWaterMarkDist& dist,
                      const PremiumSpec& spec, const LossCurve& curve);

// CSV `level_mm,loss_B` on [from, to] with the given spacing.
void write_damage_table(std::ostream& os, const LossCurve& curve, double from_mm, double to_mm, double step_mm);

} // namespace pathways::loss

#endif // PATHWAYS_LOSS_HPP
