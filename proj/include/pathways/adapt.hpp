#ifndef PATHWAYS_ADAPT_HPP
#define PATHWAYS_ADAPT_HPP

#include "pathways/evt.hpp"
#include "pathways/loss.hpp"

#include <string>
#include <vector>

namespace pathways::adapt {

// An adaptation measure. A barrier/dike is the effectiveness == 1 case.
struct Project {
    std::string name;
    double cost = 0.0;           // $B
    double raise = 0.0;          // mm
    double effectiveness = 1.0;  // kappa in (0, 1]
    // Fraction of the total damage curve the measure acts on (1 = whole curve).
    double loss_share = 1.0;

    void validate() const;
    double reduction() const { return effectiveness * loss_share; }
};

// Where a project's protected water band sits once other projects are in place.
//   Stacked: each new measure protects [u + sum of earlier raises, ... + k].
//   Nested:  every measure protects [u, u + k] in absolute water level.
enum class BandAttribution { Stacked, Nested };

// Benefit = weight * (pi(lo) - pi(hi)).
struct Band {
    double lo = 0.0;
    double hi = 0.0;
    double weight = 0.0;
};

class ProtectionState {
public:
    explicit ProtectionState(double base_threshold, BandAttribution mode = BandAttribution::Stacked);

    double base_threshold() const { return base_; }
    BandAttribution attribution() const { return mode_; }
    const std::vector<Project>& installed() const { return installed_; }

    // Protected band a project would occupy if installed next.
    Band band_of(const Project& next) const;
    // Marginal bands of `next` given what is installed; weights account for the
    // residual loss left by overlapping earlier measures.
    std::vector<Band> marginal_bands(const Project& next) const;

    ProtectionState with(const Project& p) const;

private:
    double base_;
    BandAttribution mode_;
    std::vector<Project> installed_;
};

// Time-invariant part of a benefit flow: R(t, alpha) = e^{gamma t} g(alpha).
class BenefitFunction {
public:
    BenefitFunction(std::vector<Band> bands, loss::DamageModel damage, loss::PremiumSpec premium);

    double operator()(double alpha) const;  // g(alpha), t = 0
    double at(double alpha, double t) const;
    const std::vector<Band>& bands() const { return bands_; }
    const loss::PremiumSpec& premium() const { return premium_; }

private:
    std::vector<Band> bands_;
    loss::DamageModel damage_;
    loss::PremiumSpec premium_;
};

BenefitFunction make_benefit(const ProtectionState& state, const Project& next, const loss::DamageModel& damage,
                             const loss::PremiumSpec& premium);

// Reduction in premium at time t from installing `next` on top of `state`.
double benefit_flow(const ProtectionState& state, const Project& next, double t, const evt::HighWaterMarkDist& dist,
                    const loss::PremiumSpec& spec, const loss::LossCurve& curve);

// Sum of the installed projects' flows, each measured against the projects before it.
double combined_annual_benefit(const ProtectionState& state, double t, const evt::HighWaterMarkDist& dist,
                               const loss::PremiumSpec& spec, const loss::LossCurve& curve);

// Loss remaining at water level M with every installed project in place.
double residual_loss(const ProtectionState& state, double level, const loss::LossCurve& curve);

} // namespace pathways::adapt

#endif // PATHWAYS_ADAPT_HPP
