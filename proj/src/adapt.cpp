#include "pathways/adapt.hpp"

#include "pathways/errors.hpp"

#include <algorithm>
#include <cmath>

namespace pathways::adapt {

void Project::validate() const {
    auto fail = [&](const std::string& what) { throw ConfigError("project '" + name + "': " + what); };
    // +inf is accepted: a project that is never worth building
    if (std::isnan(cost) || cost < 0.0) fail("cost must be >= 0");
    if (!(raise > 0.0) || !std::isfinite(raise)) fail("raise must be > 0 and finite");
    if (!(effectiveness > 0.0 && effectiveness <= 1.0)) fail("effectiveness must lie in (0, 1]");
    if (!(loss_share > 0.0 && loss_share <= 1.0)) fail("loss_share must lie in (0, 1]");
}

ProtectionState::ProtectionState(double base_threshold, BandAttribution mode)
    : base_(base_threshold), mode_(mode) {
    if (!std::isfinite(base_)) throw ConfigError("base flood threshold must be finite");
}

Band ProtectionState::band_of(const Project& next) const {
    double lo = base_;
    if (mode_ == BandAttribution::Stacked)
        for (const auto& p : installed_) lo += p.raise;
    return {lo, lo + next.raise, next.reduction()};
}

std::vector<Band> ProtectionState::marginal_bands(const Project& next) const {
    next.validate();
    std::vector<Band> existing;
    ProtectionState prefix(base_, mode_);
    for (const auto& p : installed_) {
        existing.push_back(prefix.band_of(p));
        prefix = prefix.with(p);
    }
    const Band target = band_of(next);

    std::vector<double> cuts{target.lo, target.hi};
    for (const auto& b : existing)
        for (double e : {b.lo, b.hi})
            if (e > target.lo && e < target.hi) cuts.push_back(e);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    std::vector<Band> out;
    for (std::size_t j = 0; j + 1 < cuts.size(); ++j) {
        double residual = 1.0;
        for (const auto& b : existing)
            if (b.lo <= cuts[j] && cuts[j + 1] <= b.hi) residual *= 1.0 - b.weight;
        const double w = residual * target.weight;
        if (w == 0.0) continue;
        if (!out.empty() && out.back().hi == cuts[j] && out.back().weight == w) out.back().hi = cuts[j + 1];
        else out.push_back({cuts[j], cuts[j + 1], w});
    }
    return out;
}

ProtectionState ProtectionState::with(const Project& p) const {
    p.validate();
    ProtectionState next = *this;
    next.installed_.push_back(p);
    return next;
}

BenefitFunction::BenefitFunction(std::vector<Band> bands, loss::DamageModel damage, loss::PremiumSpec premium)
    : bands_(std::move(bands)), damage_(std::move(damage)), premium_(premium) {
    premium_.validate();
}

double BenefitFunction::operator()(double alpha) const {
    double g = 0.0;
    for (const auto& b : bands_) g += b.weight * (damage_.unit(b.lo, alpha) - damage_.unit(b.hi, alpha));
    return damage_.curve_factor() * (premium_.factor(0.0) * g);
}

double BenefitFunction::at(double alpha, double t) const {
    return std::exp(premium_.exposure_growth * t) * (*this)(alpha);
}

BenefitFunction make_benefit(const ProtectionState& state, const Project& next, const loss::DamageModel& damage,
                             const loss::PremiumSpec& premium) {
    return BenefitFunction(state.marginal_bands(next), damage, premium);
}

double benefit_flow(const ProtectionState& state, const Project& next, double t, const evt::HighWaterMarkDist& dist,
                    const loss::PremiumSpec& spec, const loss::LossCurve& curve) {
    const loss::DamageModel dm(dist.scale, dist.shape, curve);
    return make_benefit(state, next, dm, spec).at(dist.alpha, t);
}

double combined_annual_benefit(const ProtectionState& state, double t, const evt::HighWaterMarkDist& dist,
                               const loss::PremiumSpec& spec, const loss::LossCurve& curve) {
    ProtectionState prefix(state.base_threshold(), state.attribution());
    double total = 0.0;
    for (const auto& p : state.installed()) {
        total += benefit_flow(prefix, p, t, dist, spec, curve);
        prefix = prefix.with(p);
    }
    return total;
}

double residual_loss(const ProtectionState& state, double level, const loss::LossCurve& curve) {
    double mult = 1.0;
    ProtectionState prefix(state.base_threshold(), state.attribution());
    for (const auto& p : state.installed()) {
        const Band b = prefix.band_of(p);
        if (b.lo <= level && level < b.hi) mult *= 1.0 - b.weight;
        prefix = prefix.with(p);
    }
    return mult * loss::loss_eval(level, curve);
}

} // namespace pathways::adapt
