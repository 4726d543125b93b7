#ifndef PATHWAYS_VALUE_HPP
#define PATHWAYS_VALUE_HPP

#include "pathways/adapt.hpp"
#include "pathways/dynamics.hpp"
#include "pathways/loss.hpp"

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

namespace pathways::value {

// Additive recombining tree on alpha. The step h = sqrt(sigma^2 dt + d^2 dt^2) and
// p = (1 + d dt / h) / 2 match the first two moments of the risk-neutral increment.
// `margin` adds that many extra nodes on each side of the root so that every time
// step, including t = 0, spans a band of alpha wide enough to locate a boundary.
struct LatticeSpec {
    double dt = 0.25;       // yr
    double horizon = 400.0; // yr
    int margin = 160;

    void validate() const;
    std::size_t steps() const;
};

struct ValuationInputs {
    loss::DamageModel damage;
    loss::PremiumSpec premium;
    dynamics::AbmParams abm;
    dynamics::RiskAdjustment risk;
    double rate = 0.04;            // r, 1/yr
    double base_threshold = 0.0;   // u, mm
    adapt::BandAttribution attribution = adapt::BandAttribution::Stacked;

    // Throws DomainError unless r > gamma.
    void validate() const;
    double effective_rate() const { return rate - premium.exposure_growth; }
    double rn_drift() const { return dynamics::risk_neutral_drift(abm, risk); }
    adapt::ProtectionState initial_state() const { return adapt::ProtectionState(base_threshold, attribution); }
    ValuationInputs with_loss_scaled(double factor) const;
};

struct BoundaryPoint {
    double t = 0.0;
    double alpha_star = std::numeric_limits<double>::infinity();  // +inf: never exercised at t
};

struct StageResult {
    std::string project;
    double cost = 0.0;
    double project_value = 0.0;  // V at the root
    double npv = 0.0;            // V - I at the root
    double option_value = 0.0;   // this stage's share of the sequence's option value
    std::vector<BoundaryPoint> boundary;

    double boundary_at_start() const { return boundary.empty() ? std::numeric_limits<double>::infinity()
                                                               : boundary.front().alpha_star; }
};

struct ValuationResult {
    double alpha = 0.0;
    std::vector<StageResult> stages;
    double npv_total = 0.0;
    double option_total = 0.0;
    // min over nodes and stages of Phi - max(V - I, 0); negative only through rounding.
    double min_exercise_slack = std::numeric_limits<double>::infinity();

    double difference() const { return option_total - npv_total; }
    std::string order_label() const;
};

double project_value(double alpha, const adapt::ProtectionState& state, const adapt::Project& next,
                     const ValuationInputs& in, const LatticeSpec& spec = {});
double npv(double alpha, const adapt::ProtectionState& state, const adapt::Project& next, const ValuationInputs& in,
           const LatticeSpec& spec = {});

ValuationResult option_value_single(double alpha, const adapt::ProtectionState& state, const adapt::Project& next,
                                    const ValuationInputs& in, const LatticeSpec& spec = {});

// Compound option on projects built in `order`, each stage's payoff carrying the option
// on the remaining stages. Stage k's reported value is the option on stages 0..k minus
// the option on stages 0..k-1, so the first stage is valued with the follow-on zeroed.
ValuationResult option_value_sequence(double alpha, const adapt::ProtectionState& state,
                                      const std::vector<adapt::Project>& order, const ValuationInputs& in,
                                      const LatticeSpec& spec = {});
ValuationResult option_value_sequence(const std::vector<adapt::Project>& order, const ValuationInputs& in,
                                      const LatticeSpec& spec = {});

struct PathwaySelection {
    std::vector<ValuationResult> results;  // one per permutation, lexicographic in input order
    std::size_t best = 0;

    const ValuationResult& selected() const { return results.at(best); }
};

// Every permutation; argmax of option total, ties go to the cheaper first stage.
PathwaySelection select_pathway(const std::vector<adapt::Project>& projects, const ValuationInputs& in,
                                const LatticeSpec& spec = {});

// Perpetual V(alpha) by integrating g against the discounted ABM occupation density
// exp((d y - |y| L) / sigma^2) / L, L = sqrt(d^2 + 2 rho sigma^2).
double perpetual_project_value(double alpha, const adapt::ProtectionState& state, const adapt::Project& next,
                               const ValuationInputs& in);

struct McOptions {
    double horizon = 100.0;  // yr
    double dt = 0.5;         // yr
    std::size_t n_paths = 100000;
    std::uint64_t seed = 20240607;
};

struct McEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t n_paths = 0;
};

// Risk-neutral paths, trapezoid rule for the discounted benefit up to the horizon and
// the perpetual value at alpha(H) beyond it.
McEstimate mc_project_value(double alpha, const adapt::ProtectionState& state, const adapt::Project& next,
                            const ValuationInputs& in, const McOptions& opts = {});

// CSV `t_yr,alpha_star_mm,water_level_m`; water level = (alpha* + offset) / 1000.
void write_boundary_csv(std::ostream& os, const std::vector<BoundaryPoint>& boundary, double water_offset_mm);

// One block per order: stage rows then a total row.
void write_report_csv(std::ostream& os, const PathwaySelection& selection);

} // namespace pathways::value

#endif // PATHWAYS_VALUE_HPP
