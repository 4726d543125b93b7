#ifndef PATHWAYS_SCENARIO_HPP
#define PATHWAYS_SCENARIO_HPP

#include "pathways/adapt.hpp"
#include "pathways/dynamics.hpp"
#include "pathways/evt.hpp"
#include "pathways/ingest.hpp"
#include "pathways/loss.hpp"
#include "pathways/value.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace pathways::scenario {

// Fit the hazard and the sea-level process from an hourly gauge record instead of
// taking them from the file.
struct GaugeFitDirective {
    std::filesystem::path csv;
    double mean_tide_mm = 0.0;
    double min_coverage = 0.8;
    double missing_sentinel = -32767.0;
    std::size_t min_years = 20;
};

struct GaugeFitResult {
    std::vector<ingest::AnnualStats> years;
    std::size_t dropped_rows = 0;
    evt::GevFit surge_fit;              // fitted to annual maximum surges
    ingest::AbmEstimate abm;            // from annual means
    evt::HighWaterMarkDist high_water;  // surge law shifted by latest mean level + tide
};

struct LossSpec {
    enum class Kind { Quadratic, Step } kind = Kind::Quadratic;
    double a = 0.0;          // $B/mm^2
    double b = 0.0393;       // $B/mm
    double threshold = 2506.0;  // u_star, mm
    std::vector<double> breakpoints;  // step curves
    std::vector<double> levels;
    std::optional<double> cover_limit;  // $B, top-cover-limit premium

    loss::LossCurve curve() const;
};

struct Scenario {
    // hazard: high-water-mark law at t = 0
    double location = 1642.0;  // alpha0, mm
    double scale = 131.0;
    double shape = 0.27;
    std::optional<GaugeFitDirective> gauge;
    std::optional<GaugeFitResult> fitted;

    LossSpec loss;
    double flood_threshold = 2506.0;  // u, mm

    double mu = 6.0;      // mm/yr
    double sigma = 25.0;  // mm/sqrt(yr)
    bool mu_pinned = false;     // set in the file; a gauge fit leaves it alone
    bool sigma_pinned = false;
    std::optional<double> theta = 0.15;
    std::optional<double> phi;
    std::optional<double> rho_wm;
    std::optional<double> capm_sigma;  // volatility in the CAPM derivation; defaults to sigma
    std::string risk_note;

    double rate = 0.04;
    loss::PremiumSpec premium{0.03, 0.01};
    adapt::BandAttribution attribution = adapt::BandAttribution::Stacked;

    std::vector<adapt::Project> projects;
    value::LatticeSpec lattice;
    double water_level_offset_mm = 0.0;
    std::uint64_t seed = 20240607;

    void validate() const;
    evt::HighWaterMarkDist high_water() const { return {location, scale, shape}; }
    dynamics::AbmParams abm() const { return {mu, sigma, location}; }
    dynamics::RiskAdjustment risk() const;
    value::ValuationInputs inputs() const;
};

Scenario default_scenario();
std::vector<adapt::Project> default_projects();

// `base_dir` resolves relative gauge paths. A gauge directive is fitted immediately.
Scenario parse_scenario(const std::string& text, const std::filesystem::path& base_dir = {});
Scenario load_scenario(const std::filesystem::path& path);

// Reads the gauge record and fills `fitted`, location, scale, shape and (unless the
// file pinned them) mu and sigma.
void apply_gauge_fit(Scenario& s);

} // namespace pathways::scenario

#endif // PATHWAYS_SCENARIO_HPP
