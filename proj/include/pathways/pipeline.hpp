#ifndef PATHWAYS_PIPELINE_HPP
#define PATHWAYS_PIPELINE_HPP

#include "pathways/scenario.hpp"
#include "pathways/value.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace pathways::pipeline {

struct ValuationReport {
    value::PathwaySelection selection;
    double water_level_offset_mm = 0.0;
    std::string risk_note;
};

// select_pathway over every order of the scenario's projects. Throws ConfigError("no projects").
ValuationReport run_valuation(const scenario::Scenario& s);

enum class SweepParam { Rate, Mu, Sigma };

SweepParam parse_sweep_param(const std::string& name);  // "r", "mu", "sigma"
std::string to_string(SweepParam p);

// Scenario with one parameter replaced (r as a fraction, mu in mm/yr, sigma in mm/sqrt(yr)).
scenario::Scenario with_parameter(const scenario::Scenario& base, SweepParam p, double value);

struct SweepSpec {
    SweepParam param = SweepParam::Rate;
    std::vector<double> values;
    scenario::Scenario base;
};

struct SweepRow {
    std::string param;
    double value = 0.0;
    std::string order;
    double npv_total = 0.0;
    double option_total = 0.0;
    double difference = 0.0;
    bool selected = false;

    friend bool operator==(const SweepRow&, const SweepRow&) = default;
};

// Rows are ordered by declared value, then by order within each value.
std::vector<SweepRow> run_sweep(const SweepSpec& sweep);

// Long CSV `param,value,order,npv_total,option_total,difference,selected`, full precision.
void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows);
std::vector<SweepRow> parse_sweep_csv(std::istream& is);

// Table-style sweep defaults: r in {2..6}%, mu in {0,3,6,9,12} mm/yr, sigma in {7,15,25,30,45}.
std::vector<double> default_sweep_values(SweepParam p);

enum class PlotKind { DamageCurve, Boundary, Sweep };
PlotKind parse_plot_kind(const std::string& name);  // "damage_curve", "boundary", "sweep"

// damage_curve: `water_level_m,loss_B` from u* - 1 m to u* + 3 m in 10 mm steps.
void emit_damage_curve(std::ostream& os, const scenario::Scenario& s);
// boundary: `order,stage,project,t_yr,alpha_star_mm,water_level_m` for every order.
void emit_boundaries(std::ostream& os, const ValuationReport& report);

// Human-readable per-order summary of NPV, option value and boundaries.
void print_summary(std::ostream& os, const ValuationReport& report);

} // namespace pathways::pipeline

#endif // PATHWAYS_PIPELINE_HPP
