#include "pathways/errors.hpp"
#include "pathways/pipeline.hpp"
#include "pathways/scenario.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using namespace pathways;

namespace {

enum Exit { kOk = 0, kFailure = 1, kConfig = 2, kNumeric = 3 };

struct Options {
    std::string scenario_path;
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed;
    std::optional<double> dt;
    std::optional<double> horizon;
};

scenario::Scenario load(const Options& o) {
    scenario::Scenario s = o.scenario_path.empty() ? scenario::default_scenario()
                                                   : scenario::load_scenario(o.scenario_path);
    if (o.seed) s.seed = *o.seed;
    if (o.dt) s.lattice.dt = *o.dt;
    if (o.horizon) s.lattice.horizon = *o.horizon;
    s.validate();
    return s;
}

std::ofstream open_out(const Options& o, const std::string& name) {
    fs::create_directories(o.out_dir);
    const fs::path p = fs::path(o.out_dir) / name;
    std::ofstream f(p, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + p.string());
    return f;
}

void cmd_fit(const Options& o) {
    const auto s = load(o);
    if (!s.fitted) throw ConfigError("fit needs hazard.gauge_csv in the scenario");
    const auto& f = *s.fitted;
    auto stats = open_out(o, "annual_stats.csv");
    ingest::write_annual_stats(stats, f.years);
    auto report = open_out(o, "fit_report.txt");
    std::ostringstream text;
    text << "years=" << f.years.size() << ", dropped_rows=" << f.dropped_rows << '\n'
         << "surge: " << evt::format_fit_report(f.surge_fit) << '\n'
         << "high_water: alpha=" << f.high_water.alpha << ", s=" << f.high_water.scale
         << ", xi=" << f.high_water.shape << '\n'
         << "abm: mu=" << f.abm.mu << ", sigma=" << f.abm.sigma << ", increments=" << f.abm.increments << '\n';
    report << text.str();
    std::cout << text.str();
}

void cmd_damage(const Options& o) {
    const auto s = load(o);
    const auto curve = s.loss.curve();
    const auto dist = s.high_water();
    const double u = s.flood_threshold;
    {
        auto table = open_out(o, "damage_table.csv");
        const double ustar = loss::threshold(curve);
        loss::write_damage_table(table, curve, ustar - 1000.0, ustar + 3000.0, 10.0);
    }
    const double tail = evt::gev_sf(u, dist.gev());
    const double d = loss::DamageModel(s.scale, s.shape, curve)(u, s.location);
    const double prem = loss::premium(u, 0.0, dist, s.premium, curve);
    auto summary = open_out(o, "damage_summary.csv");
    std::ostringstream text;
    text.precision(10);
    text << "quantity,value\n"
         << "threshold_mm," << u << '\n'
         << "exceedance_probability," << tail << '\n'
         << "expected_damage_B," << d << '\n'
         << "premium_B," << prem << '\n';
    if (s.loss.cover_limit)
        text << "premium_capped_B," << loss::premium_capped(u, *s.loss.cover_limit, 0.0, dist, s.premium, curve)
             << '\n';
    summary << text.str();
    std::cout << text.str();
}

void cmd_value(const Options& o, std::size_t mc_paths) {
    const auto s = load(o);
    const auto rep = pipeline::run_valuation(s);
    {
        auto f = open_out(o, "report.csv");
        value::write_report_csv(f, rep.selection);
    }
    {
        auto f = open_out(o, "boundaries.csv");
        pipeline::emit_boundaries(f, rep);
    }
    pipeline::print_summary(std::cout, rep);
    if (mc_paths > 0) {
        const auto in = s.inputs();
        auto f = open_out(o, "mc_check.csv");
        f << "project,lattice_V,mc_V,mc_std_error\n";
        for (const auto& p : s.projects) {
            const double v = value::project_value(s.location, in.initial_state(), p, in, s.lattice);
            const auto mc = value::mc_project_value(s.location, in.initial_state(), p, in,
                                                    {100.0, 0.5, mc_paths, s.seed});
            f.precision(10);
            f << p.name << ',' << v << ',' << mc.mean << ',' << mc.std_error << '\n';
            std::cout << "  " << p.name << ": lattice V " << v << ", Monte Carlo " << mc.mean << " +/- "
                      << mc.std_error << '\n';
        }
    }
}

std::vector<pipeline::SweepRow> sweep_rows(const Options& o, const std::string& param,
                                           const std::vector<double>& values) {
    const auto s = load(o);
    std::vector<pipeline::SweepParam> params;
    if (param == "all") params = {pipeline::SweepParam::Rate, pipeline::SweepParam::Mu, pipeline::SweepParam::Sigma};
    else params = {pipeline::parse_sweep_param(param)};
    if (!values.empty() && params.size() != 1) throw ConfigError("--values needs a single --param");
    std::vector<pipeline::SweepRow> rows;
    for (auto p : params) {
        const auto part = pipeline::run_sweep({p, values.empty() ? pipeline::default_sweep_values(p) : values, s});
        rows.insert(rows.end(), part.begin(), part.end());
    }
    return rows;
}

void cmd_sweep(const Options& o, const std::string& param, const std::vector<double>& values) {
    const auto rows = sweep_rows(o, param, values);
    auto f = open_out(o, "sweep.csv");
    pipeline::write_sweep_csv(f, rows);
    for (const auto& r : rows)
        if (r.selected)
            std::cout << r.param << '=' << r.value << ": " << r.order << " (option total " << r.option_total
                      << ")\n";
}

void cmd_plotdata(const Options& o, const std::string& kind_name, const std::string& param,
                  const std::vector<double>& values) {
    const auto kind = pipeline::parse_plot_kind(kind_name);
    const auto s = load(o);
    auto f = open_out(o, kind_name + ".csv");
    switch (kind) {
    case pipeline::PlotKind::DamageCurve: pipeline::emit_damage_curve(f, s); break;
    case pipeline::PlotKind::Boundary: pipeline::emit_boundaries(f, pipeline::run_valuation(s)); break;
    case pipeline::PlotKind::Sweep: pipeline::write_sweep_csv(f, sweep_rows(o, param, values)); break;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Flood-adaptation pathway valuation"};
    app.require_subcommand(1);
    Options o;
    app.add_option("--scenario", o.scenario_path, "Scenario file (defaults to the built-in baseline)");
    app.add_option("--out", o.out_dir, "Output directory");
    app.add_option("--seed", o.seed, "Monte Carlo seed");
    app.add_option("--dt", o.dt, "Lattice time step (yr)");
    app.add_option("--horizon", o.horizon, "Lattice horizon (yr)");

    auto* fit = app.add_subcommand("fit", "Fit the hazard and sea-level process from a gauge record");
    auto* damage = app.add_subcommand("damage", "Loss table and premium at the current threshold");
    auto* val = app.add_subcommand("value", "Value every project order and select a pathway");
    std::size_t mc_paths = 0;
    val->add_option("--mc-paths", mc_paths, "Also check V against Monte Carlo with this many paths");
    auto* sweep = app.add_subcommand("sweep", "Sensitivity sweep over r, mu or sigma");
    std::string param = "all";
    std::vector<double> values;
    sweep->add_option("--param", param, "r, mu, sigma or all")->capture_default_str();
    sweep->add_option("--values", values, "Values to sweep (default: the standard grid)");
    auto* plot = app.add_subcommand("plotdata", "CSV data for damage_curve, boundary or sweep plots");
    std::string kind;
    plot->add_option("--kind", kind, "damage_curve, boundary or sweep")->required();
    plot->add_option("--param", param, "Sweep parameter for kind=sweep")->capture_default_str();
    plot->add_option("--values", values, "Sweep values for kind=sweep");
    for (auto* sub : {fit, damage, val, sweep, plot}) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfig;
    }

    try {
        if (*fit) cmd_fit(o);
        else if (*damage) cmd_damage(o);
        else if (*val) cmd_value(o, mc_paths);
        else if (*sweep) cmd_sweep(o, param, values);
        else if (*plot) cmd_plotdata(o, kind, param, values);
        return kOk;
    } catch (const NumericError& e) {
        std::cerr << "numeric error: " << e.what() << '\n';
        return kNumeric;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfig;
    } catch (const ParseError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfig;
    } catch (const InsufficientDataError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfig;
    } catch (const DomainError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kFailure;
    }
}
