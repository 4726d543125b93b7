#include "pathways/pipeline.hpp"

#include "pathways/errors.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

namespace pathways::pipeline {

namespace {

// Shortest text that reads back to the same double.
std::string full(double v) {
    char buf[40];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

std::string fixed(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    std::string s = buf;
    if (s.find_first_not_of("-0.") == std::string::npos && s.front() == '-') s.erase(0, 1);
    return s;
}

double to_double(const std::string& s, std::size_t line) {
    double v = 0.0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || r.ec != std::errc{} || r.ptr != s.data() + s.size())
        throw ParseError("invalid number '" + s + "'", line);
    return v;
}

} // namespace

ValuationReport run_valuation(const scenario::Scenario& s) {
    if (s.projects.empty()) throw ConfigError("no projects");
    s.validate();
    ValuationReport rep;
    rep.selection = value::select_pathway(s.projects, s.inputs(), s.lattice);
    rep.water_level_offset_mm = s.water_level_offset_mm;
    rep.risk_note = s.risk_note;
    return rep;
}

SweepParam parse_sweep_param(const std::string& name) {
    if (name == "r") return SweepParam::Rate;
    if (name == "mu") return SweepParam::Mu;
    if (name == "sigma") return SweepParam::Sigma;
    throw ConfigError("unknown sweep parameter '" + name + "' (expected r, mu or sigma)");
}

std::string to_string(SweepParam p) {
    switch (p) {
    case SweepParam::Rate: return "r";
    case SweepParam::Mu: return "mu";
    case SweepParam::Sigma: return "sigma";
    }
    return "?";
}

scenario::Scenario with_parameter(const scenario::Scenario& base, SweepParam p, double value) {
    if (!std::isfinite(value)) throw ConfigError("sweep values must be finite");
    scenario::Scenario s = base;
    switch (p) {
    case SweepParam::Rate: s.rate = value; break;
    case SweepParam::Mu: s.mu = value; break;
    case SweepParam::Sigma: s.sigma = value; break;
    }
    s.validate();
    return s;
}

std::vector<double> default_sweep_values(SweepParam p) {
    switch (p) {
    case SweepParam::Rate: return {0.02, 0.03, 0.04, 0.05, 0.06};
    case SweepParam::Mu: return {0.0, 3.0, 6.0, 9.0, 12.0};
    case SweepParam::Sigma: return {7.0, 15.0, 25.0, 30.0, 45.0};
    }
    return {};
}

std::vector<SweepRow> run_sweep(const SweepSpec& sweep) {
    if (sweep.values.empty()) throw ConfigError("sweep needs at least one value");
    std::vector<SweepRow> rows;
    for (double v : sweep.values) {
        const auto rep = run_valuation(with_parameter(sweep.base, sweep.param, v));
        const auto& sel = rep.selection;
        for (std::size_t i = 0; i < sel.results.size(); ++i) {
            const auto& r = sel.results[i];
            rows.push_back({to_string(sweep.param), v, r.order_label(), r.npv_total, r.option_total, r.difference(),
                            i == sel.best});
        }
    }
    return rows;
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
    os << "param,value,order,npv_total,option_total,difference,selected\n";
    for (const auto& r : rows)
        os << r.param << ',' << full(r.value) << ',' << r.order << ',' << full(r.npv_total) << ','
           << full(r.option_total) << ',' << full(r.difference) << ',' << (r.selected ? "true" : "false") << '\n';
}

std::vector<SweepRow> parse_sweep_csv(std::istream& is) {
    std::string line;
    std::size_t lineno = 0;
    if (!std::getline(is, line)) throw ParseError("empty sweep CSV", 1);
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "param,value,order,npv_total,option_total,difference,selected")
        throw ParseError("unexpected sweep header", lineno);
    std::vector<SweepRow> rows;
    while (std::getline(is, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) f.push_back(cell);
        if (f.size() != 7) throw ParseError("expected 7 columns", lineno);
        SweepRow r;
        r.param = f[0];
        r.value = to_double(f[1], lineno);
        r.order = f[2];
        r.npv_total = to_double(f[3], lineno);
        r.option_total = to_double(f[4], lineno);
        r.difference = to_double(f[5], lineno);
        if (f[6] != "true" && f[6] != "false") throw ParseError("selected must be true or false", lineno);
        r.selected = f[6] == "true";
        rows.push_back(r);
    }
    return rows;
}

PlotKind parse_plot_kind(const std::string& name) {
    if (name == "damage_curve") return PlotKind::DamageCurve;
    if (name == "boundary") return PlotKind::Boundary;
    if (name == "sweep") return PlotKind::Sweep;
    throw ConfigError("unknown plot kind '" + name + "' (expected damage_curve, boundary or sweep)");
}

void emit_damage_curve(std::ostream& os, const scenario::Scenario& s) {
    const auto curve = s.loss.curve();
    const double u = loss::threshold(curve);
    os << "water_level_m,loss_B\n";
    for (int i = -100; i <= 300; ++i) {
        const double level = u + 10.0 * i;
        os << fixed(level / 1000.0, 3) << ',' << full(loss::loss_eval(level, curve)) << '\n';
    }
}

void emit_boundaries(std::ostream& os, const ValuationReport& report) {
    os << "order,stage,project,t_yr,alpha_star_mm,water_level_m\n";
    for (const auto& r : report.selection.results) {
        const std::string label = r.order_label();
        for (std::size_t s = 0; s < r.stages.size(); ++s) {
            const auto& st = r.stages[s];
            for (const auto& b : st.boundary) {
                os << label << ',' << s + 1 << ',' << st.project << ',' << full(b.t) << ',';
                if (std::isfinite(b.alpha_star))
                    os << fixed(b.alpha_star, 6) << ',' << fixed((b.alpha_star + report.water_level_offset_mm) / 1000.0, 6);
                else
                    os << "inf,inf";
                os << '\n';
            }
        }
    }
}

void print_summary(std::ostream& os, const ValuationReport& report) {
    const auto& sel = report.selection;
    for (std::size_t i = 0; i < sel.results.size(); ++i) {
        const auto& r = sel.results[i];
        os << (i == sel.best ? "* " : "  ") << r.order_label() << '\n';
        for (const auto& st : r.stages) {
            os << "    " << st.project << ": NPV " << fixed(st.npv, 2) << ", option " << fixed(st.option_value, 2);
            const double a = st.boundary_at_start();
            if (std::isfinite(a))
                os << ", boundary at t=0 " << fixed((a + report.water_level_offset_mm) / 1000.0, 2) << " m";
            else
                os << ", never exercised at t=0";
            os << '\n';
        }
        os << "    total: NPV " << fixed(r.npv_total, 2) << ", option " << fixed(r.option_total, 2) << ", difference "
           << fixed(r.difference(), 2) << '\n';
    }
    if (!report.risk_note.empty()) os << "note: " << report.risk_note << '\n';
}

} // namespace pathways::pipeline
