#include "pathways/scenario.hpp"

#include "pathways/config.hpp"
#include "pathways/errors.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace pathways::scenario {

namespace {

// Typed access to one table; every key read is remembered so leftovers can be reported.
class Reader {
public:
    explicit Reader(const config::Table& t) : t_(t) {}

    std::optional<double> number(const std::string& key) {
        const auto* e = find(key);
        if (!e) return std::nullopt;
        if (const auto* v = std::get_if<double>(&e->value)) return *v;
        fail(key, "must be a number", e->line);
    }
    std::optional<std::string> text(const std::string& key) {
        const auto* e = find(key);
        if (!e) return std::nullopt;
        if (const auto* v = std::get_if<std::string>(&e->value)) return *v;
        fail(key, "must be a string", e->line);
    }
    std::optional<std::vector<double>> numbers(const std::string& key) {
        const auto* e = find(key);
        if (!e) return std::nullopt;
        if (const auto* v = std::get_if<std::vector<double>>(&e->value)) return *v;
        fail(key, "must be an array of numbers", e->line);
    }
    void set(const std::string& key, double& out) {
        if (auto v = number(key)) out = *v;
    }

    void finish() const {
        for (const auto& [k, e] : t_.entries)
            if (!used_.count(k)) fail(k, "is not a recognised key", e.line);
    }

    [[noreturn]] void fail(const std::string& key, const std::string& what, std::size_t line) const {
        throw ConfigError(qualified(key) + " " + what + " (line " + std::to_string(line) + ")");
    }

private:
    const config::Entry* find(const std::string& key) {
        used_.insert(key);
        const auto it = t_.entries.find(key);
        return it == t_.entries.end() ? nullptr : &it->second;
    }
    std::string qualified(const std::string& key) const { return t_.name.empty() ? key : t_.name + "." + key; }

    const config::Table& t_;
    std::set<std::string> used_;
};

void require(bool ok, const std::string& msg) {
    if (!ok) throw ConfigError(msg);
}

} // namespace

loss::LossCurve LossSpec::curve() const {
    if (kind == Kind::Step) return loss::StepLoss(breakpoints, levels);
    return loss::QuadraticLoss::from_threshold(a, b, threshold);
}

std::vector<adapt::Project> default_projects() {
    return {{"flood_proofing", 0.246, 610.0, 0.30, 1.0}, {"dike", 15.95, 1000.0, 1.0, 1.0}};
}

Scenario default_scenario() {
    Scenario s;
    s.projects = default_projects();
    return s;
}

dynamics::RiskAdjustment Scenario::risk() const {
    return dynamics::RiskAdjustment::resolve(theta, phi, rho_wm, capm_sigma.value_or(sigma));
}

void Scenario::validate() const {
    require(std::isfinite(location), "hazard.location_mm must be finite");
    require(scale > 0.0 && std::isfinite(scale), "hazard.scale_mm must be > 0");
    require(shape > -0.5 && shape < 1.0, "hazard.shape must lie in (-0.5, 1)");
    require(std::isfinite(flood_threshold), "adaptation.flood_threshold_mm must be finite");
    require(std::isfinite(mu), "dynamics.mu_mm_per_yr must be finite");
    require(sigma >= 0.0 && std::isfinite(sigma), "dynamics.sigma_mm_per_sqrt_yr must be >= 0");
    require(premium.loading >= 0.0 && std::isfinite(premium.loading), "economics.delta must be >= 0");
    require(std::isfinite(premium.exposure_growth), "economics.gamma must be finite");
    require(std::isfinite(rate), "economics.rate must be finite");
    if (!(rate > premium.exposure_growth)) {
        std::ostringstream os;
        os << "economics: r > gamma is required for a finite project value (rate=" << rate
           << ", gamma=" << premium.exposure_growth << ")";
        throw ConfigError(os.str());
    }
    std::set<std::string> names;
    for (const auto& p : projects) {
        p.validate();
        require(!p.name.empty(), "project.name must not be empty");
        require(names.insert(p.name).second, "project names must be unique ('" + p.name + "')");
        require(p.name.find_first_of(",>\n\"") == std::string::npos,
                "project.name '" + p.name + "' must not contain ',', '>' or quotes");
    }
    lattice.validate();
    require(std::isfinite(water_level_offset_mm), "plot.water_level_offset_mm must be finite");
    try {
        (void)risk();
        const loss::DamageModel dm(scale, shape, loss.curve());
        (void)dm;
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    if (loss.cover_limit) require(*loss.cover_limit >= 0.0, "loss.cover_limit_B must be >= 0");
}

value::ValuationInputs Scenario::inputs() const {
    return value::ValuationInputs{loss::DamageModel(scale, shape, loss.curve()), premium, abm(), risk(), rate,
                                  flood_threshold, attribution};
}

Scenario parse_scenario(const std::string& text, const std::filesystem::path& base_dir) {
    const config::Document doc = config::parse(text);
    Scenario s = default_scenario();

    static const std::set<std::string> known{"", "hazard", "loss", "adaptation", "dynamics",
                                             "economics", "lattice", "plot", "mc"};
    for (const auto& [name, t] : doc.tables)
        if (!known.count(name)) throw ConfigError("unknown section [" + name + "] (line " + std::to_string(t.line) + ")");
    for (const auto& [name, v] : doc.arrays)
        if (name != "project")
            throw ConfigError("unknown section [[" + name + "]] (line " + std::to_string(v.front().line) + ")");

    auto table = [&](const std::string& name) -> const config::Table& {
        static const config::Table empty;
        const auto it = doc.tables.find(name);
        return it == doc.tables.end() ? empty : it->second;
    };

    {
        Reader r(table(""));
        if (auto v = r.text("name")) (void)v;
        r.finish();
    }
    std::optional<double> alpha_from_hazard;
    {
        Reader r(table("hazard"));
        alpha_from_hazard = r.number("location_mm");
        if (alpha_from_hazard) s.location = *alpha_from_hazard;
        r.set("scale_mm", s.scale);
        r.set("shape", s.shape);
        if (auto csv = r.text("gauge_csv")) {
            GaugeFitDirective g;
            g.csv = std::filesystem::path(*csv).is_absolute() ? std::filesystem::path(*csv) : base_dir / *csv;
            r.set("mean_tide_mm", g.mean_tide_mm);
            r.set("min_coverage", g.min_coverage);
            r.set("missing_sentinel", g.missing_sentinel);
            if (auto n = r.number("min_years")) {
                require(*n >= 1 && std::floor(*n) == *n, "hazard.min_years must be a positive integer");
                g.min_years = static_cast<std::size_t>(*n);
            }
            s.gauge = g;
        } else {
            for (const char* k : {"mean_tide_mm", "min_coverage", "missing_sentinel", "min_years"})
                if (r.number(k)) throw ConfigError(std::string("hazard.") + k + " requires hazard.gauge_csv");
        }
        r.finish();
    }
    {
        Reader r(table("loss"));
        if (auto kind = r.text("kind")) {
            if (*kind == "quadratic") s.loss.kind = LossSpec::Kind::Quadratic;
            else if (*kind == "step") s.loss.kind = LossSpec::Kind::Step;
            else throw ConfigError("loss.kind must be \"quadratic\" or \"step\"");
        }
        r.set("a", s.loss.a);
        r.set("b", s.loss.b);
        r.set("threshold_mm", s.loss.threshold);
        if (auto v = r.numbers("breakpoints_mm")) s.loss.breakpoints = *v;
        if (auto v = r.numbers("levels_B")) s.loss.levels = *v;
        s.loss.cover_limit = r.number("cover_limit_B");
        if (s.loss.kind == LossSpec::Kind::Step && (s.loss.breakpoints.empty() || s.loss.levels.empty()))
            throw ConfigError("loss.kind = \"step\" needs loss.breakpoints_mm and loss.levels_B");
        r.finish();
    }
    {
        Reader r(table("adaptation"));
        r.set("flood_threshold_mm", s.flood_threshold);
        if (auto a = r.text("attribution")) {
            if (*a == "stacked") s.attribution = adapt::BandAttribution::Stacked;
            else if (*a == "nested") s.attribution = adapt::BandAttribution::Nested;
            else throw ConfigError("adaptation.attribution must be \"stacked\" or \"nested\"");
        }
        r.finish();
    }
    {
        Reader r(table("dynamics"));
        if (auto v = r.number("mu_mm_per_yr")) {
            s.mu = *v;
            s.mu_pinned = true;
        }
        if (auto v = r.number("sigma_mm_per_sqrt_yr")) {
            s.sigma = *v;
            s.sigma_pinned = true;
        }
        if (auto v = r.number("alpha0_mm")) {
            if (alpha_from_hazard && *alpha_from_hazard != *v)
                throw ConfigError("dynamics.alpha0_mm and hazard.location_mm disagree; give one");
            s.location = *v;
        }
        const auto theta = r.number("theta_mm_per_yr");
        s.phi = r.number("phi");
        s.rho_wm = r.number("rho_wm");
        s.capm_sigma = r.number("capm_sigma_mm");
        if (theta) s.theta = theta;
        else if (s.phi || s.rho_wm) s.theta.reset();
        r.finish();
        (void)dynamics::RiskAdjustment::resolve(s.theta, s.phi, s.rho_wm, s.capm_sigma.value_or(s.sigma), &s.risk_note);
    }
    {
        Reader r(table("economics"));
        r.set("rate", s.rate);
        r.set("gamma", s.premium.exposure_growth);
        r.set("delta", s.premium.loading);
        r.finish();
    }
    {
        Reader r(table("lattice"));
        r.set("dt_yr", s.lattice.dt);
        r.set("horizon_yr", s.lattice.horizon);
        if (auto m = r.number("margin")) {
            require(*m >= 0 && std::floor(*m) == *m && *m < 1e6, "lattice.margin must be a non-negative integer");
            s.lattice.margin = static_cast<int>(*m);
        }
        r.finish();
    }
    {
        Reader r(table("plot"));
        r.set("water_level_offset_mm", s.water_level_offset_mm);
        r.finish();
    }
    {
        Reader r(table("mc"));
        if (auto v = r.number("seed")) {
            require(*v >= 0 && std::floor(*v) == *v && *v < 9.007199254740992e15, "mc.seed must be a non-negative integer");
            s.seed = static_cast<std::uint64_t>(*v);
        }
        r.finish();
    }
    if (const auto it = doc.arrays.find("project"); it != doc.arrays.end()) {
        s.projects.clear();
        for (const auto& t : it->second) {
            Reader r(t);
            adapt::Project p;
            const auto name = r.text("name");
            const auto cost = r.number("cost_B");
            const auto raise = r.number("raise_mm");
            const std::string where = " (project at line " + std::to_string(t.line) + ")";
            if (!name) throw ConfigError("project.name is required" + where);
            if (!cost) throw ConfigError("project.cost_B is required" + where);
            if (!raise) throw ConfigError("project.raise_mm is required" + where);
            p.name = *name;
            p.cost = *cost;
            p.raise = *raise;
            r.set("effectiveness", p.effectiveness);
            r.set("loss_share", p.loss_share);
            r.finish();
            s.projects.push_back(p);
        }
    }
    if (s.gauge) apply_gauge_fit(s);
    s.validate();
    return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open scenario '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str(), path.parent_path());
}

void apply_gauge_fit(Scenario& s) {
    if (!s.gauge) throw ConfigError("scenario has no hazard.gauge_csv");
    const auto& g = *s.gauge;
    std::ifstream in(g.csv, std::ios::binary);
    if (!in) throw ConfigError("cannot open gauge record '" + g.csv.string() + "'");
    ingest::CsvFormat fmt;
    fmt.missing_sentinel = g.missing_sentinel;
    fmt.station_id = g.csv.stem().string();
    const auto parsed = ingest::parse_gauge_csv(in, fmt);

    GaugeFitResult fit;
    fit.dropped_rows = parsed.dropped;
    fit.years = ingest::annual_stats(parsed.series, g.mean_tide_mm, g.min_coverage);
    std::vector<double> surges;
    std::vector<std::pair<int, double>> means;
    for (const auto& y : fit.years) {
        surges.push_back(y.max_surge);
        means.emplace_back(y.year, y.mean_level);
    }
    evt::FitOptions opts;
    opts.min_observations = g.min_years;
    fit.surge_fit = evt::fit_gev_mle(surges, opts);
    fit.abm = ingest::estimate_abm(means);
    fit.high_water = evt::HighWaterMarkDist::from_surge(fit.surge_fit.params, means.back().second + g.mean_tide_mm);

    s.location = fit.high_water.alpha;
    s.scale = fit.high_water.scale;
    s.shape = fit.high_water.shape;
    if (!s.mu_pinned) s.mu = fit.abm.mu;
    if (!s.sigma_pinned) s.sigma = fit.abm.sigma;
    s.fitted = std::move(fit);
}

} // namespace pathways::scenario
