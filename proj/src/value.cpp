#include "pathways/value.hpp"

#include "pathways/errors.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <exception>
#include <mutex>
#include <thread>

namespace pathways::value {

namespace {

// Runs body(i) for i in [0, n) on a few threads; each index is written by exactly one thread.
template <class F>
void parallel_for(std::size_t n, F&& body) {
    const std::size_t hw = std::max(1u, std::thread::hardware_concurrency());
    const std::size_t workers = std::min<std::size_t>(hw, std::max<std::size_t>(1, n / 64));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    std::exception_ptr failure;
    std::mutex failure_mutex;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i = w * n / workers; i < (w + 1) * n / workers; ++i) body(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Stage {
    std::vector<double> g;  // benefit on the full alpha grid
    double cost = 0.0;
};

struct Grid {
    double root = 0.0;
    double h = 0.0;
    double p = 0.5;
    std::size_t n = 0;  // time steps
    double dt = 0.0;
    long half = 0;  // offsets k run over [-half, half]

    double alpha(long k) const { return root + static_cast<double>(k) * h; }
    std::size_t index(long k) const { return static_cast<std::size_t>(k + half); }
};

Grid make_grid(double alpha, const ValuationInputs& in, const LatticeSpec& spec) {
    Grid gr;
    gr.root = alpha;
    gr.n = spec.steps();
    gr.dt = spec.horizon / static_cast<double>(gr.n);
    const double d = in.rn_drift();
    const double sigma = in.abm.sigma;
    gr.h = std::sqrt(sigma * sigma * gr.dt + d * d * gr.dt * gr.dt);
    gr.p = gr.h > 0.0 ? 0.5 * (1.0 + d * gr.dt / gr.h) : 0.5;
    gr.half = static_cast<long>(gr.n) + 2L * spec.margin + 1;
    return gr;
}

Stage make_stage(const Grid& gr, const adapt::ProtectionState& state, const adapt::Project& p,
                 const ValuationInputs& in) {
    const auto benefit = adapt::make_benefit(state, p, in.damage, in.premium);
    Stage s;
    s.cost = p.cost;
    s.g.resize(static_cast<std::size_t>(2 * gr.half + 1));
    for (long k = -gr.half; k <= gr.half; ++k) s.g[gr.index(k)] = benefit(gr.alpha(k));
    return s;
}

struct Solution {
    std::vector<double> v0;            // V per stage at the root
    std::vector<double> chain0;        // option on stages 0..k at the root
    std::vector<std::vector<BoundaryPoint>> boundary;
    double min_slack = kInf;
};

// One backward pass over all stages. chains[c][s] is the option on stage s within the
// sequence truncated after stage c; the full sequence is c = last.
Solution solve(const Grid& gr, const std::vector<Stage>& stages, const ValuationInputs& in, int margin) {
    const std::size_t ns = stages.size();
    const double rho = in.effective_rate();
    const double disc_v = std::exp(-rho * gr.dt);
    const double disc_phi = std::exp(-in.rate * gr.dt);
    const double p = gr.p, q = 1.0 - gr.p;
    const double d = in.rn_drift();
    const long m2 = 2L * margin;
    const double half_dt = 0.5 * gr.dt;

    Solution sol;
    sol.boundary.assign(ns, std::vector<BoundaryPoint>(gr.n + 1));
    for (std::size_t i = 0; i <= gr.n; ++i)
        for (auto& b : sol.boundary) b[i].t = static_cast<double>(i) * gr.dt;

    const std::size_t width_max = gr.n + static_cast<std::size_t>(m2) + 1;
    std::vector<std::vector<double>> V(ns, std::vector<double>(width_max)), Vn = V;
    std::vector<std::vector<std::vector<double>>> Phi(ns, V), Phin = Phi;

    auto k_of = [&](std::size_t i, std::size_t j) {
        return 2L * static_cast<long>(j) - static_cast<long>(i) - m2;
    };

    for (std::size_t step = gr.n + 1; step-- > 0;) {
        const std::size_t width = step + static_cast<std::size_t>(m2) + 1;
        const bool terminal = step == gr.n;
        for (std::size_t j = 0; j < width; ++j) {
            const long k = k_of(step, j);
            for (std::size_t s = 0; s < ns; ++s) {
                const auto& g = stages[s].g;
                // A = V + g dt / 2 is the left-endpoint recursion; V itself is trapezoidal in time
                if (terminal) {
                    const double slope = gr.h > 0.0 ? (g[gr.index(k + 1)] - g[gr.index(k - 1)]) / (2.0 * gr.h) : 0.0;
                    Vn[s][j] = (g[gr.index(k)] + d * slope / rho) / rho + half_dt * g[gr.index(k)];
                } else {
                    Vn[s][j] = g[gr.index(k)] * gr.dt + disc_v * (q * V[s][j] + p * V[s][j + 1]);
                }
            }
            for (std::size_t c = 0; c < ns; ++c) {
                for (std::size_t s = c + 1; s-- > 0;) {
                    const double follow = s < c ? Phin[c][s + 1][j] : 0.0;
                    const double v = Vn[s][j] - half_dt * stages[s].g[gr.index(k)];
                    const double pay = v - stages[s].cost + follow;
                    const double cont = terminal ? 0.0 : disc_phi * (q * Phi[c][s][j] + p * Phi[c][s][j + 1]);
                    const double val = std::max(pay, cont);
                    Phin[c][s][j] = val;
                    if (c + 1 == ns) {
                        sol.min_slack = std::min(sol.min_slack, val - std::max(v - stages[s].cost, 0.0));
                        auto& bp = sol.boundary[s][step];
                        if (pay > 0.0 && pay >= cont && gr.alpha(k) < bp.alpha_star) bp.alpha_star = gr.alpha(k);
                    }
                }
            }
        }
        std::swap(V, Vn);
        std::swap(Phi, Phin);
    }
    // root sits at j = margin of step 0
    const auto jr = static_cast<std::size_t>(margin);
    for (std::size_t s = 0; s < ns; ++s) {
        sol.v0.push_back(V[s][jr] - half_dt * stages[s].g[gr.index(0)]);
        sol.chain0.push_back(Phi[s][0][jr]);
    }
    return sol;
}

ValuationResult run(double alpha, const adapt::ProtectionState& state, const std::vector<adapt::Project>& order,
                    const ValuationInputs& in, const LatticeSpec& spec) {
    in.validate();
    spec.validate();
    if (order.empty()) throw ConfigError("no projects");
    if (!std::isfinite(alpha)) throw DomainError("valuation: alpha must be finite");
    const Grid gr = make_grid(alpha, in, spec);

    std::vector<Stage> stages;
    adapt::ProtectionState st = state;
    for (const auto& p : order) {
        stages.push_back(make_stage(gr, st, p, in));
        st = st.with(p);
    }
    const Solution sol = solve(gr, stages, in, spec.margin);

    ValuationResult res;
    res.alpha = alpha;
    res.min_exercise_slack = sol.min_slack;
    for (std::size_t s = 0; s < order.size(); ++s) {
        StageResult sr;
        sr.project = order[s].name;
        sr.cost = order[s].cost;
        sr.project_value = sol.v0[s];
        sr.npv = sol.v0[s] - order[s].cost;
        sr.option_value = sol.chain0[s] - (s == 0 ? 0.0 : sol.chain0[s - 1]);
        sr.boundary = sol.boundary[s];
        res.npv_total += sr.npv;
        res.stages.push_back(std::move(sr));
    }
    res.option_total = sol.chain0.back();
    if (!std::isfinite(res.option_total)) throw NumericError("lattice produced a non-finite option value");
    return res;
}

std::string money(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.2f", v == 0.0 ? 0.0 : v);
    if (std::string(buf) == "-0.00") return "0.00";
    return buf;
}

} // namespace

void LatticeSpec::validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("lattice dt must be > 0");
    if (!(horizon >= dt) || !std::isfinite(horizon)) throw ConfigError("lattice horizon must be >= dt");
    if (margin < 0) throw ConfigError("lattice margin must be >= 0");
}

std::size_t LatticeSpec::steps() const {
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(horizon / dt)));
}

void ValuationInputs::validate() const {
    premium.validate();
    abm.validate();
    if (!std::isfinite(rate)) throw ConfigError("rate must be finite");
    if (!(rate > premium.exposure_growth))
        throw DomainError("discount rate must satisfy r > gamma (r=" + std::to_string(rate) +
                          ", gamma=" + std::to_string(premium.exposure_growth) + ")");
}

ValuationInputs ValuationInputs::with_loss_scaled(double factor) const {
    ValuationInputs out = *this;
    out.damage = loss::DamageModel(damage.scale(), damage.shape(), loss::scaled(damage.curve(), factor));
    return out;
}

std::string ValuationResult::order_label() const {
    std::string s;
    for (const auto& st : stages) s += (s.empty() ? "" : ">") + st.project;
    return s;
}

double project_value(double alpha, const adapt::ProtectionState& state, const adapt::Project& next,
                     const ValuationInputs& in, const LatticeSpec& spec) {
    return run(alpha, state, {next}, in, spec).stages.front().project_value;
}

double npv(double alpha, const adapt::ProtectionState& state, const adapt::Project& next, const ValuationInputs& in,
           const LatticeSpec& spec) {
    return project_value(alpha, state, next, in, spec) - next.cost;
}

ValuationResult option_value_single(double alpha, const adapt::ProtectionState& state, const adapt::Project& next,
                                    const ValuationInputs& in, const LatticeSpec& spec) {
    return run(alpha, state, {next}, in, spec);
}

ValuationResult option_value_sequence(double alpha, const adapt::ProtectionState& state,
                                      const std::vector<adapt::Project>& order, const ValuationInputs& in,
                                      const LatticeSpec& spec) {
    return run(alpha, state, order, in, spec);
}

ValuationResult option_value_sequence(const std::vector<adapt::Project>& order, const ValuationInputs& in,
                                      const LatticeSpec& spec) {
    return run(in.abm.alpha0, in.initial_state(), order, in, spec);
}

PathwaySelection select_pathway(const std::vector<adapt::Project>& projects, const ValuationInputs& in,
                                const LatticeSpec& spec) {
    if (projects.empty()) throw ConfigError("no projects");
    std::vector<std::size_t> perm(projects.size());
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    PathwaySelection sel;
    do {
        std::vector<adapt::Project> order;
        for (std::size_t i : perm) order.push_back(projects[i]);
        sel.results.push_back(option_value_sequence(order, in, spec));
    } while (std::next_permutation(perm.begin(), perm.end()));

    for (std::size_t i = 1; i < sel.results.size(); ++i) {
        const auto& a = sel.results[i];
        const auto& b = sel.results[sel.best];
        const double tol = 1e-9 * std::max(1.0, std::abs(b.option_total));
        if (a.option_total > b.option_total + tol ||
            (std::abs(a.option_total - b.option_total) <= tol && a.stages.front().cost < b.stages.front().cost))
            sel.best = i;
    }
    return sel;
}

double perpetual_project_value(double alpha, const adapt::ProtectionState& state, const adapt::Project& next,
                               const ValuationInputs& in) {
    in.validate();
    const auto g = adapt::make_benefit(state, next, in.damage, in.premium);
    const double rho = in.effective_rate();
    const double d = in.rn_drift();
    const double sigma = in.abm.sigma;
    boost::math::quadrature::exp_sinh<double> integrator;
    double err = 0.0;
    if (sigma == 0.0) {
        const double v = integrator.integrate([&](double t) { return std::exp(-rho * t) * g(alpha + d * t); },
                                              1e-12, &err);
        return v;
    }
    const double s2 = sigma * sigma;
    const double lam = std::sqrt(d * d + 2.0 * rho * s2);
    const double beta_up = (lam - d) / s2;
    const double beta_dn = (lam + d) / s2;
    const double up = integrator.integrate([&](double y) { return g(alpha + y) * std::exp(-beta_up * y); }, 1e-12,
                                           &err);
    const double dn = integrator.integrate([&](double y) { return g(alpha - y) * std::exp(-beta_dn * y); }, 1e-12,
                                           &err);
    const double v = (up + dn) / lam;
    if (!std::isfinite(v)) throw NumericError("perpetual project value did not converge");
    return v;
}

McEstimate mc_project_value(double alpha, const adapt::ProtectionState& state, const adapt::Project& next,
                            const ValuationInputs& in, const McOptions& opts) {
    in.validate();
    if (!(opts.dt > 0.0) || !(opts.horizon > 0.0)) throw ConfigError("Monte Carlo horizon and dt must be > 0");
    if (opts.n_paths < 2) throw ConfigError("Monte Carlo needs at least 2 paths");
    const auto g = adapt::make_benefit(state, next, in.damage, in.premium);
    const double rho = in.effective_rate();
    const double d = in.rn_drift();
    const double sigma = in.abm.sigma;
    const auto n_steps = static_cast<std::size_t>(std::llround(opts.horizon / opts.dt));
    const double dt = opts.horizon / static_cast<double>(n_steps);
    const double H = dt * static_cast<double>(n_steps);

    // g on a fine table over the likely path range, exact evaluation outside it
    const double spread = 8.0 * sigma * std::sqrt(H) + std::abs(d) * H + 10.0 * in.damage.scale();
    const double g_lo = alpha - spread, g_hi = alpha + spread;
    const double g_step = std::min(0.5, in.damage.scale() / 500.0);
    const auto g_n = static_cast<std::size_t>(std::ceil((g_hi - g_lo) / g_step)) + 1;
    std::vector<double> g_tab(g_n);
    for (std::size_t i = 0; i < g_n; ++i) g_tab[i] = g(g_lo + static_cast<double>(i) * g_step);
    auto g_at = [&](double a) {
        const double x = (a - g_lo) / g_step;
        if (!(x >= 0.0) || x >= static_cast<double>(g_n - 1)) return g(a);
        const auto i = static_cast<std::size_t>(x);
        const double w = x - static_cast<double>(i);
        return (1.0 - w) * g_tab[i] + w * g_tab[i + 1];
    };

    // perpetual value of what lies beyond the horizon, tabulated around E[alpha(H)]
    const double centre = alpha + d * H;
    const double t_half = std::max(7.0 * sigma * std::sqrt(H), 1.0);
    const std::size_t t_n = 1601;
    const double t_lo = centre - t_half, t_step = 2.0 * t_half / static_cast<double>(t_n - 1);
    std::vector<double> tail(t_n);
    parallel_for(t_n, [&](std::size_t i) {
        tail[i] = perpetual_project_value(t_lo + static_cast<double>(i) * t_step, state, next, in);
    });
    auto tail_at = [&](double a) {
        const double x = (a - t_lo) / t_step;
        if (!(x >= 0.0) || x >= static_cast<double>(t_n - 1)) return perpetual_project_value(a, state, next, in);
        const auto i = static_cast<std::size_t>(x);
        const double w = x - static_cast<double>(i);
        return (1.0 - w) * tail[i] + w * tail[i + 1];
    };

    std::vector<double> disc(n_steps + 1);
    for (std::size_t i = 0; i <= n_steps; ++i) disc[i] = std::exp(-rho * dt * static_cast<double>(i));
    const double tail_disc = std::exp(-rho * H);

    std::vector<double> values(opts.n_paths);
    const dynamics::AbmParams rn{d, sigma, alpha};
    parallel_for(opts.n_paths, [&](std::size_t k) {
        thread_local std::vector<double> path;
        dynamics::simulate_path(rn, d, dt, n_steps, opts.seed, k, path);
        double acc = 0.5 * (disc[0] * g_at(path[0]) + disc[n_steps] * g_at(path[n_steps]));
        for (std::size_t i = 1; i < n_steps; ++i) acc += disc[i] * g_at(path[i]);
        values[k] = acc * dt + tail_disc * tail_at(path[n_steps]);
    });
    double sum = 0.0, sum_sq = 0.0;
    for (double v : values) {
        sum += v;
        sum_sq += v * v;
    }
    const double n = static_cast<double>(opts.n_paths);
    McEstimate e;
    e.n_paths = opts.n_paths;
    e.mean = sum / n;
    const double var = std::max(0.0, (sum_sq - n * e.mean * e.mean) / (n - 1.0));
    e.std_error = std::sqrt(var / n);
    return e;
}

void write_boundary_csv(std::ostream& os, const std::vector<BoundaryPoint>& boundary, double water_offset_mm) {
    os << "t_yr,alpha_star_mm,water_level_m\n";
    char buf[128];
    for (const auto& b : boundary) {
        if (std::isfinite(b.alpha_star))
            std::snprintf(buf, sizeof buf, "%.6g,%.6f,%.6f\n", b.t, b.alpha_star,
                          (b.alpha_star + water_offset_mm) / 1000.0);
        else
            std::snprintf(buf, sizeof buf, "%.6g,inf,inf\n", b.t);
        os << buf;
    }
}

void write_report_csv(std::ostream& os, const PathwaySelection& selection) {
    os << "order,row,project,npv,option_value,difference,selected\n";
    for (std::size_t i = 0; i < selection.results.size(); ++i) {
        const auto& r = selection.results[i];
        const std::string label = r.order_label();
        const char* sel = i == selection.best ? "true" : "false";
        for (std::size_t s = 0; s < r.stages.size(); ++s) {
            const auto& st = r.stages[s];
            os << label << ',' << "stage" << s + 1 << ',' << st.project << ',' << money(st.npv) << ','
               << money(st.option_value) << ',' << money(st.option_value - st.npv) << ',' << sel << '\n';
        }
        os << label << ",total,," << money(r.npv_total) << ',' << money(r.option_total) << ','
           << money(r.difference()) << ',' << sel << '\n';
    }
}

} // namespace pathways::value
