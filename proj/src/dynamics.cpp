#include "pathways/dynamics.hpp"

#include "pathways/errors.hpp"

#include <cmath>
#include <sstream>

namespace pathways::dynamics {

void AbmParams::validate() const {
    if (!std::isfinite(mu)) throw ConfigError("ABM drift mu must be finite");
    if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw ConfigError("ABM volatility sigma must be >= 0");
    if (!std::isfinite(alpha0)) throw ConfigError("initial location alpha0 must be finite");
}

RiskAdjustment RiskAdjustment::resolve(std::optional<double> theta, std::optional<double> phi,
                                       std::optional<double> rho_wm, double sigma, std::string* note) {
    const bool have_capm = phi.has_value() && rho_wm.has_value();
    if (phi.has_value() != rho_wm.has_value()) throw ConfigError("risk adjustment: phi and rho_wm must be given together");
    if (theta && !std::isfinite(*theta)) throw ConfigError("theta must be finite");
    if (!theta && !have_capm) return {0.0};
    if (!theta) return from_capm(*phi, *rho_wm, sigma);
    if (have_capm && note) {
        std::ostringstream os;
        os << "theta=" << *theta << " given directly; phi*sigma*rho_wm=" << from_capm(*phi, *rho_wm, sigma).theta
           << " ignored";
        *note = os.str();
    }
    return {*theta};
}

double risk_neutral_drift(const AbmParams& p, const RiskAdjustment& adj) { return p.mu - adj.theta; }

double drift(const AbmParams& p, const RiskAdjustment& adj, Measure m) {
    return m == Measure::Physical ? p.mu : risk_neutral_drift(p, adj);
}

NormalLaw alpha_distribution(const AbmParams& p, const RiskAdjustment& adj, double horizon, Measure m) {
    if (!(horizon >= 0.0)) throw DomainError("alpha_distribution: horizon must be >= 0");
    return {p.alpha0 + drift(p, adj, m) * horizon, p.sigma * std::sqrt(horizon)};
}

Philox::Block Philox::operator()(std::uint64_t counter) const {
    constexpr std::uint32_t kM0 = 0xD2511F53u, kM1 = 0xCD9E8D57u;
    constexpr std::uint32_t kW0 = 0x9E3779B9u, kW1 = 0xBB67AE85u;
    Block c{lo(counter), hi(counter), lo(stream_), hi(stream_)};
    std::array<std::uint32_t, 2> k = key_;
    for (int round = 0; round < 10; ++round) {
        const std::uint64_t p0 = static_cast<std::uint64_t>(kM0) * c[0];
        const std::uint64_t p1 = static_cast<std::uint64_t>(kM1) * c[2];
        c = {hi(p1) ^ c[1] ^ k[0], lo(p1), hi(p0) ^ c[3] ^ k[1], lo(p0)};
        k[0] += kW0;
        k[1] += kW1;
    }
    return c;
}

double NormalStream::next() {
    if (avail_ == 0) {
        const auto b = gen_(counter_++);
        constexpr double kTwoPi = 6.283185307179586476925;
        // 53-bit uniforms; u1 in (0, 1] so the log is finite
        const std::uint64_t w0 = (static_cast<std::uint64_t>(b[0]) << 32 | b[1]) >> 11;
        const std::uint64_t w1 = (static_cast<std::uint64_t>(b[2]) << 32 | b[3]) >> 11;
        const double u1 = (static_cast<double>(w0) + 1.0) * 0x1p-53;
        const double u2 = static_cast<double>(w1) * 0x1p-53;
        const double r = std::sqrt(-2.0 * std::log(u1));
        buf_ = {r * std::cos(kTwoPi * u2), r * std::sin(kTwoPi * u2)};
        avail_ = 2;
    }
    return buf_[static_cast<std::size_t>(--avail_)];
}

void simulate_path(const AbmParams& p, double drift_rate, double dt, std::size_t n_steps, std::uint64_t seed,
                   std::uint64_t path, std::vector<double>& out) {
    out.resize(n_steps + 1);
    NormalStream z(seed, path);
    const double mean_step = drift_rate * dt;
    const double sd_step = p.sigma * std::sqrt(dt);
    out[0] = p.alpha0;
    for (std::size_t i = 1; i <= n_steps; ++i) out[i] = out[i - 1] + mean_step + sd_step * z.next();
}

PathMatrix simulate_paths(const AbmParams& p, const RiskAdjustment& adj, Measure m, double horizon, double dt,
                          std::size_t n_paths, std::uint64_t seed) {
    p.validate();
    if (!(dt > 0.0)) throw DomainError("simulate_paths: dt must be positive");
    if (n_paths < 1) throw DomainError("simulate_paths: need at least one path");
    if (!(horizon >= 0.0)) throw DomainError("simulate_paths: horizon must be >= 0");
    PathMatrix pm;
    pm.n_paths = n_paths;
    pm.n_steps = static_cast<std::size_t>(std::llround(horizon / dt));
    pm.dt = dt;
    pm.values.resize(n_paths * (pm.n_steps + 1));
    std::vector<double> row;
    const double d = drift(p, adj, m);
    for (std::size_t k = 0; k < n_paths; ++k) {
        simulate_path(p, d, dt, pm.n_steps, seed, k, row);
        std::copy(row.begin(), row.end(), pm.values.begin() + static_cast<std::ptrdiff_t>(k * (pm.n_steps + 1)));
    }
    return pm;
}

} // namespace pathways::dynamics
