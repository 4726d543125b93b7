#ifndef PATHWAYS_DYNAMICS_HPP
#define PATHWAYS_DYNAMICS_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace pathways::dynamics {

// d alpha = mu dt + sigma dB, alpha(0) = alpha0.
struct AbmParams {
    double mu = 0.0;      // mm/yr
    double sigma = 0.0;   // mm/sqrt(yr)
    double alpha0 = 0.0;  // mm

    void validate() const;
};

// Drift reduction theta taking the physical process to the risk-neutral one.
struct RiskAdjustment {
    double theta = 0.0;  // mm/yr

    static RiskAdjustment from_capm(double phi, double rho_wm, double sigma) { return {phi * sigma * rho_wm}; }

    // Direct theta wins when both are given; the derivation is reported in `note`.
    static RiskAdjustment resolve(std::optional<double> theta, std::optional<double> phi, std::optional<double> rho_wm,
                                  double sigma, std::string* note = nullptr);
};

enum class Measure { Physical, RiskNeutral };

double risk_neutral_drift(const AbmParams& p, const RiskAdjustment& adj);
double drift(const AbmParams& p, const RiskAdjustment& adj, Measure m);

struct NormalLaw {
    double mean = 0.0;
    double std = 0.0;
};

// alpha(T) ~ N(alpha0 + drift T, sigma^2 T).
NormalLaw alpha_distribution(const AbmParams& p, const RiskAdjustment& adj, double horizon, Measure m);

// Philox4x32-10 counter-based generator: stream (seed, key) produces block `counter`.
class Philox {
public:
    using Block = std::array<std::uint32_t, 4>;
    Philox(std::uint64_t seed, std::uint64_t stream) : key_{lo(seed), hi(seed)}, stream_(stream) {}

    Block operator()(std::uint64_t counter) const;

private:
    static std::uint32_t lo(std::uint64_t v) { return static_cast<std::uint32_t>(v); }
    static std::uint32_t hi(std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); }
    std::array<std::uint32_t, 2> key_;
    std::uint64_t stream_;
};

// Independent standard normals for one path, addressed by (seed, path index).
class NormalStream {
public:
    NormalStream(std::uint64_t seed, std::uint64_t path) : gen_(seed, path) {}
    double next();

private:
    Philox gen_;
    std::uint64_t counter_ = 0;
    std::array<double, 2> buf_{};
    int avail_ = 0;
};

// Row-major paths: n_paths x (n_steps + 1), column 0 is alpha0.
struct PathMatrix {
    std::size_t n_paths = 0;
    std::size_t n_steps = 0;
    double dt = 0.0;
    std::vector<double> values;

    double at(std::size_t path, std::size_t step) const { return values[path * (n_steps + 1) + step]; }
};

// Writes one exact-in-distribution ABM path of n_steps increments into `out` (size n_steps + 1).
void simulate_path(const AbmParams& p, double drift_rate, double dt, std::size_t n_steps, std::uint64_t seed,
                   std::uint64_t path, std::vector<double>& out);

PathMatrix simulate_paths(const AbmParams& p, const RiskAdjustment& adj, Measure m, double horizon, double dt,
                          std::size_t n_paths, std::uint64_t seed);

} // namespace pathways::dynamics

#endif // PATHWAYS_DYNAMICS_HPP
