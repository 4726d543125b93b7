#ifndef PATHWAYS_EVT_HPP
#define PATHWAYS_EVT_HPP

#include <span>
#include <string>

namespace pathways::evt {

// Generalized extreme value law with location m, scale s > 0 and shape xi.
// xi == 0 (or |xi| below kGumbelShape) is evaluated with the Gumbel limit.
struct GevParams {
    double location = 0.0;  // mm
    double scale = 1.0;     // mm
    double shape = 0.0;

    void validate() const;
    // Finite support endpoint location - scale/shape; lower if shape > 0, upper if shape < 0.
    double endpoint() const { return location - scale / shape; }
};

inline constexpr double kGumbelShape = 1e-10;

// Annual high-water-mark law: GEV with the location shifted to alpha = W + Tide + m.
struct HighWaterMarkDist {
    double alpha = 0.0;  // mm
    double scale = 1.0;  // mm
    double shape = 0.0;

    GevParams gev() const { return {alpha, scale, shape}; }
    static HighWaterMarkDist from_surge(const GevParams& surge, double mean_level_plus_tide) {
        return {surge.location + mean_level_plus_tide, surge.scale, surge.shape};
    }
};

double gev_cdf(double x, const GevParams& p);
// 1 - H(x), computed without cancellation in the upper tail.
double gev_sf(double x, const GevParams& p);
// log h(x); -inf outside the support.
double gev_logpdf(double x, const GevParams& p);
// Inverse cdf for prob in (0, 1).
double gev_quantile(double prob, const GevParams& p);
// Sum of gev_logpdf over the sample; -inf when any point falls outside the support.
double gev_loglik(std::span<const double> sample, const GevParams& p);

struct FitOptions {
    std::size_t min_observations = 20;
    int max_iterations = 2000;
    double size_tolerance = 1e-8;
    double shape_min = -0.5;
    double shape_max = 1.0;
};

struct GevFit {
    GevParams params;
    double loglik = 0.0;
    bool converged = false;
    int iterations = 0;
    GevParams start;         // Gumbel moment estimate the search started from
    double start_loglik = 0.0;
};

// Maximum-likelihood fit by simplex search on (m, log s, xi), started from Gumbel
// moment estimates. Throws InsufficientDataError below the observation floor and
// DomainError on degenerate (constant) samples.
GevFit fit_gev_mle(std::span<const double> maxima, const FitOptions& opts = {});

// `m=..., s=..., xi=..., loglik=..., converged=...`
std::string format_fit_report(const GevFit& fit);

} // namespace pathways::evt

#endif // PATHWAYS_EVT_HPP
