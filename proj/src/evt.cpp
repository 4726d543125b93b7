#include "pathways/evt.hpp"

#include "pathways/errors.hpp"
#include "pathways/optim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <vector>

namespace pathways::evt {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kEulerGamma = 0.57721566490153286;
constexpr double kPi = 3.14159265358979323846;

bool is_gumbel(double shape) { return std::fabs(shape) < kGumbelShape; }

void require_finite(double x, const char* what) {
    if (!std::isfinite(x)) throw DomainError(std::string(what) + ": non-finite argument");
}

// t(x) = [1 + xi (x-m)/s]^{-1/xi}, so that H(x) = exp(-t). Returns +inf below the lower
// endpoint and 0 above the upper endpoint.
double t_of(double x, const GevParams& p) {
    const double z = (x - p.location) / p.scale;
    if (is_gumbel(p.shape)) return std::exp(-z);
    const double arg = p.shape * z;
    if (arg <= -1.0) return p.shape > 0.0 ? kInf : 0.0;
    return std::exp(-std::log1p(arg) / p.shape);
}

} // namespace

void GevParams::validate() const {
    if (!(scale > 0.0) || !std::isfinite(scale)) throw DomainError("GEV scale must be positive and finite");
    if (!std::isfinite(location)) throw DomainError("GEV location must be finite");
    if (!std::isfinite(shape)) throw DomainError("GEV shape must be finite");
}

double gev_cdf(double x, const GevParams& p) {
    require_finite(x, "gev_cdf");
    p.validate();
    return std::exp(-t_of(x, p));
}

double gev_sf(double x, const GevParams& p) {
    require_finite(x, "gev_sf");
    p.validate();
    return -std::expm1(-t_of(x, p));
}

double gev_logpdf(double x, const GevParams& p) {
    require_finite(x, "gev_logpdf");
    p.validate();
    const double z = (x - p.location) / p.scale;
    if (is_gumbel(p.shape)) return -std::log(p.scale) - z - std::exp(-z);
    const double arg = p.shape * z;
    if (arg <= -1.0) return -kInf;
    const double l1p = std::log1p(arg);
    return -std::log(p.scale) - (1.0 + 1.0 / p.shape) * l1p - std::exp(-l1p / p.shape);
}

double gev_quantile(double prob, const GevParams& p) {
    if (!(prob > 0.0 && prob < 1.0)) throw DomainError("gev_quantile: probability must lie in (0, 1)");
    p.validate();
    const double t = -std::log(prob);
    if (is_gumbel(p.shape)) return p.location - p.scale * std::log(t);
    return p.location + p.scale * std::expm1(-p.shape * std::log(t)) / p.shape;
}

double gev_loglik(std::span<const double> sample, const GevParams& p) {
    double ll = 0.0;
    for (double v : sample) {
        const double lp = gev_logpdf(v, p);
        if (!std::isfinite(lp)) return -kInf;
        ll += lp;
    }
    return ll;
}

GevFit fit_gev_mle(std::span<const double> maxima, const FitOptions& opts) {
    if (maxima.size() < opts.min_observations) {
        throw InsufficientDataError("GEV fit needs at least " + std::to_string(opts.min_observations) +
                                    " observations, got " + std::to_string(maxima.size()));
    }
    for (double v : maxima) require_finite(v, "fit_gev_mle");
    const auto n = static_cast<double>(maxima.size());
    const double mean = std::accumulate(maxima.begin(), maxima.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : maxima) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / (n - 1.0));
    if (!(sd > 0.0)) throw DomainError("GEV fit: degenerate sample (all values equal)");

    // Work in standardized units so the search is equivariant under affine data maps.
    const double s0 = std::sqrt(6.0) * sd / kPi;
    const double m0 = mean - kEulerGamma * s0;
    std::vector<double> z(maxima.size());
    std::transform(maxima.begin(), maxima.end(), z.begin(), [&](double v) { return (v - m0) / s0; });

    auto negll = [&](const std::vector<double>& x) {
        if (x[2] < opts.shape_min || x[2] > opts.shape_max) return kInf;
        const GevParams q{x[0], std::exp(x[1]), x[2]};
        if (!std::isfinite(q.scale) || q.scale <= 0.0) return kInf;
        const double ll = gev_loglik(z, q);
        return std::isfinite(ll) ? -ll : kInf;
    };

    std::vector<double> x0{0.0, 0.0, 0.1};
    if (!std::isfinite(negll(x0))) x0[2] = 0.0;  // Gumbel start always has full support
    const double f0 = negll(x0);

    optim::SimplexOptions so;
    so.max_iterations = opts.max_iterations;
    so.size_tolerance = opts.size_tolerance;
    so.initial_step = {0.2, 0.2, 0.1};
    auto r = optim::nelder_mead(negll, x0, so);
    int iters = r.iterations;
    // One restart from the optimum guards against simplex collapse.
    if (r.converged) {
        so.max_iterations = std::max(0, opts.max_iterations - iters);
        so.initial_step = {0.05, 0.05, 0.02};
        auto r2 = optim::nelder_mead(negll, r.x, so);
        iters += r2.iterations;
        if (r2.value <= r.value) r = r2;
        else r.converged = r2.converged;
    }

    GevFit fit;
    fit.start = {m0 + s0 * x0[0], s0 * std::exp(x0[1]), x0[2]};
    fit.start_loglik = gev_loglik(maxima, fit.start);
    fit.params = {m0 + s0 * r.x[0], s0 * std::exp(r.x[1]), r.x[2]};
    fit.loglik = gev_loglik(maxima, fit.params);
    fit.converged = r.converged && std::isfinite(fit.loglik) && r.value <= f0;
    fit.iterations = iters;
    return fit;
}

std::string format_fit_report(const GevFit& fit) {
    std::ostringstream os;
    os.precision(10);
    os << "m=" << fit.params.location << ", s=" << fit.params.scale << ", xi=" << fit.params.shape
       << ", loglik=" << fit.loglik << ", converged=" << (fit.converged ? "true" : "false");
    return os.str();
}

} // namespace pathways::evt
