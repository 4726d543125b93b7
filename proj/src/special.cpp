#include "pathways/special.hpp"

#include "pathways/errors.hpp"

#include <cmath>
#include <limits>

namespace pathways::special {

namespace {

constexpr int kMaxIter = 10000;
constexpr double kEps = 2.0 * std::numeric_limits<double>::epsilon();

// log of z^a e^{-z} / Γ(a), the common prefactor of both expansions
double log_prefactor(double a, double z) {
    return a * std::log(z) - z - std::lgamma(a);
}

// P(a,z) by its power series; converges quickly for z < a + 1.
double p_series(double a, double z) {
    double ap = a;
    double term = 1.0 / a;
    double sum = term;
    for (int n = 0; n < kMaxIter; ++n) {
        ap += 1.0;
        term *= z / ap;
        sum += term;
        if (std::fabs(term) < std::fabs(sum) * kEps) {
            return sum * std::exp(log_prefactor(a, z));
        }
    }
    throw NumericError("incomplete gamma series failed to converge");
}

// Q(a,z) by the Legendre continued fraction (modified Lentz); for z >= a + 1.
double q_continued_fraction(double a, double z) {
    constexpr double tiny = 1e-300;
    double b = z + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < kMaxIter; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < kEps) {
            return h * std::exp(log_prefactor(a, z));
        }
    }
    throw NumericError("incomplete gamma continued fraction failed to converge");
}

void check_args(double a, double z) {
    if (!(a > 0.0) || !std::isfinite(a)) throw DomainError("incomplete gamma: a must be positive and finite");
    if (std::isnan(z) || z < 0.0) throw DomainError("incomplete gamma: z must be non-negative");
}

} // namespace

double gamma_p(double a, double z) {
    check_args(a, z);
    if (z == 0.0) return 0.0;
    if (std::isinf(z)) return 1.0;
    if (z < a + 1.0) return p_series(a, z);
    return 1.0 - q_continued_fraction(a, z);
}

double gamma_q(double a, double z) {
    check_args(a, z);
    if (z == 0.0) return 1.0;
    if (std::isinf(z)) return 0.0;
    if (z < a + 1.0) return 1.0 - p_series(a, z);
    return q_continued_fraction(a, z);
}

double upper_gamma(double a, double z) {
    if (a > -1.0 && a < 0.0) {
        if (!(z > 0.0)) throw DomainError("upper_gamma: z must be positive for negative a");
        if (std::isinf(z)) return 0.0;
        return (upper_gamma(a + 1.0, z) - std::exp(a * std::log(z) - z)) / a;
    }
    check_args(a, z);
    if (std::isinf(z)) return 0.0;
    if (z == 0.0) return std::tgamma(a);
    if (z < a + 1.0) return std::tgamma(a) - lower_gamma(a, z);
    return q_continued_fraction(a, z) * std::tgamma(a);
}

double lower_gamma(double a, double z) {
    check_args(a, z);
    if (z == 0.0) return 0.0;
    if (std::isinf(z)) return std::tgamma(a);
    if (z < a + 1.0) return p_series(a, z) * std::tgamma(a);
    return std::tgamma(a) - q_continued_fraction(a, z) * std::tgamma(a);
}

} // namespace pathways::special
