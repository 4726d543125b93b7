#include "oracles.hpp"

#include "pathways/errors.hpp"
#include "pathways/evt.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <doctest.h>

#include <cmath>
#include <limits>
#include <regex>

using namespace pathways;
using evt::GevParams;

TEST_CASE("cdf at the location is exp(-1) for any shape") {
    for (double xi : {-0.3, 0.0, 0.27, 0.9}) CHECK(evt::gev_cdf(1642.0, {1642.0, 131.0, xi}) == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
}

TEST_CASE("baseline exceedance of the flood threshold") {
    const GevParams p{1642.0, 131.0, 0.27};
    CHECK(evt::gev_sf(2506.0, p) == doctest::Approx(0.023).epsilon(0.001 / 0.023));
    CHECK(evt::gev_sf(2506.0, p) == doctest::Approx(1.0 - oracle::gev_cdf(2506.0, 1642.0, 131.0, 0.27)).epsilon(1e-12));
}

TEST_CASE("cdf outside the support") {
    const GevParams p{1642.0, 131.0, 0.27};
    CHECK(evt::gev_cdf(p.endpoint() - 1.0, p) == 0.0);
    CHECK(evt::gev_sf(p.endpoint() - 1.0, p) == 1.0);
    const GevParams q{1642.0, 131.0, -0.2};
    CHECK(evt::gev_cdf(q.endpoint() + 1.0, q) == 1.0);
    CHECK(evt::gev_sf(q.endpoint() + 1.0, q) == 0.0);
}

TEST_CASE("cdf agrees with the textbook formula") {
    for (double xi : {-0.4, -0.1, 0.0, 0.1, 0.27, 0.8})
        for (double x : {1000.0, 1500.0, 1642.0, 2000.0, 2506.0, 4000.0}) {
            CAPTURE(xi);
            CAPTURE(x);
            CHECK(evt::gev_cdf(x, {1642.0, 131.0, xi}) == doctest::Approx(oracle::gev_cdf(x, 1642.0, 131.0, xi)).epsilon(1e-12));
        }
}

TEST_CASE("Gumbel branch is continuous in the shape") {
    for (double x : {1300.0, 1642.0, 2100.0, 2900.0}) {
        CHECK(std::fabs(evt::gev_cdf(x, {1642.0, 131.0, 1e-9}) - evt::gev_cdf(x, {1642.0, 131.0, 0.0})) < 1e-6);
        CHECK(std::fabs(evt::gev_cdf(x, {1642.0, 131.0, -1e-9}) - evt::gev_cdf(x, {1642.0, 131.0, 0.0})) < 1e-6);
    }
}

TEST_CASE("non-finite arguments are domain errors") {
    const GevParams p{0.0, 1.0, 0.1};
    CHECK_THROWS_AS(evt::gev_cdf(std::numeric_limits<double>::quiet_NaN(), p), DomainError);
    CHECK_THROWS_AS(evt::gev_cdf(std::numeric_limits<double>::infinity(), p), DomainError);
    CHECK_THROWS_AS(evt::gev_logpdf(std::numeric_limits<double>::quiet_NaN(), p), DomainError);
    CHECK_THROWS_AS(evt::gev_cdf(0.0, {0.0, 0.0, 0.1}), DomainError);
    CHECK_THROWS_AS(evt::gev_cdf(0.0, {0.0, -1.0, 0.1}), DomainError);
}

TEST_CASE("Gumbel log-density at the location") {
    CHECK(evt::gev_logpdf(1642.0, {1642.0, 131.0, 0.0}) == doctest::Approx(-std::log(131.0) - 1.0).epsilon(1e-14));
}

TEST_CASE("log-density is -inf outside the support and matches the formula inside") {
    const GevParams p{1642.0, 131.0, 0.27};
    CHECK(evt::gev_logpdf(p.endpoint() - 5.0, p) == -std::numeric_limits<double>::infinity());
    for (double x : {1300.0, 1642.0, 2506.0, 5000.0})
        CHECK(std::exp(evt::gev_logpdf(x, p)) == doctest::Approx(oracle::gev_pdf(x, 1642.0, 131.0, 0.27)).epsilon(1e-12));
}

TEST_CASE("density integrates to one over the support") {
    boost::math::quadrature::tanh_sinh<double> ts;
    for (double xi : {-0.3, 0.0, 0.27}) {
        const GevParams p{1642.0, 131.0, xi};
        const auto [lo, hi] = oracle::support(1642.0, 131.0, xi);
        auto f = [&](double x) { return std::exp(evt::gev_logpdf(x, p)); };
        const double left = ts.integrate(f, lo, 1642.0, 1e-13);
        const double right = ts.integrate(f, 1642.0, hi, 1e-13);
        CAPTURE(xi);
        CHECK(std::fabs(left + right - 1.0) < 1e-8);
    }
}

TEST_CASE("quantile inverts the cdf") {
    for (double xi : {-0.3, 0.0, 0.27})
        for (double prob : {1e-6, 0.1, 0.5, 0.977, 0.999999}) {
            const GevParams p{1642.0, 131.0, xi};
            CHECK(evt::gev_cdf(evt::gev_quantile(prob, p), p) == doctest::Approx(prob).epsilon(1e-10));
        }
    CHECK_THROWS_AS(evt::gev_quantile(0.0, {0.0, 1.0, 0.1}), DomainError);
    CHECK_THROWS_AS(evt::gev_quantile(1.0, {0.0, 1.0, 0.1}), DomainError);
}

TEST_CASE("log-likelihood is -inf when any point leaves the support") {
    const GevParams p{1642.0, 131.0, 0.27};
    std::vector<double> xs{1700.0, 1800.0, p.endpoint() - 1.0};
    CHECK(evt::gev_loglik(xs, p) == -std::numeric_limits<double>::infinity());
}

TEST_CASE("fit recovers the generating parameters from 500 draws") {
    const auto xs = oracle::gev_sample(500, 1642.0, 131.0, 0.27, 42);
    const auto fit = evt::fit_gev_mle(xs);
    CHECK(fit.converged);
    const double truth = evt::gev_loglik(xs, {1642.0, 131.0, 0.27});
    // joint likelihood-ratio region, chi-square(3) 95% point
    CHECK(2.0 * (fit.loglik - truth) >= -1e-6);
    CHECK(2.0 * (fit.loglik - truth) < 7.815);
    CHECK(fit.loglik >= fit.start_loglik);
    CHECK(fit.loglik == doctest::Approx(evt::gev_loglik(xs, fit.params)).epsilon(1e-12));
    for (double x : xs) CHECK(1.0 + fit.params.shape * (x - fit.params.location) / fit.params.scale > 0.0);
}

TEST_CASE("fit floor and degenerate data") {
    const std::vector<double> five{1.0, 2.0, 3.0, 4.0, 5.0};
    CHECK_THROWS_AS(evt::fit_gev_mle(five), InsufficientDataError);
    const std::vector<double> flat(30, 7.0);
    CHECK_THROWS_AS(evt::fit_gev_mle(flat), DomainError);
    evt::FitOptions lax;
    lax.min_observations = 5;
    const std::vector<double> small{1.0, 2.5, 2.0, 4.0, 3.1, 2.2};
    CHECK_NOTHROW(evt::fit_gev_mle(small, lax));
}

TEST_CASE("fit report format") {
    const auto fit = evt::fit_gev_mle(oracle::gev_sample(200, 0.0, 1.0, 0.1, 3));
    const std::string r = evt::format_fit_report(fit);
    CHECK(std::regex_match(r, std::regex("m=[^,]+, s=[^,]+, xi=[^,]+, loglik=[^,]+, converged=(true|false)")));
}

TEST_CASE("high-water-mark law shifts the surge location") {
    const auto hw = evt::HighWaterMarkDist::from_surge({500.0, 131.0, 0.27}, 1142.0);
    CHECK(hw.alpha == 1642.0);
    CHECK(hw.gev().scale == 131.0);
}
