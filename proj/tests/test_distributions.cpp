#include "doctest.h"

#include <cmath>
#include <random>
#include <vector>

#include "faultcast/dist/families.hpp"
#include "faultcast/dist/zero_adjusted.hpp"
#include "faultcast/math/quadrature.hpp"

using namespace faultcast;
using dist::ParameterVector;

namespace {

// Independent oracle: integrate the density over (0, inf) by adaptive
// quadrature with the substitution y = t / (1 - t).
double total_mass(const dist::Family& fam, const ParameterVector& theta) {
    return math::integrate_adaptive(
        [&](double t) {
            if (t <= 0.0 || t >= 1.0) return 0.0;
            const double y = t / (1.0 - t);
            const double jac = 1.0 / ((1.0 - t) * (1.0 - t));
            const double ld = fam.log_density(y, theta);
            return std::exp(ld) * jac;
        },
        1e-12, 1.0 - 1e-12, 1e-9);
}

// Central finite difference of the log-likelihood in eta_k.
double fd_grad_eta(const dist::Family& fam, double y, const ParameterVector& theta, int k,
                   double h = 1e-5) {
    ParameterVector tp = theta, tm = theta;
    const auto& link = fam.link(k);
    const double eta = link.forward(theta[k]);
    tp[k] = link.inverse(eta + h);
    tm[k] = link.inverse(eta - h);
    return (fam.log_density(y, tp) - fam.log_density(y, tm)) / (2.0 * h);
}

void check_gradients(const dist::Family& fam,
                     const std::vector<ParameterVector>& thetas,
                     unsigned seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.02, 0.98);
    int checked = 0;
    for (const auto& theta : thetas) {
        for (int rep = 0; rep < 12; ++rep) {
            const double y = fam.quantile(unif(rng), theta);
            for (int k = 0; k < fam.param_count(); ++k) {
                const double g = fam.grad_eta(y, theta, k);
                const double fd = fd_grad_eta(fam, y, theta, k);
                const double denom = std::max(std::fabs(fd), 1.0);
                CHECK(std::fabs(g - fd) / denom < 1e-4);
                ++checked;
            }
        }
    }
    CHECK(checked >= 100);
}

std::vector<ParameterVector> gamma_grid() {
    std::vector<ParameterVector> out;
    for (double mu : {0.5, 2.0, 10.0})
        for (double sigma : {0.3, 0.8, 1.5}) out.push_back({mu, sigma});
    return out;
}

std::vector<ParameterVector> gengamma_grid() {
    std::vector<ParameterVector> out;
    for (double mu : {0.8, 3.0})
        for (double sigma : {0.4, 1.0})
            for (double nu : {-1.5, 0.7, 2.0}) out.push_back({mu, sigma, nu});
    return out;
}

std::vector<ParameterVector> bcto_grid() {
    std::vector<ParameterVector> out;
    for (double mu : {1.0, 5.0})
        for (double sigma : {0.15, 0.4})
            for (double nu : {-0.8, 0.5, 1.5})
                for (double tau : {4.0, 12.0}) out.push_back({mu, sigma, nu, tau});
    return out;
}

}  // namespace

TEST_CASE("registry resolves known names and rejects unknown ones") {
    for (const auto& name : dist::known_families()) {
        CHECK(dist::make_family(name)->name() == name);
    }
    CHECK_THROWS_WITH_AS(dist::make_family("weibull"),
                         doctest::Contains("known families"), std::invalid_argument);
}

TEST_CASE("gamma reduces to exponential at sigma = 1") {
    auto ga = dist::make_family("gamma");
    CHECK(ga->log_density(1.0, {1.0, 1.0}) == doctest::Approx(-1.0).epsilon(1e-12));
    // Exponential(mean 5) survival at t = 5 is e^-1.
    CHECK(1.0 - ga->cdf(5.0, {5.0, 1.0}) == doctest::Approx(std::exp(-1.0)).epsilon(1e-10));
}

TEST_CASE("gengamma matches direct closed-form evaluation") {
    // Independent evaluation of the density at (y=2, mu=2, sigma=0.5, nu=1):
    // c = 1/(sigma^2 nu^2) = 4, z = (y/mu)^nu = 1,
    // log f = log|nu| + c log c - c - lgamma(c) - log y.
    auto gg = dist::make_family("gengamma");
    const double c = 4.0;
    const double expected = 0.0 + c * std::log(c) + c * 1.0 * std::log(1.0) - c -
                            std::lgamma(c) - std::log(2.0);
    CHECK(gg->log_density(2.0, {2.0, 0.5, 1.0}) == doctest::Approx(expected).epsilon(1e-12));
    // And with nu = 1, sigma = 1 it must agree with the gamma family.
    auto ga = dist::make_family("gamma");
    for (double y : {0.3, 1.0, 4.5}) {
        CHECK(gg->log_density(y, {2.0, 1.0, 1.0}) ==
              doctest::Approx(ga->log_density(y, {2.0, 1.0})).epsilon(1e-10));
    }
}

TEST_CASE("densities integrate to one (quadrature oracle)") {
    auto ga = dist::make_family("gamma");
    for (const auto& theta : gamma_grid())
        CHECK(total_mass(*ga, theta) == doctest::Approx(1.0).epsilon(1e-4));

    auto gg = dist::make_family("gengamma");
    for (const auto& theta : gengamma_grid())
        CHECK(total_mass(*gg, theta) == doctest::Approx(1.0).epsilon(1e-4));

    auto bcto = dist::make_family("bcto");
    CHECK(total_mass(*bcto, {1.0, 0.2, 1.0, 10.0}) == doctest::Approx(1.0).epsilon(1e-4));
    for (const auto& theta : bcto_grid())
        CHECK(total_mass(*bcto, theta) == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("cdf is nondecreasing and consistent with quantile") {
    for (const char* name : {"gamma", "gengamma", "bcto"}) {
        auto fam = dist::make_family(name);
        const auto grids = std::string(name) == "gamma"  ? gamma_grid()
                         : std::string(name) == "gengamma" ? gengamma_grid()
                                                           : bcto_grid();
        for (const auto& theta : grids) {
            double prev = 0.0;
            for (double p = 0.01; p < 0.995; p += 0.02) {
                const double q = fam->quantile(p, theta);
                CHECK(q >= prev);
                prev = q;
                CHECK(std::fabs(fam->cdf(q, theta) - p) < 1e-6);
            }
        }
    }
}

TEST_CASE("analytic gradients match finite differences") {
    check_gradients(*dist::make_family("gamma"), gamma_grid(), 11);
    check_gradients(*dist::make_family("gengamma"), gengamma_grid(), 12);
    check_gradients(*dist::make_family("bcto"), bcto_grid(), 13);
}

TEST_CASE("bernoulli score identity") {
    auto bern = dist::make_family("bernoulli");
    CHECK(bern->grad_eta(1.0, {0.5}, 0) == doctest::Approx(0.5));
    // At the intercept MLE the scores sum to zero.
    std::vector<double> ys = {1, 1, 1, 1, 1, 1, 1, 0, 0, 0};
    const auto theta = bern->offset_init(ys);
    CHECK(theta[0] == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(bern->link(0).forward(theta[0]) == doctest::Approx(std::log(0.7 / 0.3)).epsilon(1e-10));
    double score = 0.0;
    for (double y : ys) score += bern->grad_eta(y, theta, 0);
    CHECK(score == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("gamma score in mu vanishes at the conditional MLE") {
    auto ga = dist::make_family("gamma");
    // For a single observation the mu-MLE given sigma is mu = y.
    CHECK(ga->grad_eta(3.7, {3.7, 0.8}, 0) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("offset initialisation") {
    auto ga = dist::make_family("gamma");
    std::vector<double> ones = {1.0, 1.0, 1.0, 1.0};
    const auto theta = ga->offset_init(ones);
    CHECK(theta[0] == doctest::Approx(1.0).epsilon(1e-4));

    // Degenerate Bernoulli sample clamps.
    auto bern = dist::make_family("bernoulli");
    std::vector<double> allones = {1.0, 1.0, 1.0};
    CHECK(bern->offset_init(allones)[0] == doctest::Approx(1.0 - 1e-6));
}

TEST_CASE("bcto offset beats the fixed reference start (grid oracle)") {
    auto bcto = dist::make_family("bcto");
    // Lognormal-like synthetic sample.
    std::mt19937_64 rng(42);
    std::normal_distribution<double> norm(0.3, 0.5);
    std::vector<double> ys(400);
    for (auto& y : ys) y = std::exp(norm(rng));

    auto loglik = [&](const ParameterVector& th) {
        double ll = 0.0;
        for (double y : ys) ll += bcto->log_density(y, th);
        return ll;
    };
    std::vector<double> sorted = ys;
    std::sort(sorted.begin(), sorted.end());
    const double median = 0.5 * (sorted[199] + sorted[200]);
    const double reference = loglik({median, 1.0, 1.0, 10.0});

    const auto offset = bcto->offset_init(ys);
    CHECK(loglik(offset) >= reference);

    // Coarse lattice oracle: the offset should also be competitive with the
    // best lattice point.
    double best_grid = -1e300;
    for (double mu : {0.5 * median, median, 2.0 * median})
        for (double sigma : {0.25, 0.5, 1.0})
            for (double nu : {-1.0, 0.0, 1.0})
                for (double tau : {4.0, 10.0, 30.0})
                    best_grid = std::max(best_grid, loglik({mu, sigma, nu, tau}));
    CHECK(loglik(offset) >= best_grid - 1e-6);
}

TEST_CASE("zero-adjusted density, cdf, quantile (Eq-style piecewise rules)") {
    auto ga = dist::make_family("gamma");
    dist::ZeroAdjusted d{0.62, ga, {2.0, 1.0}};

    CHECK(dist::zadj_density(d, 0.0) == doctest::Approx(0.62));
    CHECK(dist::zadj_cdf(d, 0.0) == doctest::Approx(0.62));
    CHECK(dist::zadj_density(d, 1.0) ==
          doctest::Approx(0.38 * std::exp(ga->log_density(1.0, d.theta))).epsilon(1e-12));

    dist::ZeroAdjusted half{0.5, ga, {2.0, 1.0}};
    CHECK(dist::zadj_quantile(half, 0.25) == 0.0);

    // xi0=0.4, GA(mu=2, sigma=1), p=0.7 -> exponential quantile at 0.5.
    dist::ZeroAdjusted d2{0.4, ga, {2.0, 1.0}};
    CHECK(dist::zadj_quantile(d2, 0.7) == doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-9));

    // Degenerate all-mass-at-zero case.
    dist::ZeroAdjusted unit{1.0, ga, {2.0, 1.0}};
    CHECK(dist::zadj_quantile(unit, 0.99) == 0.0);
    CHECK(dist::zadj_density(unit, 3.0) == 0.0);

    // Total mass via quadrature.
    const double tail = math::integrate_adaptive(
        [&](double t) {
            const double y = t / (1.0 - t);
            return dist::zadj_density(d, y) / ((1.0 - t) * (1.0 - t));
        },
        1e-12, 1.0 - 1e-12, 1e-9);
    CHECK(d.xi0 + tail == doctest::Approx(1.0).epsilon(1e-4));

    // Quantile round-trip through the wrapper.
    for (double p = 0.63; p < 0.995; p += 0.02) {
        CHECK(std::fabs(dist::zadj_cdf(d, dist::zadj_quantile(d, p)) - p) < 1e-6);
    }
}

TEST_CASE("exceedance probability") {
    auto ga = dist::make_family("gamma");
    // xi0=0.62, F_W(14)=0.9 -> 0.038; construct the 0.9 point exactly.
    dist::ZeroAdjusted d{0.62, ga, {5.0, 1.0}};
    const double t90 = ga->quantile(0.9, d.theta);
    CHECK(dist::exceedance_probability(d, t90) == doctest::Approx(0.038).epsilon(1e-9));

    dist::ZeroAdjusted unit{1.0, ga, {5.0, 1.0}};
    CHECK(dist::exceedance_probability(unit, 14.0) == 0.0);

    dist::ZeroAdjusted none{0.0, ga, {5.0, 1.0}};
    CHECK(dist::exceedance_probability(none, 5.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-9));

    CHECK_THROWS_AS(dist::exceedance_probability(d, 0.0), std::domain_error);
    CHECK_THROWS_AS(dist::exceedance_probability(d, -1.0), std::domain_error);
}

TEST_CASE("domain errors") {
    auto ga = dist::make_family("gamma");
    CHECK_THROWS_AS(ga->log_density(-1.0, {1.0, 1.0}), std::domain_error);
    CHECK_THROWS_AS(ga->log_density(1.0, {-1.0, 1.0}), std::domain_error);
    auto bcto = dist::make_family("bcto");
    CHECK_THROWS_AS(bcto->log_density(0.0, {1.0, 0.2, 1.0, 10.0}), std::domain_error);
    CHECK_THROWS_AS(bcto->log_density(1.0, {1.0, 0.2, 1.0, -3.0}), std::domain_error);
}
