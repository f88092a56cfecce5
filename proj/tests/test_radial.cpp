#include "doctest.h"

#include <random>

#include "signshape/radial.hpp"
#include "support/oracles.hpp"

using namespace signshape;

TEST_CASE("radial_primitive: closed forms") {
    RadialProfile one = RadialProfile::constant(1.0);
    CHECK(radial_primitive(one, 2, 0.7) == doctest::Approx(0.7 * 0.7 / 2.0).epsilon(1e-14));
    CHECK(radial_primitive(one, 3, 0.5) == doctest::Approx(0.5 * 0.5 * 0.5 / 3.0).epsilon(1e-14));

    RadialProfile ind = RadialProfile::indicator(0.2, -1.0, 1.0);
    CHECK(std::abs(radial_primitive(ind, 2, 0.2 * std::sqrt(2.0))) <= 1e-15);

    RadialProfile neg = RadialProfile::constant(-1.0);
    CHECK(radial_primitive(neg, 2, 0.4) < 0.0);
    CHECK(radial_primitive(neg, 2, 0.4) == doctest::Approx(-0.08).epsilon(1e-14));

    CHECK_THROWS_AS(radial_primitive(one, 2, -0.1), std::invalid_argument);
}

TEST_CASE("radial_primitive agrees with independent quadrature for tables") {
    // a nondecreasing sampled profile
    std::vector<std::array<double, 2>> samples;
    for (int i = 0; i <= 200; ++i) {
        double r = 2.0 * i / 200;
        samples.push_back({r, -1.0 + r * r});
    }
    RadialProfile tab = RadialProfile::table(samples);
    for (double s : {0.3, 0.9, 1.7}) {
        double mine = radial_primitive(tab, 2, s);
        double ref = oracles::integrate([&](double r) { return r * tab.eval(r); }, 0.0, s);
        CHECK(mine == doctest::Approx(ref).epsilon(1e-9));
    }
}

TEST_CASE("critical_radius: indicator and negative examples") {
    RadialProfile ind = RadialProfile::indicator(0.2, -1.0, 1.0);
    CriticalRadius r2 = critical_radius(ind, 2);
    CHECK(!r2.infinite);
    CHECK(r2.value == doctest::Approx(0.2 * std::sqrt(2.0)).epsilon(1e-10));

    CriticalRadius r3 = critical_radius(ind, 3);
    CHECK(r3.value == doctest::Approx(std::cbrt(2.0) * 0.2).epsilon(1e-10));

    CriticalRadius rneg = critical_radius(RadialProfile::constant(-1.0), 2);
    CHECK(rneg.infinite);

    CHECK_THROWS_AS(critical_radius(RadialProfile::constant(0.5), 2), std::invalid_argument);
}

TEST_CASE("radial_state: closed forms and errors") {
    RadialProfile a0 = RadialProfile::constant(0.0);
    CHECK(radial_state(a0, 1.0, 2, 0.0) == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(radial_state(a0, 0.7, 3, 0.2) == doctest::Approx((0.49 - 0.04) / 6.0).epsilon(1e-14));
    CHECK(radial_state(a0, 0.5, 2, 0.5) == 0.0);

    RadialProfile a1 = RadialProfile::constant(1.0);
    CHECK(radial_state(a1, 1.0, 2, 0.0) == doctest::Approx(0.125).epsilon(1e-14));

    CHECK_THROWS_AS(radial_state(RadialProfile::constant(-0.5), 1.0, 2, 0.0), std::invalid_argument);
}

TEST_CASE("radial_state satisfies its radial ODE under finite differences") {
    // -(1/r^{d-1}) d/dr ( r^{d-1} (1+a) u' ) = 1 for a smooth table profile
    std::vector<std::array<double, 2>> samples;
    for (int i = 0; i <= 400; ++i) {
        double r = 1.2 * i / 400;
        samples.push_back({r, 0.5 + 0.3 * std::sin(2.0 * r) * std::sin(2.0 * r)});
    }
    RadialProfile a = RadialProfile::table(samples);
    const int d = 2;
    const double R = 1.0, eps = 1e-4;
    for (double r : {0.2, 0.45, 0.8}) {
        auto flux = [&](double s) {
            double up = (radial_state(a, R, d, s + eps) - radial_state(a, R, d, s - eps)) / (2.0 * eps);
            return std::pow(s, d - 1) * (1.0 + a.eval(s)) * up;
        };
        double lhs = -(flux(r + eps) - flux(r - eps)) / (2.0 * eps) / std::pow(r, d - 1);
        CHECK(lhs == doctest::Approx(1.0).epsilon(1e-6));
    }
}

TEST_CASE("radial_cost: closed forms against independent quadrature") {
    RadialProfile a0 = RadialProfile::constant(0.0);
    RadialProfile one = RadialProfile::constant(1.0);
    // g = 1, a = 0, d = 2, R = 1: the raw functional is 1/16, the volume
    // integral pi/8
    CHECK(radial_cost_raw(a0, one, 1.0, 2) == doctest::Approx(1.0 / 16.0).epsilon(1e-12));
    CHECK(radial_cost(a0, one, 1.0, 2) == doctest::Approx(M_PI / 8.0).epsilon(1e-12));

    RadialProfile ind = RadialProfile::indicator(0.2, -1.0, 1.0);
    const double R = 0.2 * std::sqrt(2.0);
    double closed = radial_cost(a0, ind, R, 2);
    CHECK(closed == doctest::Approx(-0.0012566370614359177).epsilon(1e-12));

    // independent route: G by quadrature, then the cost integral by quadrature
    auto G = [&](double s) { return oracles::integrate([&](double r) { return r * ind.eval(r); }, 0.0, s); };
    double ref = 2.0 * M_PI * oracles::integrate([&](double s) { return G(s) * s; }, 0.0, R) / 2.0;
    CHECK(std::abs(closed - ref) <= 1e-9);

    // nonzero constant coefficient
    double closed_a = radial_cost(RadialProfile::constant(0.7), ind, R, 2);
    double ref_a = 2.0 * M_PI * oracles::integrate([&](double s) { return G(s) * s / 1.7; }, 0.0, R) / 2.0;
    CHECK(std::abs(closed_a - ref_a) <= 1e-9);

    CHECK(radial_cost(a0, ind, 0.0, 2) == 0.0);
}

TEST_CASE("radial_cost derivative vanishes at the critical radius") {
    RadialProfile a0 = RadialProfile::constant(0.0);
    RadialProfile ind = RadialProfile::indicator(0.2, -1.0, 1.0);
    const double R = critical_radius(ind, 2).value;
    const double eps = 1e-6;
    double fp = (radial_cost(a0, ind, R + eps, 2) - radial_cost(a0, ind, R - eps, 2)) / (2.0 * eps);
    CHECK(std::abs(fp) <= 1e-8);
    // the closed-form derivative (omega_d/d) R (R^d - 2 r0^d)
    auto fprime = [&](double r) { return M_PI / 2.0 * r * (r * r - 2.0 * 0.04); };
    CHECK(std::abs(fprime(R)) <= 1e-12);
    double probe = 0.35;
    double fd = (radial_cost(a0, ind, probe + eps, 2) - radial_cost(a0, ind, probe - eps, 2)) / (2.0 * eps);
    CHECK(fd == doctest::Approx(fprime(probe)).epsilon(1e-7));
}

TEST_CASE("optimal_ball: the three spec instances") {
    RadialProfile ind = RadialProfile::indicator(0.2, -1.0, 1.0);
    OptimalBall b = optimal_ball(ind, 2);
    CHECK(b.radius == doctest::Approx(0.2 * std::sqrt(2.0)).epsilon(1e-10));
    CHECK(b.volume == doctest::Approx(2.0 * M_PI * 0.04).epsilon(1e-10));
    CHECK(!b.saturated);

    OptimalBall bneg = optimal_ball(RadialProfile::constant(-1.0), 2);
    CHECK(bneg.radius == doctest::Approx(1.0 / std::sqrt(M_PI)).epsilon(1e-12));
    CHECK(bneg.volume == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(bneg.saturated);
    CHECK(bneg.r_g.infinite);

    OptimalBall bbig = optimal_ball(RadialProfile::indicator(0.5, -1.0, 1.0), 2);
    CHECK(bbig.radius == doctest::Approx(1.0 / std::sqrt(M_PI)).epsilon(1e-12));
    CHECK(bbig.volume == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(bbig.saturated);

    CHECK_THROWS_AS(optimal_ball(RadialProfile::constant(0.1), 2), std::invalid_argument);
}

TEST_CASE("cost is monotone increasing in the coefficient a") {
    RadialProfile ind = RadialProfile::indicator(0.2, -1.0, 1.0);
    const double Rg = critical_radius(ind, 2).value;
    std::mt19937_64 rng(53);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    RadialProfile a0 = RadialProfile::constant(0.0);
    for (int rep = 0; rep < 100; ++rep) {
        std::vector<std::array<double, 2>> samples;
        const int m = 16;
        for (int i = 0; i <= m; ++i) samples.push_back({Rg * 1.5 * i / m, 3.0 * U(rng)});
        RadialProfile a = RadialProfile::table(samples);
        double R = rep % 2 == 0 ? Rg * (0.3 + 0.7 * U(rng)) : Rg * (1.0 + 0.4 * U(rng));
        double Fa = radial_cost(a, ind, R, 2);
        if (R <= Rg)
            CHECK(Fa >= radial_cost(a0, ind, R, 2) - 1e-9);
        else
            CHECK(Fa >= radial_cost(a0, ind, Rg, 2) - 1e-9);
    }
}

TEST_CASE("golden-section search over R confirms the optimal ball radius") {
    RadialProfile ind = RadialProfile::indicator(0.2, -1.0, 1.0);
    RadialProfile a0 = RadialProfile::constant(0.0);
    const double unit_radius = 1.0 / std::sqrt(M_PI);
    double lo = 1e-6, hi = unit_radius;
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = hi - phi * (hi - lo), d = lo + phi * (hi - lo);
    while (hi - lo > 1e-10) {
        if (radial_cost(a0, ind, c, 2) < radial_cost(a0, ind, d, 2)) {
            hi = d;
        } else {
            lo = c;
        }
        c = hi - phi * (hi - lo);
        d = lo + phi * (hi - lo);
    }
    CHECK(std::abs(0.5 * (lo + hi) - optimal_ball(ind, 2).radius) <= 1e-6);
}
