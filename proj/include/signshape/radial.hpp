#pragma once

#include <array>
#include <vector>

namespace signshape {

/// One-dimensional profile of r >= 0: closed-form constant / indicator kinds
/// or a sampled table with strictly increasing nodes (linear interpolation,
/// clamped past the last node).
struct RadialProfile {
    enum class Kind { Constant, Indicator, Table };
    Kind kind = Kind::Constant;

    double constant_value = 0.0;

    double r0 = 0.0;     // indicator: value = inner for r <= r0, outer beyond
    double inner = 0.0;
    double outer = 0.0;

    std::vector<std::array<double, 2>> samples;  // table nodes (r, value)

    double r_max = 0.0;  // 0 -> unbounded (closed-form kinds)

    static RadialProfile constant(double c);
    static RadialProfile indicator(double r0, double inner, double outer);
    static RadialProfile table(std::vector<std::array<double, 2>> samples);

    double eval(double r) const;
    bool nondecreasing() const;
    /// Largest radius the profile can be evaluated at (infinity for
    /// closed-form kinds).
    double domain_end() const;
};

/// Volume of the unit ball in R^d.
double unit_ball_volume(int d);

/// G(s) = int_0^s r^{d-1} g(r) dr. Closed form for constant/indicator
/// profiles, adaptive Simpson quadrature (rel. tol 1e-10) for tables.
double radial_primitive(const RadialProfile& g, int d, double s);

struct CriticalRadius {
    double value = 0.0;
    bool infinite = false;  // G <= 0 over the whole bracket; value = bracket end
};

/// R_g = sup{ R > 0 : G(R) <= 0 } located by bisection. Requires g(0) < 0.
CriticalRadius critical_radius(const RadialProfile& g, int d, double r_max = 0.0);

/// u_{a,R}(r) = (1/d) int_r^R s / (1 + a(s)) ds, the radial state with
/// coefficient a >= 0 on the ball of radius R.
double radial_state(const RadialProfile& a, double R, int d, double r);

/// The cost integral of g against u_{a,R} over the ball B_R, i.e.
/// d omega_d F(a, R) with F(a, R) = (1/d) int_0^R G(s) s / (1+a(s)) ds.
double radial_cost(const RadialProfile& a, const RadialProfile& g, double R, int d);

/// F(a, R) itself, without the surface factor d omega_d.
double radial_cost_raw(const RadialProfile& a, const RadialProfile& g, double R, int d);

struct OptimalBall {
    double radius = 0.0;
    double volume = 0.0;
    double cost = 0.0;       // radial_cost(0, g, radius, d)
    CriticalRadius r_g;
    bool saturated = false;  // radius clipped at the unit-volume ball
};

/// The optimal ball of the radial problem: radius min(omega_d^{-1/d}, R_g).
OptimalBall optimal_ball(const RadialProfile& g, int d);

}
