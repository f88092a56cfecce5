#include "signshape/radial.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>

namespace signshape {

RadialProfile RadialProfile::constant(double c) {
    RadialProfile p;
    p.kind = Kind::Constant;
    p.constant_value = c;
    return p;
}

RadialProfile RadialProfile::indicator(double r0, double inner, double outer) {
    if (!(r0 > 0.0)) throw std::invalid_argument("radial indicator: r0 must be positive");
    RadialProfile p;
    p.kind = Kind::Indicator;
    p.r0 = r0;
    p.inner = inner;
    p.outer = outer;
    return p;
}

RadialProfile RadialProfile::table(std::vector<std::array<double, 2>> samples) {
    if (samples.empty()) throw std::invalid_argument("radial table: no samples");
    for (std::size_t i = 1; i < samples.size(); ++i)
        if (!(samples[i][0] > samples[i - 1][0]))
            throw std::invalid_argument("radial table: r nodes must be strictly increasing");
    RadialProfile p;
    p.kind = Kind::Table;
    p.r_max = samples.back()[0];
    p.samples = std::move(samples);
    return p;
}

double RadialProfile::eval(double r) const {
    switch (kind) {
        case Kind::Constant: return constant_value;
        case Kind::Indicator: return r <= r0 ? inner : outer;
        case Kind::Table: {
            if (r <= samples.front()[0]) return samples.front()[1];
            if (r >= samples.back()[0]) return samples.back()[1];
            std::size_t lo = 0, hi = samples.size() - 1;
            while (hi - lo > 1) {
                std::size_t mid = (lo + hi) / 2;
                (samples[mid][0] <= r ? lo : hi) = mid;
            }
            double w = (r - samples[lo][0]) / (samples[hi][0] - samples[lo][0]);
            return samples[lo][1] + w * (samples[hi][1] - samples[lo][1]);
        }
    }
    return 0.0;
}

bool RadialProfile::nondecreasing() const {
    switch (kind) {
        case Kind::Constant: return true;
        case Kind::Indicator: return inner <= outer;
        case Kind::Table:
            for (std::size_t i = 1; i < samples.size(); ++i)
                if (samples[i][1] < samples[i - 1][1]) return false;
            return true;
    }
    return true;
}

double RadialProfile::domain_end() const {
    if (kind == Kind::Table) return r_max;
    return std::numeric_limits<double>::infinity();
}

double unit_ball_volume(int d) {
    if (d < 1) throw std::invalid_argument("unit_ball_volume: d must be positive");
    return std::pow(M_PI, d / 2.0) / std::tgamma(d / 2.0 + 1.0);
}

namespace {

// Adaptive Simpson with absolute tolerance driven by a relative target.
double simpson_step(const std::function<double(double)>& f, double a, double b, double fa, double fm,
                    double fb, double whole, double eps, int depth) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * eps) return left + right + delta / 15.0;
    return simpson_step(f, a, m, fa, flm, fm, left, eps * 0.5, depth - 1) +
           simpson_step(f, m, b, fm, frm, fb, right, eps * 0.5, depth - 1);
}

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double rel_tol) {
    if (a == b) return 0.0;
    double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    double scale = std::max({std::abs(whole), std::abs(b - a) * std::abs(fm), 1e-30});
    return simpson_step(f, a, b, fa, fm, fb, whole, rel_tol * scale, 48);
}

constexpr double kQuadTol = 1e-10;

double pow_int(double x, int d) {
    double r = 1.0;
    for (int i = 0; i < d; ++i) r *= x;
    return r;
}

void check_nonnegative(const RadialProfile& a) {
    switch (a.kind) {
        case RadialProfile::Kind::Constant:
            if (a.constant_value < 0.0) throw std::invalid_argument("radial coefficient a must be nonnegative");
            break;
        case RadialProfile::Kind::Indicator:
            if (a.inner < 0.0 || a.outer < 0.0)
                throw std::invalid_argument("radial coefficient a must be nonnegative");
            break;
        case RadialProfile::Kind::Table:
            for (const auto& s : a.samples)
                if (s[1] < 0.0) throw std::invalid_argument("radial coefficient a must be nonnegative");
            break;
    }
}

}  // namespace

double radial_primitive(const RadialProfile& g, int d, double s) {
    if (d < 1) throw std::invalid_argument("radial_primitive: d must be positive");
    if (s < 0.0) throw std::invalid_argument("radial_primitive: s must be nonnegative");
    double end = g.domain_end();
    if (s > end * (1.0 + 1e-12)) throw std::invalid_argument("radial_primitive: s outside the profile domain");

    switch (g.kind) {
        case RadialProfile::Kind::Constant:
            return g.constant_value * pow_int(s, d) / d;
        case RadialProfile::Kind::Indicator: {
            if (s <= g.r0) return g.inner * pow_int(s, d) / d;
            return (g.inner * pow_int(g.r0, d) + g.outer * (pow_int(s, d) - pow_int(g.r0, d))) / d;
        }
        case RadialProfile::Kind::Table:
            return adaptive_simpson([&](double r) { return std::pow(r, d - 1) * g.eval(r); }, 0.0, s, kQuadTol);
    }
    return 0.0;
}

CriticalRadius critical_radius(const RadialProfile& g, int d, double r_max) {
    if (!(g.eval(0.0) < 0.0))
        throw std::invalid_argument("critical_radius: g(0) must be negative");
    double end = r_max > 0.0 ? r_max : 10.0 * std::pow(unit_ball_volume(d), -1.0 / d);
    if (g.kind == RadialProfile::Kind::Table) end = std::min(end, g.domain_end());

    // G decreases while g < 0 and eventually increases for nondecreasing g,
    // so {G <= 0} is an interval [0, R_g]; locate the last sign change.
    const int scan = 4096;
    double prev_s = 0.0;
    double lo = -1.0, hi = -1.0;
    for (int i = 1; i <= scan; ++i) {
        double s = end * i / scan;
        if (radial_primitive(g, d, s) > 0.0) {
            lo = prev_s;
            hi = s;
            break;
        }
        prev_s = s;
    }
    if (hi < 0.0) return {end, true};

    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        if (radial_primitive(g, d, mid) > 0.0)
            hi = mid;
        else
            lo = mid;
        if (hi - lo <= 1e-14 * end) break;
    }
    return {0.5 * (lo + hi), false};
}

double radial_state(const RadialProfile& a, double R, int d, double r) {
    if (d < 1) throw std::invalid_argument("radial_state: d must be positive");
    if (!(R >= 0.0) || r < 0.0 || r > R * (1.0 + 1e-12))
        throw std::invalid_argument("radial_state: need 0 <= r <= R");
    check_nonnegative(a);
    switch (a.kind) {
        case RadialProfile::Kind::Constant:
            return (R * R - r * r) / (2.0 * d * (1.0 + a.constant_value));
        case RadialProfile::Kind::Indicator: {
            // piecewise constant coefficient: integrate s/(1+a) on each piece
            auto piece = [&](double from, double to, double coeff) {
                return (to * to - from * from) / (2.0 * (1.0 + coeff));
            };
            double s = 0.0;
            double cut = std::min(std::max(a.r0, r), R);
            s += piece(r, cut, a.inner);
            s += piece(cut, R, a.outer);
            return s / d;
        }
        case RadialProfile::Kind::Table:
            return adaptive_simpson([&](double s) { return s / (1.0 + a.eval(s)); }, r, R, kQuadTol) / d;
    }
    return 0.0;
}

namespace {

double cost_raw_impl(const RadialProfile& a, const RadialProfile& g, double R, int d) {
    check_nonnegative(a);
    if (!(R >= 0.0)) throw std::invalid_argument("radial_cost: R must be nonnegative");
    if (R > g.domain_end() * (1.0 + 1e-12) || R > a.domain_end() * (1.0 + 1e-12))
        throw std::invalid_argument("radial_cost: R outside the profile domain");
    if (R == 0.0) return 0.0;

    const bool closed_g =
        g.kind == RadialProfile::Kind::Constant || g.kind == RadialProfile::Kind::Indicator;
    if (closed_g && a.kind == RadialProfile::Kind::Constant) {
        // F = (1/(d(1+a0))) int_0^R G(s) s ds with G piecewise c s^d / d
        const double k = 1.0 / (1.0 + a.constant_value);
        double inner_c = g.kind == RadialProfile::Kind::Constant ? g.constant_value : g.inner;
        double outer_c = g.kind == RadialProfile::Kind::Constant ? g.constant_value : g.outer;
        double r0 = g.kind == RadialProfile::Kind::Constant ? R : std::min(g.r0, R);
        // s in [0, r0]: G = inner c s^d / d
        double part = inner_c * pow_int(r0, d + 2) / (d + 2);
        if (R > r0) {
            // G(s) = ((inner-outer) r0^d + outer s^d)/d
            double A = (inner_c - outer_c) * pow_int(r0, d);
            part += A * (R * R - r0 * r0) / 2.0 + outer_c * (pow_int(R, d + 2) - pow_int(r0, d + 2)) / (d + 2);
        }
        return k * part / (d * d);
    }
    return adaptive_simpson(
               [&](double s) { return radial_primitive(g, d, s) * s / (1.0 + a.eval(s)); }, 0.0, R,
               kQuadTol) /
           d;
}

}  // namespace

double radial_cost_raw(const RadialProfile& a, const RadialProfile& g, double R, int d) {
    return cost_raw_impl(a, g, R, d);
}

double radial_cost(const RadialProfile& a, const RadialProfile& g, double R, int d) {
    return d * unit_ball_volume(d) * cost_raw_impl(a, g, R, d);
}

OptimalBall optimal_ball(const RadialProfile& g, int d) {
    OptimalBall out;
    out.r_g = critical_radius(g, d);
    const double unit_radius = std::pow(unit_ball_volume(d), -1.0 / d);
    out.saturated = out.r_g.infinite || out.r_g.value >= unit_radius;
    out.radius = out.saturated ? unit_radius : out.r_g.value;
    out.volume = unit_ball_volume(d) * pow_int(out.radius, d);
    out.cost = radial_cost(RadialProfile::constant(0.0), g, out.radius, d);
    return out;
}

}  // namespace signshape
