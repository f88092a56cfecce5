#pragma once

// Independent oracles for the test suites: closed-form series, quadrature and
// exhaustive search. Nothing here goes through the library's own closed-form
// or solver code paths.

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "signshape/grid.hpp"
#include "signshape/poisson.hpp"

namespace oracles {

// Torsion function of the unit square: -Lap u = 1 on (0,1)^2, u = 0 on the
// boundary. Single cosh series off the 1-d parabola; terms decay like k^-3
// uniformly and exponentially in the interior.
inline double square_torsion(double x, double y) {
    double s = x * (1.0 - x) / 2.0;
    for (int k = 1; k <= 1201; k += 2) {
        double kp = k * M_PI;
        double num = std::exp(kp * (std::abs(y - 0.5) - 0.5)) * (1.0 + std::exp(-2.0 * kp * std::abs(y - 0.5)));
        double den = 1.0 + std::exp(-kp);
        s -= 4.0 / (kp * kp * kp) * (num / den) * std::sin(kp * x);
    }
    return s;
}

// L2 norm of the same function from the double sine series,
// c_mn = 16 / (pi^4 m n (m^2 + n^2)) for odd m, n.
inline double square_torsion_l2norm() {
    double total = 0.0;
    for (int m = 1; m <= 999; m += 2)
        for (int n = 1; n <= 999; n += 2) {
            double c = 16.0 / (std::pow(M_PI, 4) * m * n * (static_cast<double>(m) * m + static_cast<double>(n) * n));
            total += c * c;
        }
    return 0.5 * std::sqrt(total);
}

// -u'' + c u = 1 on (0, L), u(0) = u(L) = 0.
inline double relaxed_1d(double c, double L, double x) {
    double rc = std::sqrt(c);
    return (1.0 - std::cosh(rc * (x - L / 2.0)) / std::cosh(rc * L / 2.0)) / c;
}

// Adaptive Simpson quadrature, independent of the library's implementation.
inline double simpson_rec(const std::function<double(double)>& f, double a, double b, double fa, double fm,
                          double fb, double whole, double eps, int depth) {
    double m = 0.5 * (a + b);
    double flm = f(0.5 * (a + m)), frm = f(0.5 * (m + b));
    double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * eps) return left + right + delta / 15.0;
    return simpson_rec(f, a, m, fa, flm, fm, left, eps / 2.0, depth - 1) +
           simpson_rec(f, m, b, fm, frm, fb, right, eps / 2.0, depth - 1);
}

inline double integrate(const std::function<double(double)>& f, double a, double b, double abs_tol = 1e-13) {
    if (a == b) return 0.0;
    double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson_rec(f, a, b, fa, fm, fb, whole, abs_tol, 50);
}

// Exhaustive minimum of the shape cost over all subsets of a candidate cell
// pool whose volume fits the bound.
struct BruteForceResult {
    double best_cost = 0.0;
    std::vector<int> best_cells;
};

inline BruteForceResult brute_force_pool(const signshape::GridSpec& grid, const std::vector<int>& pool,
                                         const signshape::ScalarField& f, const signshape::ScalarField& g,
                                         double vol_bound, double tol) {
    BruteForceResult out;
    out.best_cost = 0.0;  // empty mask
    const int p = static_cast<int>(pool.size());
    const int max_cells = static_cast<int>(std::floor(vol_bound / grid.cell_volume() + 1e-9));
    for (unsigned sub = 1; sub < (1u << p); ++sub) {
        if (__builtin_popcount(sub) > max_cells) continue;
        signshape::DomainMask m = signshape::DomainMask::empty(grid);
        std::vector<int> cells;
        for (int b = 0; b < p; ++b)
            if (sub & (1u << b)) {
                m.inside[pool[b]] = 1;
                cells.push_back(pool[b]);
            }
        double c = signshape::cost(m, f, g, {.tol = tol});
        if (c < out.best_cost) {
            out.best_cost = c;
            out.best_cells = cells;
        }
    }
    return out;
}

inline signshape::ScalarField random_field(const signshape::GridSpec& grid, std::mt19937_64& rng,
                                           double lo = -1.0, double hi = 1.0) {
    std::uniform_real_distribution<double> U(lo, hi);
    signshape::ScalarField f = signshape::ScalarField::zeros(grid);
    for (double& v : f.values) v = U(rng);
    return f;
}

inline signshape::DomainMask random_mask(const signshape::GridSpec& grid, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> U(0.0, 1.0);
    signshape::DomainMask m = signshape::DomainMask::empty(grid);
    for (int rep = 0; rep < 2; ++rep) {
        std::array<double, 2> c{grid.side * (0.2 + 0.6 * U(rng)), grid.side * (0.2 + 0.6 * U(rng))};
        double r = grid.side * (0.08 + 0.22 * U(rng));
        auto b = signshape::ball_mask(grid, c, r);
        for (int k = 0; k < grid.cell_count(); ++k) m.inside[k] |= b.inside[k];
    }
    double x0 = grid.side * 0.6 * U(rng), x1 = x0 + grid.side * (0.1 + 0.3 * U(rng));
    double y0 = grid.side * 0.6 * U(rng), y1 = y0 + grid.side * (0.1 + 0.3 * U(rng));
    for (int k = 0; k < grid.cell_count(); ++k) {
        auto p = grid.center(k);
        if (p[0] >= x0 && p[0] <= x1 && (grid.d == 1 || (p[1] >= y0 && p[1] <= y1))) m.inside[k] = 1;
    }
    if (m.count() == 0) m.inside[grid.cell_count() / 2] = 1;
    return m;
}

}  // namespace oracles
