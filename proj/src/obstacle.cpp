#include "signshape/obstacle.hpp"

#include <algorithm>
#include <cmath>

#include "signshape/log.hpp"

namespace signshape {

namespace {

double max_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

}  // namespace

std::pair<ScalarField, SolveReport> solve_obstacle(const ScalarField& g, const ObstacleOptions& opts) {
    if (!(opts.tol > 0.0)) throw std::invalid_argument("solve_obstacle: tol must be positive");
    if (!(opts.omega > 0.0 && opts.omega < 2.0)) throw std::invalid_argument("solve_obstacle: omega must be in (0,2)");

    const GridSpec& grid = g.grid;
    const int N = grid.cell_count();
    const int n = grid.n;
    const double inv_h2 = 1.0 / (grid.h * grid.h);

    ScalarField v = ScalarField::zeros(grid);
    SolveReport report;

    const double gmax = max_abs(g.values);
    if (gmax == 0.0) {
        report.converged = true;
        return {v, report};
    }
    const double stop = opts.tol * std::max(1.0, gmax);

    if (opts.initial_guess) {
        if (!(opts.initial_guess->grid == grid))
            throw std::invalid_argument("solve_obstacle: initial guess grid mismatch");
        for (int k = 0; k < N; ++k) v.values[k] = std::max(0.0, opts.initial_guess->values[k]);
    }

    // Every cell of the box is active; the box boundary enters through the
    // ghost-reflected diagonal, exactly as in the relaxed solver.
    std::vector<double> diag(N, 0.0);
    for (int k = 0; k < N; ++k) {
        int ghosts = 0;
        if (grid.d == 1) {
            ghosts = (k == 0) + (k == n - 1);
            diag[k] = (2 + ghosts) * inv_h2;
        } else {
            int i = k / n, j = k % n;
            ghosts = (i == 0) + (i == n - 1) + (j == 0) + (j == n - 1);
            diag[k] = (4 + ghosts) * inv_h2;
        }
    }

    auto off_sum = [&](const std::vector<double>& x, int k) {
        double s = 0.0;
        if (grid.d == 1) {
            if (k > 0) s += x[k - 1];
            if (k + 1 < N) s += x[k + 1];
        } else {
            int j = k % n;
            if (k - n >= 0) s += x[k - n];
            if (k + n < N) s += x[k + n];
            if (j > 0) s += x[k - 1];
            if (j + 1 < n) s += x[k + 1];
        }
        return s * inv_h2;
    };

    const int max_sweeps = opts.max_sweeps > 0 ? opts.max_sweeps : 100 * n;
    std::vector<double>& x = v.values;
    double resid = 0.0;
    int sweep = 0;
    for (; sweep < max_sweeps; ++sweep) {
        for (int k = 0; k < N; ++k) {
            double gs = (-g.values[k] + off_sum(x, k)) / diag[k];
            double cand = (1.0 - opts.omega) * x[k] + opts.omega * gs;
            x[k] = cand > 0.0 ? cand : 0.0;
        }
        // projected residual min(v, A v + g), max-norm
        resid = 0.0;
        for (int k = 0; k < N; ++k) {
            double Avg = diag[k] * x[k] - off_sum(x, k) + g.values[k];
            double pr = std::min(x[k], Avg);
            resid = std::max(resid, std::abs(pr));
        }
        if (resid <= stop) break;
    }

    report.iterations = std::min(sweep + 1, max_sweeps);
    report.residual = resid / std::max(1.0, gmax);
    report.converged = resid <= stop;
    if (!report.converged)
        log_info("solve_obstacle: no convergence after %d sweeps (residual %.3e)", report.iterations, resid);
    return {v, report};
}

DomainMask active_set(const ScalarField& v, double floor) {
    if (!(floor > 0.0)) throw std::invalid_argument("active_set: floor must be positive");
    return sublevel_mask(v, floor, Relation::Greater);
}

double default_active_floor(const ScalarField& g, double tol) {
    return 10.0 * tol * field_l2_norm(g);
}

DomainMask unconstrained_optimal_domain(const ScalarField& f, const ScalarField& g, double tol, double floor) {
    if (!(f.grid == g.grid)) throw std::invalid_argument("unconstrained_optimal_domain: grid mismatch");
    for (double x : f.values)
        if (x < 0.0)
            throw std::invalid_argument("unconstrained_optimal_domain: f must be nonnegative");
    auto [v, report] = solve_obstacle(g, {.tol = tol});
    if (!report.converged) throw SolveFailure("unconstrained_optimal_domain: obstacle solve did not converge");
    return active_set(v, floor);
}

ComplementarityResidual complementarity_residual(const ScalarField& v, const ScalarField& g) {
    if (!(v.grid == g.grid)) throw std::invalid_argument("complementarity_residual: grid mismatch");
    CapacitaryPotential zero = CapacitaryPotential::zeros(v.grid);
    ScalarField Av = apply_operator(zero, v);
    ComplementarityResidual r;
    for (std::size_t k = 0; k < v.values.size(); ++k) {
        double res = Av.values[k] + g.values[k];
        r.r1 = std::max(r.r1, -v.values[k]);
        r.r2 = std::max(r.r2, -res);
        r.r3 = std::max(r.r3, std::abs(res * v.values[k]));
    }
    r.r1 = std::max(r.r1, 0.0);
    r.r2 = std::max(r.r2, 0.0);
    return r;
}

}  // namespace signshape
