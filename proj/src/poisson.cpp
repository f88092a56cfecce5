#include "signshape/poisson.hpp"

#include <cmath>
#include <limits>

#include "signshape/log.hpp"

namespace signshape {

CapacitaryPotential CapacitaryPotential::zeros(const GridSpec& g) {
    return {g, std::vector<double>(g.cell_count(), 0.0), std::vector<std::uint8_t>(g.cell_count(), 0)};
}

CapacitaryPotential CapacitaryPotential::uniform(const GridSpec& g, double c) {
    if (!(c >= 0.0)) throw std::invalid_argument("capacitary potential must be nonnegative");
    return {g, std::vector<double>(g.cell_count(), c), std::vector<std::uint8_t>(g.cell_count(), 0)};
}

CapacitaryPotential CapacitaryPotential::from_mask(const DomainMask& mask) {
    CapacitaryPotential p = zeros(mask.grid);
    for (int k = 0; k < mask.grid.cell_count(); ++k) p.infinite[k] = mask.inside[k] ? 0 : 1;
    return p;
}

DomainMask CapacitaryPotential::finiteness_set() const {
    DomainMask m = DomainMask::empty(grid);
    for (int k = 0; k < grid.cell_count(); ++k) m.inside[k] = infinite[k] ? 0 : 1;
    return m;
}

void CapacitaryPotential::validate() const {
    if (static_cast<int>(mu.size()) != grid.cell_count() || mu.size() != infinite.size())
        throw std::invalid_argument("capacitary potential has wrong length");
    for (std::size_t k = 0; k < mu.size(); ++k) {
        if (infinite[k]) continue;
        if (!(mu[k] >= 0.0) || !std::isfinite(mu[k]))
            throw std::invalid_argument("capacitary potential entries must be finite and nonnegative");
    }
}

namespace {

// Masked 5-point (3-point in 1d) operator with ghost reflection across
// inactive faces, so the homogeneous Dirichlet datum sits on the face itself.
struct StencilSystem {
    const GridSpec grid;
    std::vector<std::uint8_t> active;
    std::vector<int> cells;    // active cell indices, ascending
    std::vector<double> diag;  // (2d + #ghost)/h^2 + mu
    double inv_h2;
    int n;

    StencilSystem(const CapacitaryPotential& mu) : grid(mu.grid), n(mu.grid.n) {
        const int N = grid.cell_count();
        inv_h2 = 1.0 / (grid.h * grid.h);
        active.resize(N);
        diag.assign(N, 0.0);
        for (int k = 0; k < N; ++k) active[k] = mu.infinite[k] ? 0 : 1;
        cells.reserve(N);
        for (int k = 0; k < N; ++k) {
            if (!active[k]) continue;
            cells.push_back(k);
            int ghosts = 0;
            if (grid.d == 1) {
                ghosts += neighbor_inactive(k, -1);
                ghosts += neighbor_inactive(k, +1);
                diag[k] = (2 + ghosts) * inv_h2 + mu.mu[k];
            } else {
                ghosts += neighbor_inactive_2d(k, -n);
                ghosts += neighbor_inactive_2d(k, +n);
                ghosts += row_neighbor_inactive(k, -1);
                ghosts += row_neighbor_inactive(k, +1);
                diag[k] = (4 + ghosts) * inv_h2 + mu.mu[k];
            }
        }
    }

    int neighbor_inactive(int k, int step) const {
        int kk = k + step;
        if (kk < 0 || kk >= n) return 1;
        return active[kk] ? 0 : 1;
    }
    int neighbor_inactive_2d(int k, int step) const {
        int kk = k + step;
        if (kk < 0 || kk >= n * n) return 1;
        return active[kk] ? 0 : 1;
    }
    int row_neighbor_inactive(int k, int step) const {
        int j = k % n + step;
        if (j < 0 || j >= n) return 1;
        return active[k + step] ? 0 : 1;
    }

    // y = A x on active cells; x is assumed zero on inactive cells.
    void apply(const std::vector<double>& x, std::vector<double>& y) const {
        const int N = grid.cell_count();
        if (grid.d == 1) {
            for (int k : cells) {
                double s = diag[k] * x[k];
                if (k > 0 && active[k - 1]) s -= inv_h2 * x[k - 1];
                if (k + 1 < N && active[k + 1]) s -= inv_h2 * x[k + 1];
                y[k] = s;
            }
            return;
        }
        for (int k : cells) {
            double s = diag[k] * x[k];
            int j = k % n;
            if (k - n >= 0 && active[k - n]) s -= inv_h2 * x[k - n];
            if (k + n < N && active[k + n]) s -= inv_h2 * x[k + n];
            if (j > 0 && active[k - 1]) s -= inv_h2 * x[k - 1];
            if (j + 1 < n && active[k + 1]) s -= inv_h2 * x[k + 1];
            y[k] = s;
        }
    }
};

}  // namespace

std::pair<ScalarField, SolveReport> solve_relaxed(const CapacitaryPotential& mu, const ScalarField& f,
                                                  const SolverOptions& opts) {
    if (!(mu.grid == f.grid)) throw std::invalid_argument("solve_relaxed: grid mismatch");
    if (!(opts.tol > 0.0)) throw std::invalid_argument("solve_relaxed: tol must be positive");
    mu.validate();

    const GridSpec& g = mu.grid;
    const int N = g.cell_count();
    ScalarField u = ScalarField::zeros(g);
    SolveReport report;

    StencilSystem sys(mu);
    if (sys.cells.empty()) {
        log_info("solve_relaxed: empty finiteness set, returning zero state");
        report.converged = true;
        return {u, report};
    }

    std::vector<double> b(N, 0.0);
    double bnorm2 = 0.0;
    for (int k : sys.cells) {
        b[k] = f.values[k];
        bnorm2 += b[k] * b[k];
    }
    const double bnorm = std::sqrt(bnorm2);
    if (bnorm == 0.0) {
        report.converged = true;
        return {u, report};
    }

    std::vector<double>& x = u.values;
    if (opts.initial_guess) {
        if (!(opts.initial_guess->grid == g)) throw std::invalid_argument("solve_relaxed: initial guess grid mismatch");
        for (int k : sys.cells) x[k] = opts.initial_guess->values[k];
    }

    const int max_iter = opts.max_iter > 0 ? opts.max_iter : 50 * g.n;
    std::vector<double> r(N, 0.0), z(N, 0.0), p(N, 0.0), Ap(N, 0.0);

    sys.apply(x, Ap);
    double rnorm2 = 0.0, rz = 0.0;
    for (int k : sys.cells) {
        r[k] = b[k] - Ap[k];
        z[k] = r[k] / sys.diag[k];
        p[k] = z[k];
        rnorm2 += r[k] * r[k];
        rz += r[k] * z[k];
    }

    int it = 0;
    while (it < max_iter && std::sqrt(rnorm2) > opts.tol * bnorm) {
        sys.apply(p, Ap);
        double pAp = 0.0;
        for (int k : sys.cells) pAp += p[k] * Ap[k];
        if (pAp <= 0.0) break;  // can only happen through rounding at stagnation
        const double alpha = rz / pAp;
        rnorm2 = 0.0;
        double rz_new = 0.0;
        for (int k : sys.cells) {
            x[k] += alpha * p[k];
            r[k] -= alpha * Ap[k];
            z[k] = r[k] / sys.diag[k];
            rnorm2 += r[k] * r[k];
            rz_new += r[k] * z[k];
        }
        const double beta = rz_new / rz;
        rz = rz_new;
        for (int k : sys.cells) p[k] = z[k] + beta * p[k];
        ++it;
    }

    report.iterations = it;
    report.residual = std::sqrt(rnorm2) / bnorm;
    report.converged = report.residual <= opts.tol;
    if (!report.converged)
        log_info("solve_relaxed: no convergence after %d iterations (residual %.3e)", it, report.residual);
    return {u, report};
}

std::pair<ScalarField, SolveReport> solve_dirichlet(const DomainMask& mask, const ScalarField& f,
                                                    const SolverOptions& opts) {
    return solve_relaxed(CapacitaryPotential::from_mask(mask), f, opts);
}

std::pair<ScalarField, SolveReport> torsion(const CapacitaryPotential& mu, const SolverOptions& opts) {
    return solve_relaxed(mu, ScalarField::constant(mu.grid, 1.0), opts);
}

double gamma_distance(const CapacitaryPotential& mu1, const CapacitaryPotential& mu2,
                      const SolverOptions& opts) {
    if (!(mu1.grid == mu2.grid)) throw std::invalid_argument("gamma_distance: grid mismatch");
    auto [w1, rep1] = torsion(mu1, opts);
    auto [w2, rep2] = torsion(mu2, opts);
    if (!rep1.converged || !rep2.converged)
        throw SolveFailure("gamma_distance: torsion solve did not converge");
    double s = 0.0;
    for (std::size_t k = 0; k < w1.values.size(); ++k) {
        double dkk = w1.values[k] - w2.values[k];
        s += dkk * dkk;
    }
    return std::sqrt(s * mu1.grid.cell_volume());
}

CapacitaryPotential reconstruct_measure(const ScalarField& w, double floor) {
    if (!(floor > 0.0)) throw std::invalid_argument("reconstruct_measure: floor must be positive");
    const GridSpec& g = w.grid;
    const int N = g.cell_count();
    const int n = g.n;
    const double inv_h2 = 1.0 / (g.h * g.h);

    std::vector<std::uint8_t> act(N);
    for (int k = 0; k < N; ++k) act[k] = w.values[k] > floor ? 1 : 0;

    CapacitaryPotential p = CapacitaryPotential::zeros(g);
    for (int k = 0; k < N; ++k) {
        if (!act[k]) {
            p.infinite[k] = 1;
            continue;
        }
        // Delta_h w with the same ghost reflection as the forward solve
        double lap = 0.0;
        auto add = [&](int kk, bool in_row) {
            bool ok = in_row && kk >= 0 && kk < N && act[kk];
            double nb = ok ? w.values[kk] : -w.values[k];
            lap += (nb - w.values[k]) * inv_h2;
        };
        if (g.d == 1) {
            add(k - 1, true);
            add(k + 1, true);
        } else {
            int j = k % n;
            add(k - n, true);
            add(k + n, true);
            add(k - 1, j > 0);
            add(k + 1, j + 1 < n);
        }
        double m = (lap + 1.0) / w.values[k];
        p.mu[k] = m > 0.0 ? m : 0.0;
    }
    return p;
}

double cost(const DomainMask& mask, const ScalarField& f, const ScalarField& g, const SolverOptions& opts) {
    if (!(mask.grid == f.grid) || !(mask.grid == g.grid)) throw std::invalid_argument("cost: grid mismatch");
    auto [u, report] = solve_dirichlet(mask, f, opts);
    if (!report.converged) throw SolveFailure("cost: state solve did not converge");
    double s = 0.0;
    for (std::size_t k = 0; k < u.values.size(); ++k) s += g.values[k] * u.values[k];
    return s * mask.grid.cell_volume();
}

ScalarField apply_operator(const CapacitaryPotential& mu, const ScalarField& u) {
    if (!(mu.grid == u.grid)) throw std::invalid_argument("apply_operator: grid mismatch");
    StencilSystem sys(mu);
    ScalarField y = ScalarField::zeros(u.grid);
    sys.apply(u.values, y.values);
    return y;
}

}  // namespace signshape
