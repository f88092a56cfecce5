#pragma once

#include <utility>

#include "signshape/poisson.hpp"

namespace signshape {

struct ObstacleOptions {
    double tol = 1e-10;
    double omega = 1.8;   // SOR over-relaxation
    int max_sweeps = 0;   // 0 -> 100 * n
    const ScalarField* initial_guess = nullptr;
};

/// Minimize 1/2 |grad v|^2 + g v over v >= 0 vanishing on the box boundary.
/// Projected SOR; convergence is declared when the max-norm of the projected
/// residual min(v, -Delta_h v + g) drops below tol * max(1, |g|_inf).
std::pair<ScalarField, SolveReport> solve_obstacle(const ScalarField& g, const ObstacleOptions& opts = {});

/// Positivity set {v > floor}.
DomainMask active_set(const ScalarField& v, double floor);

/// Scale-aware default cut for active_set: 10 * tol * ||g||_{L2}.
double default_active_floor(const ScalarField& g, double tol);

/// The optimal domain of the unconstrained problem for f >= 0: the
/// positivity set of the obstacle solution (f only enters the hypothesis and
/// is rejected when it has negative entries).
DomainMask unconstrained_optimal_domain(const ScalarField& f, const ScalarField& g, double tol, double floor);

struct ComplementarityResidual {
    double r1 = 0.0;  // max(0, -min v)
    double r2 = 0.0;  // max(0, -min(-Delta v + g))
    double r3 = 0.0;  // max |(-Delta v + g) * v|
};

ComplementarityResidual complementarity_residual(const ScalarField& v, const ScalarField& g);

}
