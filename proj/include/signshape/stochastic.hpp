#pragma once

#include <cstdint>
#include <vector>

#include "signshape/poisson.hpp"

namespace signshape {

/// Finite discrete probability on right-hand sides: weighted fields on a
/// shared grid, weights nonnegative and summing to 1 (within 1e-12).
struct Ensemble {
    GridSpec grid;
    std::vector<std::pair<double, ScalarField>> members;

    void validate() const;
};

/// B_P = sum w_i f_i, cellwise.
ScalarField barycenter(const Ensemble& P);

/// sum w_i cost(mask, f_i, g). Member solves are independent; `threads`
/// bounds the fan-out and the weighted sum always runs in member order.
double averaged_cost(const Ensemble& P, const DomainMask& mask, const ScalarField& g,
                     const SolverOptions& opts = {}, int threads = 1);

/// | averaged_cost - cost(mask, barycenter, g) |: zero in exact arithmetic
/// by linearity of the resolvent.
double reduction_gap(const Ensemble& P, const DomainMask& mask, const ScalarField& g,
                     const SolverOptions& opts = {}, int threads = 1);

/// i.i.d. Gaussian-perturbation ensemble f_0 + h with equal weights;
/// reproducible across platforms (Box-Muller over a seeded mt19937).
Ensemble gaussian_ensemble(const ScalarField& f0, double sigma, int count, std::uint64_t seed);

}
