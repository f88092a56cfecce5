#pragma once

#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

#include "signshape/poisson.hpp"

namespace signshape {

struct HistoryEntry {
    int iter = 0;
    double cost = 0.0;
    double volume = 0.0;
    double beta = 0.0;  // +inf marks the discrete polish segment
};

struct OptimizationResult {
    DomainMask mask;
    ScalarField chi;     // final relaxed density in [0,1]
    double cost_value = 0.0;
    double volume = 0.0;
    bool saturated = false;
    std::vector<HistoryEntry> history;
    double stationarity = 0.0;  // max over cells of |u v| mu h^d at the final relaxed state
    bool solver_failed = false; // an inner solve died; history is partial
};

struct OptimizeOptions {
    std::vector<double> beta_ladder{1e3, 1e4, 1e5, 1e6};
    double tol = 1e-10;
    int max_steps_per_stage = 60;
    int max_backtracks = 30;
    double stage_rtol = 1e-7;
    int stall_limit = 3;
    double step_init = 0.0;  // 0 -> auto scale from the first gradient
    double binarize_threshold = 0.5;
    int polish_max_moves = 5000;
    int polish_max_trials = 40000;
    int polish_candidates_per_round = 24;
    std::uint64_t seed = 0;  // reserved; runs are deterministic
};

/// Minimize the cost g * u over masks of volume <= vol_bound.
///
/// Relaxed continuation: the density chi in [0,1] parametrizes the measure
/// mu = beta (1 - chi); the cost derivative with respect to chi is
/// +beta u v h^d with u, v the states for f and g. Projected gradient with
/// backtracking runs over an increasing beta ladder, the final density is
/// binarized at 1/2, and the mask is polished by boundary exchanges (adds,
/// removes and volume-preserving swaps) accepted only when the exact cost
/// decreases.
OptimizationResult optimize_domain(const ScalarField& f, const ScalarField& g, double vol_bound,
                                   const OptimizeOptions& opts = {});

/// (u/h)(v/h) per inside cell having an outside neighbor within the box: a
/// one-sided proxy of the normal-derivative product, u = v = 0 just outside.
std::vector<std::pair<int, double>> boundary_sensitivity(const DomainMask& mask, const ScalarField& f,
                                                         const ScalarField& g, double tol);

struct OptimalityResidual {
    double spread = 0.0;      // (max-min)/(|median|+eps); meaningful when saturated
    double zero_resid = 0.0;  // max |sensitivity| / (interior max |u v| / h^2); meaningful when unsaturated
};

OptimalityResidual optimality_residual(const OptimizationResult& result, const ScalarField& f,
                                       const ScalarField& g, double tol);

/// Checks {f g < 0} included in the mask (eroded by one cell layer);
/// vacuously true when the volume bound is saturated.
bool containment_check(const DomainMask& mask, const ScalarField& f, const ScalarField& g, double vol_bound);

/// Relaxed cost g * u_{mu(chi)} with mu = beta (1 - chi); used by the
/// continuation loop and exposed for derivative checks.
double relaxed_cost(const ScalarField& f, const ScalarField& g, const ScalarField& chi, double beta, double tol);

CapacitaryPotential potential_from_density(const ScalarField& chi, double beta);

}
