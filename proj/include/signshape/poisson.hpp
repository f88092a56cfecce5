#pragma once

#include <stdexcept>
#include <utility>

#include "signshape/grid.hpp"

namespace signshape {

/// Thrown when an operation that must return a plain value cannot, because an
/// inner linear solve did not converge.
struct SolveFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Discrete capacitary measure: per-cell value in [0, +inf]. The +inf
/// sentinel is stored as a flag and applied in the solver by eliminating the
/// cell (u = 0 there, exactly). The set of finiteness is the mask of
/// non-sentinel cells.
struct CapacitaryPotential {
    GridSpec grid;
    std::vector<double> mu;              // finite values, >= 0; ignored where infinite
    std::vector<std::uint8_t> infinite;  // sentinel flags

    static CapacitaryPotential zeros(const GridSpec& g);
    static CapacitaryPotential uniform(const GridSpec& g, double c);
    /// mu = 0 inside the mask, +inf outside: the measure I_Omega of a domain.
    static CapacitaryPotential from_mask(const DomainMask& mask);

    DomainMask finiteness_set() const;
    void validate() const;
};

struct SolveReport {
    int iterations = 0;
    double residual = 0.0;  // relative l2 residual
    bool converged = false;
};

struct SolverOptions {
    double tol = 1e-10;
    int max_iter = 0;  // 0 -> 50 * n
    const ScalarField* initial_guess = nullptr;
};

/// -Delta u + mu u = f on the finiteness set, u = 0 on sentinel cells.
/// Homogeneous Dirichlet data are imposed on the faces between active and
/// inactive (or out-of-box) cells via ghost reflection, and the resulting
/// SPD system is solved by Jacobi-preconditioned conjugate gradients.
std::pair<ScalarField, SolveReport> solve_relaxed(const CapacitaryPotential& mu, const ScalarField& f,
                                                  const SolverOptions& opts = {});

/// -Delta u = f in the mask, u = 0 outside.
std::pair<ScalarField, SolveReport> solve_dirichlet(const DomainMask& mask, const ScalarField& f,
                                                    const SolverOptions& opts = {});

/// Torsion function of mu: solve_relaxed with f = 1.
std::pair<ScalarField, SolveReport> torsion(const CapacitaryPotential& mu, const SolverOptions& opts = {});

/// d_gamma(mu1, mu2) = || w_mu1 - w_mu2 ||_{L2(D)}.
double gamma_distance(const CapacitaryPotential& mu1, const CapacitaryPotential& mu2,
                      const SolverOptions& opts = {});

/// Recover mu = (Delta w + 1) / w on cells with w > floor, sentinel
/// elsewhere. Negative round-off values are clamped to zero.
CapacitaryPotential reconstruct_measure(const ScalarField& w, double floor);

/// The shape cost integral g * u_mask with u = solve_dirichlet(mask, f).
double cost(const DomainMask& mask, const ScalarField& f, const ScalarField& g,
            const SolverOptions& opts = {});

/// Apply the masked operator (-Delta_h + mu) to a field that is zero outside
/// the active set; active cells are those of `active`. Ghost reflection at
/// inactive faces, matching the solver stencil.
ScalarField apply_operator(const CapacitaryPotential& mu, const ScalarField& u);

}
