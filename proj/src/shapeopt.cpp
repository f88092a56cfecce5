#include "signshape/shapeopt.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "signshape/log.hpp"

namespace signshape {

CapacitaryPotential potential_from_density(const ScalarField& chi, double beta) {
    CapacitaryPotential p = CapacitaryPotential::zeros(chi.grid);
    for (std::size_t k = 0; k < chi.values.size(); ++k) p.mu[k] = beta * (1.0 - chi.values[k]);
    return p;
}

double relaxed_cost(const ScalarField& f, const ScalarField& g, const ScalarField& chi, double beta,
                    double tol) {
    auto [u, report] = solve_relaxed(potential_from_density(chi, beta), f, {.tol = tol});
    if (!report.converged) throw SolveFailure("relaxed_cost: state solve did not converge");
    double s = 0.0;
    for (std::size_t k = 0; k < u.values.size(); ++k) s += g.values[k] * u.values[k];
    return s * f.grid.cell_volume();
}

namespace {

double weighted_sum(const ScalarField& g, const ScalarField& u) {
    double s = 0.0;
    for (std::size_t k = 0; k < u.values.size(); ++k) s += g.values[k] * u.values[k];
    return s * u.grid.cell_volume();
}

// Projection onto {0 <= chi <= 1, h^d sum chi <= bound}: clamp(y - lambda)
// with the multiplier found by bisection.
void project_density(std::vector<double>& chi, double cellvol, double bound) {
    auto clamped_volume = [&](double shift) {
        double s = 0.0;
        for (double c : chi) s += std::clamp(c - shift, 0.0, 1.0);
        return s * cellvol;
    };
    double shift = 0.0;
    if (clamped_volume(0.0) > bound + 1e-15) {
        double lo = 0.0, hi = 1.0;
        while (clamped_volume(hi) > bound) hi *= 2.0;
        for (int it = 0; it < 80; ++it) {
            double mid = 0.5 * (lo + hi);
            if (clamped_volume(mid) > bound)
                lo = mid;
            else
                hi = mid;
        }
        shift = hi;
    }
    for (double& c : chi) c = std::clamp(c - shift, 0.0, 1.0);
}

struct BoundaryScan {
    std::vector<int> removable;            // inside cells with an in-box outside neighbor
    std::vector<std::pair<int, double>> addable;  // outside cells adjacent to the mask, mean neighbor sens
};

std::vector<int> inside_neighbors(const GridSpec& g, int k, const DomainMask& mask, bool want_inside) {
    std::vector<int> out;
    const int n = g.n;
    auto probe = [&](int kk, bool in_row) {
        if (!in_row || kk < 0 || kk >= g.cell_count()) return;
        if ((mask.inside[kk] != 0) == want_inside) out.push_back(kk);
    };
    if (g.d == 1) {
        probe(k - 1, true);
        probe(k + 1, true);
    } else {
        int j = k % n;
        probe(k - n, true);
        probe(k + n, true);
        probe(k - 1, j > 0);
        probe(k + 1, j + 1 < n);
    }
    return out;
}

}  // namespace

std::vector<std::pair<int, double>> boundary_sensitivity(const DomainMask& mask, const ScalarField& f,
                                                         const ScalarField& g, double tol) {
    if (mask.count() == 0) throw std::invalid_argument("boundary_sensitivity: mask must be non-empty");
    auto [u, ru] = solve_dirichlet(mask, f, {.tol = tol});
    auto [v, rv] = solve_dirichlet(mask, g, {.tol = tol});
    if (!ru.converged || !rv.converged) throw SolveFailure("boundary_sensitivity: state solve did not converge");

    const double inv_h2 = 1.0 / (mask.grid.h * mask.grid.h);
    std::vector<std::pair<int, double>> out;
    for (int k = 0; k < mask.grid.cell_count(); ++k) {
        if (!mask.inside[k]) continue;
        if (inside_neighbors(mask.grid, k, mask, false).empty()) continue;
        out.emplace_back(k, u.values[k] * v.values[k] * inv_h2);
    }
    return out;
}

OptimalityResidual optimality_residual(const OptimizationResult& result, const ScalarField& f,
                                       const ScalarField& g, double tol) {
    OptimalityResidual res;
    if (result.mask.count() == 0) return res;
    auto sens = boundary_sensitivity(result.mask, f, g, tol);
    if (sens.empty()) return res;

    std::vector<double> vals;
    vals.reserve(sens.size());
    for (const auto& [k, s] : sens) vals.push_back(s);
    std::sort(vals.begin(), vals.end());
    const double maxi = vals.back(), mini = vals.front();
    const double median = vals[vals.size() / 2];
    res.spread = (maxi - mini) / (std::abs(median) + 1e-30);

    auto [u, ru] = solve_dirichlet(result.mask, f, {.tol = tol});
    auto [v, rv] = solve_dirichlet(result.mask, g, {.tol = tol});
    if (!ru.converged || !rv.converged) throw SolveFailure("optimality_residual: state solve did not converge");
    const double inv_h2 = 1.0 / (result.mask.grid.h * result.mask.grid.h);
    double interior = 0.0;
    for (int k = 0; k < result.mask.grid.cell_count(); ++k)
        if (result.mask.inside[k]) interior = std::max(interior, std::abs(u.values[k] * v.values[k]) * inv_h2);
    double max_sens = 0.0;
    for (double s : vals) max_sens = std::max(max_sens, std::abs(s));
    res.zero_resid = interior > 0.0 ? max_sens / interior : 0.0;
    return res;
}

bool containment_check(const DomainMask& mask, const ScalarField& f, const ScalarField& g, double vol_bound) {
    const GridSpec& grid = mask.grid;
    if (mask_volume(mask) >= vol_bound - grid.cell_volume()) return true;  // saturated: vacuous

    std::vector<std::uint8_t> neg(grid.cell_count(), 0);
    for (int k = 0; k < grid.cell_count(); ++k) neg[k] = f.values[k] * g.values[k] < 0.0 ? 1 : 0;
    DomainMask neg_mask{grid, neg};
    for (int k = 0; k < grid.cell_count(); ++k) {
        if (!neg[k]) continue;
        // erode by one layer: skip cells of {fg<0} touching its boundary or the box edge
        auto outs = inside_neighbors(grid, k, neg_mask, false);
        int expected = grid.d == 1 ? 2 : 4;
        int in_box_neighbors = static_cast<int>(inside_neighbors(grid, k, neg_mask, true).size() + outs.size());
        if (!outs.empty() || in_box_neighbors < expected) continue;
        if (!mask.inside[k]) return false;
    }
    return true;
}

namespace {

struct Move {
    int add = -1;
    int remove = -1;
    double est_gain = 0.0;
};

DomainMask apply_move(const DomainMask& mask, const Move& mv) {
    DomainMask out = mask;
    if (mv.add >= 0) out.inside[mv.add] = 1;
    if (mv.remove >= 0) out.inside[mv.remove] = 0;
    return out;
}

// Greedy exchange polish: adds, removes and volume-preserving swaps ranked
// by the one-sided boundary sensitivity; a move is kept only when the exact
// cost decreases. When the ranked shortlist stalls, every single-cell move is
// swept once before declaring the mask exchange-stable.
void polish_mask(DomainMask& mask, const ScalarField& f, const ScalarField& g, double vol_bound,
                 const OptimizeOptions& opts, std::vector<HistoryEntry>& history, int& iter,
                 double& current_cost) {
    const GridSpec& grid = mask.grid;
    const double cellvol = grid.cell_volume();
    const double inv_h2 = 1.0 / (grid.h * grid.h);
    const double inf = std::numeric_limits<double>::infinity();

    int moves = 0, trials = 0;
    ScalarField warm_u = ScalarField::zeros(grid), warm_v = ScalarField::zeros(grid);

    while (moves < opts.polish_max_moves && trials < opts.polish_max_trials) {
        if (mask.count() == 0) break;
        SolverOptions so{.tol = opts.tol, .max_iter = 0, .initial_guess = &warm_u};
        auto [u, ru] = solve_dirichlet(mask, f, so);
        so.initial_guess = &warm_v;
        auto [v, rv] = solve_dirichlet(mask, g, so);
        if (!ru.converged || !rv.converged) break;
        warm_u = u;
        warm_v = v;
        current_cost = weighted_sum(g, u);

        // candidate scan: boundary cells and adjacent outside sites
        std::vector<std::pair<double, int>> removals;  // (sens, cell)
        std::vector<std::pair<double, int>> additions; // (est sens, cell)
        std::vector<std::uint8_t> seen(grid.cell_count(), 0);
        for (int k = 0; k < grid.cell_count(); ++k) {
            if (!mask.inside[k]) continue;
            auto outs = inside_neighbors(grid, k, mask, false);
            if (outs.empty()) continue;
            removals.emplace_back(u.values[k] * v.values[k] * inv_h2, k);
            for (int s : outs) {
                if (seen[s]) continue;
                seen[s] = 1;
                auto ins = inside_neighbors(grid, s, mask, true);
                double acc = 0.0;
                for (int q : ins) acc += u.values[q] * v.values[q] * inv_h2;
                additions.emplace_back(acc / static_cast<double>(ins.size()), s);
            }
        }
        auto by_desc = [](const auto& a, const auto& b) {
            return a.first != b.first ? a.first > b.first : a.second < b.second;
        };
        auto by_asc = [](const auto& a, const auto& b) {
            return a.first != b.first ? a.first < b.first : a.second < b.second;
        };
        std::sort(removals.begin(), removals.end(), by_desc);  // biggest positive sens first
        std::sort(additions.begin(), additions.end(), by_asc); // most negative estimate first

        const double vol = cellvol * mask.count();
        const bool can_add = vol + cellvol <= vol_bound + 1e-15;

        // the estimates are noisy near a free boundary, so rank without a
        // sign cutoff and let the exact solve decide
        std::vector<Move> cand;
        for (std::size_t i = 0; i < std::min<std::size_t>(removals.size(), 8); ++i)
            cand.push_back({-1, removals[i].second, removals[i].first * cellvol});
        if (can_add)
            for (std::size_t i = 0; i < std::min<std::size_t>(additions.size(), 8); ++i)
                cand.push_back({additions[i].second, -1, -additions[i].first * cellvol});
        const std::size_t kr = std::min<std::size_t>(removals.size(), 6);
        const std::size_t ka = std::min<std::size_t>(additions.size(), 6);
        for (std::size_t a = 0; a < kr; ++a)
            for (std::size_t b = 0; b < ka; ++b) {
                const auto& [sr, cr] = removals[a];
                const auto& [sa, ca] = additions[b];
                double gain = (sr - sa) * cellvol;
                if (gain <= 0.0) continue;
                auto ins = inside_neighbors(grid, ca, mask, true);
                if (ins.size() == 1 && ins[0] == cr) continue;  // would strand the new cell
                cand.push_back({ca, cr, gain});
            }
        std::stable_sort(cand.begin(), cand.end(),
                         [](const Move& a, const Move& b) { return a.est_gain > b.est_gain; });

        auto try_move = [&](const Move& mv) -> bool {
            ++trials;
            DomainMask next = apply_move(mask, mv);
            SolverOptions so2{.tol = opts.tol, .max_iter = 0, .initial_guess = &warm_u};
            auto [u2, r2] = solve_dirichlet(next, f, so2);
            if (!r2.converged) return false;
            double c2 = weighted_sum(g, u2);
            if (c2 >= current_cost) return false;
            mask = next;
            warm_u = u2;
            current_cost = c2;
            ++moves;
            history.push_back({++iter, c2, cellvol * mask.count(), inf});
            return true;
        };

        bool accepted = false;
        int tried = 0;
        for (const Move& mv : cand) {
            if (tried >= opts.polish_candidates_per_round || trials >= opts.polish_max_trials) break;
            ++tried;
            if (try_move(mv)) {
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            // exhaustive sweep over single-cell moves; each trial is checked
            // against the current mask exactly, so the scan keeps going after
            // an acceptance instead of rescanning from scratch
            for (const auto& [s, k] : removals) {
                if (trials >= opts.polish_max_trials || moves >= opts.polish_max_moves) break;
                accepted |= try_move({-1, k, 0.0});
            }
            if (can_add) {
                for (const auto& [s, k] : additions) {
                    if (trials >= opts.polish_max_trials || moves >= opts.polish_max_moves) break;
                    accepted |= try_move({k, -1, 0.0});
                }
            }
        }
        if (!accepted) break;
    }
    log_debug("polish: %d accepted moves, %d trial solves", moves, trials);
}

}  // namespace

OptimizationResult optimize_domain(const ScalarField& f, const ScalarField& g, double vol_bound,
                                   const OptimizeOptions& opts) {
    if (!(f.grid == g.grid)) throw std::invalid_argument("optimize_domain: grid mismatch");
    const GridSpec& grid = f.grid;
    const double cellvol = grid.cell_volume();
    const double boxvol = grid.box_volume();
    if (!(vol_bound > 0.0 && vol_bound < boxvol))
        throw std::invalid_argument("optimize_domain: vol_bound must lie in (0, |D|)");
    if (opts.beta_ladder.empty()) throw std::invalid_argument("optimize_domain: beta ladder must be non-empty");

    const int N = grid.cell_count();
    OptimizationResult result;
    result.chi = ScalarField::constant(grid, vol_bound / boxvol);
    std::vector<double>& chi = result.chi.values;

    int iter = 0;
    ScalarField u = ScalarField::zeros(grid), v = ScalarField::zeros(grid);
    double final_beta = opts.beta_ladder.back();

    for (double beta : opts.beta_ladder) {
        SolverOptions so{.tol = opts.tol, .max_iter = 0, .initial_guess = &u};
        auto [u0, ru] = solve_relaxed(potential_from_density(result.chi, beta), f, so);
        so.initial_guess = &v;
        auto [v0, rv] = solve_relaxed(potential_from_density(result.chi, beta), g, so);
        if (!ru.converged || !rv.converged) {
            result.solver_failed = true;
            break;
        }
        u = u0;
        v = v0;
        double c = weighted_sum(g, u);

        double grad_max = 0.0;
        for (int k = 0; k < N; ++k) grad_max = std::max(grad_max, beta * std::abs(u.values[k] * v.values[k]));
        double s = opts.step_init > 0.0 ? opts.step_init : (grad_max > 0.0 ? 0.25 / grad_max : 1.0);

        int stall = 0;
        for (int step = 0; step < opts.max_steps_per_stage; ++step) {
            bool accepted = false;
            std::vector<double> chi_try(N);
            ScalarField u_try;
            double c_try = 0.0;
            for (int bt = 0; bt <= opts.max_backtracks; ++bt) {
                for (int k = 0; k < N; ++k) chi_try[k] = chi[k] - s * beta * u.values[k] * v.values[k];
                project_density(chi_try, cellvol, vol_bound);
                ScalarField chi_field{grid, chi_try};
                SolverOptions si{.tol = opts.tol, .max_iter = 0, .initial_guess = &u};
                auto [ut, rt] = solve_relaxed(potential_from_density(chi_field, beta), f, si);
                if (!rt.converged) {
                    result.solver_failed = true;
                    break;
                }
                c_try = weighted_sum(g, ut);
                if (c_try < c) {
                    accepted = true;
                    u_try = ut;
                    break;
                }
                s *= 0.5;
            }
            if (result.solver_failed || !accepted) break;

            double delta = c - c_try;
            chi = chi_try;
            u = u_try;
            c = c_try;
            ScalarField chi_field{grid, chi};
            SolverOptions sv{.tol = opts.tol, .max_iter = 0, .initial_guess = &v};
            auto [vt, rv2] = solve_relaxed(potential_from_density(chi_field, beta), g, sv);
            if (!rv2.converged) {
                result.solver_failed = true;
                break;
            }
            v = vt;

            double vol = 0.0;
            for (double x : chi) vol += x;
            vol *= cellvol;
            result.history.push_back({++iter, c, vol, beta});
            s *= 2.0;

            if (delta <= opts.stage_rtol * std::max(std::abs(c), 1e-300)) {
                if (++stall >= opts.stall_limit) break;
            } else {
                stall = 0;
            }
        }
        if (result.solver_failed) break;
        final_beta = beta;
    }

    // stationarity proxy of the final relaxed state: max |u v| mu h^d
    {
        CapacitaryPotential mu = potential_from_density(result.chi, final_beta);
        double st = 0.0;
        for (int k = 0; k < N; ++k)
            st = std::max(st, std::abs(u.values[k] * v.values[k]) * mu.mu[k] * cellvol);
        result.stationarity = st;
    }

    // binarize at the threshold; a saturated relaxed density snaps to the
    // exact cell budget, ties broken by the lowest cell index
    double relaxed_vol = 0.0;
    for (double x : chi) relaxed_vol += x;
    relaxed_vol *= cellvol;

    DomainMask mask = DomainMask::empty(grid);
    const int budget = static_cast<int>(std::floor(vol_bound / cellvol + 1e-9));
    if (relaxed_vol >= vol_bound - cellvol) {
        std::vector<int> order(N);
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return chi[a] > chi[b]; });
        for (int i = 0; i < std::min(budget, N); ++i) mask.inside[order[i]] = 1;
    } else {
        for (int k = 0; k < N; ++k) mask.inside[k] = chi[k] >= opts.binarize_threshold ? 1 : 0;
        if (mask.count() > budget) {
            std::vector<int> order;
            for (int k = 0; k < N; ++k)
                if (mask.inside[k]) order.push_back(k);
            std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return chi[a] < chi[b]; });
            int excess = mask.count() - budget;
            for (int i = 0; i < excess; ++i) mask.inside[order[i]] = 0;
        }
    }

    double c_mask = 0.0;
    if (!result.solver_failed)
        polish_mask(mask, f, g, vol_bound, opts, result.history, iter, c_mask);

    result.mask = mask;
    result.volume = mask_volume(mask);
    result.saturated = result.volume >= vol_bound - cellvol;
    if (mask.count() > 0) {
        result.cost_value = cost(mask, f, g, {.tol = opts.tol});
    } else {
        result.cost_value = 0.0;
    }
    return result;
}

}  // namespace signshape
