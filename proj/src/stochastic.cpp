#include "signshape/stochastic.hpp"

#include <cmath>
#include <future>
#include <random>
#include <stdexcept>

namespace signshape {

void Ensemble::validate() const {
    if (members.empty()) throw std::invalid_argument("ensemble: must have at least one member");
    double total = 0.0;
    for (const auto& [w, f] : members) {
        if (!(w >= 0.0)) throw std::invalid_argument("ensemble: weights must be nonnegative");
        if (!(f.grid == grid)) throw std::invalid_argument("ensemble: member grid mismatch");
        total += w;
    }
    if (std::abs(total - 1.0) > 1e-12) throw std::invalid_argument("ensemble: weights must sum to 1");
}

ScalarField barycenter(const Ensemble& P) {
    P.validate();
    ScalarField b = ScalarField::zeros(P.grid);
    for (const auto& [w, f] : P.members)
        for (std::size_t k = 0; k < b.values.size(); ++k) b.values[k] += w * f.values[k];
    return b;
}

double averaged_cost(const Ensemble& P, const DomainMask& mask, const ScalarField& g,
                     const SolverOptions& opts, int threads) {
    P.validate();
    if (!(mask.grid == P.grid) || !(g.grid == P.grid))
        throw std::invalid_argument("averaged_cost: grid mismatch");

    const int m = static_cast<int>(P.members.size());
    std::vector<double> costs(m, 0.0);
    if (threads <= 1 || m == 1) {
        for (int i = 0; i < m; ++i) costs[i] = cost(mask, P.members[i].second, g, opts);
    } else {
        std::vector<std::future<double>> futs(m);
        int in_flight = 0, next = 0;
        // bounded fan-out; results land in member order regardless of timing
        std::vector<int> pending;
        while (next < m || !pending.empty()) {
            while (next < m && in_flight < threads) {
                futs[next] = std::async(std::launch::async, [&, i = next] {
                    return cost(mask, P.members[i].second, g, opts);
                });
                pending.push_back(next);
                ++next;
                ++in_flight;
            }
            int i = pending.front();
            pending.erase(pending.begin());
            costs[i] = futs[i].get();
            --in_flight;
        }
    }
    double total = 0.0;
    for (int i = 0; i < m; ++i) total += P.members[i].first * costs[i];
    return total;
}

double reduction_gap(const Ensemble& P, const DomainMask& mask, const ScalarField& g,
                     const SolverOptions& opts, int threads) {
    double averaged = averaged_cost(P, mask, g, opts, threads);
    double direct = cost(mask, barycenter(P), g, opts);
    return std::abs(averaged - direct);
}

Ensemble gaussian_ensemble(const ScalarField& f0, double sigma, int count, std::uint64_t seed) {
    if (count < 1) throw std::invalid_argument("gaussian_ensemble: count must be positive");
    if (!(sigma >= 0.0)) throw std::invalid_argument("gaussian_ensemble: sigma must be nonnegative");

    std::mt19937_64 rng(seed);
    // Box-Muller over raw uniforms: bit-reproducible across platforms,
    // unlike std::normal_distribution
    auto next_gauss = [&rng, cached = false, cache = 0.0]() mutable {
        if (cached) {
            cached = false;
            return cache;
        }
        double u1 = 0.0;
        while (u1 == 0.0) u1 = (rng() >> 11) * 0x1.0p-53;
        double u2 = (rng() >> 11) * 0x1.0p-53;
        double r = std::sqrt(-2.0 * std::log(u1));
        cache = r * std::sin(2.0 * M_PI * u2);
        cached = true;
        return r * std::cos(2.0 * M_PI * u2);
    };

    Ensemble P;
    P.grid = f0.grid;
    const double w = 1.0 / count;
    for (int i = 0; i < count; ++i) {
        ScalarField f = f0;
        for (double& v : f.values) v += sigma * next_gauss();
        P.members.emplace_back(w, std::move(f));
    }
    P.validate();
    return P;
}

}  // namespace signshape
