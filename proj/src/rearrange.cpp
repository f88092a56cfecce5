#include "signshape/rearrange.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace signshape {

namespace {

// Measures |{u > t_k}| for the uniform level ladder t_k = k max(u)/bins,
// k = 0..bins-1, via one sort of the values.
struct LevelData {
    std::vector<double> t;
    std::vector<double> measure;
    double max_u = 0.0;
};

LevelData level_measures(const ScalarField& u, int bins) {
    LevelData out;
    std::vector<double> sorted = u.values;
    std::sort(sorted.begin(), sorted.end());
    out.max_u = sorted.back();
    const double cellvol = u.grid.cell_volume();
    out.t.resize(bins);
    out.measure.resize(bins);
    for (int k = 0; k < bins; ++k) {
        double t = out.max_u * k / bins;
        // count of strictly greater values
        auto it = std::upper_bound(sorted.begin(), sorted.end(), t);
        out.t[k] = t;
        out.measure[k] = cellvol * static_cast<double>(sorted.end() - it);
    }
    return out;
}

}  // namespace

RadialProfile schwarz_rearrange(const ScalarField& u, int bins) {
    if (bins < 16) throw std::invalid_argument("schwarz_rearrange: bins must be at least 16");
    for (double v : u.values)
        if (v < 0.0) throw std::invalid_argument("schwarz_rearrange: u must be nonnegative");

    const int d = u.grid.d;
    const double omega = unit_ball_volume(d);
    LevelData lv = level_measures(u, bins);

    if (lv.max_u == 0.0) return RadialProfile::table({{0.0, 0.0}, {u.grid.h, 0.0}});

    // nodes (rho_k, t_k) with rho decreasing as t grows; merge repeated
    // measures (plateaus) keeping the highest level
    std::vector<std::array<double, 2>> nodes;  // (r, value), r ascending
    nodes.push_back({0.0, lv.max_u});
    double last_rho = 0.0;
    for (int k = bins - 1; k >= 0; --k) {
        double rho = std::pow(lv.measure[k] / omega, 1.0 / d);
        if (rho <= last_rho + 1e-15) continue;
        nodes.push_back({rho, lv.t[k]});
        last_rho = rho;
    }
    if (nodes.size() == 1) nodes.push_back({u.grid.h, 0.0});
    return RadialProfile::table(std::move(nodes));
}

double talenti_gap(const DomainMask& mask, double tol, int bins) {
    if (mask.count() == 0) throw std::invalid_argument("talenti_gap: mask must be non-empty");
    auto [u, report] = solve_dirichlet(mask, ScalarField::constant(mask.grid, 1.0), {.tol = tol});
    if (!report.converged) throw SolveFailure("talenti_gap: torsion solve did not converge");
    for (double& v : u.values) v = std::max(v, 0.0);  // shave solver round-off

    const int d = mask.grid.d;
    const double omega = unit_ball_volume(d);
    RadialProfile star = schwarz_rearrange(u, bins);
    LevelData lv = level_measures(u, bins);

    double gap = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < bins; ++k) {
        if (lv.measure[k] <= 0.0) continue;
        double rho_t = std::pow(lv.measure[k] / omega, 1.0 / d);
        for (const auto& node : star.samples) {
            double r = node[0];
            if (r >= rho_t) continue;
            double w_t = (rho_t * rho_t - r * r) / (2.0 * d);
            gap = std::max(gap, star.eval(r) - lv.t[k] - w_t);
        }
    }
    return gap;
}

TalentiCoefficient talenti_coefficient(const DomainMask& mask, int bins, double tol) {
    if (mask.count() == 0) throw std::invalid_argument("talenti_coefficient: mask must be non-empty");
    auto [u, report] = solve_dirichlet(mask, ScalarField::constant(mask.grid, 1.0), {.tol = tol});
    if (!report.converged) throw SolveFailure("talenti_coefficient: torsion solve did not converge");
    for (double& v : u.values) v = std::max(v, 0.0);

    const int d = mask.grid.d;
    const double omega = unit_ball_volume(d);

    TalentiCoefficient out;
    out.u_star = schwarz_rearrange(u, bins);
    LevelData lv = level_measures(u, bins);
    out.rho0 = std::pow(lv.measure[0] / omega, 1.0 / d);

    // distinct (t, rho) ladder, t ascending with rho strictly decreasing
    std::vector<double> ts, rhos, meas;
    double last_rho = std::numeric_limits<double>::infinity();
    for (int k = 0; k < bins; ++k) {
        if (lv.measure[k] <= 0.0) break;
        double rho = std::pow(lv.measure[k] / omega, 1.0 / d);
        if (rho >= last_rho - 1e-15) {
            out.skipped_levels.push_back(lv.t[k]);
            continue;
        }
        ts.push_back(lv.t[k]);
        rhos.push_back(rho);
        meas.push_back(lv.measure[k]);
        last_rho = rho;
    }

    std::vector<std::array<double, 2>> a_nodes;
    const std::size_t m = ts.size();
    for (std::size_t k = 0; k < m; ++k) {
        // centered difference of the rearranged profile in rho
        std::size_t kl = k > 0 ? k - 1 : k;
        std::size_t kr = k + 1 < m ? k + 1 : k;
        if (kl == kr) continue;
        double slope = (ts[kr] - ts[kl]) / (rhos[kr] - rhos[kl]);
        if (!(std::abs(slope) > 1e-14)) {
            out.skipped_levels.push_back(ts[k]);
            continue;
        }
        double a = meas[k] / (d * omega * std::pow(rhos[k], d - 1) * std::abs(slope)) - 1.0;
        out.levels.push_back({ts[k], rhos[k], meas[k], slope, a});
        // the r-profile feeds the radial state, which needs a >= 0; the raw
        // levels keep the (possibly slightly negative) discrete values
        a_nodes.push_back({rhos[k], std::max(a, 0.0)});
    }

    std::sort(a_nodes.begin(), a_nodes.end(),
              [](const auto& x, const auto& y) { return x[0] < y[0]; });
    if (a_nodes.size() >= 2) {
        out.a_of_r = RadialProfile::table(std::move(a_nodes));
    } else {
        out.a_of_r = RadialProfile::constant(0.0);
    }
    return out;
}

void write_profile_csv(const std::string& path, const TalentiCoefficient& coeff) {
    std::FILE* fp = std::fopen(path.c_str(), "w");
    if (!fp) throw std::runtime_error("cannot write csv file: " + path);
    std::fprintf(fp, "t,rho,u_star,a\n");
    for (const auto& lev : coeff.levels)
        std::fprintf(fp, "%.17g,%.17g,%.17g,%.17g\n", lev.t, lev.rho, coeff.u_star.eval(lev.rho), lev.a);
    std::fclose(fp);
}

}  // namespace signshape
