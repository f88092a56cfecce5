#include "signshape/cli.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "json.hpp"

#include "signshape/grid.hpp"
#include "signshape/log.hpp"
#include "signshape/obstacle.hpp"
#include "signshape/poisson.hpp"
#include "signshape/radial.hpp"
#include "signshape/rearrange.hpp"
#include "signshape/shapeopt.hpp"
#include "signshape/stochastic.hpp"
#include "signshape/version.hpp"

namespace signshape {

namespace {

using nlohmann::json;

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string fnv1a_hex(const std::string& data) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

const json& need(const json& j, const std::string& key) {
    if (!j.is_object() || !j.contains(key)) throw ConfigError("missing key `" + key + "`");
    return j.at(key);
}

double need_num(const json& j, const std::string& key) {
    const json& v = need(j, key);
    if (!v.is_number()) throw ConfigError("key `" + key + "` must be a number");
    return v.get<double>();
}

int need_int(const json& j, const std::string& key) {
    const json& v = need(j, key);
    if (!v.is_number_integer()) throw ConfigError("key `" + key + "` must be an integer");
    return v.get<int>();
}

std::string need_str(const json& j, const std::string& key) {
    const json& v = need(j, key);
    if (!v.is_string()) throw ConfigError("key `" + key + "` must be a string");
    return v.get<std::string>();
}

double opt_num(const json& j, const std::string& key, double fallback) {
    if (!j.is_object() || !j.contains(key)) return fallback;
    return need_num(j, key);
}

int opt_int(const json& j, const std::string& key, int fallback) {
    if (!j.is_object() || !j.contains(key)) return fallback;
    return need_int(j, key);
}

std::array<double, 2> parse_point(const json& v, const std::string& key) {
    if (!v.is_array() || v.empty() || v.size() > 2) throw ConfigError("key `" + key + "` must be [x] or [x,y]");
    std::array<double, 2> p{0.0, 0.0};
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!v[i].is_number()) throw ConfigError("key `" + key + "` must hold numbers");
        p[i] = v[i].get<double>();
    }
    return p;
}

FieldDescriptor parse_descriptor(const json& j, const std::string& ctx) {
    if (!j.is_object()) throw ConfigError("key `" + ctx + "` must be an object");
    std::string kind = need_str(j, "kind");
    try {
        if (kind == "constant") return ConstantDesc{need_num(j, "value")};
        if (kind == "indicator_ball") {
            IndicatorBallDesc d;
            d.center = parse_point(need(j, "center"), ctx + ".center");
            d.radius = need_num(j, "radius");
            d.inside_value = need_num(j, "inside");
            d.outside_value = need_num(j, "outside");
            return d;
        }
        if (kind == "radial_table") {
            const json& s = need(j, "samples");
            if (!s.is_array() || s.size() < 2) throw ConfigError("key `samples` must be an array of [r,value]");
            RadialTableDesc d;
            for (const auto& row : s) {
                if (!row.is_array() || row.size() != 2) throw ConfigError("key `samples` must hold [r,value] pairs");
                d.samples.push_back({row[0].get<double>(), row[1].get<double>()});
            }
            return d;
        }
        if (kind == "gaussian") {
            GaussianDesc d;
            d.center = parse_point(need(j, "center"), ctx + ".center");
            d.sigma = need_num(j, "sigma");
            d.amplitude = need_num(j, "amplitude");
            return d;
        }
        if (kind == "csv") return CsvDesc{need_str(j, "path")};
    } catch (const ConfigError& e) {
        throw ConfigError(ctx + ": " + e.what());
    }
    throw ConfigError("key `" + ctx + ".kind` must be one of constant, indicator_ball, radial_table, gaussian, csv");
}

GridSpec parse_grid(const json& cfg) {
    const json& g = need(cfg, "grid");
    int d = need_int(g, "d");
    double side = need_num(g, "side");
    int n = need_int(g, "n");
    try {
        return make_grid(d, side, n);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("grid: ") + e.what());
    }
}

SolverOptions parse_solver(const json& cfg) {
    SolverOptions so;
    if (cfg.contains("solver")) {
        const json& s = cfg.at("solver");
        so.tol = opt_num(s, "tol", so.tol);
        so.max_iter = opt_int(s, "max_iter", so.max_iter);
        if (!(so.tol > 0.0)) throw ConfigError("key `solver.tol` must be positive");
    }
    return so;
}

DomainMask parse_mask(const json& cfg, const GridSpec& grid, const std::string& key) {
    if (!cfg.contains(key)) return DomainMask::full(grid);
    const json& m = cfg.at(key);
    if (m.contains("full")) return DomainMask::full(grid);
    if (m.contains("ball")) {
        const json& b = m.at("ball");
        auto center = parse_point(need(b, "center"), key + ".ball.center");
        double radius = need_num(b, "radius");
        if (!(radius > 0.0)) throw ConfigError("key `" + key + ".ball.radius` must be positive");
        return ball_mask(grid, center, radius);
    }
    if (m.contains("csv")) return read_mask_csv(m.at("csv").get<std::string>(), grid);
    throw ConfigError("key `" + key + "` must contain one of full, ball, csv");
}

RadialProfile profile_from_descriptor(const FieldDescriptor& desc, int d) {
    if (const auto* c = std::get_if<ConstantDesc>(&desc)) return RadialProfile::constant(c->value);
    if (const auto* b = std::get_if<IndicatorBallDesc>(&desc))
        return RadialProfile::indicator(b->radius, b->inside_value, b->outside_value);
    if (const auto* t = std::get_if<RadialTableDesc>(&desc)) return RadialProfile::table(t->samples);
    if (const auto* ga = std::get_if<GaussianDesc>(&desc)) {
        // sample the radial section into a dense table
        double end = 10.0 * std::pow(unit_ball_volume(d), -1.0 / d);
        std::vector<std::array<double, 2>> samples;
        const int m = 4096;
        for (int i = 0; i <= m; ++i) {
            double r = end * i / m;
            samples.push_back({r, ga->amplitude * std::exp(-r * r / (2.0 * ga->sigma * ga->sigma))});
        }
        return RadialProfile::table(std::move(samples));
    }
    throw ConfigError("key `g` cannot be interpreted as a radial profile");
}

void write_history_csv(const std::string& path, const std::vector<HistoryEntry>& history) {
    std::FILE* fp = std::fopen(path.c_str(), "w");
    if (!fp) throw std::runtime_error("cannot write csv file: " + path);
    std::fprintf(fp, "iter,cost,volume,beta\n");
    for (const auto& e : history) std::fprintf(fp, "%d,%.17g,%.17g,%.17g\n", e.iter, e.cost, e.volume, e.beta);
    std::fclose(fp);
}

json report_json(const SolveReport& r) {
    return json{{"iterations", r.iterations}, {"residual", r.residual}, {"converged", r.converged}};
}

void write_summary(const std::filesystem::path& out_dir, json summary) {
    std::ofstream out(out_dir / "summary.json");
    out << summary.dump(2) << "\n";
}

struct Context {
    json cfg;
    std::string config_hash;
    std::filesystem::path out;
    RunOptions opts;

    json base_summary(const std::string& command) const {
        return json{{"command", command}, {"version", kVersion}, {"config_hash", config_hash}};
    }
};

int cmd_dirichlet(Context& ctx) {
    GridSpec grid = parse_grid(ctx.cfg);
    ScalarField f = sample_field(parse_descriptor(need(ctx.cfg, "f"), "f"), grid);
    SolverOptions so = parse_solver(ctx.cfg);

    ScalarField u = ScalarField::zeros(grid);
    SolveReport report;
    if (ctx.cfg.contains("mu")) {
        const json& mj = ctx.cfg.at("mu");
        ScalarField muf = read_field_csv(need_str(mj, "csv"), grid);
        CapacitaryPotential mu = CapacitaryPotential::zeros(grid);
        for (int k = 0; k < grid.cell_count(); ++k) {
            if (std::isinf(muf.values[k]))
                mu.infinite[k] = 1;
            else
                mu.mu[k] = muf.values[k];
        }
        std::tie(u, report) = solve_relaxed(mu, f, so);
    } else {
        DomainMask mask = parse_mask(ctx.cfg, grid, "mask");
        std::tie(u, report) = solve_dirichlet(mask, f, so);
    }
    write_field_csv((ctx.out / "u.csv").string(), u);
    json s = ctx.base_summary("dirichlet");
    s["report"] = report_json(report);
    write_summary(ctx.out, s);
    return report.converged ? kExitOk : kExitSolverFailure;
}

int cmd_obstacle(Context& ctx) {
    GridSpec grid = parse_grid(ctx.cfg);
    ScalarField g = sample_field(parse_descriptor(need(ctx.cfg, "g"), "g"), grid);
    SolverOptions so = parse_solver(ctx.cfg);
    ObstacleOptions oo;
    oo.tol = so.tol;
    if (ctx.cfg.contains("solver")) {
        oo.omega = opt_num(ctx.cfg.at("solver"), "omega", oo.omega);
        oo.max_sweeps = opt_int(ctx.cfg.at("solver"), "max_iter", 0);
    }

    auto [v, report] = solve_obstacle(g, oo);
    double floor = default_active_floor(g, oo.tol);
    DomainMask act = active_set(v, floor);
    ComplementarityResidual r = complementarity_residual(v, g);

    write_field_csv((ctx.out / "u.csv").string(), v);
    write_mask_csv((ctx.out / "mask.csv").string(), act);
    json s = ctx.base_summary("obstacle");
    s["report"] = report_json(report);
    s["residuals"] = json{{"r1", r.r1}, {"r2", r.r2}, {"r3", r.r3}};
    s["floor"] = floor;
    s["volume"] = mask_volume(act);
    write_summary(ctx.out, s);
    return report.converged ? kExitOk : kExitSolverFailure;
}

int cmd_optimize(Context& ctx) {
    GridSpec grid = parse_grid(ctx.cfg);
    ScalarField f = sample_field(parse_descriptor(need(ctx.cfg, "f"), "f"), grid);
    ScalarField g = sample_field(parse_descriptor(need(ctx.cfg, "g"), "g"), grid);
    double vol_bound = need_num(ctx.cfg, "vol_bound");
    if (!(vol_bound > 0.0 && vol_bound < grid.box_volume()))
        throw ConfigError("key `vol_bound` must lie in (0, |D|)");

    OptimizeOptions oo;
    oo.tol = parse_solver(ctx.cfg).tol;
    if (ctx.cfg.contains("optimizer")) {
        const json& o = ctx.cfg.at("optimizer");
        if (o.contains("beta_ladder")) {
            oo.beta_ladder.clear();
            for (const auto& b : o.at("beta_ladder")) oo.beta_ladder.push_back(b.get<double>());
            if (oo.beta_ladder.empty()) throw ConfigError("key `optimizer.beta_ladder` must be non-empty");
        }
        oo.step_init = opt_num(o, "step", oo.step_init);
        oo.binarize_threshold = opt_num(o, "floor", oo.binarize_threshold);
        oo.seed = static_cast<std::uint64_t>(opt_int(o, "seed", 0));
        oo.max_steps_per_stage = opt_int(o, "max_steps_per_stage", oo.max_steps_per_stage);
    }

    OptimizationResult res = optimize_domain(f, g, vol_bound, oo);
    OptimalityResidual opt_res;
    if (res.mask.count() > 0) opt_res = optimality_residual(res, f, g, oo.tol);
    bool contained = containment_check(res.mask, f, g, vol_bound);

    write_mask_csv((ctx.out / "mask.csv").string(), res.mask);
    write_field_csv((ctx.out / "chi.csv").string(), res.chi);
    write_history_csv((ctx.out / "history.csv").string(), res.history);
    json s = ctx.base_summary("optimize");
    s["cost"] = res.cost_value;
    s["volume"] = res.volume;
    s["saturated"] = res.saturated;
    s["stationarity"] = res.stationarity;
    s["spread"] = opt_res.spread;
    s["zero_resid"] = opt_res.zero_resid;
    s["containment"] = contained;
    write_summary(ctx.out, s);
    return res.solver_failed ? kExitSolverFailure : kExitOk;
}

int cmd_radial(Context& ctx) {
    int d = 2;
    if (ctx.cfg.contains("grid")) d = need_int(ctx.cfg.at("grid"), "d");
    if (ctx.cfg.contains("d")) d = need_int(ctx.cfg, "d");
    if (d < 1) throw ConfigError("key `d` must be positive");
    RadialProfile g = profile_from_descriptor(parse_descriptor(need(ctx.cfg, "g"), "g"), d);

    OptimalBall ball = optimal_ball(g, d);
    json s = ctx.base_summary("radial");
    if (ball.r_g.infinite)
        s["R_g"] = "inf";
    else
        s["R_g"] = ball.r_g.value;
    s["R_opt"] = ball.radius;
    s["volume"] = ball.volume;
    s["cost"] = ball.cost;
    s["saturated"] = ball.saturated;
    write_summary(ctx.out, s);
    return kExitOk;
}

int cmd_rearrange(Context& ctx) {
    GridSpec grid = parse_grid(ctx.cfg);
    DomainMask mask = parse_mask(ctx.cfg, grid, "mask");
    if (mask.count() == 0) throw std::invalid_argument("rearrange: mask must be non-empty");
    int bins = opt_int(ctx.cfg, "bins", 64);
    if (bins < 16) throw ConfigError("key `bins` must be at least 16");
    SolverOptions so = parse_solver(ctx.cfg);

    double gap = talenti_gap(mask, so.tol, bins);
    TalentiCoefficient coeff = talenti_coefficient(mask, bins, so.tol);
    write_profile_csv((ctx.out / "profile.csv").string(), coeff);

    double min_a = 0.0;
    for (const auto& lev : coeff.levels) min_a = std::min(min_a, lev.a);
    json s = ctx.base_summary("rearrange");
    s["talenti_gap"] = gap;
    s["levels"] = coeff.levels.size();
    s["skipped_levels"] = coeff.skipped_levels.size();
    s["min_coefficient"] = min_a;
    s["rho0"] = coeff.rho0;
    s["volume"] = mask_volume(mask);
    write_summary(ctx.out, s);
    return kExitOk;
}

Ensemble parse_ensemble(const json& cfg, const GridSpec& grid) {
    const json& e = need(cfg, "ensemble");
    Ensemble P;
    P.grid = grid;
    if (e.contains("members")) {
        for (const auto& m : e.at("members")) {
            double w = need_num(m, "weight");
            ScalarField f = sample_field(parse_descriptor(need(m, "field"), "ensemble.members.field"), grid);
            P.members.emplace_back(w, std::move(f));
        }
    } else if (e.contains("sampler")) {
        const json& sj = e.at("sampler");
        ScalarField f0 = sample_field(parse_descriptor(need(sj, "f0"), "ensemble.sampler.f0"), grid);
        double sigma = need_num(sj, "sigma");
        int count = need_int(sj, "count");
        int seed = need_int(sj, "seed");
        P = gaussian_ensemble(f0, sigma, count, static_cast<std::uint64_t>(seed));
    } else {
        throw ConfigError("key `ensemble` must contain members or sampler");
    }
    try {
        P.validate();
    } catch (const std::invalid_argument& e2) {
        throw ConfigError(std::string("ensemble: ") + e2.what());
    }
    return P;
}

int cmd_stochastic(Context& ctx) {
    GridSpec grid = parse_grid(ctx.cfg);
    ScalarField g = sample_field(parse_descriptor(need(ctx.cfg, "g"), "g"), grid);
    DomainMask mask = parse_mask(ctx.cfg, grid, "mask");
    SolverOptions so = parse_solver(ctx.cfg);
    Ensemble P = parse_ensemble(ctx.cfg, grid);

    double avg = averaged_cost(P, mask, g, so, ctx.opts.threads);
    double gap = reduction_gap(P, mask, g, so, ctx.opts.threads);
    double bc = cost(mask, barycenter(P), g, so);

    json s = ctx.base_summary("stochastic");
    s["averaged_cost"] = avg;
    s["barycenter_cost"] = bc;
    s["reduction_gap"] = gap;
    s["members"] = P.members.size();
    write_summary(ctx.out, s);
    return kExitOk;
}

// ---- verify: the property battery at a preset resolution ----

struct Check {
    std::string name;
    double value = 0.0;
    double threshold = 0.0;
    bool pass = false;
};

DomainMask random_mask(const GridSpec& grid, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> U(0.0, 1.0);
    DomainMask m = DomainMask::empty(grid);
    // union of two random balls and one random rectangle
    for (int rep = 0; rep < 2; ++rep) {
        std::array<double, 2> c{grid.side * (0.2 + 0.6 * U(rng)), grid.side * (0.2 + 0.6 * U(rng))};
        double r = grid.side * (0.08 + 0.2 * U(rng));
        DomainMask b = ball_mask(grid, c, r);
        for (int k = 0; k < grid.cell_count(); ++k) m.inside[k] |= b.inside[k];
    }
    double x0 = grid.side * 0.5 * U(rng), x1 = x0 + grid.side * (0.1 + 0.3 * U(rng));
    double y0 = grid.side * 0.5 * U(rng), y1 = y0 + grid.side * (0.1 + 0.3 * U(rng));
    for (int k = 0; k < grid.cell_count(); ++k) {
        auto p = grid.center(k);
        if (p[0] >= x0 && p[0] <= x1 && (grid.d == 1 || (p[1] >= y0 && p[1] <= y1))) m.inside[k] = 1;
    }
    if (m.count() == 0) m.inside[grid.cell_count() / 2] = 1;
    return m;
}

ScalarField random_field(const GridSpec& grid, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    ScalarField f = ScalarField::zeros(grid);
    for (double& v : f.values) v = U(rng);
    return f;
}

int cmd_verify(Context& ctx) {
    int n = 64;
    if (ctx.opts.preset == "small") n = 32;
    if (ctx.opts.preset == "medium") n = 64;
    if (ctx.opts.preset == "large") n = 128;
    if (ctx.cfg.contains("grid")) n = need_int(ctx.cfg.at("grid"), "n");
    GridSpec grid = make_grid(2, 1.0, n);
    const double tol = 1e-12;
    std::mt19937_64 rng(20240817);
    std::vector<Check> checks;

    auto push = [&](const std::string& name, double value, double threshold) {
        checks.push_back({name, value, threshold, value <= threshold});
    };

    {  // resolvent self-adjointness on random data
        double worst = 0.0;
        for (int rep = 0; rep < 5; ++rep) {
            DomainMask m = random_mask(grid, rng);
            ScalarField f = random_field(grid, rng), g = random_field(grid, rng);
            double lhs = cost(m, f, g, {.tol = tol});
            double rhs = cost(m, g, f, {.tol = tol});
            worst = std::max(worst, std::abs(lhs - rhs) / (field_l2_norm(f) * field_l2_norm(g)));
        }
        push("self_adjoint", worst, 10.0 * tol);
    }
    {  // discrete maximum principle
        ScalarField f = random_field(grid, rng);
        for (double& v : f.values) v = std::abs(v);
        auto [u, rep] = solve_dirichlet(DomainMask::full(grid), f, {.tol = tol});
        double worst = 0.0;
        for (double v : u.values) worst = std::max(worst, -v);
        push("max_principle", worst, 10.0 * tol * field_l2_norm(f));
    }
    {  // domain monotonicity for f >= 0
        DomainMask m2 = random_mask(grid, rng);
        DomainMask m1 = m2;
        for (int k = 0; k < grid.cell_count(); ++k)
            if (k % 7 == 0) m1.inside[k] = 0;
        ScalarField f = random_field(grid, rng);
        for (double& v : f.values) v = std::abs(v);
        auto [u1, r1] = solve_dirichlet(m1, f, {.tol = tol});
        auto [u2, r2] = solve_dirichlet(m2, f, {.tol = tol});
        double worst = 0.0;
        for (int k = 0; k < grid.cell_count(); ++k) worst = std::max(worst, u1.values[k] - u2.values[k]);
        push("domain_monotonicity", worst, 10.0 * tol * field_l2_norm(f));
    }
    {  // resolvent linearity
        DomainMask m = random_mask(grid, rng);
        ScalarField f1 = random_field(grid, rng), f2 = random_field(grid, rng);
        ScalarField combo = ScalarField::zeros(grid);
        for (int k = 0; k < grid.cell_count(); ++k) combo.values[k] = 0.3 * f1.values[k] - 1.7 * f2.values[k];
        auto [ua, ra] = solve_dirichlet(m, combo, {.tol = tol});
        auto [u1, r1] = solve_dirichlet(m, f1, {.tol = tol});
        auto [u2, r2] = solve_dirichlet(m, f2, {.tol = tol});
        double worst = 0.0;
        for (int k = 0; k < grid.cell_count(); ++k)
            worst = std::max(worst, std::abs(ua.values[k] - (0.3 * u1.values[k] - 1.7 * u2.values[k])));
        push("linearity", worst, 100.0 * tol * (field_l2_norm(f1) + field_l2_norm(f2)));
    }
    {  // gamma distance: symmetry and triangle inequality
        CapacitaryPotential mu1 = CapacitaryPotential::from_mask(random_mask(grid, rng));
        CapacitaryPotential mu2 = CapacitaryPotential::from_mask(random_mask(grid, rng));
        CapacitaryPotential mu3 = CapacitaryPotential::uniform(grid, 5.0);
        double d12 = gamma_distance(mu1, mu2, {.tol = tol});
        double d21 = gamma_distance(mu2, mu1, {.tol = tol});
        double d13 = gamma_distance(mu1, mu3, {.tol = tol});
        double d32 = gamma_distance(mu3, mu2, {.tol = tol});
        push("gamma_symmetry", std::abs(d12 - d21), 0.0);
        push("gamma_triangle", d12 - d13 - d32, 10.0 * tol);
    }
    {  // torsion/measure round-trip on a smooth potential
        CapacitaryPotential mu = CapacitaryPotential::zeros(grid);
        for (int k = 0; k < grid.cell_count(); ++k) {
            auto p = grid.center(k);
            mu.mu[k] = 30.0 + 20.0 * std::sin(4.0 * p[0]) * std::cos(3.0 * p[1]);
        }
        auto [w, repw] = torsion(mu, {.tol = tol});
        CapacitaryPotential rec = reconstruct_measure(w, 1e-14);
        double worst = 0.0;
        int margin = std::max(2, grid.n / 16);
        for (int i = margin; i < grid.n - margin; ++i)
            for (int j = margin; j < grid.n - margin; ++j) {
                int k = i * grid.n + j;
                worst = std::max(worst, std::abs(rec.mu[k] - mu.mu[k]) / mu.mu[k]);
            }
        push("measure_roundtrip", worst, 50.0 * grid.h * grid.h);
    }
    {  // stochastic reduction identity
        DomainMask m = random_mask(grid, rng);
        ScalarField g = random_field(grid, rng);
        Ensemble P = gaussian_ensemble(random_field(grid, rng), 0.5, 5, 7);
        double gap = reduction_gap(P, m, g, {.tol = tol});
        double scale = 0.0;
        for (const auto& [w, fm] : P.members) scale += w * field_l2_norm(fm);
        push("reduction_identity", gap, 10.0 * tol * scale * field_l2_norm(g));
    }
    {  // rearrangement: equimeasurability and monotonicity
        DomainMask m = random_mask(grid, rng);
        auto [u, repu] = solve_dirichlet(m, ScalarField::constant(grid, 1.0), {.tol = tol});
        for (double& v : u.values) v = std::max(v, 0.0);
        const int bins = 64;
        RadialProfile star = schwarz_rearrange(u, bins);
        double max_u = *std::max_element(u.values.begin(), u.values.end());
        double worst = 0.0;
        for (int k = 0; k < bins; ++k) {
            double t = max_u * k / bins;
            int count = 0;
            for (double v : u.values) count += v > t ? 1 : 0;
            // measure of {u* > t} from the profile nodes
            double rho = 0.0;
            for (const auto& node : star.samples)
                if (node[1] > t) rho = std::max(rho, node[0]);
            double m_star = unit_ball_volume(grid.d) * std::pow(rho, grid.d);
            worst = std::max(worst, std::abs(m_star - grid.cell_volume() * count));
        }
        push("equimeasurability", worst, grid.cell_volume() * 1.0001);
        double monotone = 0.0;
        for (std::size_t i = 1; i < star.samples.size(); ++i)
            monotone = std::max(monotone, star.samples[i][1] - star.samples[i - 1][1]);
        push("rearranged_monotone", monotone, 0.0);
    }
    {  // radial stationarity of the explicit example
        RadialProfile g = RadialProfile::indicator(0.2, -1.0, 1.0);
        OptimalBall ball = optimal_ball(g, 2);
        double eps = 1e-6;
        double fp = (radial_cost(RadialProfile::constant(0.0), g, ball.radius + eps, 2) -
                     radial_cost(RadialProfile::constant(0.0), g, ball.radius - eps, 2)) /
                    (2.0 * eps);
        push("radial_stationarity", std::abs(fp), 1e-8);
        push("radial_critical_radius", std::abs(ball.r_g.value - 0.2 * std::sqrt(2.0)), 1e-9);
    }
    {  // obstacle complementarity on the monotone case
        ScalarField g = ScalarField::constant(grid, -1.0);
        auto [v, repv] = solve_obstacle(g, {.tol = 1e-10});
        ComplementarityResidual r = complementarity_residual(v, g);
        push("obstacle_kkt", std::max({r.r1, r.r2, r.r3}), 10.0 * 1e-10);
    }

    bool all_pass = true;
    json arr = json::array();
    for (const auto& c : checks) {
        all_pass = all_pass && c.pass;
        arr.push_back({{"name", c.name}, {"value", c.value}, {"threshold", c.threshold}, {"pass", c.pass}});
        std::printf("[%s] %s  value=%.3e threshold=%.3e\n", c.pass ? "PASS" : "FAIL", c.name.c_str(), c.value,
                    c.threshold);
    }
    json s = ctx.base_summary("verify");
    s["n"] = n;
    s["checks"] = arr;
    s["all_pass"] = all_pass;
    {
        std::ofstream out(ctx.out / "verify.json");
        out << s.dump(2) << "\n";
    }
    write_summary(ctx.out, s);
    return all_pass ? kExitOk : kExitVerifyFailed;
}

}  // namespace

int run(const std::string& command, const std::string& config_path, const std::string& out_dir,
        const RunOptions& opts) {
    Context ctx;
    ctx.opts = opts;
    try {
        std::ifstream in(config_path);
        if (!in) {
            std::fprintf(stderr, "invalid config: cannot open `%s`\n", config_path.c_str());
            return kExitBadConfig;
        }
        std::stringstream buf;
        buf << in.rdbuf();
        ctx.config_hash = fnv1a_hex(buf.str());
        ctx.cfg = json::parse(buf.str());
        ctx.out = out_dir;
        std::filesystem::create_directories(ctx.out);

        if (command == "dirichlet") return cmd_dirichlet(ctx);
        if (command == "obstacle") return cmd_obstacle(ctx);
        if (command == "optimize") return cmd_optimize(ctx);
        if (command == "radial") return cmd_radial(ctx);
        if (command == "rearrange") return cmd_rearrange(ctx);
        if (command == "stochastic") return cmd_stochastic(ctx);
        if (command == "verify") return cmd_verify(ctx);
        std::fprintf(stderr, "invalid config: unknown command `%s`\n", command.c_str());
        return kExitBadConfig;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "invalid config: %s\n", e.what());
        return kExitBadConfig;
    } catch (const json::exception& e) {
        std::fprintf(stderr, "invalid config: %s\n", e.what());
        return kExitBadConfig;
    } catch (const SolveFailure& e) {
        std::fprintf(stderr, "solver failure: %s\n", e.what());
        return kExitSolverFailure;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "precondition violation: %s\n", e.what());
        return kExitPrecondition;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "invalid config: %s\n", e.what());
        return kExitBadConfig;
    }
}

}  // namespace signshape
