#include "signshape/grid.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace signshape {

GridSpec make_grid(int d, double side, int n) {
    if (d != 1 && d != 2) throw std::invalid_argument("make_grid: d must be 1 or 2");
    if (!(side > 0.0)) throw std::invalid_argument("make_grid: side must be positive");
    if (n < 4) throw std::invalid_argument("make_grid: n must be at least 4");
    GridSpec g;
    g.d = d;
    g.side = side;
    g.n = n;
    g.h = side / n;
    return g;
}

int DomainMask::count() const {
    int c = 0;
    for (auto b : inside) c += b ? 1 : 0;
    return c;
}

DomainMask ball_mask(const GridSpec& g, std::array<double, 2> center, double radius) {
    if (!(radius > 0.0)) throw std::invalid_argument("ball_mask: radius must be positive");
    DomainMask m = DomainMask::empty(g);
    for (int k = 0; k < g.cell_count(); ++k) {
        auto c = g.center(k);
        double dx = c[0] - center[0];
        double dy = g.d == 2 ? c[1] - center[1] : 0.0;
        m.inside[k] = (dx * dx + dy * dy <= radius * radius) ? 1 : 0;
    }
    return m;
}

double mask_volume(const DomainMask& mask) {
    return mask.grid.cell_volume() * mask.count();
}

DomainMask sublevel_mask(const ScalarField& field, double threshold, Relation relation) {
    DomainMask m = DomainMask::empty(field.grid);
    for (std::size_t k = 0; k < field.values.size(); ++k) {
        double v = field.values[k];
        bool in = false;
        switch (relation) {
            case Relation::Greater: in = v > threshold; break;
            case Relation::Less: in = v < threshold; break;
            case Relation::GreaterEqual: in = v >= threshold; break;
            case Relation::LessEqual: in = v <= threshold; break;
        }
        m.inside[k] = in ? 1 : 0;
    }
    return m;
}

namespace {

double eval_radial_table(const RadialTableDesc& t, double r) {
    const auto& s = t.samples;
    if (s.empty()) throw std::invalid_argument("radial_table: no samples");
    if (r <= s.front()[0]) return s.front()[1];
    if (r >= s.back()[0]) return s.back()[1];
    // nodes are strictly increasing
    std::size_t lo = 0, hi = s.size() - 1;
    while (hi - lo > 1) {
        std::size_t mid = (lo + hi) / 2;
        (s[mid][0] <= r ? lo : hi) = mid;
    }
    double w = (r - s[lo][0]) / (s[hi][0] - s[lo][0]);
    return s[lo][1] + w * (s[hi][1] - s[lo][1]);
}

void validate_descriptor(const FieldDescriptor& desc) {
    if (const auto* b = std::get_if<IndicatorBallDesc>(&desc)) {
        if (!(b->radius > 0.0)) throw std::invalid_argument("indicator_ball: radius must be positive");
    } else if (const auto* ga = std::get_if<GaussianDesc>(&desc)) {
        if (!(ga->sigma > 0.0)) throw std::invalid_argument("gaussian: sigma must be positive");
    } else if (const auto* t = std::get_if<RadialTableDesc>(&desc)) {
        if (t->samples.empty()) throw std::invalid_argument("radial_table: no samples");
        for (std::size_t i = 1; i < t->samples.size(); ++i)
            if (!(t->samples[i][0] > t->samples[i - 1][0]))
                throw std::invalid_argument("radial_table: r samples must be strictly increasing");
    }
}

}  // namespace

ScalarField sample_field(const FieldDescriptor& desc, const GridSpec& grid) {
    validate_descriptor(desc);
    if (const auto* c = std::get_if<CsvDesc>(&desc)) return read_field_csv(c->path, grid);

    ScalarField f = ScalarField::zeros(grid);
    const double cx = grid.side / 2.0;
    for (int k = 0; k < grid.cell_count(); ++k) {
        auto p = grid.center(k);
        double v = 0.0;
        if (const auto* cd = std::get_if<ConstantDesc>(&desc)) {
            v = cd->value;
        } else if (const auto* b = std::get_if<IndicatorBallDesc>(&desc)) {
            double dx = p[0] - b->center[0];
            double dy = grid.d == 2 ? p[1] - b->center[1] : 0.0;
            v = (dx * dx + dy * dy <= b->radius * b->radius) ? b->inside_value : b->outside_value;
        } else if (const auto* t = std::get_if<RadialTableDesc>(&desc)) {
            double dx = p[0] - cx;
            double dy = grid.d == 2 ? p[1] - cx : 0.0;
            v = eval_radial_table(*t, std::sqrt(dx * dx + dy * dy));
        } else if (const auto* ga = std::get_if<GaussianDesc>(&desc)) {
            double dx = p[0] - ga->center[0];
            double dy = grid.d == 2 ? p[1] - ga->center[1] : 0.0;
            v = ga->amplitude * std::exp(-(dx * dx + dy * dy) / (2.0 * ga->sigma * ga->sigma));
        }
        f.values[k] = v;
    }
    return f;
}

namespace {

void write_rows(std::FILE* fp, const GridSpec& g, const std::vector<double>& vals, bool as_mask) {
    if (g.d == 1) {
        std::fprintf(fp, "i,x,value\n");
        for (int i = 0; i < g.n; ++i) {
            if (as_mask)
                std::fprintf(fp, "%d,%.17g,%d\n", i, (i + 0.5) * g.h, vals[i] > 0.5 ? 1 : 0);
            else
                std::fprintf(fp, "%d,%.17g,%.17g\n", i, (i + 0.5) * g.h, vals[i]);
        }
        return;
    }
    std::fprintf(fp, "i,j,x,y,value\n");
    for (int i = 0; i < g.n; ++i) {
        for (int j = 0; j < g.n; ++j) {
            int k = i * g.n + j;
            if (as_mask)
                std::fprintf(fp, "%d,%d,%.17g,%.17g,%d\n", i, j, (i + 0.5) * g.h, (j + 0.5) * g.h,
                             vals[k] > 0.5 ? 1 : 0);
            else
                std::fprintf(fp, "%d,%d,%.17g,%.17g,%.17g\n", i, j, (i + 0.5) * g.h, (j + 0.5) * g.h, vals[k]);
        }
    }
}

std::vector<double> read_rows(const std::string& path, const GridSpec& g) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open csv file: " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty csv file: " + path);
    const std::string want = g.d == 1 ? "i,x,value" : "i,j,x,y,value";
    // tolerate trailing carriage returns
    while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.pop_back();
    if (line != want) throw std::runtime_error("csv header mismatch in " + path + ": expected " + want);

    std::vector<double> vals(g.cell_count(), 0.0);
    std::vector<bool> seen(g.cell_count(), false);
    int rows = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string tok;
        std::vector<double> fields;
        while (std::getline(ss, tok, ',')) fields.push_back(std::stod(tok));
        const std::size_t want_n = g.d == 1 ? 3 : 5;
        if (fields.size() != want_n) throw std::runtime_error("csv row with wrong arity in " + path);
        int k;
        if (g.d == 1) {
            k = static_cast<int>(fields[0]);
        } else {
            k = static_cast<int>(fields[0]) * g.n + static_cast<int>(fields[1]);
        }
        if (k < 0 || k >= g.cell_count()) throw std::runtime_error("csv index out of range in " + path);
        double v = fields.back();
        if (!std::isfinite(v)) throw std::runtime_error("csv value not finite in " + path);
        vals[k] = v;
        seen[k] = true;
        ++rows;
    }
    if (rows != g.cell_count()) throw std::runtime_error("csv row count mismatch in " + path);
    for (bool s : seen)
        if (!s) throw std::runtime_error("csv missing cells in " + path);
    return vals;
}

}  // namespace

void write_field_csv(const std::string& path, const ScalarField& field) {
    std::FILE* fp = std::fopen(path.c_str(), "w");
    if (!fp) throw std::runtime_error("cannot write csv file: " + path);
    write_rows(fp, field.grid, field.values, false);
    std::fclose(fp);
}

ScalarField read_field_csv(const std::string& path, const GridSpec& grid) {
    return {grid, read_rows(path, grid)};
}

void write_mask_csv(const std::string& path, const DomainMask& mask) {
    std::FILE* fp = std::fopen(path.c_str(), "w");
    if (!fp) throw std::runtime_error("cannot write csv file: " + path);
    std::vector<double> vals(mask.inside.begin(), mask.inside.end());
    write_rows(fp, mask.grid, vals, true);
    std::fclose(fp);
}

DomainMask read_mask_csv(const std::string& path, const GridSpec& grid) {
    auto vals = read_rows(path, grid);
    DomainMask m = DomainMask::empty(grid);
    for (int k = 0; k < grid.cell_count(); ++k) m.inside[k] = vals[k] > 0.5 ? 1 : 0;
    return m;
}

double field_l2_norm(const ScalarField& f) {
    double s = 0.0;
    for (double v : f.values) s += v * v;
    return std::sqrt(s * f.grid.cell_volume());
}

}  // namespace signshape
