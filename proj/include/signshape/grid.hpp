#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace signshape {

/// Uniform cell-centered grid on the box D = [0, side]^d, d in {1, 2}.
/// Cell (i) or (i, j) has center ((i+1/2)h) resp. ((i+1/2)h, (j+1/2)h),
/// linear index i (d=1) or i*n + j (d=2, row-major).
struct GridSpec {
    int d = 2;
    double side = 1.0;
    int n = 4;
    double h = 0.25;

    int cell_count() const { return d == 1 ? n : n * n; }
    double cell_volume() const { return d == 1 ? h : h * h; }
    double box_volume() const { return d == 1 ? side : side * side; }

    std::array<double, 2> center(int k) const {
        if (d == 1) return {(k + 0.5) * h, 0.0};
        return {(k / n + 0.5) * h, (k % n + 0.5) * h};
    }

    bool operator==(const GridSpec&) const = default;
};

GridSpec make_grid(int d, double side, int n);

/// One real value per cell; all entries finite.
struct ScalarField {
    GridSpec grid;
    std::vector<double> values;

    static ScalarField zeros(const GridSpec& g) { return {g, std::vector<double>(g.cell_count(), 0.0)}; }
    static ScalarField constant(const GridSpec& g, double c) { return {g, std::vector<double>(g.cell_count(), c)}; }
};

/// Boolean per cell; a discretized quasi-open subset of D.
struct DomainMask {
    GridSpec grid;
    std::vector<std::uint8_t> inside;

    static DomainMask empty(const GridSpec& g) { return {g, std::vector<std::uint8_t>(g.cell_count(), 0)}; }
    static DomainMask full(const GridSpec& g) { return {g, std::vector<std::uint8_t>(g.cell_count(), 1)}; }
    int count() const;
};

/// Ball mask {x : |x - center| <= radius} sampled at cell centers.
DomainMask ball_mask(const GridSpec& g, std::array<double, 2> center, double radius);

double mask_volume(const DomainMask& mask);

enum class Relation { Greater, Less, GreaterEqual, LessEqual };

DomainMask sublevel_mask(const ScalarField& field, double threshold, Relation relation);

// Config-level description of a field on D.
struct ConstantDesc { double value = 0.0; };
struct IndicatorBallDesc {
    std::array<double, 2> center{0.0, 0.0};
    double radius = 1.0;
    double inside_value = 1.0;
    double outside_value = 0.0;
};
struct RadialTableDesc {
    // (r, value) samples, r strictly increasing; evaluated about the box
    // center by linear interpolation, clamped at the ends.
    std::vector<std::array<double, 2>> samples;
};
struct GaussianDesc {
    std::array<double, 2> center{0.0, 0.0};
    double sigma = 1.0;
    double amplitude = 1.0;
};
struct CsvDesc { std::string path; };

using FieldDescriptor = std::variant<ConstantDesc, IndicatorBallDesc, RadialTableDesc, GaussianDesc, CsvDesc>;

ScalarField sample_field(const FieldDescriptor& desc, const GridSpec& grid);

// CSV formats: `i,j,x,y,value` for d=2, `i,x,value` for d=1, row-major,
// 17 significant digits. Masks use the same layout with value in {0,1}.
void write_field_csv(const std::string& path, const ScalarField& field);
ScalarField read_field_csv(const std::string& path, const GridSpec& grid);
void write_mask_csv(const std::string& path, const DomainMask& mask);
DomainMask read_mask_csv(const std::string& path, const GridSpec& grid);

/// Discrete L2(D) norm: h^{d/2} times the euclidean norm of the values.
double field_l2_norm(const ScalarField& f);

}
