#pragma once

#include <string>
#include <vector>

#include "signshape/poisson.hpp"
#include "signshape/radial.hpp"

namespace signshape {

/// Radially decreasing (Schwarz) rearrangement of a nonnegative grid field,
/// built by the layer-cake construction over `bins` uniform levels: the
/// profile value at radius rho(t) = (|{u > t}| / omega_d)^{1/d} is t, and
/// repeated measures (plateaus of u) are merged keeping the highest level.
RadialProfile schwarz_rearrange(const ScalarField& u, int bins);

/// Max over levels t and radii of u*(r) - t - w_t(r), where w_t is the
/// torsion function of the ball of measure |{u > t}| in closed form and
/// u is the torsion function of the mask. Nonpositive up to O(h).
double talenti_gap(const DomainMask& mask, double tol, int bins);

struct TalentiLevel {
    double t = 0.0;
    double rho = 0.0;     // radius of {u* > t}
    double measure = 0.0; // |{u > t}|
    double u_star_slope = 0.0;
    double a = 0.0;       // |Omega_t| / (d omega_d rho^{d-1} |u*'(rho)|) - 1
};

struct TalentiCoefficient {
    std::vector<TalentiLevel> levels;
    std::vector<double> skipped_levels;  // plateaus where u*' vanished
    RadialProfile a_of_r;                // a as a function of radius, for the radial state
    RadialProfile u_star;
    double rho0 = 0.0;                   // radius of the full rearranged support
};

/// Coefficient a(t) of the rearranged equation -div((1+a(u*)) grad u*) = 1.
TalentiCoefficient talenti_coefficient(const DomainMask& mask, int bins, double tol = 1e-10);

/// CSV rows `t,rho,u_star,a`.
void write_profile_csv(const std::string& path, const TalentiCoefficient& coeff);

}
