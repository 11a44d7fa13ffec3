#pragma once

#include "critdecay/dimension.hpp"
#include "critdecay/radial.hpp"
#include "critdecay/sphere.hpp"

#include <Eigen/Dense>

#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace critdecay {

enum class PotentialKind { zero, inverse_square, radial, homogeneous_angular, dipole };

std::string to_string(PotentialKind kind);

/// V(r) for the `radial` kind. `tilde` is −∂_r(rV); when empty it is
/// computed by a 5-point stencil with step r·1e−5.
struct RadialProfile {
    std::function<double(double)> value;
    std::function<double(double)> tilde;
    std::string label = "custom";
};

struct Potential {
    PotentialKind kind = PotentialKind::zero;
    Dimension dimension;
    double strength = 0.0;  ///< a for inverse_square, p for dipole
    RadialProfile radial;   ///< radial kind only
    AngularFunction angular = AngularFunction::constant(0.0); ///< r²V on the sphere, homogeneous kinds

    bool homogeneous() const { return kind != PotentialKind::radial; }
    /// V at radius r and direction (x = cos θ, φ).
    double operator()(double r, double x = 1.0, double phi = 0.0) const;
    /// r²V restricted to the sphere of radius r.
    AngularFunction on_sphere(double r) const;
};

/// Description read from a config file.
struct PotentialSpec {
    std::string kind = "zero";
    int n = 3;
    double a = 0.0;          ///< inverse_square strength, radial profile amplitude
    double p = 0.0;          ///< dipole moment
    std::string profile = "power"; ///< radial: "power" (a r^{−2−eps}) or "exp" (a e^{−r}/r²)
    double eps = 0.5;
    std::vector<double> legendre; ///< homogeneous_angular: r²V = Σ c_l P_l(cos θ)
};

Potential build_potential(const PotentialSpec& spec);

Potential zero_potential(Dimension dim);
Potential inverse_square(Dimension dim, double a);
Potential dipole_potential(double p);
Potential radial_potential(Dimension dim, RadialProfile profile);
Potential homogeneous_angular(Dimension dim, AngularFunction a);

Potential tilde_potential(const Potential& V);

/// Geometric sequence of `count` radii on [lo, hi].
std::vector<double> default_radii(int count = 61, double lo = 1e-3, double hi = 1e3);

struct A1Result {
    double gamma_plus_sq = 0.0;
    double gamma_minus_sq = 0.0;
    bool finite = true;
};

A1Result check_A1(const Potential& V, const std::vector<double>& radii, int lmax = 40);

struct PositivityResult {
    double delta_sq = 0.0;
    std::vector<double> radii;
    std::vector<double> per_radius_min; ///< lowest eigenvalue of −Δ̸ + r²V(r·)
    double convergence_estimate = 0.0;
    bool converged = true;
};

PositivityResult check_positivity(const Potential& V, int lmax, const std::vector<double>& radii);

struct AssumptionReport {
    double gamma_plus_sq = 0.0;
    double gamma_minus_sq = 0.0;
    double delta_sq_A2 = 0.0;
    double delta_sq_A3 = 0.0;
    double c1 = 0.0;
    double c2 = std::numeric_limits<double>::infinity();
    bool passed = false;
    std::vector<double> radii_sampled;
    std::vector<std::string> diagnostics;
    PositivityResult positivity_A2;
    PositivityResult positivity_A3;
};

AssumptionReport assumption_report(const Potential& V, int lmax = 40,
                                   const std::vector<double>& radii = default_radii());

/// Quadratic forms of a zonal test function u(r, x) = Σ_l u_l(r) Y_l(x),
/// given by its coefficients (grid size × (lmax+1)) in the orthonormal zonal
/// harmonic basis. Supports zonal homogeneous and radial potentials.
struct EnergyForms {
    double q = 0.0;           ///< Q(u) = ‖∇u‖² + ⟨Vu, u⟩
    double gradient_sq = 0.0; ///< ‖∇u‖²
    double hardy_sq = 0.0;    ///< ‖Ω⁻¹u‖²
};

EnergyForms energy_forms(const Potential& V, const RadialGrid& grid, const Eigen::MatrixXcd& coeffs);

} // namespace critdecay
