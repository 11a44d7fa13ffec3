#pragma once

#include "critdecay/potentials.hpp"
#include "critdecay/radial.hpp"

#include <complex>
#include <functional>
#include <string>
#include <vector>

namespace critdecay {

struct ResolventQuery {
    std::complex<double> z;
    double nu = 0.0;
    RadialFunction rhs;
};

/// Numerov discretization of −v'' + (ν² + r²(V + z²)) v = r^{2+λ} f in
/// t = ln r with v = r^λ u. Inner closure v₋₁ = e^{−νh} v₀, outer closure
/// v_N = e^{−h√q} v_{N−1}.
struct ChannelSystem {
    Eigen::VectorXcd sub, diag, sup, rhs;
};

ChannelSystem assemble_channel_system(const ResolventQuery& query,
                                      const std::function<double(double)>& V_radial,
                                      const RadialGrid& grid);

/// Solves (P_ν + z²) u = f on one channel. Throws on a solve residual above
/// 1e−8 or a solution that does not decay toward rmax.
RadialFunction solve_helmholtz_channel(const ResolventQuery& query,
                                       const std::function<double(double)>& V_radial,
                                       const RadialGrid& grid);

/// ‖Ω⁻¹u‖ / ‖Ωf‖.
double channel_ratio(const RadialFunction& u, const RadialFunction& f);

struct SampleProfile {
    std::string label;
    std::function<double(double)> f;
};

/// Gaussian bump exp(−(r−c)²/(2(c/4)²)), labelled "bump_<c>".
SampleProfile bump_sample(double center);

/// Gaussian bumps exp(−(r−c)²/(2(c/4)²)) at c ∈ {0.1, 1, 10}.
std::vector<SampleProfile> default_f_samples();

/// |z| ∈ {0.1, 1, 10} × arg z ∈ {0, ±0.5, ±1.0, ±1.4, acos(0.01)}: 24 points.
std::vector<std::complex<double>> default_z_set();

/// Bessel orders of the channels probed for V (lowest `count`), with the
/// radial profile that enters the channel equation (empty for homogeneous V).
struct ChannelOrders {
    std::vector<double> nu;
    std::function<double(double)> V_radial;
};

ChannelOrders channel_orders(const Potential& V, int count = 7, int sphere_lmax = 40);

double weighted_resolvent_ratio(const Potential& V, std::complex<double> z,
                                const std::vector<SampleProfile>& f_samples, const RadialGrid& grid);

struct ResolventEntry {
    std::complex<double> z;
    double nu = 0.0;
    int sample = 0;
    double ratio = 0.0;
};

struct ResolventReport {
    std::vector<ResolventEntry> entries;
    double sup_ratio = 0.0;
    double bound = 0.0;        ///< 1/(2δ²)
    double bound_sharp = 0.0;  ///< 1/δ², the z → 0 channel norm
    double delta_sq = 0.0;
    double tol = 0.05;
    bool passed = false;
    double rmin = 0.0, rmax = 0.0;
    Eigen::Index N = 0;
    double truncation_sensitivity = 0.0; ///< max relative ratio change on [rmin, rmax/2]
};

ResolventReport resolvent_scan(const Potential& V, const std::vector<std::complex<double>>& z_set,
                               const std::vector<SampleProfile>& f_samples, const RadialGrid& grid,
                               bool truncation_check = true);

/// ψ(r) = e^{−σr}(1+2σr)^{1/2} with closed-form derivatives.
struct PsiSpec {
    double sigma = 0.0;
    double value(double r) const;
    double d1(double r) const;
    double d2(double r) const;
};

double psi_identity_residual(double sigma, double r);

struct WeightedHardyResult {
    double lhs = 0.0;
    double rhs = 0.0;
    bool preconditions_met = true;
    std::string message;
};

/// lhs = ∫ψ²|f|²r⁻² dr, rhs = 4∫ψ²|f'|² dr on the 1D measure dr.
WeightedHardyResult weighted_hardy_check(const PsiSpec& psi, const RadialFunction& f);

} // namespace critdecay
