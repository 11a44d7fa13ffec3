#pragma once

#include "critdecay/potentials.hpp"
#include "critdecay/radial.hpp"
#include "critdecay/sphere.hpp"

#include <Eigen/Dense>

#include <complex>
#include <functional>
#include <optional>
#include <vector>

namespace critdecay {

enum class Equation { schrodinger, wave };
enum class Method { hankel_spectral, crank_nicolson, leapfrog };

std::string to_string(Method m);
Method method_from_string(const std::string& s);

struct StrichartzQuery {
    double p = 2.0; ///< may be +inf
    double q = 2.0; ///< may be +inf
    Equation equation = Equation::schrodinger;
    double sigma_gap = 0.0;
};

StrichartzQuery admissible_pair(Equation equation, int n, double p);

/// Zonal channels of a potential: channel k is Φ_k = Σ_l C(l,k) Y_l in the
/// orthonormal zonal harmonic basis, with Bessel order ν_k.
struct ChannelSet {
    Dimension dimension;
    int lmax = 0;
    std::vector<double> nu;
    Eigen::MatrixXd coefficients; ///< C, (lmax+1) × K
    std::function<double(double)> V_radial;
    AngularQuadrature angles;     ///< 2·lmax+1 zonal nodes
};

ChannelSet channel_set(const Potential& V, int lmax = 8);

using DataFunction = std::function<std::complex<double>(double r, double x)>;

struct CauchyData {
    GridPtr grid;
    ChannelSet channels;
    Eigen::MatrixXcd f; ///< N × K channel coefficients
    Eigen::MatrixXcd g; ///< wave velocity, empty for Schrödinger
    double f_l2 = 0.0;
    double f_h_half = 0.0;       ///< ‖f‖_{Ḣ^{1/2}}, free basis
    double g_h_minus_half = 0.0; ///< ‖g‖_{Ḣ^{−1/2}}, free basis
};

CauchyData make_cauchy_data(const ChannelSet& channels, GridPtr grid, const DataFunction& f,
                            const DataFunction& g = nullptr);

/// Cauchy data given directly as N × K channel coefficients (g may be empty).
CauchyData make_channel_data(const ChannelSet& channels, GridPtr grid, const Eigen::MatrixXcd& f,
                             const Eigen::MatrixXcd& g = Eigen::MatrixXcd());

/// r^{ν₀−λ} e^{−r²/(2w²)} on the lowest channel; the plain Gaussian when V = 0.
Eigen::MatrixXcd ground_channel_gaussian(const ChannelSet& channels, const RadialGrid& grid, double width = 1.0);

/// Ḣ^{s} norm in the free basis (ν = λ + l), from channel coefficients.
double free_sobolev_norm(const ChannelSet& channels, const RadialGrid& grid, const Eigen::MatrixXcd& coeffs,
                         double s);
/// Same norm built on the channel orders of P (ν_k).
double operator_sobolev_norm(const ChannelSet& channels, const RadialGrid& grid, const Eigen::MatrixXcd& coeffs,
                             double s);

struct EvolutionOptions {
    Method method = Method::hankel_spectral;
    std::vector<StrichartzQuery> strichartz;
    int snapshots = 16;
};

struct EvolutionTrace {
    Equation equation = Equation::schrodinger;
    Method method = Method::hankel_spectral;
    double dt = 0.0;
    double T = 0.0;
    std::vector<double> times;
    std::vector<double> state_times;
    std::vector<Eigen::MatrixXcd> states; ///< N × K channel coefficients at state_times
    std::vector<double> mass;             ///< ‖u(t)‖_{L²}
    std::vector<double> hardy_sq;         ///< ‖Ω⁻¹u(t)‖²
    std::vector<double> energy;           ///< wave energy
    std::vector<StrichartzQuery> queries;
    std::vector<std::vector<double>> lq;  ///< ‖|∇|^σ u(t)‖_{L^q} per query
    std::vector<bool> sup_flag;           ///< q = ∞ replaced by the grid sup
    double data_l2 = 0.0;
    double data_h_half = 0.0;
    double data_h_minus_half = 0.0;

    double mass_drift() const;
    double energy_drift() const;
};

EvolutionTrace evolve_schrodinger(const Potential& V, const CauchyData& data, double T, double dt,
                                  const EvolutionOptions& options = {});
EvolutionTrace evolve_wave(const Potential& V, const CauchyData& data, double T, double dt,
                           const EvolutionOptions& options = {});

/// Composite Simpson on the trace's uniform times, up to the last even index
/// with time ≤ T (whole trace by default).
double time_integral(const std::vector<double>& times, const std::vector<double>& values,
                     std::optional<double> T = std::nullopt);

/// (∫₀^T ‖Ω⁻¹u‖² dt)^{1/2}.
double smoothing_norm(const EvolutionTrace& trace, std::optional<double> T = std::nullopt);

/// ‖u‖_{L^p_t L^q_x} over [0, T]; the query must have been recorded.
double strichartz_norm(const EvolutionTrace& trace, const StrichartzQuery& query);

} // namespace critdecay
