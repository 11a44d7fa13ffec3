#pragma once

#include <Eigen/Dense>

#include <complex>
#include <functional>
#include <memory>
#include <optional>

namespace critdecay {

/// Log-spaced radial mesh r_i = rmin·e^{i h}, i = 0..N−1, with weights for
/// ∫ · r^{n−1} dr (trapezoid in t = ln r, endpoint weights corrected so that
/// ∫ 1 is exact).
struct RadialGrid {
    double rmin = 0.0;
    double rmax = 0.0;
    int n = 3;
    double step = 0.0; ///< h in t = ln r
    Eigen::VectorXd nodes;
    Eigen::VectorXd weights;

    Eigen::Index size() const { return nodes.size(); }
    double t0() const { return std::log(rmin); }
    bool same_as(const RadialGrid& other) const;
};

using GridPtr = std::shared_ptr<const RadialGrid>;

GridPtr make_log_grid(double rmin, double rmax, int N, int n);

/// Same nodes as `grid` but with weights for dimension n.
GridPtr with_dimension(const RadialGrid& grid, int n);

struct RadialFunction {
    GridPtr grid;
    Eigen::VectorXcd values;
    std::optional<double> channel;

    static RadialFunction sample(GridPtr grid, const std::function<std::complex<double>(double)>& f,
                                 std::optional<double> channel = std::nullopt);
    static RadialFunction zeros(GridPtr grid, std::optional<double> channel = std::nullopt);
};

/// ‖Ω^s f‖ over r^{n−1} dr.
double weighted_l2_norm(const RadialFunction& f, double s);

/// d/dt on a uniform t-mesh: 4th-order central stencil inside, 2nd order
/// one node from each end, one-sided 2nd order at the ends.
Eigen::VectorXcd log_derivative(const Eigen::VectorXcd& v, double h);

/// ∂_r f on the grid.
Eigen::VectorXcd radial_derivative(const RadialFunction& f);

struct HardyResult {
    double ratio = 0.0;  ///< ‖Ω⁻¹u‖² / ‖∂_r u‖²
    double bound = 0.0;  ///< (2/(n−2))²
    bool decay_ok = true;
    double endpoint_density = 0.0; ///< largest relative endpoint density
};

/// Decay is judged on the t-densities |r^{n/2−1}u|² and |r^{n/2}u'|² at both
/// ends, which must be below 1e−8 of their maxima.
HardyResult hardy_ratio(const RadialFunction& u, int n);

/// Unitary coordinates g_i = √h · r_i^{n/2} f_i (Euclidean norm = L² norm).
Eigen::VectorXcd to_unitary(const RadialFunction& f);
RadialFunction from_unitary(GridPtr grid, const Eigen::VectorXcd& g,
                            std::optional<double> channel = std::nullopt);

/// Discrete H_ν acting on unitary coordinates of a log grid. The transform is
/// the Mellin multiplier 2^{iy}Γ((ν+1+iy)/2)/Γ((ν+1−iy)/2) sampled on the
/// grid's frequencies, composed with t ↦ −t; for bias = 0 it is a real
/// symmetric orthogonal matrix.
///
/// With bias q the input is taken as e^{q t}·p(t) and the output is returned
/// as e^{−q t}·P(t); the multiplier is continued to y − iq.
class HankelOperator {
public:
    HankelOperator(const RadialGrid& grid, double nu, double bias = 0.0);

    Eigen::VectorXcd apply(const Eigen::VectorXcd& g) const;
    Eigen::MatrixXcd apply(const Eigen::MatrixXcd& g) const;
    /// Explicit N×N matrix (bias 0 only); entries depend on i + j mod N.
    Eigen::MatrixXd dense() const;

    double nu() const { return nu_; }
    double bias() const { return bias_; }
    const Eigen::VectorXcd& multiplier() const { return c_; }

private:
    double nu_;
    double bias_;
    Eigen::VectorXd t_;
    Eigen::VectorXcd c_;
};

/// Shared operator per (grid, ν, bias), built once.
std::shared_ptr<const HankelOperator> hankel_operator(const RadialGrid& grid, double nu,
                                                      double bias = 0.0);

/// Fraction of the spectral energy of g in the top quarter of the frequency band.
double high_frequency_fraction(const Eigen::VectorXcd& g);

RadialFunction hankel_transform(const RadialFunction& f, double nu, const RadialGrid& out_grid);

/// A_ν^{σ/2} f = H_ν ρ^σ H_ν f.
RadialFunction fractional_power_apply(const RadialFunction& f, double nu, double sigma);

/// O(λ+1+iy) for Ω A_ν^{−1/2} Ω^{−1} A_ν^{1/2}, from the Gamma-ratio formula.
std::complex<double> mellin_multiplier_O(double y, double nu, double lambda);

/// |(ν+iy)² / ((ν+iy)² − 1)|.
double mellin_multiplier_modulus(double y, double nu);

} // namespace critdecay
