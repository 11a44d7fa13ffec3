#pragma once

#include "critdecay/dimension.hpp"

#include <Eigen/Dense>

#include <functional>
#include <string>
#include <vector>

namespace critdecay {

/// Scalar function on S^{n-1}. Zonal functions depend on x = cos θ only;
/// general ones take (x, φ) and are supported for n = 3.
class AngularFunction {
public:
    enum class Kind { constant, zonal, general };

    static AngularFunction constant(double a);
    static AngularFunction zonal(std::function<double(double)> g, std::string label = "zonal");
    static AngularFunction general(std::function<double(double, double)> g,
                                   std::string label = "general");

    Kind kind() const { return kind_; }
    double constant_value() const { return value_; }
    const std::string& label() const { return label_; }
    double operator()(double x, double phi = 0.0) const;

private:
    Kind kind_ = Kind::constant;
    double value_ = 0.0;
    std::function<double(double)> zonal_;
    std::function<double(double, double)> general_;
    std::string label_ = "constant";
};

enum class Sector {
    zonal, ///< m = 0 harmonics, any n
    full   ///< all real spherical harmonics, n = 3 only
};

/// Galerkin matrix of −Δ̸ + q in an orthonormal harmonic basis ordered by degree.
struct SphereOperator {
    Dimension dimension;
    AngularFunction q;
    int lmax = 0;
    Sector sector = Sector::zonal;
    Eigen::MatrixXd matrix;
    std::vector<int> degree; ///< degree l of each basis function
    std::vector<int> order;  ///< m of each basis function (0 in the zonal sector)
};

SphereOperator assemble(const AngularFunction& q, Dimension dim, int lmax,
                        Sector sector = Sector::zonal);

struct EigenEstimate {
    double value = 0.0;
    double convergence_estimate = 0.0; ///< |μ(lmax) − μ(lmax/2)|
    bool converged = true;
};

EigenEstimate lowest_eigenvalue(const SphereOperator& op, double tol = 1e-8);

/// Sphere eigenvalues grouped into channels.
struct ChannelSpectrum {
    Eigen::VectorXd mu;
    Eigen::VectorXd nu;
    std::vector<int> multiplicities;
    /// One eigenvector (in the operator's basis) per entry of mu.
    Eigen::MatrixXd vectors;
    /// For constant q, the harmonic degree of each channel; −1 otherwise.
    std::vector<int> degree;
};

/// Throws AssumptionViolation when μ₀ + λ² ≤ 0.
ChannelSpectrum channel_spectrum(const SphereOperator& op, Dimension dim);

/// Dimension of the space of degree-l spherical harmonics on S^{n-1}.
long harmonic_multiplicity(int n, int l);

/// Values of the op's basis functions on the angular quadrature used for
/// assembly: returns (nodes × basis) values and per-node weights summing to
/// |S^{n-1}|. Zonal rows are indexed by x only, full rows by (x, φ) pairs.
struct AngularQuadrature {
    Eigen::VectorXd x;
    Eigen::VectorXd phi;
    Eigen::VectorXd weights;
    Eigen::MatrixXd basis;
};

AngularQuadrature angular_quadrature(Dimension dim, int lmax, Sector sector, int nodes = 0);

} // namespace critdecay
