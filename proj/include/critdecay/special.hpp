#pragma once

#include <Eigen/Dense>

#include <complex>

namespace critdecay {

/// log Γ(z) for complex z (Lanczos, g = 7, with reflection for Re z < 1/2).
/// The real part is exact to ~1e-15 relative; the imaginary part is only
/// defined modulo 2π, which is all exp() callers need.
std::complex<double> log_gamma(std::complex<double> z);

/// Distance from z to the nearest pole of Γ (non-positive integers).
double gamma_pole_distance(std::complex<double> z);

struct GaussRule {
    Eigen::VectorXd nodes;
    Eigen::VectorXd weights;
};

/// Gauss–Legendre rule on [-1, 1].
GaussRule gauss_legendre(int m);

/// Gauss rule for the Gegenbauer weight (1 - x²)^(alpha - 1/2) on [-1, 1],
/// alpha > 0, via Golub–Welsch. Weights sum to the weight's total mass.
GaussRule gauss_gegenbauer(int m, double alpha);

/// Total mass ∫_{-1}^{1} (1 - x²)^(alpha - 1/2) dx.
double gegenbauer_mass(double alpha);

/// Values of the Gegenbauer polynomials of parameter alpha, orthonormal with
/// respect to the normalized weight (mass 1), for degrees 0..lmax at points x.
/// Result is (x.size() × (lmax + 1)).
Eigen::MatrixXd orthonormal_gegenbauer(int lmax, double alpha, const Eigen::VectorXd& x);

/// Recurrence coefficient: x p_k = b_{k+1} p_{k+1} + b_k p_{k-1} for the
/// orthonormal family above (b_k for k >= 1).
double gegenbauer_recurrence(int k, double alpha);

/// Surface area of S^{n-1}.
double sphere_area(int n);

} // namespace critdecay
