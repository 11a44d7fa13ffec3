#pragma once

#include "critdecay/radial.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace critdecay {

/// Λ (symmetric positive definite) and a diagonal Ω, with Λ's eigensystem.
struct DiscreteOperatorPair {
    Eigen::MatrixXd Lambda;
    Eigen::VectorXd Omega;
    Eigen::VectorXd eigenvalues; ///< of Λ, ascending, positive
    Eigen::MatrixXd eigenvectors;
    double boundary_commutator = 0.0; ///< [Ω, Λ²]₀₀ from a closure ghost node

    Eigen::Index size() const { return Lambda.rows(); }
};

/// Builds the pair from Λ directly.
DiscreteOperatorPair make_operator_pair(const Eigen::MatrixXd& Lambda, const Eigen::VectorXd& Omega);

/// Λ = P^{1/2} for a symmetric positive definite P.
DiscreteOperatorPair pair_from_square(const Eigen::MatrixXd& P, const Eigen::VectorXd& Omega);

/// Random orthogonal eigenbasis, eigenvalues of Λ log-uniform in [0.1, 10],
/// Ω uniform in [0.5, 1.5].
DiscreteOperatorPair random_operator_pair(int N, std::uint64_t seed);

/// Second-order finite-difference channel operator P_ν = D⁻¹(−∂_t² + ν²)D⁻¹ in
/// unitary coordinates on a log grid, Ω = diag(r).
Eigen::MatrixXd channel_operator_matrix(double nu, const RadialGrid& grid);
DiscreteOperatorPair channel_pair(double nu, const RadialGrid& grid);

/// (s^{1/2}Λ)^α exp(−sΛ²) g.
Eigen::VectorXd q_alpha_apply(const DiscreteOperatorPair& pair, double alpha, double s, const Eigen::VectorXd& g);

/// ‖Q_α(s)‖ = max_k (√s m_k)^α e^{−s m_k²}.
double q_alpha_norm(const DiscreteOperatorPair& pair, double alpha, double s);

/// sup_{x ≥ 0} x^α e^{−x²}.
double q_alpha_sup(double alpha);

/// Maximum of ‖Q_α(s)‖ over s, from a log-s scan refined by golden section.
double q_alpha_scan_max(const DiscreteOperatorPair& pair, double alpha);

struct ScalarIdentity {
    double lhs = 0.0;
    double rhs = 0.0;
    double relative_error() const { return std::abs(lhs - rhs) / std::abs(rhs); }
};

/// ∫₀^∞ ‖Q_α(s)g‖² ds/s against 2^{−α}Γ(α)‖g‖².
ScalarIdentity q_integral_identity(const DiscreteOperatorPair& pair, double alpha, const Eigen::VectorXd& g);

struct VectorIdentity {
    Eigen::VectorXd lhs;
    Eigen::VectorXd rhs;
    double relative_error() const { return (lhs - rhs).norm() / rhs.norm(); }
};

/// Γ(γ)⁻¹ ∫₀^∞ s^{γ−α/2} Q_α(s) g ds/s against Λ^{α−2γ} g.
VectorIdentity q_reconstruction_identity(const DiscreteOperatorPair& pair, double alpha, double gamma,
                                         const Eigen::VectorXd& g);

struct CommutatorReport {
    double c_estimate = 0.0;        ///< ‖[Ω, Λ²] Λ⁻¹‖
    double probe_estimate = 0.0;    ///< max over random probes of ‖[Ω,Λ²]f‖/‖Λf‖
    double commutator_norm = 0.0;   ///< ‖[Λ, Ω]‖
    int probes = 0;
};

CommutatorReport commutator_hypothesis_check(const DiscreteOperatorPair& pair, std::uint64_t seed = 0x5EED,
                                             int probes = 64);

struct C1Result {
    double nu = 0.0;
    double analytic_norm = 0.0;
    double numeric_norm = 0.0;
    bool unbounded_risk = false;
    double relative_error() const { return std::abs(numeric_norm - analytic_norm) / analytic_norm; }
};

/// Dense matrix of Ω A_ν^{−1/2} Ω⁻¹ A_ν^{1/2} = Ω H Ω⁻¹ H Ω⁻¹ H Ω H in unitary
/// coordinates. Intermediate results grow like r^{±1}, r^{±2}, so the
/// transforms after each Ω^{±1} use the matching exponential bias.
Eigen::MatrixXd c1_operator_matrix(double nu, const RadialGrid& grid);

C1Result c1_operator_check(double nu, const RadialGrid& grid);

} // namespace critdecay
