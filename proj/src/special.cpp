#include "critdecay/special.hpp"

#include "critdecay/errors.hpp"

#include <cmath>
#include <numbers>

namespace critdecay {

namespace {
constexpr double kLanczosG = 7.0;
constexpr double kLanczos[9] = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};

std::complex<double> log_gamma_right(std::complex<double> z)
{
    z -= 1.0;
    std::complex<double> x = kLanczos[0];
    for (int i = 1; i < 9; ++i)
        x += kLanczos[i] / (z + static_cast<double>(i));
    const std::complex<double> t = z + kLanczosG + 0.5;
    return 0.5 * std::log(2.0 * std::numbers::pi) + (z + 0.5) * std::log(t) - t + std::log(x);
}
// log sin(w) without overflow for large |Im w| (branch irrelevant to callers).
std::complex<double> log_sin(std::complex<double> w)
{
    const std::complex<double> i(0.0, 1.0);
    if (w.imag() > 10.0)
        return -i * w + std::log((std::exp(2.0 * i * w) - 1.0) / (2.0 * i));
    if (w.imag() < -10.0)
        return i * w + std::log((1.0 - std::exp(-2.0 * i * w)) / (2.0 * i));
    return std::log(std::sin(w));
}
} // namespace

std::complex<double> log_gamma(std::complex<double> z)
{
    using std::numbers::pi;
    if (gamma_pole_distance(z) == 0.0)
        throw InvalidArgument("log_gamma evaluated at a pole");
    if (z.real() < 0.5) {
        // Γ(z)Γ(1-z) = π / sin(πz)
        return std::log(pi) - log_sin(pi * z) - log_gamma_right(1.0 - z);
    }
    return log_gamma_right(z);
}

double gamma_pole_distance(std::complex<double> z)
{
    const double k = std::min(std::round(z.real()), 0.0);
    return std::abs(z - k);
}

GaussRule gauss_gegenbauer(int m, double alpha)
{
    if (m < 1)
        throw InvalidArgument("quadrature order must be positive");
    if (!(alpha > 0.0))
        throw InvalidArgument("Gegenbauer parameter must be positive");
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(m);
    Eigen::VectorXd off(std::max(m - 1, 0));
    for (int k = 1; k < m; ++k)
        off(k - 1) = gegenbauer_recurrence(k, alpha);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, off, Eigen::ComputeEigenvectors);
    if (es.info() != Eigen::Success)
        throw ConvergenceError("Golub-Welsch eigensolve failed");

    const double mass = gegenbauer_mass(alpha);
    GaussRule rule;
    rule.nodes = es.eigenvalues();
    rule.weights = mass * es.eigenvectors().row(0).transpose().array().square();
    return rule;
}

GaussRule gauss_legendre(int m) { return gauss_gegenbauer(m, 0.5); }

double gegenbauer_mass(double alpha)
{
    return std::sqrt(std::numbers::pi) * std::exp(std::lgamma(alpha + 0.5) - std::lgamma(alpha + 1.0));
}

double gegenbauer_recurrence(int k, double alpha)
{
    const double kk = k;
    return std::sqrt(kk * (kk + 2.0 * alpha - 1.0) / (4.0 * (kk + alpha) * (kk + alpha - 1.0)));
}

Eigen::MatrixXd orthonormal_gegenbauer(int lmax, double alpha, const Eigen::VectorXd& x)
{
    Eigen::MatrixXd p(x.size(), lmax + 1);
    p.col(0).setOnes();
    if (lmax >= 1)
        p.col(1) = x / gegenbauer_recurrence(1, alpha);
    for (int k = 1; k < lmax; ++k) {
        const double bk1 = gegenbauer_recurrence(k + 1, alpha);
        const double bk = gegenbauer_recurrence(k, alpha);
        p.col(k + 1) = (x.cwiseProduct(p.col(k)) - bk * p.col(k - 1)) / bk1;
    }
    return p;
}

double sphere_area(int n)
{
    return 2.0 * std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n);
}

} // namespace critdecay
