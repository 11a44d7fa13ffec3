#include "critdecay/applications.hpp"

#include "critdecay/errors.hpp"
#include "critdecay/parallel.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <string>

namespace critdecay {

namespace {

double lowest_legendre(double p, int lmax)
{
    const int m = lmax + 1;
    Eigen::VectorXd diag(m), off(m - 1);
    for (int l = 0; l <= lmax; ++l)
        diag(l) = l * (l + 1.0);
    for (int l = 0; l < lmax; ++l)
        off(l) = p * (l + 1.0) / std::sqrt((2.0 * l + 1.0) * (2.0 * l + 3.0));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, off, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success)
        throw ConvergenceError("dipole: tridiagonal eigensolve failed");
    return es.eigenvalues()(0);
}

} // namespace

DipoleResult dipole_mu0(double p, int lmax)
{
    if (!std::isfinite(p))
        throw InvalidArgument("dipole_mu0: p must be finite");
    if (lmax < 8)
        throw InvalidArgument("dipole_mu0: lmax must be at least 8");
    DipoleResult res;
    res.p = p;
    res.lmax_used = lmax;
    res.mu0 = lowest_legendre(std::abs(p), lmax);
    res.convergence = std::abs(res.mu0 - lowest_legendre(std::abs(p), lmax / 2));
    if (res.convergence > 1e-6 * (1.0 + std::abs(res.mu0)))
        throw ConvergenceError("dipole_mu0: not converged at lmax = " + std::to_string(lmax));
    res.admissible = res.mu0 > -0.25;
    return res;
}

CriticalDipole critical_dipole_moment(double tol, int lmax)
{
    if (!(tol >= 1e-10))
        throw InvalidArgument("critical_dipole_moment: tol must be at least 1e-10");
    auto g = [&](double p, int L) { return lowest_legendre(p, L) + 0.25; };
    CriticalDipole out;
    out.tol = tol;
    out.lmax = lmax;
    double lo = 1.0, hi = 2.0;
    if (!(g(lo, lmax) > 0.0 && g(hi, lmax) < 0.0))
        throw ConvergenceError("critical_dipole_moment: [1, 2] does not bracket mu0 = -1/4");
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        (g(mid, lmax) > 0.0 ? lo : hi) = mid;
        ++out.iterations;
    }
    out.lower = lo;
    out.upper = hi;
    out.p0 = 0.5 * (lo + hi);
    // mu0 at the bracket ends evaluated at 2·lmax; a sign change still inside means the digits hold
    const double glo = g(lo, 2 * lmax), ghi = g(hi, 2 * lmax);
    out.lmax_shift = (glo > 0.0 && ghi <= 0.0) ? 0.0 : std::abs(lowest_legendre(out.p0, 2 * lmax) - lowest_legendre(out.p0, lmax));
    return out;
}

std::vector<DipoleResult> mu0_curve(int points, double pmax, int lmax)
{
    if (points < 2)
        throw InvalidArgument("mu0_curve: need at least two points");
    std::vector<DipoleResult> out(points);
    parallel_for(points, [&](std::size_t k) { out[k] = dipole_mu0(pmax * k / (points - 1.0), lmax); });
    return out;
}

} // namespace critdecay
