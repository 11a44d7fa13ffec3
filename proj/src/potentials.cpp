#include "critdecay/potentials.hpp"

#include "critdecay/errors.hpp"
#include "critdecay/special.hpp"

#include <cmath>

namespace critdecay {

namespace {
constexpr double kOverflowGuard = 1e12;
constexpr double kDeltaMargin = 1e-10;

double fd_tilde(const std::function<double(double)>& v, double r)
{
    // −d/dr (r V) with a 5-point stencil
    const double h = r * 1e-5;
    auto g = [&](double s) { return s * v(s); };
    return -(-g(r + 2 * h) + 8 * g(r + h) - 8 * g(r - h) + g(r - 2 * h)) / (12 * h);
}

double legendre_series(const std::vector<double>& c, double x)
{
    double prev = 0.0, p = 1.0, sum = 0.0;
    for (std::size_t l = 0; l < c.size(); ++l) {
        sum += c[l] * p;
        const double next = ((2.0 * l + 1.0) * x * p - l * prev) / (l + 1.0);
        prev = p;
        p = next;
    }
    return sum;
}

void require_finite(double v, const char* what)
{
    if (!std::isfinite(v))
        throw InvalidArgument(std::string("non-finite potential parameter: ") + what);
}
} // namespace

std::string to_string(PotentialKind kind)
{
    switch (kind) {
    case PotentialKind::zero:
        return "zero";
    case PotentialKind::inverse_square:
        return "inverse_square";
    case PotentialKind::radial:
        return "radial";
    case PotentialKind::homogeneous_angular:
        return "homogeneous_angular";
    case PotentialKind::dipole:
        return "dipole";
    }
    return "unknown";
}

double Potential::operator()(double r, double x, double phi) const
{
    switch (kind) {
    case PotentialKind::zero:
        return 0.0;
    case PotentialKind::inverse_square:
        return strength / (r * r);
    case PotentialKind::radial:
        return radial.value(r);
    case PotentialKind::homogeneous_angular:
        return angular(x, phi) / (r * r);
    case PotentialKind::dipole:
        return strength * x / (r * r);
    }
    return 0.0;
}

AngularFunction Potential::on_sphere(double r) const
{
    switch (kind) {
    case PotentialKind::zero:
        return AngularFunction::constant(0.0);
    case PotentialKind::inverse_square:
        return AngularFunction::constant(strength);
    case PotentialKind::radial:
        return AngularFunction::constant(r * r * radial.value(r));
    case PotentialKind::homogeneous_angular:
    case PotentialKind::dipole:
        return angular;
    }
    return AngularFunction::constant(0.0);
}

Potential zero_potential(Dimension dim)
{
    Potential V;
    V.kind = PotentialKind::zero;
    V.dimension = dim;
    return V;
}

Potential inverse_square(Dimension dim, double a)
{
    require_finite(a, "a");
    Potential V;
    V.kind = PotentialKind::inverse_square;
    V.dimension = dim;
    V.strength = a;
    V.angular = AngularFunction::constant(a);
    return V;
}

Potential dipole_potential(double p)
{
    require_finite(p, "p");
    Potential V;
    V.kind = PotentialKind::dipole;
    V.dimension = Dimension::of(3);
    V.strength = p;
    V.angular = AngularFunction::zonal([p](double x) { return p * x; }, "dipole");
    return V;
}

Potential radial_potential(Dimension dim, RadialProfile profile)
{
    if (!profile.value)
        throw InvalidArgument("radial potential needs a profile");
    Potential V;
    V.kind = PotentialKind::radial;
    V.dimension = dim;
    V.radial = std::move(profile);
    return V;
}

Potential homogeneous_angular(Dimension dim, AngularFunction a)
{
    if (a.kind() == AngularFunction::Kind::general && dim.n != 3)
        throw InvalidArgument("non-zonal angular potentials are only supported for n = 3");
    Potential V;
    V.kind = PotentialKind::homogeneous_angular;
    V.dimension = dim;
    V.angular = std::move(a);
    return V;
}

Potential build_potential(const PotentialSpec& spec)
{
    const Dimension dim = Dimension::of(spec.n);
    require_finite(spec.a, "a");
    require_finite(spec.p, "p");
    require_finite(spec.eps, "eps");
    if (spec.kind == "zero")
        return zero_potential(dim);
    if (spec.kind == "inverse_square")
        return inverse_square(dim, spec.a);
    if (spec.kind == "dipole") {
        if (spec.n != 3)
            throw InvalidArgument("dipole potential is defined for n = 3 only");
        return dipole_potential(spec.p);
    }
    if (spec.kind == "homogeneous_angular") {
        for (double c : spec.legendre)
            require_finite(c, "legendre coefficient");
        const std::vector<double> c = spec.legendre;
        return homogeneous_angular(dim, AngularFunction::zonal(
                                            [c](double x) { return legendre_series(c, x); }, "legendre"));
    }
    if (spec.kind == "radial") {
        const double a = spec.a;
        const double eps = spec.eps;
        RadialProfile prof;
        if (spec.profile == "power") {
            prof.value = [a, eps](double r) { return a * std::pow(r, -2.0 - eps); };
            prof.tilde = [a, eps](double r) { return (1.0 + eps) * a * std::pow(r, -2.0 - eps); };
            prof.label = "power";
        } else if (spec.profile == "exp") {
            prof.value = [a](double r) { return a * std::exp(-r) / (r * r); };
            prof.tilde = [a](double r) { return a * std::exp(-r) * (1.0 + r) / (r * r); };
            prof.label = "exp";
        } else {
            throw InvalidArgument("unknown radial profile '" + spec.profile + "'");
        }
        return radial_potential(dim, std::move(prof));
    }
    throw InvalidArgument("unknown potential kind '" + spec.kind + "'");
}

Potential tilde_potential(const Potential& V)
{
    if (V.homogeneous())
        return V;
    RadialProfile prof;
    if (V.radial.tilde) {
        prof.value = V.radial.tilde;
    } else {
        auto v = V.radial.value;
        prof.value = [v](double r) { return fd_tilde(v, r); };
        for (double r : default_radii()) {
            if (!std::isfinite(prof.value(r)))
                throw InvalidArgument("radial profile is not differentiable at r = " + std::to_string(r));
        }
    }
    prof.label = "tilde(" + V.radial.label + ")";
    return radial_potential(V.dimension, std::move(prof));
}

std::vector<double> default_radii(int count, double lo, double hi)
{
    std::vector<double> r(count);
    for (int i = 0; i < count; ++i)
        r[i] = count == 1 ? lo : lo * std::pow(hi / lo, static_cast<double>(i) / (count - 1));
    return r;
}

A1Result check_A1(const Potential& V, const std::vector<double>& radii, int lmax)
{
    if (radii.empty())
        throw InvalidArgument("check_A1: empty radius set");
    for (double r : radii)
        if (!(r > 0.0))
            throw InvalidArgument("check_A1: radii must be positive");

    A1Result res;
    switch (V.kind) {
    case PotentialKind::zero:
        return res;
    case PotentialKind::inverse_square:
        res.gamma_plus_sq = std::max(V.strength, 0.0);
        res.gamma_minus_sq = std::max(-V.strength, 0.0);
        return res;
    case PotentialKind::dipole:
        res.gamma_plus_sq = std::abs(V.strength);
        res.gamma_minus_sq = std::abs(V.strength);
        return res;
    case PotentialKind::homogeneous_angular: {
        const Sector sector = V.angular.kind() == AngularFunction::Kind::general ? Sector::full : Sector::zonal;
        const AngularQuadrature quad = angular_quadrature(V.dimension, lmax, sector);
        auto take = [&](double v) {
            if (!std::isfinite(v) || std::abs(v) > kOverflowGuard) {
                res.finite = false;
                return;
            }
            res.gamma_plus_sq = std::max(res.gamma_plus_sq, v);
            res.gamma_minus_sq = std::max(res.gamma_minus_sq, -v);
        };
        for (Eigen::Index i = 0; i < quad.x.size(); ++i)
            take(V.angular(quad.x(i), quad.phi(i)));
        take(V.angular(1.0, 0.0));
        take(V.angular(-1.0, 0.0));
        break;
    }
    case PotentialKind::radial:
        for (double r : radii) {
            const double v = r * r * V.radial.value(r);
            if (!std::isfinite(v) || std::abs(v) > kOverflowGuard) {
                res.finite = false;
                continue;
            }
            res.gamma_plus_sq = std::max(res.gamma_plus_sq, v);
            res.gamma_minus_sq = std::max(res.gamma_minus_sq, -v);
        }
        break;
    }
    if (!res.finite) {
        res.gamma_plus_sq = std::numeric_limits<double>::infinity();
        res.gamma_minus_sq = std::numeric_limits<double>::infinity();
    }
    return res;
}

PositivityResult check_positivity(const Potential& V, int lmax, const std::vector<double>& radii)
{
    if (lmax < 8)
        throw InvalidArgument("check_positivity needs lmax >= 8");
    const double lam2 = V.dimension.lambda_sq();
    PositivityResult res;

    if (V.homogeneous()) {
        res.radii = {1.0};
        double mu0 = 0.0;
        if (V.kind == PotentialKind::inverse_square) {
            mu0 = V.strength;
        } else if (V.kind != PotentialKind::zero) {
            const Sector sector =
                V.angular.kind() == AngularFunction::Kind::general ? Sector::full : Sector::zonal;
            const EigenEstimate est = lowest_eigenvalue(assemble(V.angular, V.dimension, lmax, sector));
            mu0 = est.value;
            res.convergence_estimate = est.convergence_estimate;
            res.converged = est.converged;
        }
        res.per_radius_min = {mu0};
        res.delta_sq = lam2 + mu0 - kDeltaMargin;
        return res;
    }

    if (radii.empty())
        throw InvalidArgument("check_positivity: empty radius set");
    res.radii = radii;
    double lowest = std::numeric_limits<double>::infinity();
    for (double r : radii) {
        const double m = r * r * V.radial.value(r);
        res.per_radius_min.push_back(m);
        lowest = std::min(lowest, std::isfinite(m) ? m : -std::numeric_limits<double>::infinity());
    }
    res.delta_sq = lam2 + lowest - kDeltaMargin;
    return res;
}

AssumptionReport assumption_report(const Potential& V, int lmax, const std::vector<double>& radii)
{
    AssumptionReport rep;
    rep.radii_sampled = V.homogeneous() ? std::vector<double>{1.0} : radii;

    const A1Result a1 = check_A1(V, radii, lmax);
    rep.gamma_plus_sq = a1.gamma_plus_sq;
    rep.gamma_minus_sq = a1.gamma_minus_sq;
    if (!a1.finite)
        rep.diagnostics.push_back("A1: |x|^2 V is unbounded on the sampled set");

    rep.positivity_A2 = check_positivity(V, lmax, radii);
    rep.delta_sq_A2 = rep.positivity_A2.delta_sq;
    if (!rep.positivity_A2.converged)
        rep.diagnostics.push_back("A2: sphere eigenvalue not converged in lmax");

    try {
        const Potential Vt = tilde_potential(V);
        rep.positivity_A3 = check_positivity(Vt, lmax, radii);
        rep.delta_sq_A3 = rep.positivity_A3.delta_sq;
        if (!rep.positivity_A3.converged)
            rep.diagnostics.push_back("A3: sphere eigenvalue not converged in lmax");
    } catch (const Error& e) {
        rep.delta_sq_A3 = -std::numeric_limits<double>::infinity();
        rep.diagnostics.push_back(std::string("A3: ") + e.what());
    }

    if (rep.delta_sq_A2 <= 0.0)
        rep.diagnostics.push_back("A2: delta^2 <= 0");
    if (rep.delta_sq_A3 <= 0.0)
        rep.diagnostics.push_back("A3: delta^2 <= 0 for the tilde potential");

    rep.passed = std::isfinite(rep.gamma_plus_sq) && rep.delta_sq_A2 > 0.0 && rep.delta_sq_A3 > 0.0;
    if (rep.passed) {
        rep.c1 = rep.delta_sq_A2 / (rep.delta_sq_A2 + rep.gamma_minus_sq);
        rep.c2 = 1.0 + rep.gamma_plus_sq / V.dimension.lambda_sq();
    }
    return rep;
}

EnergyForms energy_forms(const Potential& V, const RadialGrid& grid, const Eigen::MatrixXcd& coeffs)
{
    if (grid.n != V.dimension.n)
        throw InvalidArgument("energy_forms: grid dimension differs from the potential's");
    if (coeffs.rows() != grid.size())
        throw InvalidArgument("energy_forms: coefficient rows must match the grid");
    const int lmax = static_cast<int>(coeffs.cols()) - 1;
    const int n = V.dimension.n;

    Eigen::MatrixXd angular = Eigen::MatrixXd::Zero(lmax + 1, lmax + 1);
    if (V.homogeneous() && V.kind != PotentialKind::zero) {
        if (V.angular.kind() == AngularFunction::Kind::general)
            throw InvalidArgument("energy_forms supports zonal potentials only");
        angular = assemble(V.angular, V.dimension, std::max(lmax, 2)).matrix.topLeftCorner(lmax + 1, lmax + 1);
        for (int l = 0; l <= lmax; ++l)
            angular(l, l) -= static_cast<double>(l) * (l + n - 2);
    }

    EnergyForms out;
    const Eigen::VectorXd& r = grid.nodes;
    for (int l = 0; l <= lmax; ++l) {
        const Eigen::VectorXcd du =
            log_derivative(coeffs.col(l), grid.step).cwiseQuotient(r.cast<std::complex<double>>());
        const Eigen::ArrayXd u2 = coeffs.col(l).array().abs2();
        const double kinetic = (grid.weights.array() * du.array().abs2()).sum();
        const double hardy = (grid.weights.array() * u2 / r.array().square()).sum();
        const double centrifugal = static_cast<double>(l) * (l + n - 2) * hardy;
        out.gradient_sq += kinetic + centrifugal;
        out.hardy_sq += hardy;
    }
    out.q = out.gradient_sq;
    if (V.homogeneous()) {
        for (Eigen::Index i = 0; i < grid.size(); ++i) {
            const Eigen::VectorXcd u = coeffs.row(i).transpose();
            const double form = (u.adjoint() * angular.cast<std::complex<double>>() * u)(0).real();
            out.q += grid.weights(i) * form / (r(i) * r(i));
        }
    } else {
        for (Eigen::Index i = 0; i < grid.size(); ++i)
            out.q += grid.weights(i) * V.radial.value(r(i)) * coeffs.row(i).squaredNorm();
    }
    return out;
}

} // namespace critdecay
