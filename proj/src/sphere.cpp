#include "critdecay/sphere.hpp"

#include "critdecay/errors.hpp"
#include "critdecay/special.hpp"

#include <cmath>
#include <numbers>

namespace critdecay {

AngularFunction AngularFunction::constant(double a)
{
    if (!std::isfinite(a))
        throw InvalidArgument("angular constant must be finite");
    AngularFunction f;
    f.kind_ = Kind::constant;
    f.value_ = a;
    f.label_ = "constant";
    return f;
}

AngularFunction AngularFunction::zonal(std::function<double(double)> g, std::string label)
{
    AngularFunction f;
    f.kind_ = Kind::zonal;
    f.zonal_ = std::move(g);
    f.label_ = std::move(label);
    return f;
}

AngularFunction AngularFunction::general(std::function<double(double, double)> g, std::string label)
{
    AngularFunction f;
    f.kind_ = Kind::general;
    f.general_ = std::move(g);
    f.label_ = std::move(label);
    return f;
}

double AngularFunction::operator()(double x, double phi) const
{
    switch (kind_) {
    case Kind::constant:
        return value_;
    case Kind::zonal:
        return zonal_(x);
    case Kind::general:
        return general_(x, phi);
    }
    return 0.0;
}

long harmonic_multiplicity(int n, int l)
{
    auto binom = [](long a, long b) -> long {
        if (b < 0 || a < b)
            return 0;
        long r = 1;
        for (long i = 1; i <= b; ++i)
            r = r * (a - b + i) / i;
        return r;
    };
    return binom(l + n - 1, n - 1) - binom(l + n - 3, n - 1);
}

AngularQuadrature angular_quadrature(Dimension dim, int lmax, Sector sector, int nodes)
{
    const int m = nodes > 0 ? nodes : 2 * lmax + 1;
    AngularQuadrature quad;
    if (sector == Sector::zonal) {
        const GaussRule rule = gauss_gegenbauer(m, dim.lambda);
        const double mass = gegenbauer_mass(dim.lambda);
        quad.x = rule.nodes;
        quad.phi = Eigen::VectorXd::Zero(m);
        quad.weights = rule.weights * (sphere_area(dim.n) / mass);
        quad.basis = orthonormal_gegenbauer(lmax, dim.lambda, rule.nodes) / std::sqrt(sphere_area(dim.n));
        return quad;
    }

    if (dim.n != 3)
        throw InvalidArgument("full spherical-harmonic sector is only available for n = 3");
    const GaussRule rule = gauss_legendre(m);
    const int mphi = 2 * lmax + 2;
    const int total = m * mphi;
    const int size = (lmax + 1) * (lmax + 1);
    quad.x.resize(total);
    quad.phi.resize(total);
    quad.weights.resize(total);
    quad.basis.resize(total, size);
    for (int i = 0; i < m; ++i) {
        const double theta = std::acos(rule.nodes(i));
        for (int j = 0; j < mphi; ++j) {
            const int row = i * mphi + j;
            const double phi = 2.0 * std::numbers::pi * j / mphi;
            quad.x(row) = rule.nodes(i);
            quad.phi(row) = phi;
            quad.weights(row) = rule.weights(i) * 2.0 * std::numbers::pi / mphi;
            int col = 0;
            for (int l = 0; l <= lmax; ++l) {
                for (int mm = -l; mm <= l; ++mm, ++col) {
                    const unsigned am = static_cast<unsigned>(std::abs(mm));
                    const double y = std::sph_legendre(static_cast<unsigned>(l), am, theta);
                    if (mm == 0)
                        quad.basis(row, col) = y;
                    else if (mm > 0)
                        quad.basis(row, col) = std::numbers::sqrt2 * y * std::cos(mm * phi);
                    else
                        quad.basis(row, col) = std::numbers::sqrt2 * y * std::sin(am * phi);
                }
            }
        }
    }
    return quad;
}

SphereOperator assemble(const AngularFunction& q, Dimension dim, int lmax, Sector sector)
{
    if (lmax < 2)
        throw InvalidArgument("lmax must be at least 2");
    if (sector == Sector::zonal && q.kind() == AngularFunction::Kind::general)
        throw InvalidArgument("non-zonal angular potential needs the full sector");
    if (sector == Sector::full && dim.n != 3)
        throw InvalidArgument("full spherical-harmonic sector is only available for n = 3");

    SphereOperator op;
    op.dimension = dim;
    op.q = q;
    op.lmax = lmax;
    op.sector = sector;
    if (sector == Sector::zonal) {
        for (int l = 0; l <= lmax; ++l) {
            op.degree.push_back(l);
            op.order.push_back(0);
        }
    } else {
        for (int l = 0; l <= lmax; ++l)
            for (int m = -l; m <= l; ++m) {
                op.degree.push_back(l);
                op.order.push_back(m);
            }
    }
    const int size = static_cast<int>(op.degree.size());

    op.matrix = Eigen::MatrixXd::Zero(size, size);
    if (q.kind() == AngularFunction::Kind::constant) {
        op.matrix.diagonal().setConstant(q.constant_value());
    } else {
        const AngularQuadrature quad = angular_quadrature(dim, lmax, sector);
        Eigen::VectorXd wq(quad.weights.size());
        for (Eigen::Index i = 0; i < wq.size(); ++i) {
            const double v = q(quad.x(i), quad.phi(i));
            if (!std::isfinite(v))
                throw InvalidArgument("angular potential is not finite at a quadrature node");
            wq(i) = quad.weights(i) * v;
        }
        op.matrix = quad.basis.transpose() * wq.asDiagonal() * quad.basis;
        op.matrix = 0.5 * (op.matrix + op.matrix.transpose()).eval();
    }
    for (int k = 0; k < size; ++k) {
        const double l = op.degree[k];
        op.matrix(k, k) += l * (l + dim.n - 2);
    }
    return op;
}

namespace {
double smallest(const Eigen::MatrixXd& m)
{
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success)
        throw ConvergenceError("sphere eigensolve failed");
    return es.eigenvalues()(0);
}
} // namespace

EigenEstimate lowest_eigenvalue(const SphereOperator& op, double tol)
{
    EigenEstimate est;
    est.value = smallest(op.matrix);
    int half = 0;
    while (half < static_cast<int>(op.degree.size()) && op.degree[half] <= op.lmax / 2)
        ++half;
    est.convergence_estimate = std::abs(est.value - smallest(op.matrix.topLeftCorner(half, half)));
    est.converged = est.convergence_estimate <= tol;
    return est;
}

ChannelSpectrum channel_spectrum(const SphereOperator& op, Dimension dim)
{
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(op.matrix);
    if (es.info() != Eigen::Success)
        throw ConvergenceError("sphere eigensolve failed");
    const Eigen::VectorXd& ev = es.eigenvalues();
    if (ev(0) + dim.lambda_sq() <= 0.0)
        throw AssumptionViolation("lowest sphere eigenvalue " + std::to_string(ev(0)) +
                                  " is not above -lambda^2");

    const bool constant = op.q.kind() == AngularFunction::Kind::constant;
    std::vector<double> mu;
    std::vector<int> mult, degree;
    std::vector<Eigen::Index> rep;
    for (Eigen::Index k = 0; k < ev.size(); ++k) {
        if (!mu.empty() && std::abs(ev(k) - mu.back()) <= 1e-9 * std::max(1.0, std::abs(ev(k)))) {
            ++mult.back();
            continue;
        }
        mu.push_back(ev(k));
        mult.push_back(1);
        rep.push_back(k);
        degree.push_back(-1);
    }

    ChannelSpectrum spec;
    const auto count = static_cast<Eigen::Index>(mu.size());
    spec.mu.resize(count);
    spec.nu.resize(count);
    spec.vectors.resize(ev.size(), count);
    for (Eigen::Index k = 0; k < count; ++k) {
        spec.mu(k) = mu[k];
        spec.nu(k) = std::sqrt(mu[k] + dim.lambda_sq());
        spec.vectors.col(k) = es.eigenvectors().col(rep[k]);
        if (constant) {
            Eigen::Index arg;
            spec.vectors.col(k).cwiseAbs().maxCoeff(&arg);
            degree[k] = op.degree[arg];
            if (op.sector == Sector::zonal)
                mult[k] = static_cast<int>(harmonic_multiplicity(dim.n, degree[k]));
        }
    }
    spec.multiplicities = mult;
    spec.degree = degree;
    return spec;
}

} // namespace critdecay
