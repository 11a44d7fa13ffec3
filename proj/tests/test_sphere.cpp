#include "critdecay/errors.hpp"
#include "critdecay/special.hpp"
#include "critdecay/sphere.hpp"

#include "doctest.h"

#include <cmath>

using namespace critdecay;

namespace {

AngularFunction dipole_q(double p)
{
    return AngularFunction::zonal([p](double x) { return p * x; }, "dipole");
}

} // namespace

TEST_CASE("free sphere operator is diagonal l(l+n-2)")
{
    const SphereOperator op = assemble(AngularFunction::constant(0.0), Dimension::of(3), 2, Sector::full);
    REQUIRE(op.matrix.rows() == 9);
    const double expected[] = {0, 2, 2, 2, 6, 6, 6, 6, 6};
    for (int i = 0; i < 9; ++i)
        CHECK(op.matrix(i, i) == doctest::Approx(expected[i]));
    CHECK(op.matrix.isDiagonal(1e-14));

    const SphereOperator z5 = assemble(AngularFunction::constant(0.0), Dimension::of(5), 10);
    for (int l = 0; l <= 10; ++l)
        CHECK(z5.matrix(l, l) == doctest::Approx(l * (l + 3.0)));
}

TEST_CASE("constant q shifts the spectrum with harmonic multiplicities")
{
    const Dimension d3 = Dimension::of(3);
    const SphereOperator op = assemble(AngularFunction::constant(2.0), d3, 8, Sector::full);
    CHECK(op.matrix(0, 0) == doctest::Approx(2.0));
    const ChannelSpectrum cs = channel_spectrum(op, d3);
    REQUIRE(cs.nu.size() >= 2);
    CHECK(cs.nu(0) == doctest::Approx(1.5));
    for (Eigen::Index k = 0; k < cs.mu.size(); ++k) {
        CHECK(cs.mu(k) == doctest::Approx(k * (k + 1.0) + 2.0));
        CHECK(cs.multiplicities[k] == 2 * k + 1);
    }

    const Dimension d4 = Dimension::of(4);
    const ChannelSpectrum z4 = channel_spectrum(assemble(AngularFunction::constant(0.0), d4, 8), d4);
    for (Eigen::Index k = 0; k < z4.nu.size(); ++k) {
        CHECK(z4.nu(k) == doctest::Approx(1.0 + k));
        CHECK(z4.multiplicities[k] == harmonic_multiplicity(4, static_cast<int>(k)));
    }
    CHECK(harmonic_multiplicity(4, 2) == 9);
    CHECK(harmonic_multiplicity(5, 1) == 5);
}

TEST_CASE("free channels in n = 3 have nu = l + 1/2")
{
    const Dimension d = Dimension::of(3);
    const ChannelSpectrum cs = channel_spectrum(assemble(AngularFunction::constant(0.0), d, 10), d);
    for (Eigen::Index l = 0; l < cs.nu.size(); ++l)
        CHECK(cs.nu(l) == doctest::Approx(l + 0.5));
}

TEST_CASE("dipole sector matrix is the Legendre tridiagonal")
{
    const double p = 0.7;
    const SphereOperator op = assemble(dipole_q(p), Dimension::of(3), 20);
    const Eigen::MatrixXd& M = op.matrix;
    CHECK((M - M.transpose()).norm() <= 1e-12 * M.norm());
    for (int l = 0; l <= 20; ++l) {
        CHECK(M(l, l) == doctest::Approx(l * (l + 1.0)).epsilon(1e-12));
        if (l < 20)
            CHECK(std::abs(M(l, l + 1) - p * (l + 1.0) / std::sqrt((2.0 * l + 1.0) * (2.0 * l + 3.0))) < 1e-12);
        for (int k = l + 2; k <= 20; ++k)
            CHECK(std::abs(M(l, k)) < 1e-12);
    }
}

TEST_CASE("lowest eigenvalue oracles")
{
    const Dimension d = Dimension::of(3);
    CHECK(lowest_eigenvalue(assemble(AngularFunction::constant(0.0), d, 8)).value == doctest::Approx(0.0));
    CHECK(lowest_eigenvalue(assemble(AngularFunction::constant(-0.1), d, 8)).value == doctest::Approx(-0.1));

    // numpy dense eigensolve on the quadrature-assembled Legendre matrix, lmax = 40
    const EigenEstimate e1 = lowest_eigenvalue(assemble(dipole_q(1.0), d, 40));
    CHECK(e1.value == doctest::Approx(-0.15766348313775183).epsilon(1e-12));
    CHECK(e1.converged);
    CHECK(e1.convergence_estimate < 1e-12);

    const double small = lowest_eigenvalue(assemble(dipole_q(0.1), d, 40)).value;
    CHECK(small == doctest::Approx(-0.0016656495273164294).epsilon(1e-12));
    CHECK(std::abs(small + 0.01 / 6.0) < 1e-5);
}

TEST_CASE("dipole eigenvalue is even in p and non-increasing in lmax")
{
    const Dimension d = Dimension::of(3);
    for (double p : {0.3, 1.0, 1.7})
        CHECK(std::abs(lowest_eigenvalue(assemble(dipole_q(p), d, 40)).value -
                       lowest_eigenvalue(assemble(dipole_q(-p), d, 40)).value) < 1e-12);
    double previous = 1e300;
    for (int lmax : {8, 12, 16, 24, 32, 40}) {
        const double v = lowest_eigenvalue(assemble(dipole_q(1.5), d, lmax)).value;
        CHECK(v <= previous + 1e-14);
        previous = v;
    }
}

TEST_CASE("full sector confirms the dipole ground state lies in m = 0")
{
    const Dimension d = Dimension::of(3);
    const AngularFunction q = AngularFunction::general([](double x, double) { return 1.2 * x; }, "dipole");
    const SphereOperator full = assemble(q, d, 20, Sector::full);
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(full.matrix);
    const double zonal = lowest_eigenvalue(assemble(dipole_q(1.2), d, 20)).value;
    CHECK(es.eigenvalues()(0) == doctest::Approx(zonal).epsilon(1e-12));
    const Eigen::VectorXd v = es.eigenvectors().col(0);
    double off = 0.0;
    for (Eigen::Index i = 0; i < v.size(); ++i)
        if (full.order[i] != 0)
            off += v(i) * v(i);
    CHECK(off < 1e-20);
}

TEST_CASE("channel_spectrum rejects mu0 + lambda^2 <= 0")
{
    const Dimension d = Dimension::of(3);
    CHECK_THROWS_AS(channel_spectrum(assemble(AngularFunction::constant(-0.3), d, 8), d), AssumptionViolation);
}

TEST_CASE("assemble preconditions")
{
    const Dimension d3 = Dimension::of(3), d4 = Dimension::of(4);
    CHECK_THROWS_AS(assemble(AngularFunction::constant(0.0), d3, 1), InvalidArgument);
    CHECK_THROWS_AS(assemble(AngularFunction::constant(0.0), d4, 8, Sector::full), InvalidArgument);
    const AngularFunction g = AngularFunction::general([](double x, double phi) { return x * std::cos(phi); });
    CHECK_THROWS_AS(assemble(g, d3, 8, Sector::zonal), InvalidArgument);
}

TEST_CASE("angular quadrature integrates the basis orthonormally")
{
    for (int n : {3, 5}) {
        const Dimension d = Dimension::of(n);
        const AngularQuadrature aq = angular_quadrature(d, 10, Sector::zonal);
        CHECK(aq.weights.sum() == doctest::Approx(sphere_area(n)).epsilon(1e-13));
        const Eigen::MatrixXd G = aq.basis.transpose() * aq.weights.asDiagonal() * aq.basis;
        CHECK((G - Eigen::MatrixXd::Identity(G.rows(), G.cols())).cwiseAbs().maxCoeff() < 1e-12);
    }
    const AngularQuadrature full = angular_quadrature(Dimension::of(3), 6, Sector::full);
    const Eigen::MatrixXd G = full.basis.transpose() * full.weights.asDiagonal() * full.basis;
    CHECK(G.rows() == 49);
    CHECK((G - Eigen::MatrixXd::Identity(49, 49)).cwiseAbs().maxCoeff() < 1e-12);
}
