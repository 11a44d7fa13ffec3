#include "critdecay/errors.hpp"
#include "critdecay/resolvent.hpp"

#include "doctest.h"

#include <Eigen/Dense>

#include <cmath>
#include <complex>

using namespace critdecay;
using cd = std::complex<double>;

namespace {

double rel_diff(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b)
{
    return (a - b).norm() / b.norm();
}

const std::function<double(double)> no_profile;

} // namespace

TEST_CASE("zero right-hand side gives zero solution")
{
    const GridPtr grid = make_log_grid(1e-3, 1e3, 1024, 3);
    const ResolventQuery q{cd(1.0, 0.5), 1.5, RadialFunction::zeros(grid)};
    const RadialFunction u = solve_helmholtz_channel(q, no_profile, *grid);
    CHECK(u.values.norm() == 0.0);
}

TEST_CASE("manufactured solution r e^{-r} on the l = 1 channel")
{
    const GridPtr grid = make_log_grid(1e-3, 1e3, 4096, 3);
    for (cd z : {cd(1.0, 0.0), cd(0.5, 2.0), cd(0.05, 5.0)}) {
        const cd z2 = z * z;
        const RadialFunction f =
            RadialFunction::sample(grid, [&](double r) { return (-1.0 + 4.0 / r + z2) * r * std::exp(-r); });
        const RadialFunction exact = RadialFunction::sample(grid, [](double r) { return cd(r * std::exp(-r)); });
        const RadialFunction u = solve_helmholtz_channel({z, 1.5, f}, no_profile, *grid);
        CHECK(rel_diff(u.values, exact.values) < 1e-6);
    }
}

TEST_CASE("manufactured solution r^{nu-lambda} e^{-r^2} on non-integer channels")
{
    // (P_nu + z^2) r^a e^{-r^2} = (4(nu+1) - 4r^2 + z^2) r^a e^{-r^2}, a = nu - lambda
    for (int n : {3, 4}) {
        const double lambda = 0.5 * (n - 2);
        const GridPtr grid = make_log_grid(1e-6, 1e2, 4096, n);
        for (double nu : {0.3, 1.0, 2.7}) {
            const double a = nu - lambda;
            const cd z(0.3, 1.2), z2 = z * z;
            const RadialFunction f = RadialFunction::sample(
                grid, [&](double r) { return (4.0 * (nu + 1.0) - 4.0 * r * r + z2) * std::pow(r, a) * std::exp(-r * r); });
            const RadialFunction exact =
                RadialFunction::sample(grid, [&](double r) { return cd(std::pow(r, a) * std::exp(-r * r)); });
            const RadialFunction u = solve_helmholtz_channel({z, nu, f}, no_profile, *grid);
            CHECK(rel_diff(u.values, exact.values) < 1e-8);
        }
    }
}

TEST_CASE("dense LU reproduces the banded solve")
{
    const GridPtr grid = make_log_grid(1e-2, 1e2, 512, 3);
    const RadialFunction f = RadialFunction::sample(grid, [](double r) { return cd(std::exp(-(r - 1.0) * (r - 1.0))); });
    const auto profile = [](double r) { return -0.1 * std::exp(-r) / (r * r); };
    const ResolventQuery q{cd(0.2, 1.0), 2.0, f};
    const ChannelSystem sys = assemble_channel_system(q, profile, *grid);
    const Eigen::Index N = sys.diag.size();
    Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(N, N);
    for (Eigen::Index i = 0; i < N; ++i) {
        A(i, i) = sys.diag(i);
        if (i > 0) A(i, i - 1) = sys.sub(i - 1);
        if (i + 1 < N) A(i, i + 1) = sys.sup(i);
    }
    const Eigen::VectorXcd v = A.partialPivLu().solve(sys.rhs);
    const Eigen::VectorXcd u_dense = (v.array() / grid->nodes.array().pow(0.5)).matrix();
    const RadialFunction u = solve_helmholtz_channel(q, profile, *grid);
    CHECK(rel_diff(u.values, u_dense) < 1e-10);
}

TEST_CASE("solver rejects invalid queries")
{
    const GridPtr grid = make_log_grid(1e-3, 1e3, 256, 3);
    const RadialFunction f = RadialFunction::sample(grid, [](double r) { return cd(std::exp(-r * r)); });
    CHECK_THROWS_AS(solve_helmholtz_channel({cd(0.0, 1.0), 0.5, f}, no_profile, *grid), InvalidArgument);
    CHECK_THROWS_AS(solve_helmholtz_channel({cd(-1.0, 0.0), 0.5, f}, no_profile, *grid), InvalidArgument);
    CHECK_THROWS_AS(solve_helmholtz_channel({cd(1.0, 0.0), -0.5, f}, no_profile, *grid), InvalidArgument);
}

TEST_CASE("ratios are conjugation symmetric and grid stable")
{
    const Potential v = inverse_square(Dimension::of(3), 0.5);
    const auto samples = default_f_samples();
    const GridPtr g4 = make_log_grid(1e-3, 1e3, 4096, 3);
    const GridPtr g8 = make_log_grid(1e-3, 1e3, 8192, 3);
    for (cd z : {cd(0.1, 0.0) * std::polar(1.0, 1.0), cd(1.0, 0.0) * std::polar(1.0, std::acos(0.01))}) {
        const double r = weighted_resolvent_ratio(v, z, samples, *g4);
        CHECK(r > 0.0);
        CHECK(weighted_resolvent_ratio(v, std::conj(z), samples, *g4) == doctest::Approx(r).epsilon(1e-10));
        CHECK(std::abs(weighted_resolvent_ratio(v, z, samples, *g8) - r) < 0.01 * r);
    }
}

TEST_CASE("scan reports: trivial single entry and bound constants")
{
    const GridPtr grid = make_log_grid(1e-3, 1e3, 2048, 3);
    const std::vector<SampleProfile> one{bump_sample(1.0)};
    const ResolventReport single = resolvent_scan(zero_potential(Dimension::of(3)), {cd(1.0, 0.3)}, one, *grid, false);
    CHECK(single.bound == doctest::Approx(2.0));
    CHECK(single.bound_sharp == doctest::Approx(4.0));
    REQUIRE(single.entries.size() >= 1);
    double mx = 0.0;
    for (const auto& e : single.entries) mx = std::max(mx, e.ratio);
    CHECK(single.sup_ratio == mx);

    const ResolventReport neg = resolvent_scan(inverse_square(Dimension::of(3), -0.2), {cd(1.0, 0.0)}, one, *grid, false);
    CHECK(neg.bound == doctest::Approx(10.0));
    CHECK(neg.delta_sq == doctest::Approx(0.05));

    CHECK_THROWS_AS(resolvent_scan(zero_potential(Dimension::of(3)), {}, one, *grid, false), InvalidArgument);
    CHECK_THROWS_AS(resolvent_scan(zero_potential(Dimension::of(3)), {cd(-1.0, 0.0)}, one, *grid, false),
                    InvalidArgument);
}

TEST_CASE("default scan against the Bessel Green's function oracle")
{
    // sup ratios from G(r,s) = sqrt(rs) I_nu(z r<) K_nu(z r>) quadrature, 40001 log points
    const GridPtr grid = make_log_grid(1e-3, 1e3, 4096, 3);
    const auto zs = default_z_set();
    const auto samples = default_f_samples();
    CHECK(zs.size() == 24);
    struct Case {
        double a, oracle;
    };
    for (const Case c : {Case{0.5, 0.71816}, Case{0.75, 0.62843}, Case{3.0, 0.27351}}) {
        const ResolventReport rep = resolvent_scan(inverse_square(Dimension::of(3), c.a), zs, samples, *grid, false);
        CHECK(rep.sup_ratio == doctest::Approx(c.oracle).epsilon(1e-4));
        CHECK(rep.sup_ratio <= rep.bound_sharp);
    }
    const ResolventReport free = resolvent_scan(zero_potential(Dimension::of(3)), zs, samples, *grid, true);
    CHECK(free.passed);
    CHECK(free.sup_ratio <= 2.0);
    CHECK(free.truncation_sensitivity < 0.01);
}

TEST_CASE("psi identity residual against the closed-form left-hand side")
{
    // symbolic: (1/4)psi'^2 + (1/2)psi psi'' - psi psi'/(2r) = s^3 r (2 + 3 s r) e^{-2sr} / (1 + 2sr),
    // which exceeds 3 s^4 r^2 e^{-2sr} / (1 + 2sr) by 2 s^3 r e^{-2sr} / (1 + 2sr)
    const auto gap = [](double s, double r) { return 2.0 * s * s * s * r * std::exp(-2.0 * s * r) / (1.0 + 2.0 * s * r); };
    CHECK(psi_identity_residual(1.0, 1.0) == doctest::Approx(2.0 * std::exp(-2.0) / 3.0).epsilon(1e-12));
    CHECK(psi_identity_residual(0.0, 2.0) == 0.0);
    for (double s : {0.01, 0.5, 3.0})
        for (double r : {1e-6, 0.1, 1.0, 7.0, 40.0})
            CHECK(psi_identity_residual(s, r) == doctest::Approx(gap(s, r)).epsilon(1e-9));
    CHECK(psi_identity_residual(2.0, 1e-9) == doctest::Approx(gap(2.0, 1e-9)).epsilon(1e-9));
    CHECK_THROWS_AS(psi_identity_residual(-1.0, 1.0), InvalidArgument);
}

TEST_CASE("weighted Hardy inequality")
{
    const GridPtr grid = make_log_grid(1e-10, 60.0, 8192, 3);
    const RadialFunction f = RadialFunction::sample(grid, [](double r) { return cd(r * std::exp(-r)); });
    const WeightedHardyResult one = weighted_hardy_check(PsiSpec{0.0}, f);
    CHECK(one.preconditions_met);
    CHECK(one.lhs == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(one.rhs == doctest::Approx(1.0).epsilon(1e-6));

    const WeightedHardyResult zero = weighted_hardy_check(PsiSpec{1.0}, RadialFunction::zeros(grid));
    CHECK(zero.lhs == 0.0);
    CHECK(zero.rhs == 0.0);

    for (double c : {0.3, 1.0, 4.0}) {
        const RadialFunction bump =
            RadialFunction::sample(grid, [c](double r) { return cd(r * r * std::exp(-8.0 * (r - c) * (r - c) / (c * c))); });
        const WeightedHardyResult w = weighted_hardy_check(PsiSpec{1.0}, bump);
        CHECK(w.preconditions_met);
        CHECK(w.lhs <= w.rhs);
    }

    const RadialFunction bad = RadialFunction::sample(grid, [](double r) { return cd(std::exp(-r)); });
    const WeightedHardyResult b = weighted_hardy_check(PsiSpec{0.0}, bad);
    CHECK_FALSE(b.preconditions_met);
    CHECK_FALSE(b.message.empty());
}
