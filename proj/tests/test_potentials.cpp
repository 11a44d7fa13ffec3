#include "critdecay/errors.hpp"
#include "critdecay/potentials.hpp"

#include "doctest.h"

#include <cmath>
#include <limits>
#include <random>

using namespace critdecay;

namespace {

Potential from_spec(const std::string& kind, double a = 0.0, double p = 0.0, int n = 3)
{
    PotentialSpec s;
    s.kind = kind;
    s.a = a;
    s.p = p;
    s.n = n;
    return build_potential(s);
}

} // namespace

TEST_CASE("build_potential")
{
    const Potential z = from_spec("zero");
    CHECK(z.dimension.lambda == 0.5);
    CHECK(z.kind == PotentialKind::zero);
    CHECK(from_spec("zero", 0, 0, 5).dimension.lambda == 1.5);
    CHECK_THROWS_AS(from_spec("dipole", 0.0, 1.0, 4), InvalidArgument);
    CHECK_THROWS_AS(from_spec("zero", 0, 0, 2), InvalidArgument);
    CHECK_THROWS_AS(from_spec("inverse_square", std::numeric_limits<double>::infinity()), InvalidArgument);
    CHECK_THROWS_AS(from_spec("inverse_square", std::nan("")), InvalidArgument);
    CHECK_THROWS_AS(from_spec("quadrupole"), InvalidArgument);
    CHECK(assumption_report(from_spec("inverse_square", -0.2)).passed);
    CHECK_FALSE(assumption_report(from_spec("inverse_square", -0.3)).passed);
}

TEST_CASE("tilde potential")
{
    const Potential v = inverse_square(Dimension::of(3), 0.7);
    const Potential t = tilde_potential(v);
    for (double r : {1e-3, 0.5, 3.0, 1e3})
        CHECK(t(r, 0.3) == v(r, 0.3));

    PotentialSpec s;
    s.kind = "radial";
    s.a = 0.4;
    s.eps = 0.5;
    s.profile = "power";
    const Potential pw = tilde_potential(build_potential(s));
    for (double r : {0.01, 1.0, 20.0})
        CHECK(pw(r, 0.0) == doctest::Approx(1.5 * 0.4 * std::pow(r, -2.5)).epsilon(1e-12));

    s.profile = "exp";
    s.a = 1.0;
    const Potential ex = build_potential(s);
    const Potential et = tilde_potential(ex);
    for (double r : {0.01, 1.0, 20.0})
        CHECK(et(r, 0.0) == doctest::Approx(std::exp(-r) * (1.0 + r) / (r * r)).epsilon(1e-12));

    // no closed form registered: 5-point stencil
    RadialProfile custom;
    custom.value = [](double r) { return std::exp(-r) / (r * r); };
    custom.label = "exp_fd";
    const Potential fd = tilde_potential(radial_potential(Dimension::of(3), custom));
    for (double r : {0.01, 1.0, 20.0})
        CHECK(fd(r, 0.0) == doctest::Approx(std::exp(-r) * (1.0 + r) / (r * r)).epsilon(1e-8));
}

TEST_CASE("A1 suprema")
{
    const auto radii = default_radii();
    const A1Result z = check_A1(zero_potential(Dimension::of(3)), radii);
    CHECK(z.gamma_plus_sq == 0.0);
    CHECK(z.gamma_minus_sq == 0.0);
    const A1Result is = check_A1(inverse_square(Dimension::of(3), -0.2), radii);
    CHECK(is.gamma_plus_sq == 0.0);
    CHECK(is.gamma_minus_sq == doctest::Approx(0.2));
    const A1Result d = check_A1(dipole_potential(1.0), radii);
    CHECK(d.gamma_plus_sq == doctest::Approx(1.0));
    CHECK(d.gamma_minus_sq == doctest::Approx(1.0));

    RadialProfile blow;
    blow.value = [](double r) { return std::pow(r, -8.0); };
    const A1Result b = check_A1(radial_potential(Dimension::of(3), blow), radii);
    CHECK(std::isinf(b.gamma_plus_sq));
    CHECK_FALSE(b.finite);
}

TEST_CASE("positivity constants")
{
    const auto radii = default_radii();
    CHECK(check_positivity(zero_potential(Dimension::of(3)), 40, radii).delta_sq == doctest::Approx(0.25).epsilon(1e-9));
    CHECK(check_positivity(inverse_square(Dimension::of(3), 0.5), 40, radii).delta_sq ==
          doctest::Approx(0.75).epsilon(1e-9));
    CHECK(check_positivity(dipole_potential(1.0), 40, radii).delta_sq ==
          doctest::Approx(0.25 - 0.15766348313775183).epsilon(1e-9));
    CHECK_THROWS_AS(check_positivity(zero_potential(Dimension::of(3)), 4, radii), InvalidArgument);

    PotentialSpec s;
    s.kind = "radial";
    s.profile = "exp";
    s.a = -0.2;
    const PositivityResult pr = check_positivity(build_potential(s), 40, radii);
    CHECK(pr.per_radius_min.size() == radii.size());
    // min over sampled radii of r²V = −0.2 e^{−r} is at the smallest radius
    CHECK(pr.delta_sq == doctest::Approx(0.25 - 0.2 * std::exp(-1e-3)).epsilon(1e-8));
}

TEST_CASE("assumption report constants")
{
    const AssumptionReport z = assumption_report(zero_potential(Dimension::of(3)));
    CHECK(z.passed);
    CHECK(z.c1 == 1.0);
    CHECK(z.c2 == 1.0);

    const AssumptionReport d = assumption_report(dipole_potential(1.0));
    CHECK(d.passed);
    CHECK(d.c2 == doctest::Approx(1.0 + 1.0 / 0.25));
    CHECK(d.c1 == doctest::Approx(d.delta_sq_A2 / (d.delta_sq_A2 + 1.0)));

    const AssumptionReport w = assumption_report(inverse_square(Dimension::of(3), -0.2));
    CHECK(w.c1 == doctest::Approx(0.05 / (0.05 + 0.2)));
    CHECK(w.c2 == 1.0);

    const AssumptionReport bad = assumption_report(inverse_square(Dimension::of(3), -0.3));
    CHECK_FALSE(bad.passed);
    CHECK(bad.c1 == 0.0);
    CHECK(std::isinf(bad.c2));
    CHECK_FALSE(bad.diagnostics.empty());
}

TEST_CASE("assumption report of V-tilde equals that of V for homogeneous kinds")
{
    for (const Potential& v : {inverse_square(Dimension::of(3), 0.3), dipole_potential(0.8)}) {
        const AssumptionReport a = assumption_report(v), b = assumption_report(tilde_potential(v));
        CHECK(a.gamma_plus_sq == b.gamma_plus_sq);
        CHECK(a.gamma_minus_sq == b.gamma_minus_sq);
        CHECK(a.delta_sq_A2 == b.delta_sq_A2);
        CHECK(a.delta_sq_A3 == b.delta_sq_A3);
        CHECK(a.c1 == b.c1);
        CHECK(a.c2 == b.c2);
    }
}

TEST_CASE("energy sandwich c1 |grad u|^2 <= Q(u) <= c2 |grad u|^2")
{
    const GridPtr grid = make_log_grid(1e-6, 1e2, 2048, 3);
    const int lmax = 6;
    PotentialSpec rs;
    rs.kind = "radial";
    rs.profile = "exp";
    rs.a = -0.2;
    const std::vector<Potential> potentials{zero_potential(Dimension::of(3)), inverse_square(Dimension::of(3), 0.5),
                                            inverse_square(Dimension::of(3), -0.2), dipole_potential(1.0),
                                            build_potential(rs)};
    std::mt19937_64 rng(0x5EED);
    std::normal_distribution<double> normal;
    std::uniform_real_distribution<double> unif(0.3, 3.0);
    for (const Potential& v : potentials) {
        const AssumptionReport rep = assumption_report(v);
        REQUIRE(rep.passed);
        for (int trial = 0; trial < 12; ++trial) {
            Eigen::MatrixXcd coeffs(grid->size(), lmax + 1);
            for (int l = 0; l <= lmax; ++l) {
                const double amp = normal(rng), width = unif(rng), shift = normal(rng);
                for (Eigen::Index i = 0; i < grid->size(); ++i) {
                    const double r = grid->nodes(i);
                    coeffs(i, l) = amp * std::pow(r, l) * (1.0 + shift * r) * std::exp(-r * r / (width * width));
                }
            }
            const EnergyForms e = energy_forms(v, *grid, coeffs);
            const double tol = 1e-6 * e.gradient_sq;
            CHECK(e.q >= rep.c1 * e.gradient_sq - tol);
            CHECK(e.q <= rep.c2 * e.gradient_sq + tol);
            CHECK(e.q >= rep.delta_sq_A2 * e.hardy_sq - tol);
        }
    }
}
