#include "critdecay/resolvent.hpp"

#include "critdecay/errors.hpp"
#include "critdecay/parallel.hpp"
#include "critdecay/tridiagonal.hpp"

#include <cmath>
#include <sstream>

namespace critdecay {

using cplx = std::complex<double>;

ChannelSystem assemble_channel_system(const ResolventQuery& query,
                                      const std::function<double(double)>& V_radial,
                                      const RadialGrid& grid)
{
    if (!(query.z.real() > 0.0))
        throw InvalidArgument("resolvent query needs Re z > 0");
    if (!(query.nu >= 0.0))
        throw InvalidArgument("channel order must be non-negative");
    if (query.rhs.values.size() != grid.size())
        throw InvalidArgument("right-hand side does not live on the solve grid");

    const Eigen::Index N = grid.size();
    const double h = grid.step;
    const double a = h * h / 12.0;
    const double lambda = 0.5 * (grid.n - 2);
    const double nu2 = query.nu * query.nu;
    const cplx z2 = query.z * query.z;

    Eigen::VectorXcd q(N), s(N);
    for (Eigen::Index i = 0; i < N; ++i) {
        const double r = grid.nodes(i);
        const double v = V_radial ? V_radial(r) : 0.0;
        q(i) = nu2 + r * r * (v + z2);
        s(i) = std::pow(r, 2.0 + lambda) * query.rhs.values(i);
    }

    ChannelSystem sys;
    sys.diag = (2.0 + 10.0 * a * q.array()).matrix();
    // row i: −(1 − aq_{i−1})v_{i−1} + (2 + 10aq_i)v_i − (1 − aq_{i+1})v_{i+1}
    sys.sub = -(1.0 - a * q.head(N - 1).array()).matrix();
    sys.sup = -(1.0 - a * q.tail(N - 1).array()).matrix();

    sys.rhs = 10.0 * s;
    sys.rhs.tail(N - 1) += s.head(N - 1);
    sys.rhs.head(N - 1) += s.tail(N - 1);
    sys.rhs *= a;

    sys.diag(0) -= (1.0 - a * nu2) * std::exp(-query.nu * h);
    const cplx kout = std::sqrt(q(N - 1));
    sys.diag(N - 1) -= (1.0 - a * q(N - 1)) * std::exp(-kout * h);
    return sys;
}

RadialFunction solve_helmholtz_channel(const ResolventQuery& query,
                                       const std::function<double(double)>& V_radial,
                                       const RadialGrid& grid)
{
    const ChannelSystem sys = assemble_channel_system(query, V_radial, grid);
    const double lambda = 0.5 * (grid.n - 2);
    RadialFunction u;
    u.grid = query.rhs.grid;
    u.channel = query.nu;
    const double bnorm = sys.rhs.norm();
    if (bnorm == 0.0) {
        u.values = Eigen::VectorXcd::Zero(grid.size());
        return u;
    }

    const Eigen::VectorXcd v = solve_tridiagonal<cplx>(sys.sub, sys.diag, sys.sup, sys.rhs);
    if (!v.allFinite())
        throw Error("channel solve produced non-finite values");
    const double residual = (tridiagonal_multiply<cplx>(sys.sub, sys.diag, sys.sup, v) - sys.rhs).norm() / bnorm;
    if (residual > 1e-8)
        throw Error("channel solve residual " + std::to_string(residual) + " exceeds 1e-8");

    const Eigen::ArrayXd density = v.array().abs2();
    if (density(density.size() - 1) > 0.5 * density.maxCoeff())
        throw Error("channel solution does not decay toward rmax");

    u.values = (v.array() * grid.nodes.array().pow(-lambda)).matrix();
    return u;
}

double channel_ratio(const RadialFunction& u, const RadialFunction& f)
{
    const double den = weighted_l2_norm(f, 1.0);
    if (den == 0.0)
        return 0.0;
    return weighted_l2_norm(u, -1.0) / den;
}

SampleProfile bump_sample(double center)
{
    if (!(center > 0.0))
        throw InvalidArgument("bump_sample: center must be positive");
    std::ostringstream label;
    label << "bump_" << center;
    const double w = center / 4.0;
    return {label.str(), [center, w](double r) { return std::exp(-(r - center) * (r - center) / (2.0 * w * w)); }};
}

std::vector<SampleProfile> default_f_samples()
{
    return {bump_sample(0.1), bump_sample(1.0), bump_sample(10.0)};
}

std::vector<cplx> default_z_set()
{
    std::vector<cplx> z;
    const double phases[] = {0.0, 0.5, -0.5, 1.0, -1.0, 1.4, -1.4, std::acos(0.01)};
    for (double m : {0.1, 1.0, 10.0})
        for (double th : phases)
            z.push_back(std::polar(m, th));
    return z;
}

ChannelOrders channel_orders(const Potential& V, int count, int sphere_lmax)
{
    const Dimension dim = V.dimension;
    ChannelOrders out;
    switch (V.kind) {
    case PotentialKind::zero:
    case PotentialKind::inverse_square:
        for (int l = 0; l < count; ++l) {
            const double nu2 = std::pow(dim.lambda + l, 2) + V.strength;
            if (nu2 <= 0.0)
                throw AssumptionViolation("channel l = " + std::to_string(l) + " has nu^2 <= 0");
            out.nu.push_back(std::sqrt(nu2));
        }
        break;
    case PotentialKind::radial:
        for (int l = 0; l < count; ++l)
            out.nu.push_back(dim.lambda + l);
        out.V_radial = V.radial.value;
        break;
    case PotentialKind::dipole:
    case PotentialKind::homogeneous_angular: {
        const Sector sector = V.angular.kind() == AngularFunction::Kind::general ? Sector::full : Sector::zonal;
        const ChannelSpectrum spec = channel_spectrum(assemble(V.angular, dim, sphere_lmax, sector), dim);
        for (Eigen::Index k = 0; k < std::min<Eigen::Index>(count, spec.nu.size()); ++k)
            out.nu.push_back(spec.nu(k));
        break;
    }
    }
    return out;
}

double weighted_resolvent_ratio(const Potential& V, cplx z, const std::vector<SampleProfile>& f_samples,
                                const RadialGrid& grid)
{
    const AssumptionReport rep = assumption_report(V);
    if (!rep.passed)
        throw AssumptionViolation("weighted_resolvent_ratio: potential is not admissible");
    const ResolventReport r = resolvent_scan(V, {z}, f_samples, grid, false);
    return r.sup_ratio;
}

namespace {
GridPtr share(const RadialGrid& grid) { return std::make_shared<RadialGrid>(grid); }

double scan_ratio(const ChannelOrders& ch, std::size_t k, cplx z, const SampleProfile& prof, GridPtr grid)
{
    ResolventQuery q;
    q.z = z;
    q.nu = ch.nu[k];
    q.rhs = RadialFunction::sample(grid, [&](double r) { return cplx(prof.f(r), 0.0); }, q.nu);
    const RadialFunction u = solve_helmholtz_channel(q, ch.V_radial, *grid);
    return channel_ratio(u, q.rhs);
}
} // namespace

ResolventReport resolvent_scan(const Potential& V, const std::vector<cplx>& z_set,
                               const std::vector<SampleProfile>& f_samples, const RadialGrid& grid,
                               bool truncation_check)
{
    if (z_set.empty())
        throw InvalidArgument("resolvent_scan: empty z set");
    if (f_samples.empty())
        throw InvalidArgument("resolvent_scan: empty sample set");
    for (const cplx& z : z_set)
        if (!(z.real() > 0.0))
            throw InvalidArgument("resolvent_scan: z set must satisfy Re z > 0");
    if (grid.n != V.dimension.n)
        throw InvalidArgument("resolvent_scan: grid dimension differs from the potential's");

    const AssumptionReport rep = assumption_report(V);
    const ChannelOrders ch = channel_orders(V);
    GridPtr g = share(grid);

    ResolventReport out;
    out.delta_sq = rep.delta_sq_A2;
    out.bound = rep.delta_sq_A2 > 0.0 ? 1.0 / (2.0 * rep.delta_sq_A2) : std::numeric_limits<double>::infinity();
    out.bound_sharp = 2.0 * out.bound;
    out.rmin = grid.rmin;
    out.rmax = grid.rmax;
    out.N = grid.size();

    const std::size_t nz = z_set.size(), nc = ch.nu.size(), ns = f_samples.size();
    out.entries.resize(nz * nc * ns);
    parallel_for(out.entries.size(), [&](std::size_t idx) {
        const std::size_t iz = idx / (nc * ns), ic = (idx / ns) % nc, is = idx % ns;
        ResolventEntry& e = out.entries[idx];
        e.z = z_set[iz];
        e.nu = ch.nu[ic];
        e.sample = static_cast<int>(is);
        e.ratio = scan_ratio(ch, ic, e.z, f_samples[is], g);
    });
    for (const ResolventEntry& e : out.entries)
        out.sup_ratio = std::max(out.sup_ratio, e.ratio);

    if (truncation_check) {
        const int drop = static_cast<int>(std::lround(std::log(2.0) / grid.step));
        const int N2 = static_cast<int>(grid.size()) - drop;
        GridPtr half = make_log_grid(grid.rmin, grid.rmin * std::exp((N2 - 1) * grid.step), N2, grid.n);
        std::vector<double> change(out.entries.size(), 0.0);
        parallel_for(out.entries.size(), [&](std::size_t idx) {
            const ResolventEntry& e = out.entries[idx];
            const std::size_t ic = (idx / ns) % nc;
            const double r2 = scan_ratio(ch, ic, e.z, f_samples[e.sample], half);
            change[idx] = e.ratio > 0.0 ? std::abs(r2 - e.ratio) / e.ratio : 0.0;
        });
        for (double c : change)
            out.truncation_sensitivity = std::max(out.truncation_sensitivity, c);
    }

    out.passed = rep.passed && out.sup_ratio <= out.bound * (1.0 + out.tol);
    return out;
}

double PsiSpec::value(double r) const { return std::exp(-sigma * r) * std::sqrt(1.0 + 2.0 * sigma * r); }

double PsiSpec::d1(double r) const
{
    return -2.0 * sigma * sigma * r * std::exp(-sigma * r) / std::sqrt(1.0 + 2.0 * sigma * r);
}

double PsiSpec::d2(double r) const
{
    const double s = 1.0 + 2.0 * sigma * r;
    return 2.0 * sigma * sigma * std::exp(-sigma * r) * std::pow(s, -1.5) * (2.0 * sigma * sigma * r * r - 1.0);
}

double psi_identity_residual(double sigma, double r)
{
    if (!(sigma >= 0.0) || !(r > 0.0))
        throw InvalidArgument("psi_identity_residual needs sigma >= 0, r > 0");
    const PsiSpec psi{sigma};
    const double p = psi.value(r), p1 = psi.d1(r), p2 = psi.d2(r);
    const double lhs = 0.25 * p1 * p1 + 0.5 * p * p2 - p * p1 / (2.0 * r);
    const double rhs = 3.0 * std::pow(sigma, 4) * r * r * std::exp(-2.0 * sigma * r) / (1.0 + 2.0 * sigma * r);
    return std::abs(lhs - rhs);
}

WeightedHardyResult weighted_hardy_check(const PsiSpec& psi, const RadialFunction& f)
{
    const RadialGrid& g = *f.grid;
    const Eigen::Index N = g.size();
    WeightedHardyResult res;

    const double fmax = f.values.cwiseAbs().maxCoeff();
    if (fmax > 0.0 && std::abs(f.values(0)) > 1e-8 * fmax) {
        res.preconditions_met = false;
        res.message = "f does not vanish at the first node";
    }
    for (Eigen::Index i = 0; i < N && res.preconditions_met; ++i) {
        const double r = g.nodes(i);
        const double p = psi.value(r), p1 = psi.d1(r), p2 = psi.d2(r);
        const double cond = r * (p1 * p1 + 2.0 * p * p2) - 2.0 * p * p1;
        const double scale = 1e-14 * (std::abs(r * p1 * p1) + std::abs(2.0 * r * p * p2) + std::abs(2.0 * p * p1));
        if (p < 0.0 || p1 > 0.0 || cond < -scale) {
            res.preconditions_met = false;
            res.message = "psi sign conditions fail at r = " + std::to_string(r);
        }
    }

    const Eigen::VectorXcd df = radial_derivative(f);
    Eigen::ArrayXd w = g.step * g.nodes.array();
    w(0) *= 0.5;
    w(N - 1) *= 0.5;
    for (Eigen::Index i = 0; i < N; ++i) {
        const double r = g.nodes(i);
        const double p2 = std::pow(psi.value(r), 2);
        res.lhs += w(i) * p2 * std::norm(f.values(i)) / (r * r);
        res.rhs += 4.0 * w(i) * p2 * std::norm(df(i));
    }
    return res;
}

} // namespace critdecay
