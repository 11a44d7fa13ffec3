#include "critdecay/evolution.hpp"

#include "critdecay/errors.hpp"
#include "critdecay/parallel.hpp"
#include "critdecay/special.hpp"
#include "critdecay/tridiagonal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace critdecay {

using cplx = std::complex<double>;

std::string to_string(Method m)
{
    switch (m) {
    case Method::hankel_spectral:
        return "hankel_spectral";
    case Method::crank_nicolson:
        return "crank_nicolson";
    case Method::leapfrog:
        return "leapfrog";
    }
    return "unknown";
}

Method method_from_string(const std::string& s)
{
    if (s == "hankel_spectral")
        return Method::hankel_spectral;
    if (s == "crank_nicolson")
        return Method::crank_nicolson;
    if (s == "leapfrog")
        return Method::leapfrog;
    throw InvalidArgument("unknown evolution method '" + s + "'");
}

StrichartzQuery admissible_pair(Equation equation, int n, double p)
{
    if (n < 3)
        throw InvalidArgument("admissible_pair needs n >= 3");
    const double inv_p = std::isinf(p) ? 0.0 : 1.0 / p;
    StrichartzQuery q;
    q.p = p;
    q.equation = equation;
    if (equation == Equation::schrodinger) {
        if (!(p >= 2.0))
            throw InvalidArgument("Schrodinger pairs need p >= 2");
        q.q = n / (0.5 * n - 2.0 * inv_p);
        q.sigma_gap = 0.0;
    } else {
        if (!(p > 2.0))
            throw InvalidArgument("wave pairs need p > 2");
        const double rest = 0.5 * (n - 1) - 2.0 * inv_p;
        if (!(rest > 0.0))
            throw InvalidArgument("wave pair has no finite q for this p");
        q.q = (n - 1) / rest;
        q.sigma_gap = inv_p + n / q.q - 0.5 * (n - 1);
    }
    return q;
}

ChannelSet channel_set(const Potential& V, int lmax)
{
    if (lmax < 0)
        throw InvalidArgument("channel_set: lmax must be non-negative");
    ChannelSet cs;
    cs.dimension = V.dimension;
    cs.lmax = lmax;
    cs.angles = angular_quadrature(V.dimension, std::max(lmax, 1), Sector::zonal, 2 * lmax + 1);
    cs.angles.basis.conservativeResize(Eigen::NoChange, lmax + 1);
    const double lam = V.dimension.lambda;

    switch (V.kind) {
    case PotentialKind::zero:
    case PotentialKind::inverse_square:
    case PotentialKind::radial:
        cs.coefficients = Eigen::MatrixXd::Identity(lmax + 1, lmax + 1);
        for (int l = 0; l <= lmax; ++l) {
            const double a = V.kind == PotentialKind::inverse_square ? V.strength : 0.0;
            const double nu2 = (lam + l) * (lam + l) + a;
            if (nu2 <= 0.0)
                throw AssumptionViolation("channel with nu^2 <= 0");
            cs.nu.push_back(std::sqrt(nu2));
        }
        if (V.kind == PotentialKind::radial)
            cs.V_radial = V.radial.value;
        break;
    case PotentialKind::dipole:
    case PotentialKind::homogeneous_angular: {
        if (V.angular.kind() == AngularFunction::Kind::general)
            throw InvalidArgument("evolution supports zonal angular potentials only");
        const SphereOperator op = assemble(V.angular, V.dimension, std::max(lmax, 2));
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(op.matrix.topLeftCorner(lmax + 1, lmax + 1));
        if (es.info() != Eigen::Success)
            throw ConvergenceError("sphere eigensolve failed");
        cs.coefficients = es.eigenvectors();
        for (Eigen::Index k = 0; k <= lmax; ++k) {
            const double nu2 = es.eigenvalues()(k) + lam * lam;
            if (nu2 <= 0.0)
                throw AssumptionViolation("channel with nu^2 <= 0");
            cs.nu.push_back(std::sqrt(nu2));
        }
        break;
    }
    }
    return cs;
}

namespace {

Eigen::ArrayXd unitary_scale(const RadialGrid& g)
{
    return std::sqrt(g.step) * g.nodes.array().pow(0.5 * g.n);
}

Eigen::MatrixXcd project(const ChannelSet& cs, const RadialGrid& grid, const DataFunction& f)
{
    const Eigen::Index N = grid.size();
    const Eigen::Index J = cs.angles.x.size();
    Eigen::MatrixXcd values(N, J);
    for (Eigen::Index i = 0; i < N; ++i)
        for (Eigen::Index j = 0; j < J; ++j)
            values(i, j) = f(grid.nodes(i), cs.angles.x(j));
    if (!values.allFinite())
        throw InvalidArgument("Cauchy data is not finite on the grid");
    const Eigen::MatrixXd wy = cs.angles.weights.asDiagonal() * cs.angles.basis;
    const Eigen::MatrixXcd free = values * wy.cast<cplx>();
    return free * cs.coefficients.cast<cplx>();
}

} // namespace

double free_sobolev_norm(const ChannelSet& cs, const RadialGrid& grid, const Eigen::MatrixXcd& coeffs, double s)
{
    const Eigen::MatrixXcd free = coeffs * cs.coefficients.transpose().cast<cplx>();
    const Eigen::ArrayXd scale = unitary_scale(grid);
    const Eigen::ArrayXd rho_s = grid.nodes.array().pow(s);
    double total = 0.0;
    for (int l = 0; l <= cs.lmax; ++l) {
        const Eigen::VectorXcd g = (free.col(l).array() * scale).matrix();
        if (g.squaredNorm() == 0.0)
            continue;
        const Eigen::VectorXcd hg = hankel_operator(grid, cs.dimension.lambda + l)->apply(g);
        total += (hg.array().abs2() * rho_s.square()).sum();
    }
    return std::sqrt(total);
}

double operator_sobolev_norm(const ChannelSet& cs, const RadialGrid& grid, const Eigen::MatrixXcd& coeffs,
                             double s)
{
    const Eigen::ArrayXd scale = unitary_scale(grid);
    const Eigen::ArrayXd rho_s = grid.nodes.array().pow(s);
    double total = 0.0;
    for (Eigen::Index k = 0; k < coeffs.cols(); ++k) {
        const Eigen::VectorXcd g = (coeffs.col(k).array() * scale).matrix();
        if (g.squaredNorm() == 0.0)
            continue;
        const Eigen::VectorXcd hg = hankel_operator(grid, cs.nu[k])->apply(g);
        total += (hg.array().abs2() * rho_s.square()).sum();
    }
    return std::sqrt(total);
}

CauchyData make_cauchy_data(const ChannelSet& channels, GridPtr grid, const DataFunction& f, const DataFunction& g)
{
    if (grid->n != channels.dimension.n)
        throw InvalidArgument("Cauchy data grid dimension differs from the channels'");
    return make_channel_data(channels, grid, project(channels, *grid, f),
                             g ? project(channels, *grid, g) : Eigen::MatrixXcd());
}

CauchyData make_channel_data(const ChannelSet& channels, GridPtr grid, const Eigen::MatrixXcd& f,
                             const Eigen::MatrixXcd& g)
{
    if (grid->n != channels.dimension.n)
        throw InvalidArgument("Cauchy data grid dimension differs from the channels'");
    const Eigen::Index K = static_cast<Eigen::Index>(channels.nu.size());
    if (f.rows() != grid->size() || f.cols() != K || (g.size() && (g.rows() != f.rows() || g.cols() != K)))
        throw InvalidArgument("channel data has the wrong shape");
    CauchyData d;
    d.channels = channels;
    d.f = f;
    d.f_l2 = std::sqrt((d.f.array().abs2().colwise() * grid->weights.array()).sum());
    d.f_h_half = free_sobolev_norm(channels, *grid, d.f, 0.5);
    if (g.size()) {
        d.g = g;
        d.g_h_minus_half = free_sobolev_norm(channels, *grid, d.g, -0.5);
    }
    d.grid = std::move(grid);
    return d;
}

Eigen::MatrixXcd ground_channel_gaussian(const ChannelSet& channels, const RadialGrid& grid, double width)
{
    if (!(width > 0.0))
        throw InvalidArgument("ground_channel_gaussian: width must be positive");
    const auto k0 = std::min_element(channels.nu.begin(), channels.nu.end()) - channels.nu.begin();
    const double nu = channels.nu[k0];
    const Eigen::ArrayXd r = grid.nodes.array();
    Eigen::MatrixXcd f = Eigen::MatrixXcd::Zero(grid.size(), static_cast<Eigen::Index>(channels.nu.size()));
    f.col(k0) = (std::sqrt(sphere_area(channels.dimension.n)) * r.pow(nu - channels.dimension.lambda) *
                 (-r.square() / (2.0 * width * width)).exp())
                    .cast<std::complex<double>>()
                    .matrix();
    return f;
}

double EvolutionTrace::mass_drift() const
{
    double d = 0.0;
    for (double m : mass)
        d = std::max(d, std::abs(m - mass.front()));
    return mass.front() > 0.0 ? d / mass.front() : d;
}

double EvolutionTrace::energy_drift() const
{
    double d = 0.0;
    for (double e : energy)
        d = std::max(d, std::abs(e - energy.front()));
    return !energy.empty() && energy.front() > 0.0 ? d / energy.front() : d;
}

namespace {

// Channel-wise stepping in unitary coordinates; `record` sees N × K states.
class Recorder {
public:
    Recorder(const CauchyData& data, const EvolutionOptions& options, EvolutionTrace& trace, int nsteps)
        : data_(data), trace_(trace), grid_(*data.grid), scale_(unitary_scale(grid_))
    {
        trace_.queries = options.strichartz;
        trace_.lq.assign(options.strichartz.size(), {});
        trace_.sup_flag.assign(options.strichartz.size(), false);
        for (std::size_t k = 0; k < options.strichartz.size(); ++k)
            trace_.sup_flag[k] = std::isinf(options.strichartz[k].q);
        synth_ = data.channels.angles.basis * data.channels.coefficients;
        stride_ = std::max(1, nsteps / std::max(1, options.snapshots));
        nsteps_ = nsteps;
        inv_r2_ = grid_.nodes.array().square().inverse();
    }

    void record(int step, double t, const Eigen::MatrixXcd& G)
    {
        trace_.times.push_back(t);
        trace_.mass.push_back(G.norm());
        trace_.hardy_sq.push_back((G.array().abs2().colwise() * inv_r2_).sum());
        if (step % stride_ == 0 || step == nsteps_) {
            trace_.state_times.push_back(t);
            trace_.states.push_back((scale_.inverse().matrix().asDiagonal() * G));
        }
        if (trace_.queries.empty())
            return;
        const Eigen::MatrixXcd U = (scale_.inverse().matrix().asDiagonal() * G);
        for (std::size_t k = 0; k < trace_.queries.size(); ++k)
            trace_.lq[k].push_back(lq_norm(U, trace_.queries[k]));
    }

private:
    double lq_norm(const Eigen::MatrixXcd& U, const StrichartzQuery& query) const
    {
        const ChannelSet& cs = data_.channels;
        Eigen::MatrixXcd values;
        if (query.sigma_gap != 0.0) {
            Eigen::MatrixXcd free = U * cs.coefficients.transpose().cast<cplx>();
            for (int l = 0; l <= cs.lmax; ++l) {
                Eigen::VectorXcd g = (free.col(l).array() * scale_).matrix();
                if (g.squaredNorm() == 0.0)
                    continue;
                auto H = hankel_operator(grid_, cs.dimension.lambda + l);
                Eigen::VectorXcd mid = H->apply(g);
                mid.array() *= grid_.nodes.array().pow(query.sigma_gap);
                free.col(l) = (H->apply(mid).array() / scale_).matrix();
            }
            values = free * cs.angles.basis.transpose().cast<cplx>();
        } else {
            values = U * synth_.transpose().cast<cplx>();
        }
        if (std::isinf(query.q))
            return values.cwiseAbs().maxCoeff();
        const Eigen::ArrayXXd mag = values.array().abs().pow(query.q);
        const double s = (grid_.weights.transpose() * mag.matrix() * cs.angles.weights)(0);
        return std::pow(s, 1.0 / query.q);
    }

    const CauchyData& data_;
    EvolutionTrace& trace_;
    const RadialGrid& grid_;
    Eigen::ArrayXd scale_;
    Eigen::ArrayXd inv_r2_;
    Eigen::MatrixXd synth_;
    int stride_ = 1;
    int nsteps_ = 0;
};

int step_count(double T, double dt)
{
    if (!(T > 0.0) || !(dt > 0.0))
        throw InvalidArgument("evolution needs T > 0 and dt > 0");
    int n = static_cast<int>(std::ceil(T / dt - 1e-9));
    if (n % 2)
        ++n;
    return std::max(n, 2);
}

std::vector<Eigen::Index> active_channels(const Eigen::MatrixXcd& f, const Eigen::MatrixXcd& g)
{
    std::vector<Eigen::Index> active;
    const double total = f.squaredNorm() + (g.size() ? g.squaredNorm() : 0.0);
    // channels at roundoff level from the angular projection are left at zero
    for (Eigen::Index k = 0; k < f.cols(); ++k) {
        const double e = f.col(k).squaredNorm() + (g.size() ? g.col(k).squaredNorm() : 0.0);
        if (e > 1e-26 * total)
            active.push_back(k);
    }
    return active;
}

// Tridiagonal S = D⁻¹(−∂² + ν²)D⁻¹ + V on unitary coordinates.
struct ChannelMatrix {
    Eigen::VectorXd sub, diag, sup;
};

ChannelMatrix channel_matrix(const RadialGrid& grid, double nu, const std::function<double(double)>& V)
{
    const Eigen::Index N = grid.size();
    const double h2 = grid.step * grid.step;
    const Eigen::ArrayXd r = grid.nodes.array();
    ChannelMatrix m;
    m.diag = ((2.0 / h2 + nu * nu) / r.square()).matrix();
    if (V)
        for (Eigen::Index i = 0; i < N; ++i)
            m.diag(i) += V(r(i));
    m.diag(0) -= std::exp(-nu * grid.step) / (h2 * r(0) * r(0));
    m.sub = (-1.0 / (h2 * r.head(N - 1) * r.tail(N - 1))).matrix();
    m.sup = m.sub;
    return m;
}

void check_method(const Potential& V, Equation eq, Method method)
{
    if (method == Method::hankel_spectral && !V.homogeneous())
        throw InvalidArgument("hankel_spectral needs a homogeneous potential; use a time stepper");
    if (eq == Equation::schrodinger && method == Method::leapfrog)
        throw InvalidArgument("leapfrog is a wave-equation method");
    if (eq == Equation::wave && method == Method::crank_nicolson)
        throw InvalidArgument("crank_nicolson is a Schrodinger-equation method");
    if (V.kind == PotentialKind::homogeneous_angular && V.angular.kind() == AngularFunction::Kind::general)
        throw InvalidArgument("evolution supports zonal angular potentials only");
}

EvolutionTrace start_trace(Equation eq, Method method, double T, int nsteps, const CauchyData& data)
{
    EvolutionTrace trace;
    trace.equation = eq;
    trace.method = method;
    trace.T = T;
    trace.dt = T / nsteps;
    trace.data_l2 = data.f_l2;
    trace.data_h_half = data.f_h_half;
    trace.data_h_minus_half = data.g_h_minus_half;
    return trace;
}

} // namespace

EvolutionTrace evolve_schrodinger(const Potential& V, const CauchyData& data, double T, double dt,
                                  const EvolutionOptions& options)
{
    check_method(V, Equation::schrodinger, options.method);
    const int nsteps = step_count(T, dt);
    EvolutionTrace trace = start_trace(Equation::schrodinger, options.method, T, nsteps, data);
    const RadialGrid& grid = *data.grid;
    const Eigen::ArrayXd scale = unitary_scale(grid);
    const Eigen::Index N = grid.size(), K = data.f.cols();
    const std::vector<Eigen::Index> active = active_channels(data.f, Eigen::MatrixXcd());

    Eigen::MatrixXcd G = Eigen::MatrixXcd::Zero(N, K);
    for (Eigen::Index k : active)
        G.col(k) = (data.f.col(k).array() * scale).matrix();

    Recorder rec(data, options, trace, nsteps);
    rec.record(0, 0.0, G);
    const double step = trace.dt;

    if (options.method == Method::hankel_spectral) {
        std::vector<Eigen::VectorXcd> hat(K);
        for (Eigen::Index k : active)
            hat[k] = hankel_operator(grid, data.channels.nu[k])->apply(Eigen::VectorXcd(G.col(k)));
        const Eigen::ArrayXd rho2 = grid.nodes.array().square();
        for (int n = 1; n <= nsteps; ++n) {
            const double t = n * step;
            const Eigen::VectorXcd phase = (rho2 * cplx(0.0, -t)).exp().matrix();
            parallel_for(active.size(), [&](std::size_t a) {
                const Eigen::Index k = active[a];
                G.col(k) = hankel_operator(grid, data.channels.nu[k])->apply(
                    Eigen::VectorXcd(phase.cwiseProduct(hat[k])));
            });
            rec.record(n, t, G);
        }
        return trace;
    }

    // Crank–Nicolson: (I + iτS) g⁺ = (I − iτS) g
    const cplx it(0.0, 0.5 * step);
    std::vector<ChannelMatrix> mats(K);
    for (Eigen::Index k : active)
        mats[k] = channel_matrix(grid, data.channels.nu[k], data.channels.V_radial);
    for (int n = 1; n <= nsteps; ++n) {
        parallel_for(active.size(), [&](std::size_t a) {
            const Eigen::Index k = active[a];
            const ChannelMatrix& m = mats[k];
            const Eigen::VectorXcd sub = it * m.sub.cast<cplx>();
            const Eigen::VectorXcd sup = it * m.sup.cast<cplx>();
            const Eigen::VectorXcd diag = (1.0 + it * m.diag.cast<cplx>().array()).matrix();
            const Eigen::VectorXcd g = G.col(k);
            const Eigen::VectorXcd Sg =
                tridiagonal_multiply<cplx>(m.sub.cast<cplx>(), m.diag.cast<cplx>(), m.sup.cast<cplx>(), g);
            const Eigen::VectorXcd rhs = g - it * Sg;
            G.col(k) = solve_tridiagonal<cplx>(sub, diag, sup, rhs);
        });
        rec.record(n, n * step, G);
    }
    return trace;
}

EvolutionTrace evolve_wave(const Potential& V, const CauchyData& data, double T, double dt,
                           const EvolutionOptions& options)
{
    check_method(V, Equation::wave, options.method);
    const int nsteps = step_count(T, dt);
    EvolutionTrace trace = start_trace(Equation::wave, options.method, T, nsteps, data);
    const RadialGrid& grid = *data.grid;
    const Eigen::ArrayXd scale = unitary_scale(grid);
    const Eigen::Index N = grid.size(), K = data.f.cols();
    const Eigen::MatrixXcd gdata = data.g.size() ? data.g : Eigen::MatrixXcd::Zero(N, K);
    const std::vector<Eigen::Index> active = active_channels(data.f, gdata);

    Eigen::MatrixXcd G = Eigen::MatrixXcd::Zero(N, K), Gv = Eigen::MatrixXcd::Zero(N, K);
    for (Eigen::Index k : active) {
        G.col(k) = (data.f.col(k).array() * scale).matrix();
        Gv.col(k) = (gdata.col(k).array() * scale).matrix();
    }

    Recorder rec(data, options, trace, nsteps);
    const double step = trace.dt;

    if (options.method == Method::hankel_spectral) {
        const Eigen::ArrayXd rho = grid.nodes.array();
        std::vector<Eigen::VectorXcd> fh(K), gh(K);
        for (Eigen::Index k : active) {
            auto H = hankel_operator(grid, data.channels.nu[k]);
            fh[k] = H->apply(Eigen::VectorXcd(G.col(k)));
            gh[k] = H->apply(Eigen::VectorXcd(Gv.col(k)));
        }
        std::vector<double> part(K, 0.0);
        for (int n = 0; n <= nsteps; ++n) {
            const double t = n * step;
            const Eigen::ArrayXd c = (t * rho).cos(), s = (t * rho).sin();
            parallel_for(active.size(), [&](std::size_t a) {
                const Eigen::Index k = active[a];
                const Eigen::ArrayXcd u = c * fh[k].array() + (s / rho) * gh[k].array();
                const Eigen::ArrayXcd ut = -(rho * s) * fh[k].array() + c * gh[k].array();
                part[k] = (rho.square() * u.abs2()).sum() + ut.abs2().sum();
                G.col(k) = hankel_operator(grid, data.channels.nu[k])->apply(Eigen::VectorXcd(u.matrix()));
            });
            double e = 0.0;
            for (Eigen::Index k : active)
                e += part[k];
            trace.energy.push_back(e);
            rec.record(n, t, G);
        }
        return trace;
    }

    std::vector<ChannelMatrix> mats(K);
    double lmax_bound = 0.0;
    for (Eigen::Index k : active) {
        mats[k] = channel_matrix(grid, data.channels.nu[k], data.channels.V_radial);
        const ChannelMatrix& m = mats[k];
        for (Eigen::Index i = 0; i < N; ++i) {
            double row = std::abs(m.diag(i));
            if (i > 0)
                row += std::abs(m.sub(i - 1));
            if (i + 1 < N)
                row += std::abs(m.sup(i));
            lmax_bound = std::max(lmax_bound, row);
        }
    }
    if (step * step * lmax_bound >= 4.0)
        throw InvalidArgument("leapfrog dt " + std::to_string(step) + " exceeds the stability threshold " +
                              std::to_string(2.0 / std::sqrt(lmax_bound)));

    auto apply_S = [&](Eigen::Index k, const Eigen::VectorXcd& g) {
        const ChannelMatrix& m = mats[k];
        return tridiagonal_multiply<cplx>(m.sub.cast<cplx>(), m.diag.cast<cplx>(), m.sup.cast<cplx>(), g);
    };
    auto energy = [&](const Eigen::MatrixXcd& next, const Eigen::MatrixXcd& cur) {
        double e = 0.0;
        for (Eigen::Index k : active) {
            const Eigen::VectorXcd a = next.col(k), b = cur.col(k);
            e += ((a - b) / step).squaredNorm() + a.dot(apply_S(k, b)).real();
        }
        return e;
    };

    Eigen::MatrixXcd prev = G, next = G;
    for (Eigen::Index k : active)
        next.col(k) = G.col(k) + step * Gv.col(k) - 0.5 * step * step * apply_S(k, G.col(k));
    rec.record(0, 0.0, G);
    trace.energy.push_back(energy(next, G));
    for (int n = 1; n <= nsteps; ++n) {
        prev = G;
        G = next;
        rec.record(n, n * step, G);
        if (n == nsteps)
            break;
        for (Eigen::Index k : active)
            next.col(k) = 2.0 * G.col(k) - prev.col(k) - step * step * apply_S(k, G.col(k));
        trace.energy.push_back(energy(next, G));
    }
    trace.energy.push_back(trace.energy.back());
    return trace;
}

double time_integral(const std::vector<double>& times, const std::vector<double>& values, std::optional<double> T)
{
    if (times.size() != values.size() || times.size() < 3)
        throw InvalidArgument("time_integral needs at least three aligned samples");
    const double dt = times[1] - times[0];
    std::size_t last = times.size() - 1;
    if (T)
        while (last > 0 && times[last] > *T + 1e-9 * dt)
            --last;
    if (last % 2)
        --last;
    double s = values[0] + values[last];
    for (std::size_t i = 1; i < last; ++i)
        s += (i % 2 ? 4.0 : 2.0) * values[i];
    return s * dt / 3.0;
}

double smoothing_norm(const EvolutionTrace& trace, std::optional<double> T)
{
    return std::sqrt(std::max(0.0, time_integral(trace.times, trace.hardy_sq, T)));
}

double strichartz_norm(const EvolutionTrace& trace, const StrichartzQuery& query)
{
    for (std::size_t k = 0; k < trace.queries.size(); ++k) {
        const StrichartzQuery& q = trace.queries[k];
        const bool same_q = (std::isinf(q.q) && std::isinf(query.q)) || std::abs(q.q - query.q) < 1e-12;
        if (!same_q || std::abs(q.sigma_gap - query.sigma_gap) > 1e-12 || q.equation != query.equation)
            continue;
        const std::vector<double>& series = trace.lq[k];
        if (std::isinf(query.p))
            return *std::max_element(series.begin(), series.end());
        std::vector<double> powered(series.size());
        for (std::size_t i = 0; i < series.size(); ++i)
            powered[i] = std::pow(series[i], query.p);
        return std::pow(std::max(0.0, time_integral(trace.times, powered)), 1.0 / query.p);
    }
    throw InvalidArgument("strichartz_norm: query was not recorded in the trace");
}

} // namespace critdecay
