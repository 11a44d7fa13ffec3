#include "critdecay/radial.hpp"

#include "critdecay/errors.hpp"

#include <cmath>

namespace critdecay {

bool RadialGrid::same_as(const RadialGrid& other) const
{
    return size() == other.size() && n == other.n &&
           std::abs(rmin - other.rmin) <= 1e-14 * rmin && std::abs(step - other.step) <= 1e-14 * step;
}

GridPtr make_log_grid(double rmin, double rmax, int N, int n)
{
    if (!(rmin > 0.0) || !std::isfinite(rmin))
        throw InvalidArgument("rmin must be positive");
    if (!(rmax > rmin) || !std::isfinite(rmax))
        throw InvalidArgument("rmax must exceed rmin");
    if (N < 64)
        throw InvalidArgument("radial grid needs at least 64 nodes");
    if (n < 1)
        throw InvalidArgument("grid dimension must be positive");

    auto grid = std::make_shared<RadialGrid>();
    grid->rmin = rmin;
    grid->rmax = rmax;
    grid->n = n;
    grid->step = std::log(rmax / rmin) / (N - 1);
    grid->nodes.resize(N);
    for (int i = 0; i < N; ++i)
        grid->nodes(i) = rmin * std::exp(i * grid->step);
    grid->nodes(N - 1) = rmax;

    const Eigen::ArrayXd rn = grid->nodes.array().pow(n);
    grid->weights = grid->step * rn.matrix();
    const double interior = grid->weights.segment(1, N - 2).sum();
    const double exact = (std::pow(rmax, n) - std::pow(rmin, n)) / n;
    const double rest = exact - interior;
    const double ends = rn(0) + rn(N - 1);
    grid->weights(0) = rest * rn(0) / ends;
    grid->weights(N - 1) = rest * rn(N - 1) / ends;
    return grid;
}

GridPtr with_dimension(const RadialGrid& grid, int n)
{
    return make_log_grid(grid.rmin, grid.rmax, static_cast<int>(grid.size()), n);
}

RadialFunction RadialFunction::sample(GridPtr grid, const std::function<std::complex<double>(double)>& f,
                                      std::optional<double> channel)
{
    RadialFunction out;
    out.values.resize(grid->size());
    for (Eigen::Index i = 0; i < grid->size(); ++i)
        out.values(i) = f(grid->nodes(i));
    if (!out.values.allFinite())
        throw InvalidArgument("sampled radial function is not finite");
    out.grid = std::move(grid);
    out.channel = channel;
    return out;
}

RadialFunction RadialFunction::zeros(GridPtr grid, std::optional<double> channel)
{
    RadialFunction out;
    out.values = Eigen::VectorXcd::Zero(grid->size());
    out.grid = std::move(grid);
    out.channel = channel;
    return out;
}

double weighted_l2_norm(const RadialFunction& f, double s)
{
    if (!f.values.allFinite())
        throw InvalidArgument("weighted_l2_norm: non-finite input");
    const RadialGrid& g = *f.grid;
    const Eigen::ArrayXd w = g.weights.array() * g.nodes.array().pow(2.0 * s);
    return std::sqrt((w * f.values.array().abs2()).sum());
}

Eigen::VectorXcd log_derivative(const Eigen::VectorXcd& v, double h)
{
    const Eigen::Index N = v.size();
    Eigen::VectorXcd d(N);
    if (N < 5)
        throw InvalidArgument("log_derivative needs at least 5 nodes");
    for (Eigen::Index i = 2; i < N - 2; ++i)
        d(i) = (v(i - 2) - 8.0 * v(i - 1) + 8.0 * v(i + 1) - v(i + 2)) / (12.0 * h);
    d(1) = (v(2) - v(0)) / (2.0 * h);
    d(N - 2) = (v(N - 1) - v(N - 3)) / (2.0 * h);
    d(0) = (-3.0 * v(0) + 4.0 * v(1) - v(2)) / (2.0 * h);
    d(N - 1) = (3.0 * v(N - 1) - 4.0 * v(N - 2) + v(N - 3)) / (2.0 * h);
    return d;
}

Eigen::VectorXcd radial_derivative(const RadialFunction& f)
{
    return log_derivative(f.values, f.grid->step).cwiseQuotient(f.grid->nodes.cast<std::complex<double>>());
}

HardyResult hardy_ratio(const RadialFunction& u, int n)
{
    if (n < 3)
        throw InvalidArgument("hardy_ratio needs n >= 3");
    const RadialGrid& g = *u.grid;
    const Eigen::VectorXcd du = radial_derivative(u);
    const Eigen::ArrayXd r = g.nodes.array();

    // weights of the grid are for its own dimension; rebuild the r^{n-1} factor
    const Eigen::ArrayXd base = g.weights.array() / r.pow(g.n - 1);
    const Eigen::ArrayXd w = base * r.pow(n - 1);
    const double num = (w * u.values.array().abs2() / r.square()).sum();
    const double den = (w * du.array().abs2()).sum();

    HardyResult res;
    res.bound = std::pow(2.0 / (n - 2), 2);
    res.ratio = den > 0.0 ? num / den : 0.0;

    const Eigen::ArrayXd d1 = u.values.array().abs2() * r.pow(n - 2);
    const Eigen::ArrayXd d2 = du.array().abs2() * r.pow(n);
    const Eigen::Index N = g.size();
    auto rel = [N](const Eigen::ArrayXd& d) {
        const double m = d.maxCoeff();
        return m > 0.0 ? std::max(d(0), d(N - 1)) / m : 0.0;
    };
    res.endpoint_density = std::max(rel(d1), rel(d2));
    res.decay_ok = res.endpoint_density <= 1e-8;
    return res;
}

Eigen::VectorXcd to_unitary(const RadialFunction& f)
{
    const RadialGrid& g = *f.grid;
    const Eigen::ArrayXd s = std::sqrt(g.step) * g.nodes.array().pow(0.5 * g.n);
    return (f.values.array() * s).matrix();
}

RadialFunction from_unitary(GridPtr grid, const Eigen::VectorXcd& g, std::optional<double> channel)
{
    const Eigen::ArrayXd s = std::sqrt(grid->step) * grid->nodes.array().pow(0.5 * grid->n);
    RadialFunction out;
    out.values = (g.array() / s).matrix();
    out.grid = std::move(grid);
    out.channel = channel;
    return out;
}

} // namespace critdecay
