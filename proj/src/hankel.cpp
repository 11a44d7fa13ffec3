#include "critdecay/radial.hpp"

#include "critdecay/errors.hpp"
#include "critdecay/special.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <shared_mutex>
#include <tuple>

namespace critdecay {

namespace {
using cplx = std::complex<double>;

Eigen::FFT<double>& local_fft()
{
    thread_local Eigen::FFT<double> fft;
    return fft;
}

// 2^{iy+q} Γ((ν+1+q+iy)/2) / Γ((ν+1−q−iy)/2)
cplx hankel_symbol(double y, double nu, double q)
{
    const cplx a((nu + 1.0 + q) / 2.0, y / 2.0);
    const cplx b((nu + 1.0 - q) / 2.0, -y / 2.0);
    if (gamma_pole_distance(a) < 1e-8)
        throw InvalidArgument("Hankel bias hits a Gamma pole");
    const cplx logs = cplx(q, y) * std::numbers::ln2 + log_gamma(a);
    if (gamma_pole_distance(b) < 1e-12)
        return 0.0;
    return std::exp(logs - log_gamma(b));
}
} // namespace

HankelOperator::HankelOperator(const RadialGrid& grid, double nu, double bias)
    : nu_(nu), bias_(bias)
{
    if (!(nu >= 0.0))
        throw InvalidArgument("Hankel order must be non-negative");
    const Eigen::Index N = grid.size();
    const double h = grid.step;
    const double t0 = grid.t0();
    t_ = Eigen::VectorXd::LinSpaced(N, t0, t0 + (N - 1) * h);
    c_.resize(N);
    for (Eigen::Index m = 0; m < N; ++m) {
        const Eigen::Index k = (m <= N / 2) ? m : m - N;
        const double y = 2.0 * std::numbers::pi * k / (N * h);
        c_(m) = hankel_symbol(y, nu, bias) * std::exp(cplx(0.0, -2.0 * y * t0));
    }
    if (N % 2 == 0) {
        const double re = c_(N / 2).real();
        c_(N / 2) = bias == 0.0 ? (re >= 0.0 ? 1.0 : -1.0) : re;
    }
}

Eigen::VectorXcd HankelOperator::apply(const Eigen::VectorXcd& g) const
{
    const Eigen::Index N = c_.size();
    if (g.size() != N)
        throw InvalidArgument("Hankel input length does not match the grid");
    Eigen::FFT<double>& fft = local_fft();
    Eigen::VectorXcd p = g;
    if (bias_ != 0.0)
        p.array() *= (-bias_ * t_.array()).exp();
    Eigen::VectorXcd spec(N), out(N);
    fft.fwd(spec, p);
    spec.array() *= c_.array();
    fft.fwd(out, spec);
    out /= static_cast<double>(N);
    if (bias_ != 0.0)
        out.array() *= (-bias_ * t_.array()).exp();
    return out;
}

Eigen::MatrixXcd HankelOperator::apply(const Eigen::MatrixXcd& g) const
{
    Eigen::MatrixXcd out(g.rows(), g.cols());
    for (Eigen::Index j = 0; j < g.cols(); ++j)
        out.col(j) = apply(Eigen::VectorXcd(g.col(j)));
    return out;
}

Eigen::MatrixXd HankelOperator::dense() const
{
    if (bias_ != 0.0)
        throw InvalidArgument("dense Hankel matrix is only formed without bias");
    const Eigen::Index N = c_.size();
    Eigen::VectorXcd h(N);
    local_fft().fwd(h, c_);
    h /= static_cast<double>(N);
    Eigen::MatrixXd m(N, N);
    for (Eigen::Index i = 0; i < N; ++i)
        for (Eigen::Index j = 0; j < N; ++j)
            m(i, j) = h((i + j) % N).real();
    return m;
}

std::shared_ptr<const HankelOperator> hankel_operator(const RadialGrid& grid, double nu, double bias)
{
    using Key = std::tuple<Eigen::Index, double, double, double, double>;
    static std::map<Key, std::shared_ptr<const HankelOperator>> cache;
    static std::shared_mutex mutex;

    const Key key{grid.size(), grid.rmin, grid.step, nu, bias};
    {
        std::shared_lock<std::shared_mutex> lock(mutex);
        auto it = cache.find(key);
        if (it != cache.end())
            return it->second;
    }
    auto op = std::make_shared<const HankelOperator>(grid, nu, bias);
    std::unique_lock<std::shared_mutex> lock(mutex);
    if (cache.size() > 512)
        cache.clear();
    return cache.emplace(key, op).first->second;
}

double high_frequency_fraction(const Eigen::VectorXcd& g)
{
    const Eigen::Index N = g.size();
    Eigen::VectorXcd spec(N);
    local_fft().fwd(spec, g);
    double total = 0.0, high = 0.0;
    for (Eigen::Index m = 0; m < N; ++m) {
        const Eigen::Index k = (m <= N / 2) ? m : N - m;
        const double e = std::norm(spec(m));
        total += e;
        if (4 * k > 3 * (N / 2))
            high += e;
    }
    return total > 0.0 ? high / total : 0.0;
}

RadialFunction hankel_transform(const RadialFunction& f, double nu, const RadialGrid& out_grid)
{
    if (!f.grid->same_as(out_grid))
        throw InvalidArgument("hankel_transform: output grid must equal the input grid");
    const Eigen::VectorXcd g = to_unitary(f);
    if (high_frequency_fraction(g) > 1e-6)
        throw ResolutionError("hankel_transform: input not resolved by the node spacing");
    const Eigen::VectorXcd out = hankel_operator(*f.grid, nu)->apply(g);
    if (high_frequency_fraction(out) > 1e-6)
        throw ResolutionError("hankel_transform: transform not resolved (rmax·smax too large for the spacing)");
    return from_unitary(f.grid, out, nu);
}

RadialFunction fractional_power_apply(const RadialFunction& f, double nu, double sigma)
{
    if (sigma == 0.0)
        return f;
    const RadialGrid& grid = *f.grid;
    const Eigen::VectorXcd g = to_unitary(f);
    if (high_frequency_fraction(g) > 1e-6)
        throw ResolutionError("fractional_power_apply: input not resolved by the node spacing");
    auto H = hankel_operator(grid, nu);
    Eigen::VectorXcd mid = H->apply(g);
    mid.array() *= grid.nodes.array().pow(sigma);
    return from_unitary(f.grid, H->apply(mid), nu);
}

std::complex<double> mellin_multiplier_O(double y, double nu, double lambda)
{
    if (!(nu > 1.0))
        throw InvalidArgument("mellin_multiplier_O requires nu > 1");
    const cplx z(lambda + 1.0, y);
    const cplx args[6] = {(nu + z - lambda + 1.0) / 2.0, (nu - z + lambda + 1.0) / 2.0,
                          (nu - z + lambda) / 2.0,       (nu + z - lambda) / 2.0,
                          (nu - z + lambda + 2.0) / 2.0, (nu + z - lambda + 2.0) / 2.0};
    for (const cplx& a : args)
        if (gamma_pole_distance(a) < 1e-8)
            throw InvalidArgument("mellin_multiplier_O: Gamma argument within 1e-8 of a pole");
    const cplx lg = 2.0 * log_gamma(args[0]) - 2.0 * log_gamma(args[1]) + log_gamma(args[2]) -
                    log_gamma(args[3]) + log_gamma(args[4]) - log_gamma(args[5]);
    return std::exp(lg);
}

double mellin_multiplier_modulus(double y, double nu)
{
    const cplx s(nu, y);
    return std::abs(s * s / (s * s - 1.0));
}

} // namespace critdecay
