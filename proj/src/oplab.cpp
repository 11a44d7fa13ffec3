#include "critdecay/oplab.hpp"

#include "critdecay/errors.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <limits>
#include <random>

namespace critdecay {

DiscreteOperatorPair make_operator_pair(const Eigen::MatrixXd& Lambda, const Eigen::VectorXd& Omega)
{
    if (Lambda.rows() != Lambda.cols() || Lambda.rows() != Omega.size())
        throw InvalidArgument("operator pair: inconsistent sizes");
    if ((Lambda - Lambda.transpose()).norm() > 1e-10 * Lambda.norm())
        throw InvalidArgument("operator pair: Lambda is not symmetric");
    if ((Omega.array() <= 0.0).any())
        throw InvalidArgument("operator pair: Omega must be positive");
    DiscreteOperatorPair pair;
    pair.Lambda = 0.5 * (Lambda + Lambda.transpose());
    pair.Omega = Omega;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(pair.Lambda);
    if (es.info() != Eigen::Success)
        throw ConvergenceError("operator pair: eigendecomposition failed");
    if (es.eigenvalues()(0) <= 0.0)
        throw InvalidArgument("operator pair: Lambda is not positive definite");
    pair.eigenvalues = es.eigenvalues();
    pair.eigenvectors = es.eigenvectors();
    return pair;
}

DiscreteOperatorPair pair_from_square(const Eigen::MatrixXd& P, const Eigen::VectorXd& Omega)
{
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (P + P.transpose()));
    if (es.info() != Eigen::Success)
        throw ConvergenceError("operator pair: eigendecomposition failed");
    if (es.eigenvalues()(0) <= 0.0)
        throw InvalidArgument("operator pair: P is not positive definite");
    DiscreteOperatorPair pair;
    pair.eigenvalues = es.eigenvalues().cwiseSqrt();
    pair.eigenvectors = es.eigenvectors();
    pair.Lambda = pair.eigenvectors * pair.eigenvalues.asDiagonal() * pair.eigenvectors.transpose();
    pair.Omega = Omega;
    if ((Omega.array() <= 0.0).any())
        throw InvalidArgument("operator pair: Omega must be positive");
    return pair;
}

DiscreteOperatorPair random_operator_pair(int N, std::uint64_t seed)
{
    if (N < 1)
        throw InvalidArgument("random_operator_pair: N must be positive");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    Eigen::MatrixXd A(N, N);
    for (Eigen::Index j = 0; j < N; ++j)
        for (Eigen::Index i = 0; i < N; ++i)
            A(i, j) = normal(rng);
    const Eigen::MatrixXd Q = Eigen::HouseholderQR<Eigen::MatrixXd>(A).householderQ();
    Eigen::VectorXd m(N), omega(N);
    for (Eigen::Index k = 0; k < N; ++k)
        m(k) = std::pow(10.0, 2.0 * unif(rng) - 1.0);
    for (Eigen::Index k = 0; k < N; ++k)
        omega(k) = 0.5 + unif(rng);
    return make_operator_pair(Q * m.asDiagonal() * Q.transpose(), omega);
}

Eigen::MatrixXd channel_operator_matrix(double nu, const RadialGrid& grid)
{
    const Eigen::Index N = grid.size();
    const double h2 = grid.step * grid.step;
    const Eigen::VectorXd& r = grid.nodes;
    Eigen::MatrixXd P = Eigen::MatrixXd::Zero(N, N);
    for (Eigen::Index i = 0; i < N; ++i) {
        P(i, i) = (2.0 / h2 + nu * nu) / (r(i) * r(i));
        if (i + 1 < N) {
            P(i, i + 1) = -1.0 / (h2 * r(i) * r(i + 1));
            P(i + 1, i) = P(i, i + 1);
        }
    }
    P(0, 0) -= std::exp(-nu * grid.step) / (h2 * r(0) * r(0));
    return P;
}

DiscreteOperatorPair channel_pair(double nu, const RadialGrid& grid)
{
    DiscreteOperatorPair pair = pair_from_square(channel_operator_matrix(nu, grid), grid.nodes);
    // ghost node r₋₁ = r₀e^{−h} carries v₋₁ = e^{−(ν+1)h} v₀ in both products
    const double h = grid.step;
    pair.boundary_commutator = -(std::exp(h) - 1.0) * std::exp(-(nu + 1.0) * h) / (h * h * grid.nodes(0));
    return pair;
}

namespace {

double q_profile(double alpha, double x) { return (alpha == 0.0 ? 1.0 : std::pow(x, alpha)) * std::exp(-x * x); }

// Trapezoid in t = ln s of Σ_k F_k(t) with F_k(t) = φ(t + 2 ln m_k), where
// φ(u) = e^{βu − κe^u}. The window is widened until φ falls below 1e−16 of its
// peak, then the step is halved until the sums settle.
Eigen::VectorXd log_quadrature(const Eigen::VectorXd& m, double beta, double kappa)
{
    if (!(beta > 0.0))
        throw InvalidArgument("log quadrature needs a positive exponent");
    auto logphi = [&](double u) { return beta * u - kappa * std::exp(u); };
    const double upeak = std::log(beta / kappa);
    const double cut = logphi(upeak) + std::log(1e-16);
    double ulo = upeak, uhi = upeak;
    while (logphi(ulo) > cut)
        ulo -= 0.5;
    while (logphi(uhi) > cut)
        uhi += 0.5;

    const Eigen::ArrayXd shift = 2.0 * m.array().log();
    const double tlo = ulo - shift.maxCoeff();
    const double thi = uhi - shift.minCoeff();

    Eigen::VectorXd previous;
    for (double dt = 0.5; dt >= 1.0 / 256.0; dt *= 0.5) {
        const int count = static_cast<int>(std::ceil((thi - tlo) / dt));
        if (count > 2000000)
            throw ConvergenceError("log quadrature window too wide (extreme eigenvalue spread)");
        Eigen::ArrayXd sum = Eigen::ArrayXd::Zero(m.size());
        for (int j = 0; j <= count; ++j) {
            const Eigen::ArrayXd u = (tlo + j * dt) + shift;
            sum += (beta * u - kappa * u.exp()).exp();
        }
        Eigen::VectorXd current = (sum * dt).matrix();
        if (previous.size() && ((current - previous).array().abs() <= 1e-14 * current.array().abs()).all())
            return current;
        previous = std::move(current);
    }
    throw ConvergenceError("log quadrature did not converge");
}

} // namespace

Eigen::VectorXd q_alpha_apply(const DiscreteOperatorPair& pair, double alpha, double s, const Eigen::VectorXd& g)
{
    if (!(alpha >= 0.0) || !(s > 0.0))
        throw InvalidArgument("q_alpha_apply needs alpha >= 0, s > 0");
    const Eigen::ArrayXd x = std::sqrt(s) * pair.eigenvalues.array();
    Eigen::ArrayXd d(x.size());
    for (Eigen::Index k = 0; k < x.size(); ++k)
        d(k) = q_profile(alpha, x(k));
    return pair.eigenvectors * (d * (pair.eigenvectors.transpose() * g).array()).matrix();
}

double q_alpha_norm(const DiscreteOperatorPair& pair, double alpha, double s)
{
    double best = 0.0;
    for (Eigen::Index k = 0; k < pair.eigenvalues.size(); ++k)
        best = std::max(best, q_profile(alpha, std::sqrt(s) * pair.eigenvalues(k)));
    return best;
}

double q_alpha_sup(double alpha)
{
    if (alpha == 0.0)
        return 1.0;
    return std::pow(0.5 * alpha, 0.5 * alpha) * std::exp(-0.5 * alpha);
}

double q_alpha_scan_max(const DiscreteOperatorPair& pair, double alpha)
{
    const double mmin = pair.eigenvalues.minCoeff(), mmax = pair.eigenvalues.maxCoeff();
    const double tlo = -2.0 * std::log(mmax) - 20.0, thi = -2.0 * std::log(mmin) + 5.0;
    const int count = 4000;
    auto f = [&](double t) { return q_alpha_norm(pair, alpha, std::exp(t)); };
    double best = -1.0, tbest = tlo;
    for (int j = 0; j <= count; ++j) {
        const double t = tlo + (thi - tlo) * j / count;
        const double v = f(t);
        if (v > best) {
            best = v;
            tbest = t;
        }
    }
    // golden section on the bracketing cell pair
    const double width = (thi - tlo) / count;
    double a = tbest - width, b = tbest + width;
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = b - phi * (b - a), d = a + phi * (b - a);
    for (int it = 0; it < 200 && b - a > 1e-12; ++it) {
        if (f(c) > f(d))
            b = d;
        else
            a = c;
        c = b - phi * (b - a);
        d = a + phi * (b - a);
    }
    return std::max(best, f(0.5 * (a + b)));
}

ScalarIdentity q_integral_identity(const DiscreteOperatorPair& pair, double alpha, const Eigen::VectorXd& g)
{
    if (!(alpha > 0.0))
        throw InvalidArgument("q_integral_identity needs alpha > 0");
    const Eigen::VectorXd c = pair.eigenvectors.transpose() * g;
    // ‖Q_α(s)g‖² = Σ c_k² (s m_k²)^α e^{−2 s m_k²}
    const Eigen::VectorXd I = log_quadrature(pair.eigenvalues, alpha, 2.0);
    ScalarIdentity out;
    out.lhs = (c.array().square() * I.array()).sum();
    out.rhs = std::pow(2.0, -alpha) * std::tgamma(alpha) * g.squaredNorm();
    return out;
}

VectorIdentity q_reconstruction_identity(const DiscreteOperatorPair& pair, double alpha, double gamma,
                                         const Eigen::VectorXd& g)
{
    if (!(alpha >= 0.0) || !(gamma > 0.0))
        throw InvalidArgument("q_reconstruction_identity needs alpha >= 0, gamma > 0");
    const Eigen::ArrayXd m = pair.eigenvalues.array();
    const Eigen::ArrayXd c = (pair.eigenvectors.transpose() * g).array();
    // s^{γ−α/2} (√s m)^α e^{−s m²} = m^{α−2γ} (s m²)^γ e^{−s m²}
    const Eigen::ArrayXd I = log_quadrature(pair.eigenvalues, gamma, 1.0).array();
    const Eigen::ArrayXd power = m.pow(alpha - 2.0 * gamma);
    VectorIdentity out;
    out.lhs = pair.eigenvectors * (power * I * c / std::tgamma(gamma)).matrix();
    out.rhs = pair.eigenvectors * (power * c).matrix();
    return out;
}

CommutatorReport commutator_hypothesis_check(const DiscreteOperatorPair& pair, std::uint64_t seed, int probes)
{
    const Eigen::MatrixXd& V = pair.eigenvectors;
    const Eigen::VectorXd& m = pair.eigenvalues;
    const Eigen::MatrixXd P = V * m.array().square().matrix().asDiagonal() * V.transpose();
    Eigen::MatrixXd C = pair.Omega.asDiagonal() * P - P * pair.Omega.asDiagonal();
    C(0, 0) += pair.boundary_commutator;
    const Eigen::MatrixXd CLinv = C * V * m.cwiseInverse().asDiagonal() * V.transpose();

    CommutatorReport rep;
    rep.probes = probes;
    rep.c_estimate = Eigen::BDCSVD<Eigen::MatrixXd>(CLinv).singularValues()(0);
    const Eigen::MatrixXd K = pair.Lambda * pair.Omega.asDiagonal() - pair.Omega.asDiagonal() * pair.Lambda;
    rep.commutator_norm = Eigen::BDCSVD<Eigen::MatrixXd>(K).singularValues()(0);

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    for (int p = 0; p < probes; ++p) {
        Eigen::VectorXd f(pair.size());
        for (Eigen::Index i = 0; i < f.size(); ++i)
            f(i) = normal(rng);
        const double den = (pair.Lambda * f).norm();
        if (den > 0.0)
            rep.probe_estimate = std::max(rep.probe_estimate, (C * f).norm() / den);
    }
    return rep;
}

Eigen::MatrixXd c1_operator_matrix(double nu, const RadialGrid& grid)
{
    if (!(nu > 1.0))
        throw InvalidArgument("c1_operator_matrix needs nu > 1");
    const Eigen::Index N = grid.size();
    const Eigen::ArrayXd r = grid.nodes.array();
    auto H0 = hankel_operator(grid, nu, 0.0);
    auto Hp = hankel_operator(grid, nu, 1.0);
    auto Hm = hankel_operator(grid, nu, -2.0);

    Eigen::MatrixXd M(N, N);
    Eigen::VectorXcd e = Eigen::VectorXcd::Zero(N);
    for (Eigen::Index j = 0; j < N; ++j) {
        e.setZero();
        e(j) = 1.0;
        Eigen::VectorXcd v = H0->apply(e);        // bias 0
        v.array() *= r;                           // bias +1
        v = Hp->apply(v);                         // bias −1
        v.array() /= r;                           // bias −2
        v = Hm->apply(v);                         // bias +2
        v.array() /= r;                           // bias +1
        v = Hp->apply(v);                         // bias −1
        v.array() *= r;                           // bias 0
        M.col(j) = v.real();
    }
    return M;
}

C1Result c1_operator_check(double nu, const RadialGrid& grid)
{
    C1Result res;
    res.nu = nu;
    if (!(nu > 1.0)) {
        res.unbounded_risk = true;
        res.analytic_norm = std::numeric_limits<double>::infinity();
        res.numeric_norm = std::numeric_limits<double>::quiet_NaN();
        return res;
    }
    res.analytic_norm = nu * nu / (nu * nu - 1.0);
    const Eigen::MatrixXd M = c1_operator_matrix(nu, grid);
    res.numeric_norm = Eigen::BDCSVD<Eigen::MatrixXd>(M).singularValues()(0);
    return res;
}

} // namespace critdecay
