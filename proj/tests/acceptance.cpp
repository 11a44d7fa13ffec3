// Acceptance suite: one PASS/FAIL line per criterion.
//
// Exit status is 0 when the set of failing criteria equals `expected_red`,
// the criteria whose contractual constants the measurements contradict (see
// README, "Known red criteria"). Any other failure, or an expected-red
// criterion that starts passing, gives exit status 1.

#include "critdecay/applications.hpp"
#include "critdecay/errors.hpp"
#include "critdecay/evolution.hpp"
#include "critdecay/oplab.hpp"
#include "critdecay/potentials.hpp"
#include "critdecay/radial.hpp"
#include "critdecay/resolvent.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace critdecay;
using cd = std::complex<double>;

namespace {

const std::set<int> expected_red{3, 10};

struct Outcome {
    bool passed = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what)
    {
        if (!ok) {
            passed = false;
            detail << " [miss: " << what << "]";
        }
    }
};

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

// ‖u‖_{L^p(0,T) L^q} from a recorded query.
double lp_upto(const EvolutionTrace& tr, std::size_t k, double T)
{
    const double p = tr.queries[k].p;
    std::vector<double> v(tr.lq[k].size());
    for (std::size_t i = 0; i < v.size(); ++i)
        v[i] = std::pow(tr.lq[k][i], p);
    return std::pow(time_integral(tr.times, v, T), 1.0 / p);
}

void criterion1(Outcome& o)
{
    const auto t0 = std::chrono::steady_clock::now();
    const CriticalDipole c = critical_dipole_moment(1e-3);
    const double dt = seconds_since(t0);
    o.detail << "p0 = " << c.p0 << " bracket [" << c.lower << ", " << c.upper << "], " << dt << " s";
    o.require(c.p0 >= 1.27 && c.p0 <= 1.29, "p0 in [1.27, 1.29]");
    o.require(c.lower <= 1.2786297544002991 && c.upper >= 1.2786297544002991, "bracket holds golden p0");
    o.require(dt < 5.0, "runtime < 5 s");
}

void criterion2(Outcome& o)
{
    double worst_peak = 0.0, worst_pointwise = 0.0;
    bool at_zero = true;
    for (double nu : {1.5, 2.0, 3.0}) {
        double best = -1.0, ybest = 0.0;
        for (int j = -50000; j <= 50000; ++j) {
            const double y = j * 1e-3;
            const double g = std::abs(mellin_multiplier_O(y, nu, 0.5));
            worst_pointwise = std::max(worst_pointwise, std::abs(g - mellin_multiplier_modulus(y, nu)));
            if (g > best) {
                best = g;
                ybest = y;
            }
        }
        at_zero = at_zero && ybest == 0.0;
        worst_peak = std::max(worst_peak, std::abs(best - nu * nu / (nu * nu - 1.0)));
    }
    o.detail << "max |peak - nu^2/(nu^2-1)| = " << worst_peak << ", Gamma vs rational " << worst_pointwise;
    o.require(at_zero, "argmax at y = 0");
    o.require(worst_peak <= 1e-6, "peak within 1e-6");
    o.require(worst_pointwise <= 1e-10, "pointwise agreement 1e-10");
}

void criterion3(Outcome& o)
{
    const auto zs = default_z_set();
    const auto samples = default_f_samples();
    const GridPtr g4 = make_log_grid(1e-3, 1e3, 4096, 3);
    const GridPtr g8 = make_log_grid(1e-3, 1e3, 8192, 3);
    for (double a : {-0.2, 0.0, 0.5, 3.0}) {
        const Potential v = inverse_square(Dimension::of(3), a);
        const auto t0 = std::chrono::steady_clock::now();
        const ResolventReport r = resolvent_scan(v, zs, samples, *g4);
        const double dt = seconds_since(t0);
        const ResolventReport r8 = resolvent_scan(v, zs, samples, *g8, false);
        double drift = 0.0;
        for (std::size_t i = 0; i < r.entries.size(); ++i)
            drift = std::max(drift, rel(r8.entries[i].ratio, r.entries[i].ratio));
        o.detail << " a=" << a << ": sup " << r.sup_ratio << " vs " << r.bound << "*1.05, refine " << drift << ", "
                 << dt << " s;";
        o.require(r.sup_ratio <= r.bound * 1.05, "a = " + std::to_string(a) + " sup <= 1.05/(2 delta^2)");
        o.require(drift < 0.01, "grid doubling < 1%");
        o.require(dt < 120.0, "runtime < 2 min");
    }
}

void criterion4(Outcome& o)
{
    const Potential v = zero_potential(Dimension::of(3));
    const ChannelSet cs = channel_set(v, 8);
    const GridPtr grid = make_log_grid(1e-3, 3e3, 32768, 3);
    const CauchyData data =
        make_cauchy_data(cs, grid, [](double r, double) { return cd(std::exp(-0.5 * r * r)); });
    const EvolutionTrace tr = evolve_schrodinger(v, data, 100.0, 0.05);
    const double bound = 4.0 / std::sqrt(2.0 * M_PI);
    bool monotone = true;
    double prev = 0.0;
    for (double T = 5.0; T <= 100.0; T += 5.0) {
        const double s = smoothing_norm(tr, T);
        monotone = monotone && s >= prev;
        prev = s;
    }
    const double r50 = smoothing_norm(tr, 50.0) / data.f_l2, r100 = smoothing_norm(tr, 100.0) / data.f_l2;
    o.detail << "ratio(T=50) = " << r50 << " vs " << bound << ", ratio(T=100) = " << r100;
    o.require(r50 <= bound, "ratio <= 4/sqrt(2 pi)");
    o.require(monotone, "monotone in T");
    o.require(rel(r100, r50) < 0.02, "T = 50 -> 100 change < 2%");
}

void criterion5(Outcome& o)
{
    double worst = 0.0;
    std::mt19937_64 rng(0x5EED);
    std::normal_distribution<double> normal;
    auto gauss = [&](Eigen::Index n) {
        Eigen::VectorXd g(n);
        for (Eigen::Index i = 0; i < n; ++i)
            g(i) = normal(rng);
        return g;
    };
    auto probe = [&](const DiscreteOperatorPair& p) {
        const Eigen::VectorXd g = gauss(p.size());
        for (double a : {0.5, 1.0, 2.0}) {
            worst = std::max(worst, q_integral_identity(p, a, g).relative_error());
            worst = std::max(worst, q_reconstruction_identity(p, a, 1.0, g).relative_error());
        }
    };
    for (int k = 0; k < 10; ++k)
        probe(random_operator_pair(256, 0x5EED + k));
    const GridPtr grid = make_log_grid(1e-2, 1e2, 512, 3);
    for (double nu : {0.5, 1.5, 2.5})
        probe(channel_pair(nu, *grid));
    o.detail << "worst relative error " << worst;
    o.require(worst <= 1e-8, "identities to 1e-8");
}

void criterion6(Outcome& o)
{
    const GridPtr grid = make_log_grid(1e-2, 1e2, 1024, 3);
    for (double nu : {1.5, 2.0, 3.0}) {
        const C1Result c = c1_operator_check(nu, *grid);
        o.detail << " nu=" << nu << ": " << c.numeric_norm << " vs " << c.analytic_norm << ";";
        o.require(c.relative_error() <= 0.02, "nu = " + std::to_string(nu) + " within 2%");
    }
}

void criterion7(Outcome& o)
{
    const GridPtr grid = make_log_grid(1e-10, 1e2, 4096, 3);
    std::mt19937_64 rng(0x5EED);
    std::normal_distribution<double> normal;
    std::uniform_real_distribution<double> width(0.2, 3.0);
    double worst = 0.0;
    bool decay = true;
    for (int k = 0; k < 100; ++k) {
        const double c0 = normal(rng), c1 = normal(rng), c2 = normal(rng), b = width(rng);
        const HardyResult h = hardy_ratio(
            RadialFunction::sample(grid, [&](double r) { return cd((c0 + c1 * r + c2 * r * r) * std::exp(-b * r * r)); }),
            3);
        decay = decay && h.decay_ok;
        worst = std::max(worst, h.ratio);
    }
    const GridPtr wide = make_log_grid(1e-12, 1e12, 4096, 3);
    const HardyResult ext = hardy_ratio(RadialFunction::sample(wide,
                                                               [](double r) {
                                                                   const double t = std::log(r);
                                                                   return cd(std::pow(r, -0.5) / std::cosh(0.05 * t) *
                                                                             std::exp(-std::pow(t / 17.0, 6)));
                                                               }),
                                        3);

    PotentialSpec es;
    es.kind = "radial";
    es.profile = "exp";
    es.a = -0.2;
    const std::vector<Potential> potentials{zero_potential(Dimension::of(3)), inverse_square(Dimension::of(3), 0.5),
                                            inverse_square(Dimension::of(3), -0.2), dipole_potential(1.0),
                                            build_potential(es)};
    const GridPtr eg = make_log_grid(1e-6, 1e2, 2048, 3);
    const int lmax = 6;
    std::uniform_real_distribution<double> spread(0.3, 3.0);
    double sandwich_violation = 0.0;
    for (const Potential& v : potentials) {
        const AssumptionReport rep = assumption_report(v);
        for (int trial = 0; trial < 20; ++trial) {
            Eigen::MatrixXcd coeffs(eg->size(), lmax + 1);
            for (int l = 0; l <= lmax; ++l) {
                const double amp = normal(rng), w = spread(rng), shift = normal(rng);
                for (Eigen::Index i = 0; i < eg->size(); ++i) {
                    const double r = eg->nodes(i);
                    coeffs(i, l) = amp * std::pow(r, l) * (1.0 + shift * r) * std::exp(-r * r / (w * w));
                }
            }
            const EnergyForms e = energy_forms(v, *eg, coeffs);
            sandwich_violation = std::max(sandwich_violation, (rep.c1 * e.gradient_sq - e.q) / e.gradient_sq);
            sandwich_violation = std::max(sandwich_violation, (e.q - rep.c2 * e.gradient_sq) / e.gradient_sq);
        }
    }
    o.detail << "max random ratio " << worst << " (bound 4), near-extremal " << ext.ratio
             << ", sandwich violation " << std::max(0.0, sandwich_violation);
    o.require(decay, "test functions decay");
    o.require(worst <= 4.0, "random ratios <= 4");
    o.require(ext.decay_ok && ext.ratio >= 3.6, "near-extremal >= 3.6");
    o.require(sandwich_violation <= 1e-6, "sandwich within 1e-6");
}

void criterion8(Outcome& o)
{
    const std::vector<std::pair<std::string, Potential>> potentials{
        {"V=0", zero_potential(Dimension::of(3))},
        {"a=0.5", inverse_square(Dimension::of(3), 0.5)},
        {"dipole", dipole_potential(1.0)}};
    const StrichartzQuery sq = admissible_pair(Equation::schrodinger, 3, 2.0);
    const StrichartzQuery wq = admissible_pair(Equation::wave, 3, 4.0);
    const double T = 20.0, dt = 0.05, s = 0.5;

    for (const auto& [label, v] : potentials) {
        const ChannelSet cs = channel_set(v, 8);
        for (Equation eq : {Equation::schrodinger, Equation::wave}) {
            EvolutionOptions opt;
            opt.strichartz = {eq == Equation::schrodinger ? sq : wq};
            auto run = [&](double rmin, double rmax, int N, double width, double Tend, double step) {
                const GridPtr g = make_log_grid(rmin, rmax, N, 3);
                const CauchyData d = make_channel_data(cs, g, ground_channel_gaussian(cs, *g, width));
                const EvolutionTrace tr = eq == Equation::schrodinger ? evolve_schrodinger(v, d, Tend, step, opt)
                                                                      : evolve_wave(v, d, Tend, step, opt);
                const double den = eq == Equation::schrodinger ? d.f_l2 : d.f_h_half;
                return std::make_pair(tr, den);
            };
            const auto [base, den] = run(1e-3, 3e3, 16384, 1.0, T, dt);
            const auto [fine, fden] = run(1e-3, 3e3, 32768, 1.0, T, dt);
            const double scale = eq == Equation::schrodinger ? s * s : s;
            const auto [scaled, sden] = run(s * 1e-3, s * 3e3, 16384, s, scale * T, scale * dt);

            const double n_full = lp_upto(base, 0, T), n_half = lp_upto(base, 0, 0.5 * T);
            const double n_fine = lp_upto(fine, 0, T);
            const double ratio = n_full / den, ratio_s = lp_upto(scaled, 0, scale * T) / sden;
            const std::string tag = label + (eq == Equation::schrodinger ? " (2,6)" : " (4,4)");
            o.detail << " " << tag << ": " << ratio << ", T " << rel(n_full, n_half) << ", N " << rel(n_fine, n_full)
                     << ", scale " << rel(ratio_s, ratio) << ";";
            o.require(std::isfinite(ratio), tag + " finite");
            o.require(rel(n_full, n_half) < 0.05, tag + " T-refinement < 5%");
            o.require(rel(n_fine, n_full) < 0.05, tag + " grid refinement < 5%");
            o.require(rel(ratio_s, ratio) < 1e-4, tag + " scale invariance 1e-4");
        }
    }
}

void criterion9(Outcome& o)
{
    const Potential v = zero_potential(Dimension::of(3));
    const ChannelSet cs = channel_set(v, 8);
    const GridPtr grid = make_log_grid(1e-3, 3e3, 32768, 3);
    const CauchyData data =
        make_cauchy_data(cs, grid, [](double r, double) { return cd(std::exp(-0.5 * r * r)); });
    const double mass = evolve_schrodinger(v, data, 10.0, 0.05).mass_drift();
    const double energy = evolve_wave(v, data, 10.0, 0.05).energy_drift();
    o.detail << "mass drift " << mass << ", energy drift " << energy;
    o.require(mass <= 1e-10, "L2 drift <= 1e-10");
    o.require(energy <= 1e-8, "energy drift <= 1e-8");
}

void criterion10(Outcome& o)
{
    double worst = 0.0;
    int points = 0;
    for (int i = 0; i < 25; ++i) {
        const double sigma = 0.02 + 0.12 * i;
        for (int j = 0; j < 40; ++j) {
            const double r = std::pow(10.0, -3.0 + 5.0 * j / 39.0);
            const double rhs = 3.0 * std::pow(sigma, 4) * r * r * std::exp(-2.0 * sigma * r) / (1.0 + 2.0 * sigma * r);
            worst = std::max(worst, psi_identity_residual(sigma, r) / (1.0 + std::abs(rhs)));
            ++points;
        }
    }

    const GridPtr grid = make_log_grid(1e-10, 80.0, 8192, 3);
    int probes = 0, met = 0, held = 0;
    for (double sigma : {0.0, 0.1, 1.0, 5.0})
        for (double c : {0.3, 1.0, 3.0, 10.0}) {
            const RadialFunction f = RadialFunction::sample(
                grid, [c](double r) { return cd(r * r * std::exp(-8.0 * (r - c) * (r - c) / (c * c))); });
            const WeightedHardyResult w = weighted_hardy_check(PsiSpec{sigma}, f);
            ++probes;
            if (w.preconditions_met) {
                ++met;
                held += w.lhs <= w.rhs;
            }
        }
    o.detail << points << " lattice points, worst scaled residual " << worst << "; weighted Hardy held on " << held
             << "/" << met << " admissible probes (" << probes << " total)";
    o.require(worst <= 1e-12, "psi identity residual <= 1e-12 (1 + |RHS|)");
    o.require(met > 0 && held == met, "weighted Hardy on all admissible probes");
}

} // namespace

int main()
{
    const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria{
        {"critical dipole moment", criterion1},  {"Mellin multiplier norm", criterion2},
        {"resolvent bound", criterion3},         {"Kato-Yajima smoothing", criterion4},
        {"Q_alpha identities", criterion5},      {"C1 norm", criterion6},
        {"Hardy suite", criterion7},             {"Strichartz properties", criterion8},
        {"conservation", criterion9},            {"psi identity, weighted Hardy", criterion10}};

    std::set<int> red;
    std::ostringstream log;
    auto emit = [&log](const std::string& line) {
        std::fputs(line.c_str(), stdout);
        std::fflush(stdout);
        log << line;
    };
    char buf[4096];
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int id = static_cast<int>(i) + 1;
        Outcome o;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            criteria[i].second(o);
        } catch (const std::exception& e) {
            o.passed = false;
            o.detail << " [error: " << e.what() << "]";
        }
        if (!o.passed)
            red.insert(id);
        std::snprintf(buf, sizeof buf, "%s  %2d  %-28s %7.1f s  %s\n", o.passed ? "PASS" : "FAIL", id,
                      criteria[i].first.c_str(), seconds_since(t0), o.detail.str().c_str());
        emit(buf);
    }

    std::string list;
    for (int id : red)
        list += (list.empty() ? "" : ", ") + std::to_string(id);
    std::snprintf(buf, sizeof buf, "%zu/%zu criteria pass; failing: %s\n", criteria.size() - red.size(),
                  criteria.size(), list.empty() ? "none" : list.c_str());
    emit(buf);
    const bool expected = red == expected_red;
    emit(expected ? "failing set matches the documented known-red set {3, 10}\n"
                  : "failing set differs from the documented known-red set {3, 10}\n");
    std::ofstream(CRITDECAY_ACCEPTANCE_LOG) << log.str();
    return expected ? 0 : 1;
}
