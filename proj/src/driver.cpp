#include "critdecay/driver.hpp"

#include "critdecay/applications.hpp"
#include "critdecay/errors.hpp"
#include "critdecay/evolution.hpp"
#include "critdecay/oplab.hpp"
#include "critdecay/parallel.hpp"
#include "critdecay/resolvent.hpp"

#include <Eigen/Core>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <random>
#include <sstream>

namespace critdecay {

using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";

json num(double x)
{
    if (std::isnan(x))
        return "nan";
    if (std::isinf(x))
        return x > 0 ? "inf" : "-inf";
    return x;
}

std::string csv_num(double x)
{
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
}

enum class Tol { absolute, relative };

class Checks {
public:
    // relation: "<=", ">=", "<", ">", "~" (|value − limit| ≤ slack)
    bool add(json& section, const std::string& name, double value, const std::string& relation, double limit,
             double tolerance, Tol kind = Tol::absolute)
    {
        const double slack = kind == Tol::relative ? tolerance * std::abs(limit) : tolerance;
        bool ok = false;
        if (relation == "<=")
            ok = value <= limit + slack;
        else if (relation == ">=")
            ok = value >= limit - slack;
        else if (relation == "<")
            ok = value < limit + slack;
        else if (relation == ">")
            ok = value > limit - slack;
        else if (relation == "~")
            ok = std::abs(value - limit) <= slack;
        json c = {{"name", name},
                  {"value", num(value)},
                  {"relation", relation},
                  {"limit", num(limit)},
                  {"tolerance", num(tolerance)},
                  {"tolerance_kind", kind == Tol::relative ? "relative" : "absolute"},
                  {"passed", ok}};
        section["checks"].push_back(c);
        all_ok_ = all_ok_ && ok;
        return ok;
    }

    bool passed() const { return all_ok_; }

private:
    bool all_ok_ = true;
};

struct CsvTable {
    std::string name;
    std::string text;
};

struct RunState {
    const RunConfig& cfg;
    std::uint64_t seed;
    double dipole_tol;
    Checks checks;
    std::vector<CsvTable> tables;
    json timings = json::object();
};

Potential potential_of(const RunConfig& cfg) { return build_potential(cfg.potential); }

json assumption_json(const AssumptionReport& rep)
{
    return {{"gamma_plus_sq", num(rep.gamma_plus_sq)},
            {"gamma_minus_sq", num(rep.gamma_minus_sq)},
            {"delta_sq_A2", num(rep.delta_sq_A2)},
            {"delta_sq_A3", num(rep.delta_sq_A3)},
            {"c1", num(rep.c1)},
            {"c2", num(rep.c2)},
            {"passed", rep.passed},
            {"radii_sampled", rep.radii_sampled.size()},
            {"positivity_convergence_A2", num(rep.positivity_A2.convergence_estimate)},
            {"positivity_convergence_A3", num(rep.positivity_A3.convergence_estimate)},
            {"diagnostics", rep.diagnostics}};
}

json section_check(RunState& st)
{
    const Potential V = potential_of(st.cfg);
    const AssumptionReport rep = assumption_report(V, st.cfg.scan.lmax);
    json sec = assumption_json(rep);
    sec["checks"] = json::array();
    st.checks.add(sec, "gamma_plus_sq_finite", rep.gamma_plus_sq, "<", std::numeric_limits<double>::infinity(), 0.0);
    st.checks.add(sec, "delta_sq_A2", rep.delta_sq_A2, ">", 0.0, 0.0);
    st.checks.add(sec, "delta_sq_A3", rep.delta_sq_A3, ">", 0.0, 0.0);
    return sec;
}

json section_resolvent(RunState& st)
{
    const RunConfig& cfg = st.cfg;
    const Potential V = potential_of(cfg);
    json sec = {{"checks", json::array()}};
    const AssumptionReport adm = assumption_report(V, cfg.scan.lmax);
    if (!adm.passed) {
        sec["admissible"] = false;
        sec["delta_sq"] = num(adm.delta_sq_A2);
        st.checks.add(sec, "admissible_delta_sq_A2", adm.delta_sq_A2, ">", 0.0, 0.0);
        return sec;
    }
    std::vector<SampleProfile> samples;
    for (double c : cfg.scan.f_centers)
        samples.push_back(bump_sample(c));
    const std::vector<std::complex<double>> z = cfg.scan.z_set.empty() ? default_z_set() : cfg.scan.z_set;
    const GridPtr grid = make_log_grid(cfg.grid.rmin, cfg.grid.rmax, cfg.grid.N, cfg.potential.n);
    const ResolventReport rep = resolvent_scan(V, z, samples, *grid, true);

    sec["admissible"] = true;
    sec["delta_sq"] = num(rep.delta_sq);
    sec["bound"] = num(rep.bound);
    sec["bound_sharp"] = num(rep.bound_sharp);
    sec["sup_ratio"] = num(rep.sup_ratio);
    sec["grid"] = {{"rmin", rep.rmin}, {"rmax", rep.rmax}, {"N", rep.N}};
    sec["entries"] = rep.entries.size();
    sec["truncation_sensitivity"] = num(rep.truncation_sensitivity);
    st.checks.add(sec, "sup_ratio", rep.sup_ratio, "<=", rep.bound, rep.tol, Tol::relative);
    st.checks.add(sec, "truncation_sensitivity", rep.truncation_sensitivity, "<=", 0.01, 0.0);

    std::ostringstream csv;
    csv << "z_re,z_im,nu,sample,ratio\n";
    for (const ResolventEntry& e : rep.entries)
        csv << csv_num(e.z.real()) << ',' << csv_num(e.z.imag()) << ',' << csv_num(e.nu) << ','
            << samples[e.sample].label << ',' << csv_num(e.ratio) << '\n';
    st.tables.push_back({"resolvent_scan.csv", csv.str()});
    return sec;
}

// ‖·‖_{L^p_t} over [0, T'] from a recorded L^q_x series.
double strichartz_upto(const EvolutionTrace& trace, std::size_t k, double p, double T)
{
    const std::vector<double>& v = trace.lq[k];
    if (std::isinf(p)) {
        double m = 0.0;
        for (std::size_t i = 0; i < v.size() && trace.times[i] <= T * (1.0 + 1e-12); ++i)
            m = std::max(m, v[i]);
        return m;
    }
    std::vector<double> pw(v.size());
    for (std::size_t i = 0; i < v.size(); ++i)
        pw[i] = std::pow(v[i], p);
    return std::pow(time_integral(trace.times, pw, T), 1.0 / p);
}

struct EvolutionRun {
    Potential V;
    CauchyData data;
    EvolutionTrace trace;
    AssumptionReport adm;
};

std::optional<EvolutionRun> evolve_from_config(RunState& st, json& sec, bool with_strichartz)
{
    const RunConfig& cfg = st.cfg;
    const EvolutionConfig& ec = cfg.evolution;
    EvolutionRun run{potential_of(cfg), {}, {}, {}};
    run.adm = assumption_report(run.V, cfg.scan.lmax);
    sec["equation"] = ec.equation == Equation::schrodinger ? "schrodinger" : "wave";
    sec["method"] = to_string(ec.method);
    if (!run.adm.passed) {
        sec["admissible"] = false;
        st.checks.add(sec, "admissible_delta_sq_A2", run.adm.delta_sq_A2, ">", 0.0, 0.0);
        return std::nullopt;
    }
    sec["admissible"] = true;
    const ChannelSet channels = channel_set(run.V, ec.lmax);
    const GridPtr grid = make_log_grid(ec.grid.rmin, ec.grid.rmax, ec.grid.N, cfg.potential.n);
    const double w2 = ec.width * ec.width;
    const DataFunction f = [w2](double r, double) { return std::complex<double>(std::exp(-r * r / (2.0 * w2))); };
    const DataFunction g = [](double, double) { return std::complex<double>(0.0); };
    if (ec.data == "gaussian") {
        run.data = ec.equation == Equation::wave ? make_cauchy_data(channels, grid, f, g)
                                                 : make_cauchy_data(channels, grid, f);
    } else {
        const Eigen::MatrixXcd f0 = ground_channel_gaussian(channels, *grid, ec.width);
        run.data = make_channel_data(channels, grid, f0,
                                     ec.equation == Equation::wave ? Eigen::MatrixXcd::Zero(f0.rows(), f0.cols())
                                                                   : Eigen::MatrixXcd());
    }

    EvolutionOptions opts;
    opts.method = ec.method;
    if (with_strichartz)
        for (double p : ec.strichartz_p)
            opts.strichartz.push_back(admissible_pair(ec.equation, cfg.potential.n, p));
    run.trace = ec.equation == Equation::schrodinger ? evolve_schrodinger(run.V, run.data, ec.T, ec.dt, opts)
                                                     : evolve_wave(run.V, run.data, ec.T, ec.dt, opts);
    sec["T"] = run.trace.T;
    sec["dt"] = run.trace.dt;
    sec["steps"] = run.trace.times.size() - 1;
    sec["grid"] = {{"rmin", ec.grid.rmin}, {"rmax", ec.grid.rmax}, {"N", ec.grid.N}};
    sec["channels"] = channels.nu.size();
    sec["data"] = {{"l2", num(run.data.f_l2)},
                   {"h_half", num(run.data.f_h_half)},
                   {"g_h_minus_half", num(run.data.g_h_minus_half)},
                   {"profile", ec.data},
                   {"width", ec.width}};

    std::ostringstream csv;
    csv << "t,mass,hardy_sq";
    if (ec.equation == Equation::wave)
        csv << ",energy";
    for (const StrichartzQuery& q : run.trace.queries)
        csv << ",lq_p" << csv_num(q.p) << "_q" << csv_num(q.q);
    csv << '\n';
    for (std::size_t i = 0; i < run.trace.times.size(); ++i) {
        csv << csv_num(run.trace.times[i]) << ',' << csv_num(run.trace.mass[i]) << ','
            << csv_num(run.trace.hardy_sq[i]);
        if (ec.equation == Equation::wave)
            csv << ',' << csv_num(run.trace.energy[i]);
        for (const auto& series : run.trace.lq)
            csv << ',' << csv_num(series[i]);
        csv << '\n';
    }
    st.tables.push_back({with_strichartz ? "strichartz_trace.csv" : "evolution_trace.csv", csv.str()});
    return run;
}

json section_evolve(RunState& st)
{
    json sec = {{"checks", json::array()}};
    auto run = evolve_from_config(st, sec, false);
    if (!run)
        return sec;
    const EvolutionTrace& tr = run->trace;
    const double T = tr.T;
    const double smooth = smoothing_norm(tr), smooth_half = smoothing_norm(tr, 0.5 * T);
    sec["smoothing_norm"] = num(smooth);
    sec["smoothing_norm_half_T"] = num(smooth_half);
    st.checks.add(sec, "smoothing_monotone_in_T", smooth_half, "<=", smooth, 1e-12, Tol::relative);
    if (tr.equation == Equation::schrodinger) {
        const double ratio = smooth / tr.data_l2;
        const double bound = 1.0 / (run->adm.delta_sq_A2 * std::sqrt(2.0 * M_PI));
        sec["smoothing_ratio"] = num(ratio);
        sec["smoothing_bound"] = num(bound);
        sec["mass_drift"] = num(tr.mass_drift());
        st.checks.add(sec, "smoothing_ratio", ratio, "<=", bound, 0.0);
        st.checks.add(sec, "mass_drift", tr.mass_drift(), "<=", tr.method == Method::hankel_spectral ? 1e-10 : 1e-6,
                      0.0);
    } else {
        const double den = tr.data_h_half + tr.data_h_minus_half;
        const double ratio = den > 0.0 ? smooth / den : 0.0;
        sec["smoothing_ratio"] = num(ratio);
        sec["energy_drift"] = num(tr.energy_drift());
        st.checks.add(sec, "smoothing_ratio_finite", ratio, "<", std::numeric_limits<double>::infinity(), 0.0);
        st.checks.add(sec, "energy_drift", tr.energy_drift(), "<=",
                      tr.method == Method::hankel_spectral ? 1e-8 : 1e-5, 0.0);
    }
    return sec;
}

json section_strichartz(RunState& st)
{
    json sec = {{"checks", json::array()}, {"norms", json::array()}};
    auto run = evolve_from_config(st, sec, true);
    if (!run)
        return sec;
    const EvolutionTrace& tr = run->trace;
    const double den = tr.equation == Equation::schrodinger ? tr.data_l2 : tr.data_h_half + tr.data_h_minus_half;
    for (std::size_t k = 0; k < tr.queries.size(); ++k) {
        const StrichartzQuery& q = tr.queries[k];
        const double norm = strichartz_norm(tr, q);
        const double half = strichartz_upto(tr, k, q.p, 0.5 * tr.T);
        const double change = norm > 0.0 ? std::abs(norm - half) / norm : 0.0;
        json entry = {{"p", num(q.p)},
                      {"q", num(q.q)},
                      {"sigma", num(q.sigma_gap)},
                      {"sup_substituted", static_cast<bool>(tr.sup_flag[k])},
                      {"norm", num(norm)},
                      {"ratio", num(den > 0.0 ? norm / den : 0.0)},
                      {"norm_half_T", num(half)},
                      {"half_T_change", num(change)}};
        sec["norms"].push_back(entry);
        std::ostringstream tag;
        tag << "(" << q.p << "," << q.q << ")";
        st.checks.add(sec, "strichartz_finite" + tag.str(), norm, "<", std::numeric_limits<double>::infinity(), 0.0);
        st.checks.add(sec, "strichartz_T_stability" + tag.str(), change, "<=", 0.05, 0.0);
    }
    return sec;
}

json section_oplab(RunState& st)
{
    const OplabConfig& oc = st.cfg.oplab;
    json sec = {{"checks", json::array()}, {"random", json::array()}, {"physical", json::array()},
                {"c1", json::array()}};
    std::ostringstream csv;
    csv << "family,index,alpha,integral_error,reconstruction_error\n";

    auto identities = [&](const DiscreteOperatorPair& pair, std::uint64_t vseed, const std::string& family, int index,
                          json& out) {
        std::mt19937_64 rng(vseed);
        std::normal_distribution<double> normal;
        Eigen::VectorXd g(pair.size());
        for (Eigen::Index i = 0; i < g.size(); ++i)
            g(i) = normal(rng);
        double worst_int = 0.0, worst_rec = 0.0, worst_sup = 0.0;
        for (double alpha : oc.alphas) {
            const double ei = q_integral_identity(pair, alpha, g).relative_error();
            const double er = q_reconstruction_identity(pair, alpha, oc.gamma, g).relative_error();
            const double sup = q_alpha_scan_max(pair, alpha) / q_alpha_sup(alpha);
            worst_int = std::max(worst_int, ei);
            worst_rec = std::max(worst_rec, er);
            worst_sup = std::max(worst_sup, sup);
            csv << family << ',' << index << ',' << csv_num(alpha) << ',' << csv_num(ei) << ',' << csv_num(er) << '\n';
        }
        out["integral_identity_error"] = num(worst_int);
        out["reconstruction_identity_error"] = num(worst_rec);
        out["q_sup_over_bound"] = num(worst_sup);
        const std::string tag = family + "[" + std::to_string(index) + "]";
        st.checks.add(sec, "integral_identity" + tag, worst_int, "<=", 1e-8, 0.0);
        st.checks.add(sec, "reconstruction_identity" + tag, worst_rec, "<=", 1e-8, 0.0);
        st.checks.add(sec, "q_alpha_sup" + tag, worst_sup, "<=", 1.0, 1e-12);
    };

    for (int k = 0; k < oc.count; ++k) {
        const DiscreteOperatorPair pair = random_operator_pair(oc.size, st.seed + static_cast<std::uint64_t>(k));
        json entry = {{"index", k}, {"size", oc.size}};
        identities(pair, st.seed ^ (0x9E3779B97F4A7C15ULL + k), "random", k, entry);
        const CommutatorReport cr = commutator_hypothesis_check(pair, st.seed);
        entry["commutator"] = {{"c_estimate", num(cr.c_estimate)},
                               {"probe_estimate", num(cr.probe_estimate)},
                               {"lambda_omega_norm", num(cr.commutator_norm)},
                               {"probes", cr.probes}};
        st.checks.add(sec, "commutator_probe_below_operator_norm[" + std::to_string(k) + "]", cr.probe_estimate, "<=",
                      cr.c_estimate, 1e-10, Tol::relative);
        sec["random"].push_back(entry);
    }

    const GridPtr pgrid = make_log_grid(oc.grid.rmin, oc.grid.rmax, oc.grid.N, 3);
    for (std::size_t k = 0; k < oc.nu.size(); ++k) {
        const DiscreteOperatorPair pair = channel_pair(oc.nu[k], *pgrid);
        json entry = {{"nu", oc.nu[k]}, {"N", oc.grid.N}};
        identities(pair, st.seed + 1000 + k, "channel", static_cast<int>(k), entry);
        const CommutatorReport cr = commutator_hypothesis_check(pair, st.seed);
        entry["commutator"] = {{"c_estimate", num(cr.c_estimate)},
                               {"probe_estimate", num(cr.probe_estimate)},
                               {"lambda_omega_norm", num(cr.commutator_norm)},
                               {"probes", cr.probes}};
        sec["physical"].push_back(entry);
    }

    const GridPtr cgrid = make_log_grid(oc.grid.rmin, oc.grid.rmax, oc.c1_N, 3);
    for (double nu : oc.nu) {
        const C1Result c1 = c1_operator_check(nu, *cgrid);
        json entry = {{"nu", nu},
                      {"analytic_norm", num(c1.analytic_norm)},
                      {"numeric_norm", num(c1.numeric_norm)},
                      {"unbounded_risk", c1.unbounded_risk},
                      {"N", oc.c1_N}};
        sec["c1"].push_back(entry);
        std::ostringstream tag;
        tag << "c1_norm[nu=" << nu << "]";
        if (!c1.unbounded_risk)
            st.checks.add(sec, tag.str(), c1.numeric_norm, "~", c1.analytic_norm, 0.02, Tol::relative);
    }
    st.tables.push_back({"oplab_identities.csv", csv.str()});
    return sec;
}

json section_dipole(RunState& st)
{
    const DipoleConfig& dc = st.cfg.dipole;
    json sec = {{"checks", json::array()}};
    const CriticalDipole crit = critical_dipole_moment(st.dipole_tol, dc.lmax);
    const std::vector<DipoleResult> curve = mu0_curve(dc.curve_points, 2.0, dc.lmax);
    sec["p0"] = num(crit.p0);
    sec["bracket"] = {num(crit.lower), num(crit.upper)};
    sec["tol"] = num(crit.tol);
    sec["lmax"] = crit.lmax;
    sec["iterations"] = crit.iterations;
    sec["lmax_doubling_shift"] = num(crit.lmax_shift);
    json mc = json::array();
    std::ostringstream csv;
    csv << "p,mu0,admissible,convergence\n";
    double worst_increase = 0.0;
    for (std::size_t i = 0; i < curve.size(); ++i) {
        const DipoleResult& d = curve[i];
        mc.push_back({{"p", num(d.p)}, {"mu0", num(d.mu0)}, {"admissible", d.admissible}});
        csv << csv_num(d.p) << ',' << csv_num(d.mu0) << ',' << (d.admissible ? 1 : 0) << ','
            << csv_num(d.convergence) << '\n';
        if (i > 0)
            worst_increase = std::max(worst_increase, d.mu0 - curve[i - 1].mu0);
    }
    sec["mu0_curve"] = mc;
    st.tables.push_back({"dipole_mu0.csv", csv.str()});

    st.checks.add(sec, "p0_reference", crit.p0, "~", 1.28, 0.01);
    st.checks.add(sec, "mu0_non_increasing", worst_increase, "<=", 0.0, 1e-12);
    st.checks.add(sec, "mu0_below_p0", dipole_mu0(crit.p0 - 0.01, dc.lmax).mu0, ">", -0.25, 0.0);
    st.checks.add(sec, "mu0_above_p0", dipole_mu0(crit.p0 + 0.01, dc.lmax).mu0, "<", -0.25, 0.0);
    st.checks.add(sec, "lmax_doubling_shift", crit.lmax_shift, "<=", crit.tol, 0.0);
    return sec;
}

using SectionFn = json (*)(RunState&);

const std::vector<std::pair<std::string, SectionFn>>& sections()
{
    static const std::vector<std::pair<std::string, SectionFn>> list{
        {"check", section_check},   {"resolvent", section_resolvent}, {"evolve", section_evolve},
        {"strichartz", section_strichartz}, {"oplab", section_oplab}, {"dipole", section_dipole}};
    return list;
}

json execute(const std::string& command, RunState& st)
{
    json report = {{"schema_version", "1"},
                   {"command", command},
                   {"seed", st.seed},
                   {"versions",
                    {{"critdecay", kVersion},
                     {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                   std::to_string(EIGEN_MINOR_VERSION)}}},
                   {"config", st.cfg.echo}};
    report["config"]["dipole"]["tol"] = st.dipole_tol;
    for (const auto& [name, fn] : sections()) {
        if (command != "all" && command != name)
            continue;
        const auto t0 = std::chrono::steady_clock::now();
        report[name] = fn(st);
        st.timings[name] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
    report["passed"] = st.checks.passed();
    return report;
}

void write_file(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error("cannot write '" + path.string() + "'");
    out << text;
    if (!out)
        throw Error("failed writing '" + path.string() + "'");
}

} // namespace

bool is_command(const std::string& command)
{
    if (command == "all")
        return true;
    for (const auto& entry : sections())
        if (entry.first == command)
            return true;
    return false;
}

json build_report(const std::string& command, const RunConfig& config, const RunOptions& options)
{
    if (!is_command(command))
        throw InvalidArgument("unknown command '" + command + "'");
    if (options.threads > 0)
        set_thread_count(static_cast<unsigned>(options.threads));
    RunState st{config, options.seed.value_or(config.seed), options.tol.value_or(config.dipole.tol), {}, {}, {}};
    if (!(st.dipole_tol >= 1e-10))
        throw InvalidArgument("--tol must be at least 1e-10");
    return execute(command, st);
}

int run(const std::string& command, const RunConfig& config, const RunOptions& options)
{
    try {
        if (!is_command(command))
            throw InvalidArgument("unknown command '" + command + "'");
        if (options.threads > 0)
            set_thread_count(static_cast<unsigned>(options.threads));
        RunState st{config, options.seed.value_or(config.seed), options.tol.value_or(config.dipole.tol), {}, {}, {}};
        if (!(st.dipole_tol >= 1e-10))
            throw InvalidArgument("--tol must be at least 1e-10");
        const json report = execute(command, st);

        const std::filesystem::path dir = options.out.value_or(config.output.dir);
        std::filesystem::create_directories(dir);
        write_file(dir / "report.json", report.dump(2) + "\n");
        if (config.output.csv)
            for (const CsvTable& t : st.tables)
                write_file(dir / t.name, t.text);
        json timings = {{"seconds", st.timings}, {"threads", thread_count()}};
        write_file(dir / "timings.json", timings.dump(2) + "\n");

        std::cout << command << ": " << (report["passed"].get<bool>() ? "PASS" : "FAIL") << " ("
                  << (dir / "report.json").string() << ")\n";
        return report["passed"].get<bool>() ? exit_pass : exit_bound_violation;
    } catch (const AssumptionViolation& e) {
        std::cerr << "critdecay: assumption violated: " << e.what() << '\n';
        return exit_bound_violation;
    } catch (const std::exception& e) {
        std::cerr << "critdecay: " << e.what() << '\n';
        return exit_operational;
    }
}

} // namespace critdecay
