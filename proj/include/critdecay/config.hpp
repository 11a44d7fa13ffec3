#pragma once

#include "critdecay/evolution.hpp"
#include "critdecay/potentials.hpp"

#include "json.hpp"

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

namespace critdecay {

/// Parses the TOML subset used by run configs: [tables], dotted keys,
/// strings, numbers, booleans and (nested) arrays. Errors carry line:column.
nlohmann::json parse_toml(const std::string& text);

struct GridConfig {
    double rmin = 1e-3;
    double rmax = 1e3;
    int N = 4096;
};

struct ScanConfig {
    std::vector<std::complex<double>> z_set; ///< empty: default 24-point fan
    std::vector<double> f_centers;           ///< empty: bumps at 0.1, 1, 10
    int lmax = 40;
};

struct EvolutionConfig {
    Equation equation = Equation::schrodinger;
    Method method = Method::hankel_spectral;
    double T = 50.0;
    double dt = 0.05;
    int lmax = 8;
    std::string data = "channel_gaussian"; ///< or "gaussian" (physical e^{−r²/(2 width²)})
    double width = 1.0;
    std::vector<double> strichartz_p;
    GridConfig grid{1e-3, 3e3, 32768};
};

struct OplabConfig {
    int size = 256;
    int count = 10;
    std::vector<double> alphas{0.5, 1.0, 2.0};
    double gamma = 1.0;
    std::vector<double> nu{1.5, 2.0, 3.0};
    int c1_N = 1024;
    GridConfig grid{1e-2, 1e2, 512};
};

struct DipoleConfig {
    double tol = 1e-3;
    int lmax = 40;
    int curve_points = 41;
};

struct OutputConfig {
    std::string dir = ".";
    bool csv = true;
};

struct RunConfig {
    PotentialSpec potential;
    GridConfig grid;
    ScanConfig scan;
    EvolutionConfig evolution;
    OplabConfig oplab;
    DipoleConfig dipole;
    OutputConfig output;
    std::uint64_t seed = 0x5EED;
    nlohmann::json echo; ///< validated config with defaults filled
};

RunConfig config_from_json(const nlohmann::json& doc);
RunConfig parse_config_string(const std::string& text);
RunConfig parse_config(const std::string& path);

} // namespace critdecay
