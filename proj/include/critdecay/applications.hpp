#pragma once

#include <vector>

namespace critdecay {

struct DipoleResult {
    double p = 0.0;
    double mu0 = 0.0;
    bool admissible = true;
    int lmax_used = 0;
    double convergence = 0.0; // |mu0(lmax) - mu0(lmax/2)|
};

// Ground state of −Δ̸ + p cosθ on S², m = 0 sector.
DipoleResult dipole_mu0(double p, int lmax = 40);

struct CriticalDipole {
    double p0 = 0.0;
    double lower = 0.0;
    double upper = 0.0;
    double tol = 0.0;
    int lmax = 0;
    int iterations = 0;
    double lmax_shift = 0.0; // |p0(lmax) − p0(2 lmax)| bound from mu0 at the bracket ends
};

CriticalDipole critical_dipole_moment(double tol, int lmax = 40);

std::vector<DipoleResult> mu0_curve(int points = 41, double pmax = 2.0, int lmax = 40);

} // namespace critdecay
