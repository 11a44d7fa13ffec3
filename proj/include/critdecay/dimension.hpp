#pragma once

#include "critdecay/errors.hpp"

#include <string>

namespace critdecay {

struct Dimension {
    int n = 3;
    double lambda = 0.5;

    static Dimension of(int n)
    {
        if (n < 3)
            throw InvalidArgument("dimension n must be >= 3, got " + std::to_string(n));
        return Dimension{n, 0.5 * (n - 2)};
    }

    double lambda_sq() const { return lambda * lambda; }
};

inline bool operator==(const Dimension& a, const Dimension& b) { return a.n == b.n; }

} // namespace critdecay
