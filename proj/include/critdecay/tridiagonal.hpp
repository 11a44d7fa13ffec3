#pragma once

#include "critdecay/errors.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <utility>

namespace critdecay {

/// Solves a tridiagonal system by Gaussian elimination with partial pivoting
/// (the LAPACK gtsv scheme). sub(i) couples row i+1 to column i, sup(i) row i
/// to column i+1.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1>
solve_tridiagonal(const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& sub,
                  const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& diag,
                  const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& sup,
                  const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& rhs)
{
    using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
    const Eigen::Index n = diag.size();
    if (sub.size() != n - 1 || sup.size() != n - 1 || rhs.size() != n)
        throw InvalidArgument("solve_tridiagonal: inconsistent sizes");
    Vec dl = sub, d = diag, du = sup, b = rhs;
    Vec du2 = Vec::Zero(std::max<Eigen::Index>(n - 2, 0));

    for (Eigen::Index i = 0; i + 1 < n; ++i) {
        if (std::abs(d(i)) >= std::abs(dl(i))) {
            if (d(i) == Scalar(0))
                throw Error("solve_tridiagonal: singular matrix");
            const Scalar f = dl(i) / d(i);
            d(i + 1) -= f * du(i);
            b(i + 1) -= f * b(i);
            dl(i) = f;
        } else {
            const Scalar f = d(i) / dl(i);
            d(i) = dl(i);
            dl(i) = f;
            const Scalar tmp = d(i + 1);
            d(i + 1) = du(i) - f * tmp;
            du(i) = tmp;
            if (i + 2 < n) {
                du2(i) = du(i + 1);
                du(i + 1) = -f * du2(i);
            }
            std::swap(b(i), b(i + 1));
            b(i + 1) -= f * b(i);
        }
    }
    if (d(n - 1) == Scalar(0))
        throw Error("solve_tridiagonal: singular matrix");

    Vec x(n);
    x(n - 1) = b(n - 1) / d(n - 1);
    if (n > 1)
        x(n - 2) = (b(n - 2) - du(n - 2) * x(n - 1)) / d(n - 2);
    for (Eigen::Index i = n - 3; i >= 0; --i)
        x(i) = (b(i) - du(i) * x(i + 1) - du2(i) * x(i + 2)) / d(i);
    return x;
}

/// y = T x for the tridiagonal T = (sub, diag, sup).
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1>
tridiagonal_multiply(const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& sub,
                     const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& diag,
                     const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& sup,
                     const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& x)
{
    const Eigen::Index n = diag.size();
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> y = diag.cwiseProduct(x);
    y.head(n - 1) += sup.cwiseProduct(x.tail(n - 1));
    y.tail(n - 1) += sub.cwiseProduct(x.head(n - 1));
    return y;
}

} // namespace critdecay
