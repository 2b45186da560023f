#pragma once

// Shared helpers for building even-subspace operator blocks in the cosine
// parameterization f = sum_{m>=0} f_hat(m) e^{imx} + c.c. (f_hat real).
// Internal to the library.

#include <Eigen/Dense>

#include <cmath>

#include "fkdv/fourier.hpp"

namespace fkdv::detail {

// Real parts of f_hat(0..count-1); modes beyond the grid are zero.
inline Eigen::VectorXd hat_vector(const PeriodicField& f, int count) {
    Eigen::VectorXd v(count);
    for (int m = 0; m < count; ++m) v[m] = f.coeff(m).real();
    return v;
}

// Matrix of (A delta - 2 psi*) acting on even fields parameterized by
// f_hat(m), m = m0..m0+dim-1, where A_m = |m|^alpha + shift and psi_hat
// holds psi_hat(0..>=2(m0+dim)).
inline Eigen::MatrixXd even_operator(const Eigen::VectorXd& psi_hat, double alpha,
                                     double shift, int m0, int dim) {
    Eigen::MatrixXd M(dim, dim);
    auto ph = [&](int l) { return l < psi_hat.size() ? psi_hat[l] : 0.0; };
    for (int i = 0; i < dim; ++i) {
        int m = m0 + i;
        for (int j = 0; j < dim; ++j) {
            int n = m0 + j;
            double t;
            if (n == 0)
                t = ph(m);
            else
                t = ph(std::abs(m - n)) + ph(m + n);
            M(i, j) = -2.0 * t;
        }
        double am = (m == 0) ? shift : std::pow(double(m), alpha) + shift;
        M(i, i) += am;
    }
    return M;
}

// <f, g> = 2 pi [f0 g0 + 2 sum_{m>=1} f_m g_m] for even fields given by
// cosine-sector coefficient vectors starting at mode m0.
inline double even_inner(const Eigen::VectorXd& f, const Eigen::VectorXd& g, int m0) {
    double s = 0.0;
    for (int i = 0; i < f.size(); ++i) {
        double w = (m0 + i == 0) ? 1.0 : 2.0;
        s += w * f[i] * g[i];
    }
    return 2.0 * FourierGrid::pi() * s;
}

// Smallest |eigenvalue| of a factored symmetric matrix via inverse iteration.
template <typename Solver>
inline double smallest_abs_eigenvalue(const Solver& lu, int dim, int iters = 10) {
    Eigen::VectorXd x = Eigen::VectorXd::Ones(dim);
    for (int i = 0; i < dim; ++i) x[i] += 0.3 * std::sin(1.0 + 7.0 * i);
    x.normalize();
    double sigma = 0.0;
    for (int it = 0; it < iters; ++it) {
        Eigen::VectorXd y = lu.solve(x);
        double ny = y.norm();
        if (!std::isfinite(ny) || ny == 0.0) return 0.0;
        sigma = 1.0 / ny;
        x = y / ny;
    }
    return sigma;
}

}  // namespace fkdv::detail
