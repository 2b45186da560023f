#include "fkdv/elliptic.hpp"

#include <cmath>
#include <stdexcept>

namespace fkdv {

namespace {
constexpr double kModulusCap = 1.0 - 1e-12;
constexpr int kAgmMax = 64;
}  // namespace

EllipticKE elliptic_K_E(double k) {
    if (k < 0.0 || k >= 1.0)
        throw std::domain_error("elliptic_K_E: modulus must satisfy 0 <= k < 1");
    if (k > kModulusCap)
        throw std::domain_error("elliptic_K_E: modulus too close to 1, K overflows");

    const double pi = FourierGrid::pi();
    double a = 1.0, b = std::sqrt((1.0 - k) * (1.0 + k)), c = k;
    double csum = 0.5 * c * c;  // sum of 2^{n-1} c_n^2 starting at n = 0
    double pow2 = 0.5;
    for (int n = 0; n < kAgmMax && std::fabs(c) > 1e-17 * a; ++n) {
        double an = 0.5 * (a + b);
        double bn = std::sqrt(a * b);
        c = 0.5 * (a - b);
        a = an;
        b = bn;
        pow2 *= 2.0;
        csum += pow2 * c * c;
    }
    double K = pi / (2.0 * a);
    double E = K * (1.0 - csum);
    return {K, E};
}

double jacobi_cn(double u, double k) {
    if (k < 0.0 || k >= 1.0)
        throw std::domain_error("jacobi_cn: modulus must satisfy 0 <= k < 1");
    if (k > kModulusCap)
        throw std::domain_error("jacobi_cn: modulus too close to 1");
    if (k == 0.0) return std::cos(u);

    // AGM ladder: a_n, c_n = (a_{n-1} - b_{n-1})/2.
    double a[kAgmMax], c[kAgmMax];
    a[0] = 1.0;
    c[0] = k;
    double b = std::sqrt((1.0 - k) * (1.0 + k));
    int levels = 0;
    for (int n = 1; n < kAgmMax; ++n) {
        a[n] = 0.5 * (a[n - 1] + b);
        c[n] = 0.5 * (a[n - 1] - b);
        b = std::sqrt(a[n - 1] * b);
        levels = n;
        if (std::fabs(c[n]) <= 1e-16 * a[n]) break;
    }

    // Descend the amplitude: phi_{n-1} = (phi_n + asin(c_n/a_n sin phi_n))/2.
    double phi = std::ldexp(1.0, levels) * a[levels] * u;
    for (int n = levels; n >= 1; --n) {
        double s = std::clamp(c[n] / a[n] * std::sin(phi), -1.0, 1.0);
        phi = 0.5 * (phi + std::asin(s));
    }
    return std::cos(phi);
}

ExactWave bo_exact(double gamma, const FourierGrid& grid) {
    if (!(gamma > 0.0)) throw std::domain_error("bo_exact: gamma must be positive");
    const double omega = 1.0 / std::tanh(gamma);
    const double sh = std::sinh(gamma), ch = std::cosh(gamma);
    PeriodicField phi =
        PeriodicField::sample(grid, [&](double x) { return sh / (ch - std::cos(x)); });
    ExactWave w{1.0, gamma, omega, omega - 2.0, omega - 1.0, omega, std::move(phi)};
    return w;
}

ExactWave kdv_exact(double k, const FourierGrid& grid) {
    if (!(k > 0.0) || k >= 1.0)
        throw std::domain_error("kdv_exact: modulus must satisfy 0 < k < 1");
    auto [K, E] = elliptic_K_E(k);
    const double pi = FourierGrid::pi();
    const double K2 = K * K / (pi * pi);
    const double root = std::sqrt(1.0 - k * k + k * k * k * k);

    const double omega = 4.0 * K2 * root;
    const double c = 4.0 * K2 * (2.0 - k * k - 3.0 * E / K);
    const double b =
        4.0 * K2 * K2 *
        (-3.0 * (1.0 - k * k) + (2.0 - k * k) * 6.0 * E / K - 9.0 * E * E / (K * K));

    PeriodicField phi = PeriodicField::sample(grid, [&](double x) {
        double cn = jacobi_cn(K / pi * x, k);
        return 2.0 * K2 * (root + 1.0 - 2.0 * k * k + 3.0 * k * k * cn * cn);
    });
    double mu = inner_product(phi, phi) / (2.0 * pi);
    ExactWave w{2.0, k, omega, c, b, mu, std::move(phi)};
    return w;
}

}  // namespace fkdv
