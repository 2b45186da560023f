#include "fkdv/stokes.hpp"

#include <cmath>
#include <stdexcept>

namespace fkdv {

double alpha_threshold() { return std::log(3.0) / std::log(2.0) - 1.0; }

StokesCoeffs stokes_coefficients(double alpha) {
    if (!(alpha > 0.0))
        throw std::invalid_argument("stokes_coefficients: alpha must be positive");
    double d2 = 2.0 * (std::pow(2.0, alpha) - 1.0);
    double d3 = std::pow(3.0, alpha) - 1.0;
    StokesCoeffs s;
    s.alpha = alpha;
    s.omega2 = 1.0 - 1.0 / d2;
    s.phi2_mean = s.omega2 - 0.5;
    s.phi2_cos2 = 1.0 / d2;
    s.phi3_cos3 = 1.0 / (d2 * d3);
    return s;
}

NormalizedWave stokes_wave(double alpha, double a, const FourierGrid& grid) {
    StokesCoeffs s = stokes_coefficients(alpha);
    double a2 = a * a, a3 = a2 * a;
    PeriodicField phi = PeriodicField::sample(grid, [&](double x) {
        return 1.0 + a * std::cos(x) + a2 * (s.phi2_mean + s.phi2_cos2 * std::cos(2.0 * x)) +
               a3 * s.phi3_cos3 * std::cos(3.0 * x);
    });
    double omega = 1.0 + s.omega2 * a2;
    return NormalizedWave{alpha, omega, std::move(phi)};
}

ZeroMeanWave stokes_zero_mean(double alpha, double a, const FourierGrid& grid) {
    StokesCoeffs s = stokes_coefficients(alpha);
    double a2 = a * a, a3 = a2 * a;
    PeriodicField psi = PeriodicField::sample(grid, [&](double x) {
        return a * std::cos(x) + a2 * s.phi2_cos2 * std::cos(2.0 * x) +
               a3 * s.phi3_cos3 * std::cos(3.0 * x);
    });
    double c = stokes_speed(alpha, a);
    return ZeroMeanWave{alpha, c, 0.5 * a2, std::move(psi)};
}

double stokes_speed(double alpha, double a) {
    double d2 = 2.0 * (std::pow(2.0, alpha) - 1.0);
    return -1.0 + a * a / d2;
}

double stokes_amplitude_for_speed(double alpha, double c) {
    if (!(c > -1.0))
        throw std::invalid_argument("stokes_amplitude_for_speed: need c > -1");
    double d2 = 2.0 * (std::pow(2.0, alpha) - 1.0);
    return std::sqrt((c + 1.0) * d2);
}

}  // namespace fkdv
