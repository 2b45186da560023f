#pragma once

#include "fkdv/fourier.hpp"
#include "fkdv/waves.hpp"

namespace fkdv {

// Threshold log3/log2 - 1 separating supercritical (omega_2 > 0) from
// subcritical (omega_2 < 0) small-amplitude bifurcation.
double alpha_threshold();

// Closed-form small-amplitude correction coefficients.
struct StokesCoeffs {
    double alpha;
    double omega2;     // 1 - 1/(2(2^alpha - 1))
    double phi2_mean;  // omega2 - 1/2
    double phi2_cos2;  // 1/(2(2^alpha - 1))
    double phi3_cos3;  // 1/(2(2^alpha - 1)(3^alpha - 1))
};

StokesCoeffs stokes_coefficients(double alpha);

// phi = 1 + a cos x + a^2 phi_2 + a^3 phi_3, omega = 1 + omega_2 a^2;
// truncation error O(a^4).
NormalizedWave stokes_wave(double alpha, double a, const FourierGrid& grid);

// psi = a cos x + a^2/(2(2^a-1)) cos 2x + a^3/(2(2^a-1)(3^a-1)) cos 3x,
// c = -1 + a^2/(2(2^alpha-1)), b = a^2/2.
ZeroMeanWave stokes_zero_mean(double alpha, double a, const FourierGrid& grid);

// The speed expansion c(a) and its inverse (for seeding continuation).
double stokes_speed(double alpha, double a);
double stokes_amplitude_for_speed(double alpha, double c);

}  // namespace fkdv
