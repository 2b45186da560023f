#pragma once

#include "fkdv/fourier.hpp"

namespace fkdv {

// Solution of the normalized stationary equation
//   D^alpha phi + omega phi - phi^2 = 0.
struct NormalizedWave {
    double alpha;
    double omega;
    PeriodicField phi;
    double residual = 0.0;  // filled by the producer
};

// Zero-mean solution of the boundary-value problem
//   D^alpha psi + c psi = Pi_0 psi^2,
// with the induced constant b = (1/2pi) int psi^2.
struct ZeroMeanWave {
    double alpha;
    double c;
    double b;
    PeriodicField psi;
    double residual = 0.0;
};

ZeroMeanWave make_zero_mean_wave(double alpha, double c, PeriodicField psi,
                                 double residual = 0.0);

struct WaveDiagnostics {
    double b = 0.0;
    double mu = 0.0;       // (1/2pi) int phi^2 of the normalized counterpart
    double gamma = 0.0;    // (1/2pi) int psi^3
    double energy = 0.0;   // E(psi)
    double momentum = 0.0; // F(psi) = pi b
    double mass = 0.0;     // M(psi) = 0 for zero-mean waves
    double q_value = 0.0;  // (pi gamma / 4)^{1/3}
    bool q_defined = false;
};

// Galilean transform phi -> (psi, c, b). Throws DegenerateWave when phi is a
// constant profile (the mu = omega^2 branch), which is tracked separately
// from the single-lobe waves.
ZeroMeanWave to_zero_mean(const NormalizedWave& w);

// Inverse transform with omega = sqrt(c^2 + 4b). Throws DegenerateWave for
// psi identically zero and std::domain_error when c^2 + 4b < 0.
NormalizedWave to_normalized(const ZeroMeanWave& w);

WaveDiagnostics diagnostics(const ZeroMeanWave& w);
WaveDiagnostics diagnostics(const NormalizedWave& w);

// ||Pi_0 f|| < 1e-10 ||f||: the profile is constant at working precision.
bool is_constant_profile(const PeriodicField& f);

// Sub-grid location of the global maximum of the trigonometric interpolant.
double locate_maximum(const PeriodicField& f);

// Field translated so its maximum sits at x = 0; *shift receives the applied
// translation when non-null.
PeriodicField phase_align_max(const PeriodicField& f, double* shift = nullptr);

struct LobeCheck {
    bool is_single_lobe = false;
    bool even = false;
    bool monotone = false;
    double odd_norm = 0.0;
    double shift = 0.0;
};

// Phase-align the maximum to x = 0, then require evenness (odd-part norm
// below tol) and strict decrease on (0, pi) at grid resolution.
LobeCheck single_lobe_check(const PeriodicField& psi, double even_tol = 1e-8);

// Two-mode upper bound for the variational value q_c.
double two_mode_q_bound(double alpha, double c);

}  // namespace fkdv
