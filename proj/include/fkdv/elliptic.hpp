#pragma once

#include "fkdv/fourier.hpp"

namespace fkdv {

struct EllipticKE {
    double K;
    double E;
};

// Complete elliptic integrals of the first and second kinds, modulus
// convention K(k) = int_0^{pi/2} (1 - k^2 sin^2 t)^{-1/2} dt. Computed by the
// arithmetic-geometric mean, accurate to ~1e-15 relative. The modulus is
// capped at 1 - 1e-12; beyond that K diverges logarithmically and a domain
// error is thrown.
EllipticKE elliptic_K_E(double k);

// Jacobi elliptic cn(u, k) via the AGM and the descending Landen backward
// recurrence, good to ~1e-12.
double jacobi_cn(double u, double k);

// Exact single-lobe solution of D^alpha phi + omega phi - phi^2 = 0 for the
// two integrable cases, with the induced zero-mean parameters.
struct ExactWave {
    double alpha;
    double parameter;  // gamma for alpha = 1, elliptic modulus k for alpha = 2
    double omega;
    double c;
    double b;
    double mu;  // (1/2pi) int phi^2
    PeriodicField phi;
};

// alpha = 1: phi(x) = sinh(gamma) / (cosh(gamma) - cos x), omega = coth(gamma).
ExactWave bo_exact(double gamma, const FourierGrid& grid);

// alpha = 2: cnoidal wave with modulus k in (0, 1).
ExactWave kdv_exact(double k, const FourierGrid& grid);

}  // namespace fkdv
