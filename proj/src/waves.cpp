#include "fkdv/waves.hpp"

#include <cmath>
#include <stdexcept>

#include "fkdv/errors.hpp"

namespace fkdv {

namespace {
const double kPi = FourierGrid::pi();
}

ZeroMeanWave make_zero_mean_wave(double alpha, double c, PeriodicField psi,
                                 double residual) {
    double b = inner_product(psi, psi) / (2.0 * kPi);
    return ZeroMeanWave{alpha, c, b, std::move(psi), residual};
}

bool is_constant_profile(const PeriodicField& f) {
    double norm = std::sqrt(inner_product(f, f));
    PeriodicField p = project_zero_mean(f);
    double pnorm = std::sqrt(inner_product(p, p));
    return pnorm < 1e-10 * std::max(norm, 1e-300);
}

ZeroMeanWave to_zero_mean(const NormalizedWave& w) {
    if (is_constant_profile(w.phi))
        throw DegenerateWave("to_zero_mean: constant profile (mu = omega^2 branch)");
    PeriodicField psi = project_zero_mean(w.phi);
    double c = w.omega - integral(w.phi) / kPi;
    ZeroMeanWave z = make_zero_mean_wave(w.alpha, c, std::move(psi), w.residual);
    // b = (omega^2 - c^2)/4 coincides with the quadrature value at solutions;
    // keep the quadrature value, which is also the type invariant.
    return z;
}

NormalizedWave to_normalized(const ZeroMeanWave& w) {
    double disc = w.c * w.c + 4.0 * w.b;
    if (disc < 0.0)
        throw std::domain_error("to_normalized: c^2 + 4b < 0");
    if (w.psi.max_abs() < 1e-14 && w.b < 1e-14)
        throw DegenerateWave("to_normalized: zero profile");
    double omega = std::sqrt(disc);
    PeriodicField phi = w.psi;
    double lift = 0.5 * (omega - w.c);
    std::vector<double> values = phi.values();
    for (double& v : values) v += lift;
    return NormalizedWave{w.alpha, omega, PeriodicField(w.psi.grid(), std::move(values)),
                          w.residual};
}

namespace {

WaveDiagnostics diagnostics_impl(const ZeroMeanWave& w) {
    WaveDiagnostics d;
    const PeriodicField& psi = w.psi;
    if (psi.max_abs() < 1e-14) return d;  // zero wave: all diagnostics vanish

    d.b = inner_product(psi, psi) / (2.0 * kPi);
    PeriodicField psi2 = multiply(psi, psi);
    d.gamma = inner_product(psi2, psi) / (2.0 * kPi);
    d.momentum = 0.5 * inner_product(psi, psi);
    d.mass = integral(psi);
    PeriodicField half_deriv = frac_derivative(psi, 0.5 * w.alpha);
    d.energy = 0.5 * inner_product(half_deriv, half_deriv) -
               inner_product(psi2, psi) / 3.0;
    NormalizedWave nw = to_normalized(w);
    d.mu = inner_product(nw.phi, nw.phi) / (2.0 * kPi);
    if (d.gamma > 0.0) {
        d.q_value = std::cbrt(kPi * d.gamma / 4.0);
        d.q_defined = true;
    }
    return d;
}

}  // namespace

WaveDiagnostics diagnostics(const ZeroMeanWave& w) { return diagnostics_impl(w); }

WaveDiagnostics diagnostics(const NormalizedWave& w) {
    return diagnostics_impl(to_zero_mean(w));
}

double locate_maximum(const PeriodicField& f) {
    const auto& vals = f.values();
    int jmax = 0;
    for (int j = 1; j < f.size(); ++j)
        if (vals[j] > vals[jmax]) jmax = j;
    double x = f.grid().node(jmax);

    // Newton refinement on the trigonometric interpolant.
    const int half = f.size() / 2;
    auto d1 = [&](double t) {
        double s = 0.0;
        for (int m = 1; m <= half; ++m) {
            std::complex<double> c = f.coeff(m);
            s += -2.0 * m * (c.real() * std::sin(m * t) + c.imag() * std::cos(m * t));
        }
        return s;
    };
    auto d2 = [&](double t) {
        double s = 0.0;
        for (int m = 1; m <= half; ++m) {
            std::complex<double> c = f.coeff(m);
            s += -2.0 * m * m * (c.real() * std::cos(m * t) - c.imag() * std::sin(m * t));
        }
        return s;
    };
    for (int it = 0; it < 30; ++it) {
        double g = d1(x), h = d2(x);
        if (h >= 0.0) break;  // not a local max in the interpolant, stop
        double step = g / h;
        x -= step;
        if (std::fabs(step) < 1e-14) break;
    }
    if (x > kPi) x -= 2.0 * kPi;
    if (x < -kPi) x += 2.0 * kPi;
    return x;
}

PeriodicField phase_align_max(const PeriodicField& f, double* shift) {
    double x = locate_maximum(f);
    if (shift) *shift = x;
    return translate(f, x);
}

LobeCheck single_lobe_check(const PeriodicField& psi, double even_tol) {
    LobeCheck out;
    PeriodicField aligned = phase_align_max(psi, &out.shift);
    double scale = std::max(aligned.max_abs(), 1e-300);
    out.odd_norm = odd_part_norm(aligned);
    out.even = out.odd_norm < even_tol * scale;

    // Strict decrease from x = 0 to x = pi at grid resolution. Nodes run from
    // -pi, so x = 0 sits at index N/2.
    const auto& vals = aligned.values();
    const int n = aligned.size();
    out.monotone = true;
    double slack = 1e-12 * scale;
    double prev = vals[n / 2];
    for (int j = n / 2 + 1; j < n; ++j) {
        if (vals[j] > prev + slack) {
            out.monotone = false;
            break;
        }
        prev = vals[j];
    }
    out.is_single_lobe = out.even && out.monotone;
    return out;
}

double two_mode_q_bound(double alpha, double c) {
    double num = 3.0 * kPi * std::cbrt(std::pow(2.0, alpha) + c) *
                 std::pow(1.0 + c, 2.0 / 3.0);
    return num / (2.0 * std::pow(3.0 * kPi, 2.0 / 3.0));
}

}  // namespace fkdv
