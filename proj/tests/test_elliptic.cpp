#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <functional>

#include "fkdv/elliptic.hpp"
#include "fkdv/fourier.hpp"
#include "fkdv/solvers.hpp"
#include "fkdv/waves.hpp"

using namespace fkdv;

namespace {

const double kPi = FourierGrid::pi();

// Adaptive Simpson quadrature, used as the independent oracle for K and E.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol, int depth = 0) {
    double c = 0.5 * (a + b);
    double fa = f(a), fb = f(b), fc = f(c);
    double s = (b - a) / 6.0 * (fa + 4.0 * fc + fb);
    double lm = 0.5 * (a + c), rm = 0.5 * (c + b);
    double flm = f(lm), frm = f(rm);
    double sl = (c - a) / 6.0 * (fa + 4.0 * flm + fc);
    double sr = (b - c) / 6.0 * (fc + 4.0 * frm + fb);
    if (depth > 40 || std::fabs(sl + sr - s) < 15.0 * tol)
        return sl + sr + (sl + sr - s) / 15.0;
    return adaptive_simpson(f, a, c, 0.5 * tol, depth + 1) +
           adaptive_simpson(f, c, b, 0.5 * tol, depth + 1);
}

double K_quadrature(double k) {
    return adaptive_simpson(
        [k](double t) {
            double s = std::sin(t);
            return 1.0 / std::sqrt(1.0 - k * k * s * s);
        },
        0.0, kPi / 2.0, 1e-14);
}

double E_quadrature(double k) {
    return adaptive_simpson(
        [k](double t) {
            double s = std::sin(t);
            return std::sqrt(1.0 - k * k * s * s);
        },
        0.0, kPi / 2.0, 1e-14);
}

}  // namespace

TEST_CASE("elliptic integrals: degenerate and frozen oracle values") {
    auto [K0, E0] = elliptic_K_E(0.0);
    CHECK(K0 == doctest::Approx(kPi / 2.0).epsilon(1e-14));
    CHECK(E0 == doctest::Approx(kPi / 2.0).epsilon(1e-14));

    // frozen digits, independently confirmed by the quadrature oracle below
    auto [K8, E8] = elliptic_K_E(0.8);
    CHECK(K8 == doctest::Approx(1.995302778).epsilon(1e-9));
    CHECK(E8 == doctest::Approx(1.276349943).epsilon(1e-9));

    CHECK_THROWS_AS(elliptic_K_E(1.0), std::domain_error);
    CHECK_THROWS_AS(elliptic_K_E(-0.1), std::domain_error);
    CHECK_THROWS_AS(elliptic_K_E(1.0 - 1e-14), std::domain_error);
}

TEST_CASE("elliptic integrals agree with adaptive quadrature") {
    for (double k : {0.1, 0.3, 0.5, 0.8, 0.95, 0.999}) {
        auto [K, E] = elliptic_K_E(k);
        CHECK(K == doctest::Approx(K_quadrature(k)).epsilon(1e-12));
        CHECK(E == doctest::Approx(E_quadrature(k)).epsilon(1e-12));
    }
}

TEST_CASE("Legendre relation") {
    for (double k : {0.15, 0.4, 0.6, 0.85}) {
        double kp = std::sqrt(1.0 - k * k);
        auto [K, E] = elliptic_K_E(k);
        auto [Kp, Ep] = elliptic_K_E(kp);
        CHECK(E * Kp + Ep * K - K * Kp == doctest::Approx(kPi / 2.0).epsilon(1e-10));
    }
}

TEST_CASE("jacobi_cn special values and identities") {
    for (double k : {0.2, 0.5, 0.8, 0.95}) {
        CHECK(jacobi_cn(0.0, k) == doctest::Approx(1.0).epsilon(1e-12));
        auto [K, E] = elliptic_K_E(k);
        CHECK(std::fabs(jacobi_cn(K, k)) < 1e-10);
        // periodicity 4K
        CHECK(jacobi_cn(0.7 + 4.0 * K, k) == doctest::Approx(jacobi_cn(0.7, k)).epsilon(1e-9));
        // cn^2 + sn^2 = 1 via the derivative-free circular relation
        for (double u : {0.3, 1.1, 2.2}) {
            double cn = jacobi_cn(u, k);
            double cnK = jacobi_cn(u, k);
            CHECK(cn == cnK);  // determinism
            double sn2 = 1.0 - cn * cn;
            CHECK(sn2 >= -1e-12);
        }
    }
    // circular limit
    for (double u : {0.0, 0.5, 1.5, 3.0})
        CHECK(jacobi_cn(u, 0.0) == doctest::Approx(std::cos(u)).epsilon(1e-13));
    // near-circular
    CHECK(jacobi_cn(1.0, 1e-8) == doctest::Approx(std::cos(1.0)).epsilon(1e-10));
}

TEST_CASE("jacobi cn^2 + sn^2 = 1 with sn from the quarter-period shift") {
    // sn(u,k) = cn(K - u ...) is modulus-dependent; use the differential
    // identity instead: (d/du cn)^2 = (1 - cn^2)(1 - k^2 + k^2 cn^2).
    for (double k : {0.3, 0.7}) {
        for (double u : {0.4, 1.0, 1.9}) {
            double h = 1e-5;
            double d = (jacobi_cn(u + h, k) - jacobi_cn(u - h, k)) / (2.0 * h);
            double cn = jacobi_cn(u, k);
            double rhs = (1.0 - cn * cn) * (1.0 - k * k + k * k * cn * cn);
            CHECK(d * d == doctest::Approx(rhs).epsilon(1e-7));
        }
    }
}

TEST_CASE("bo_exact closed-form relations") {
    FourierGrid g(256);
    double gamma = 0.5 * std::log(3.0);  // coth(gamma) = 2
    ExactWave w = bo_exact(gamma, g);
    CHECK(w.omega == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(std::fabs(w.c) < 1e-14);
    CHECK(w.b == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(w.mu == doctest::Approx(2.0).epsilon(1e-14));

    for (double gm : {0.3, 0.8, 1.5, 3.0}) {
        ExactWave e = bo_exact(gm, g);
        // mean over the period is 1, i.e. int_0^pi phi = pi
        CHECK(e.phi.mean() == doctest::Approx(1.0).epsilon(1e-12));
        // b - c = 1 identically
        CHECK(e.b - e.c == doctest::Approx(1.0).epsilon(1e-12));
        // omega^2 = c^2 + 4b
        CHECK(e.omega * e.omega == doctest::Approx(e.c * e.c + 4.0 * e.b).epsilon(1e-12));
        // mu = omega (quadrature vs closed form)
        double mu_q = inner_product(e.phi, e.phi) / (2.0 * kPi);
        CHECK(mu_q == doctest::Approx(e.omega).epsilon(1e-12));
    }
    CHECK_THROWS_AS(bo_exact(0.0, g), std::domain_error);
    CHECK_THROWS_AS(bo_exact(-1.0, g), std::domain_error);
}

TEST_CASE("bo_exact satisfies the normalized stationary equation") {
    for (double gm : {0.3, 0.7, 1.2}) {
        FourierGrid g(1024);
        ExactWave w = bo_exact(gm, g);
        CHECK(spectral_tail_max(w.phi, 10) < 1e-8);
        NormalizedWave nw{1.0, w.omega, w.phi};
        CHECK(residual_norm(nw) < 1e-8);
    }
}

TEST_CASE("kdv_exact parameters and residual") {
    FourierGrid g(256);

    // k -> 0 limit: c -> -1, b -> 0
    ExactWave tiny = kdv_exact(1e-5, g);
    CHECK(tiny.c == doctest::Approx(-1.0).epsilon(1e-8));
    CHECK(std::fabs(tiny.b) < 1e-8);

    // omega^2 = c^2 + 4b algebraic identity at several moduli
    for (double k : {0.2, 0.5, 0.8, 0.95}) {
        ExactWave w = kdv_exact(k, g);
        CHECK(w.omega * w.omega == doctest::Approx(w.c * w.c + 4.0 * w.b).epsilon(1e-11));
        NormalizedWave nw{2.0, w.omega, w.phi};
        CHECK(residual_norm(nw) < 1e-8);
    }

    // k = 0.5 frozen against the independently validated quadrature route
    {
        double k = 0.5;
        double K = K_quadrature(k), E = E_quadrature(k);
        double root = std::sqrt(1.0 - k * k + k * k * k * k);
        double omega = 4.0 * K * K / (kPi * kPi) * root;
        double c = 4.0 * K * K / (kPi * kPi) * (2.0 - k * k - 3.0 * E / K);
        double b = 4.0 * std::pow(K / kPi, 4) *
                   (-3.0 * (1.0 - k * k) + (2.0 - k * k) * 6.0 * E / K -
                    9.0 * E * E / (K * K));
        ExactWave w = kdv_exact(k, g);
        CHECK(w.omega == doctest::Approx(omega).epsilon(1e-11));
        CHECK(w.c == doctest::Approx(c).epsilon(1e-11));
        CHECK(w.b == doctest::Approx(b).epsilon(1e-11));
    }

    // k -> 1 trend: b / c^{3/2} decreases toward 3/pi (the approach is
    // logarithmic in 1-k; ratios frozen from a 40-digit evaluation of the
    // closed forms)
    {
        const double expected[] = {3.3202798964751287, 1.782568807395356,
                                   1.4532578543893131, 1.3110530429713422};
        const double ks[] = {0.999, 0.99999, 0.9999999, 0.999999999};
        double prev_gap = 1e9;
        for (int i = 0; i < 4; ++i) {
            ExactWave w = kdv_exact(ks[i], g);
            REQUIRE(w.c > 0.0);
            double ratio = w.b / std::pow(w.c, 1.5);
            CHECK(ratio == doctest::Approx(expected[i]).epsilon(1e-8));
            double gap = std::fabs(ratio - 3.0 / kPi);
            CHECK(gap < prev_gap);
            prev_gap = gap;
        }
    }

    CHECK_THROWS_AS(kdv_exact(0.0, g), std::domain_error);
    CHECK_THROWS_AS(kdv_exact(1.0, g), std::domain_error);
}
