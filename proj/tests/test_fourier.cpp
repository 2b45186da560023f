#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "fkdv/fourier.hpp"

using namespace fkdv;

namespace {
const double kPi = FourierGrid::pi();

PeriodicField sampled(const FourierGrid& g, double (*f)(double)) {
    return PeriodicField::sample(g, [f](double x) { return f(x); });
}
}  // namespace

TEST_CASE("make_grid basics") {
    FourierGrid g = make_grid(8);
    CHECK(g.size() == 8);
    CHECK(g.node(0) == doctest::Approx(-kPi));
    CHECK(g.node(1) == doctest::Approx(-3.0 * kPi / 4.0));
    CHECK(g.node(7) == doctest::Approx(3.0 * kPi / 4.0));

    FourierGrid big = make_grid(512);
    CHECK(big.spacing() == doctest::Approx(2.0 * kPi / 512.0));

    CHECK_THROWS_AS(make_grid(7), std::invalid_argument);
    CHECK_THROWS_AS(make_grid(6), std::invalid_argument);
    CHECK_THROWS_AS(make_grid(-16), std::invalid_argument);
}

TEST_CASE("transform round trip on random fields") {
    std::mt19937 rng(20240811);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (int n : {8, 64, 250}) {
        FourierGrid g(n);
        std::vector<double> values(n);
        double norm = 0.0;
        for (double& v : values) {
            v = dist(rng);
            norm = std::max(norm, std::fabs(v));
        }
        PeriodicField f(g, values);
        PeriodicField back = PeriodicField::from_coeffs(g, f.coeffs());
        for (int j = 0; j < n; ++j)
            CHECK(back.values()[j] == doctest::Approx(values[j]).epsilon(1e-12));

        // conjugate symmetry and real Nyquist
        for (int m = 1; m <= n / 2; ++m) {
            CHECK(f.coeff(-m).real() == doctest::Approx(f.coeff(m).real()).epsilon(1e-12));
            CHECK(f.coeff(-m).imag() == doctest::Approx(-f.coeff(m).imag()).epsilon(1e-12));
        }
        CHECK(f.coeff(n / 2).imag() == 0.0);
    }
}

TEST_CASE("frac_derivative on pure modes") {
    FourierGrid g(64);
    PeriodicField c1 = sampled(g, [](double x) { return std::cos(x); });
    for (double alpha : {0.3, 0.45, 1.0, 1.7, 2.0}) {
        PeriodicField d = frac_derivative(c1, alpha);
        for (int j = 0; j < g.size(); ++j)
            CHECK(d.values()[j] == doctest::Approx(c1.values()[j]).epsilon(1e-12));
    }

    PeriodicField c2 = sampled(g, [](double x) { return std::cos(2.0 * x); });
    PeriodicField d2 = frac_derivative(c2, 2.0);
    for (int j = 0; j < g.size(); ++j)
        CHECK(d2.values()[j] == doctest::Approx(4.0 * c2.values()[j]).epsilon(1e-12));

    PeriodicField s3 = sampled(g, [](double x) { return std::sin(3.0 * x); });
    PeriodicField d3 = frac_derivative(s3, 1.0);
    for (int j = 0; j < g.size(); ++j)
        CHECK(d3.values()[j] == doctest::Approx(3.0 * s3.values()[j]).epsilon(1e-12));

    CHECK_THROWS_AS(frac_derivative(c1, -0.5), std::invalid_argument);
}

TEST_CASE("frac_derivative mean-mode convention") {
    FourierGrid g(32);
    PeriodicField one = sampled(g, [](double) { return 1.0; });
    // alpha > 0 annihilates the mean
    CHECK(frac_derivative(one, 0.5).max_abs() == doctest::Approx(0.0).epsilon(1e-14));
    // alpha = 0 keeps it (0^0 = 1)
    CHECK(frac_derivative(one, 0.0).values()[3] == doctest::Approx(1.0));
}

TEST_CASE("frac_derivative is linear and commutes with translation") {
    FourierGrid g(64);
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<double> va(g.size()), vb(g.size());
    for (int j = 0; j < g.size(); ++j) {
        va[j] = dist(rng);
        vb[j] = dist(rng);
    }
    PeriodicField a(g, va), b(g, vb);
    double alpha = 0.7;

    PeriodicField lhs = frac_derivative(axpby(2.0, a, -3.0, b), alpha);
    PeriodicField rhs = axpby(2.0, frac_derivative(a, alpha), -3.0, frac_derivative(b, alpha));
    CHECK(axpby(1.0, lhs, -1.0, rhs).max_abs() < 1e-12);

    double shift = 5.0 * g.spacing();
    PeriodicField t_then_d = frac_derivative(translate(a, shift), alpha);
    PeriodicField d_then_t = translate(frac_derivative(a, alpha), shift);
    CHECK(axpby(1.0, t_then_d, -1.0, d_then_t).max_abs() < 1e-11);
}

TEST_CASE("frac_derivative alpha=2 matches finite differences on a band-limited field") {
    FourierGrid g(16);  // N = 4 * max mode
    PeriodicField f = PeriodicField::sample(g, [](double x) {
        return std::cos(3.0 * x) - 0.4 * std::sin(2.0 * x) + 0.2 * std::cos(4.0 * x);
    });
    PeriodicField d2 = frac_derivative(f, 2.0);

    // Independent oracle: centered second difference with exact sub-grid
    // shifts, Richardson-extrapolated in h to kill the h^2 term.
    auto fd_min_uxx = [&](double h) {
        PeriodicField fp = translate(f, h), fm = translate(f, -h);
        PeriodicField num = axpby(1.0, fp, 1.0, fm);
        num = axpby(1.0, num, -2.0, f);
        return scale(-1.0 / (h * h), num);
    };
    double h = 1e-3;
    PeriodicField fd = axpby(4.0 / 3.0, fd_min_uxx(0.5 * h), -1.0 / 3.0, fd_min_uxx(h));
    CHECK(axpby(1.0, d2, -1.0, fd).max_abs() < 1e-8);
}

TEST_CASE("project_zero_mean") {
    FourierGrid g(32);
    PeriodicField five = sampled(g, [](double) { return 5.0; });
    CHECK(project_zero_mean(five).max_abs() < 1e-14);

    PeriodicField c1 = sampled(g, [](double x) { return std::cos(x); });
    CHECK(axpby(1.0, project_zero_mean(c1), -1.0, c1).max_abs() < 1e-14);

    PeriodicField mix = sampled(g, [](double x) { return 1.0 + std::cos(x); });
    CHECK(axpby(1.0, project_zero_mean(mix), -1.0, c1).max_abs() < 1e-14);

    // idempotent
    PeriodicField p = project_zero_mean(mix);
    CHECK(axpby(1.0, project_zero_mean(p), -1.0, p).max_abs() < 1e-14);
}

TEST_CASE("project_zero_mean is self-adjoint under inner_product") {
    FourierGrid g(48);
    std::mt19937 rng(99);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<double> va(g.size()), vb(g.size());
    for (int j = 0; j < g.size(); ++j) {
        va[j] = dist(rng);
        vb[j] = dist(rng);
    }
    PeriodicField a(g, va), b(g, vb);
    CHECK(inner_product(project_zero_mean(a), b) ==
          doctest::Approx(inner_product(a, project_zero_mean(b))).epsilon(1e-12));
}

TEST_CASE("inner_product oracle values") {
    FourierGrid g(64);
    PeriodicField c1 = sampled(g, [](double x) { return std::cos(x); });
    PeriodicField s1 = sampled(g, [](double x) { return std::sin(x); });
    PeriodicField one = sampled(g, [](double) { return 1.0; });
    CHECK(inner_product(c1, c1) == doctest::Approx(kPi).epsilon(1e-13));
    CHECK(inner_product(c1, s1) == doctest::Approx(0.0).epsilon(1e-13));
    CHECK(inner_product(one, one) == doctest::Approx(2.0 * kPi).epsilon(1e-13));

    FourierGrid other(32);
    PeriodicField o = sampled(other, [](double x) { return std::cos(x); });
    CHECK_THROWS_AS(inner_product(c1, o), std::invalid_argument);
}

TEST_CASE("spectral_tail_max against the BO coefficient decay") {
    // Exact coefficients of sinh(g)/(cosh(g) - cos x) are e^{-g|m|} (mean 1).
    double gamma = 0.2;
    auto bo = [gamma](double x) {
        return std::sinh(gamma) / (std::cosh(gamma) - std::cos(x));
    };
    FourierGrid coarse(64);
    PeriodicField f64 = PeriodicField::sample(coarse, bo);
    CHECK(spectral_tail_max(f64, 10) > 1e-8);  // under-resolved

    FourierGrid fine(1024);
    PeriodicField f1024 = PeriodicField::sample(fine, bo);
    CHECK(spectral_tail_max(f1024, 10) < 1e-8);

    // the resolved coefficients match the closed form
    for (int m : {1, 5, 20}) {
        CHECK(f1024.coeff(m).real() == doctest::Approx(std::exp(-gamma * m)).epsilon(1e-9));
        CHECK(std::fabs(f1024.coeff(m).imag()) < 1e-12);
    }

    PeriodicField c1 = sampled(coarse, [](double x) { return std::cos(x); });
    CHECK(spectral_tail_max(c1, 10) == doctest::Approx(0.0));
}

TEST_CASE("dealiased product is exact for band-limited factors") {
    FourierGrid g(32);
    PeriodicField a = sampled(g, [](double x) { return std::cos(3.0 * x); });
    PeriodicField b = sampled(g, [](double x) { return std::sin(4.0 * x); });
    PeriodicField p = multiply(a, b);
    // cos(3x) sin(4x) = (sin 7x + sin x)/2
    PeriodicField exact = sampled(g, [](double x) {
        return 0.5 * (std::sin(7.0 * x) + std::sin(x));
    });
    CHECK(axpby(1.0, p, -1.0, exact).max_abs() < 1e-13);

    // aliasing stress: product modes exceed N/2, the retained ones stay exact
    PeriodicField h = sampled(g, [](double x) { return std::cos(10.0 * x); });
    PeriodicField hh = multiply(h, h);  // 1/2 + cos(20x)/2, mode 20 > 16 dropped
    CHECK(hh.coeff(0).real() == doctest::Approx(0.5).epsilon(1e-13));
    for (int m = 1; m <= 16; ++m)
        CHECK(std::abs(hh.coeff(m)) < 1e-13);
}

TEST_CASE("translate and odd part") {
    FourierGrid g(64);
    PeriodicField f = sampled(g, [](double x) { return std::cos(x - 0.7); });
    PeriodicField t = translate(f, 0.7);  // t(x) = f(x + 0.7) = cos(x)
    CHECK(odd_part_norm(t) < 1e-12);
    CHECK(odd_part_norm(f) == doctest::Approx(std::sqrt(kPi) * std::fabs(std::sin(0.7))).epsilon(1e-10));
}
