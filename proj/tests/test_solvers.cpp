#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "fkdv/elliptic.hpp"
#include "fkdv/errors.hpp"
#include "fkdv/solvers.hpp"
#include "fkdv/stokes.hpp"

using namespace fkdv;

namespace {
const double kPi = FourierGrid::pi();

ZeroMeanWave bo_zero_mean(double gamma, int n) {
    ExactWave e = bo_exact(gamma, FourierGrid(n));
    return to_zero_mean(NormalizedWave{1.0, e.omega, e.phi});
}
}  // namespace

TEST_CASE("petviashvili reproduces the BO profile at omega = 2") {
    SolverConfig cfg;
    FourierGrid g(256);
    NormalizedWave seed = stokes_wave(1.0, 1.4, g);  // scaled-up formal seed
    SolveInfo info;
    NormalizedWave w = petviashvili_solve(1.0, 2.0, seed, cfg, &info);
    CHECK(std::fabs(info.stabilizing_factor - 1.0) < 1e-10);
    CHECK(info.residual < cfg.residual_tol);

    ExactWave e = bo_exact(0.5 * std::log(3.0), g);
    CHECK(axpby(1.0, w.phi, -1.0, e.phi).max_abs() < 1e-8);
}

TEST_CASE("petviashvili reproduces the cnoidal profile") {
    SolverConfig cfg;
    FourierGrid g(256);
    ExactWave e = kdv_exact(0.5, g);
    NormalizedWave seed = stokes_wave(2.0, 0.8, g);
    NormalizedWave w = petviashvili_solve(2.0, e.omega, seed, cfg);
    CHECK(axpby(1.0, w.phi, -1.0, e.phi).max_abs() < 1e-8);
}

TEST_CASE("petviashvili fails on the two-negative-eigenvalue sub-branch") {
    // alpha < alpha_0: the small-amplitude wave has n(L) = 2 and the
    // iteration drifts to the constant solution instead.
    SolverConfig cfg;
    FourierGrid g(64);
    double alpha = 0.55;
    StokesCoeffs sc = stokes_coefficients(alpha);
    double a = 0.3;
    double omega = 1.0 + sc.omega2 * a * a;  // inside the two-wave window
    REQUIRE(omega < 1.0);
    NormalizedWave seed = stokes_wave(alpha, a, g);
    CHECK_THROWS_AS(petviashvili_solve(alpha, omega, seed, cfg), SolveError);
    // below the fold no single-lobe wave exists at all
    CHECK_THROWS_AS(petviashvili_solve(alpha, 0.97, seed, cfg), SolveError);

    CHECK_THROWS_AS(petviashvili_solve(alpha, -0.5, seed, cfg), std::invalid_argument);
    CHECK_THROWS_AS(petviashvili_solve(alpha, 0.97, NormalizedWave{alpha, 0.97, PeriodicField(g)}, cfg),
                    std::invalid_argument);
}

TEST_CASE("newton at fixed c reconverges from a perturbed exact wave") {
    SolverConfig cfg;
    FourierGrid g(256);
    ExactWave e = kdv_exact(0.5, g);
    ZeroMeanWave exact = to_zero_mean(NormalizedWave{2.0, e.omega, e.phi});

    std::mt19937 rng(5);
    std::uniform_real_distribution<double> dist(-1e-3, 1e-3);
    std::vector<double> vals = exact.psi.values();
    for (double& v : vals) v += dist(rng);
    ZeroMeanWave seed{2.0, e.c, exact.b, PeriodicField(g, vals)};

    SolveInfo info;
    ZeroMeanWave w = newton_solve_c(2.0, e.c, seed, cfg, &info);
    CHECK(axpby(1.0, w.psi, -1.0, exact.psi).max_abs() < 1e-8);
    CHECK(w.b == doctest::Approx(e.b).epsilon(1e-8));

    // superlinear contraction over the tail of the iteration
    const auto& h = info.residual_history;
    REQUIRE(h.size() >= 3);
    bool contracted = false;
    for (size_t i = 0; i + 1 < h.size(); ++i) {
        if (h[i] < 1e-3 && h[i] > 1e-9 && h[i + 1] <= 10.0 * std::pow(h[i], 1.8))
            contracted = true;
    }
    CHECK(contracted);
}

TEST_CASE("newton at fixed c = 0 lands on b = 1 for the BO equation") {
    SolverConfig cfg;
    ZeroMeanWave w = solve_at_speed(1.0, 0.0, cfg);
    CHECK(w.b == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(residual_norm(w) < 1e-9);
}

TEST_CASE("two sub-branch waves share one omega below 1 for alpha < alpha_0") {
    SolverConfig cfg;
    double alpha = 0.55;
    FourierGrid g(128);

    auto wave_at = [&](double c) {
        double a = stokes_amplitude_for_speed(alpha, c);
        return newton_solve_c(alpha, c, stokes_zero_mean(alpha, a, g), cfg);
    };
    auto omega_of = [](const ZeroMeanWave& w) {
        return std::sqrt(w.c * w.c + 4.0 * w.b);
    };

    // post-fold side (larger amplitude)
    ZeroMeanWave big = wave_at(-0.60);
    double target = omega_of(big);
    REQUIRE(target < 1.0);

    // pre-fold side: omega decreases in c, bisect for the matching omega
    double lo = -0.99, hi = -0.80;
    ZeroMeanWave small = wave_at(lo);
    for (int it = 0; it < 50; ++it) {
        double mid = 0.5 * (lo + hi);
        ZeroMeanWave wm = wave_at(mid);
        if (omega_of(wm) > target)
            lo = mid;
        else
            hi = mid;
        small = wm;
    }
    CHECK(omega_of(small) == doctest::Approx(target).epsilon(1e-6));
    // genuinely distinct waves
    CHECK(std::fabs(small.b - big.b) > 0.01);
    PeriodicField diff = axpby(1.0, resample(small.psi, g), -1.0, big.psi);
    CHECK(diff.max_abs() > 0.1);
}

TEST_CASE("newton at fixed omega succeeds where petviashvili fails") {
    SolverConfig cfg;
    double alpha = 0.55;
    FourierGrid g(64);
    StokesCoeffs sc = stokes_coefficients(alpha);
    double a = 0.3;
    double omega = 1.0 + sc.omega2 * a * a;
    NormalizedWave w = newton_solve_omega(alpha, omega, stokes_wave(alpha, a, g), cfg);
    CHECK(residual_norm(w) < cfg.residual_tol * 10);
    // non-constant single-lobe target
    CHECK(project_zero_mean(w.phi).max_abs() > 0.1);
}

TEST_CASE("variational minimizer matches the BO wave after phase alignment") {
    SolverConfig cfg;
    ZeroMeanWave w = variational_minimize(1.0, 0.0, cfg);
    ZeroMeanWave exact = bo_zero_mean(0.5 * std::log(3.0), w.psi.size());

    PeriodicField aligned = phase_align_max(w.psi);
    CHECK(axpby(1.0, aligned, -1.0, exact.psi).max_abs() < 1e-6);

    LobeCheck lc = single_lobe_check(w.psi, 1e-5);
    CHECK(lc.even);
    CHECK(lc.monotone);
}

TEST_CASE("variational minimizer respects the two-mode bound near c = -1") {
    SolverConfig cfg;
    ZeroMeanWave w = variational_minimize(0.6, -0.9, cfg);
    WaveDiagnostics d = diagnostics(w);
    REQUIRE(d.q_defined);
    CHECK(d.q_value <= two_mode_q_bound(0.6, -0.9));
}

TEST_CASE("continue_branch traces b = c + 1 for alpha = 1") {
    SolverConfig cfg;
    Branch br = continue_branch(1.0, -0.9, 1.5, cfg);
    REQUIRE(!br.aborted);
    REQUIRE(br.points.size() >= 10);
    for (const BranchPoint& p : br.points) {
        CHECK(std::fabs(p.b - (p.c + 1.0)) < 1e-6);
        CHECK(p.residual < cfg.residual_tol);
        CHECK(p.b_prime == doctest::Approx(1.0).epsilon(1e-6));
        CHECK(p.verdict == VerdictKind::stable);
        CHECK(p.n_L == 1);
        CHECK(p.z_L == 1);
    }
    // strictly ordered in c
    for (size_t i = 1; i < br.points.size(); ++i)
        CHECK(br.points[i].c > br.points[i - 1].c);
}

TEST_CASE("continuation keeps the spectral tail under control") {
    SolverConfig cfg;
    Branch br = continue_branch(1.0, -0.9, 6.0, cfg);
    REQUIRE(!br.aborted);
    for (const auto& w : br.waves)
        CHECK(spectral_tail_max(w.psi, cfg.tail_window) <= cfg.tail_tol);
    // the wave at c = 6 genuinely needs more modes than the starting grid
    CHECK(br.points.back().n_modes > cfg.n_min);
}

TEST_CASE("solve_at_speed matches the cnoidal closed forms") {
    SolverConfig cfg;
    FourierGrid g(256);
    ExactWave e = kdv_exact(0.5, g);
    ZeroMeanWave w = solve_at_speed(2.0, e.c, cfg);
    CHECK(w.b == doctest::Approx(e.b).epsilon(1e-8));
}

TEST_CASE("residual_norm oracle values") {
    FourierGrid g(512);
    ExactWave e = bo_exact(0.55, g);
    CHECK(residual_norm(NormalizedWave{1.0, e.omega, e.phi}) < 1e-10);

    ZeroMeanWave zero{1.0, 0.3, 0.0, PeriodicField(FourierGrid(64))};
    CHECK(residual_norm(zero) == 0.0);

    ZeroMeanWave s = stokes_zero_mean(0.8, 0.1, FourierGrid(64));
    double r = residual_norm(s);
    CHECK(r > 1e-6);
    CHECK(r < 1e-3);
}

TEST_CASE("petviashvili omega-march reproduces the existence curve") {
    SolverConfig cfg;
    cfg.continuation_step = 0.1;
    Branch br = trace_branch_petviashvili(1.0, -0.8, 1.0, cfg);
    REQUIRE(br.points.size() >= 5);
    for (const BranchPoint& p : br.points)
        CHECK(std::fabs(p.b - (p.c + 1.0)) < 1e-6);
}

TEST_CASE("variational and newton agree at unit speed too") {
    SolverConfig cfg;
    for (double alpha : {1.0, 2.0}) {
        ZeroMeanWave v = variational_minimize(alpha, 1.0, cfg);
        ZeroMeanWave n = solve_at_speed(alpha, 1.0, cfg);
        PeriodicField av = phase_align_max(v.psi);
        PeriodicField an = phase_align_max(resample(n.psi, v.psi.grid()));
        CHECK(axpby(1.0, av, -1.0, an).max_abs() < 1e-6);
    }
}
