#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fkdv/errors.hpp"
#include "fkdv/fourier.hpp"
#include "fkdv/stability.hpp"
#include "fkdv/waves.hpp"

namespace fkdv {

struct SolverConfig {
    double residual_tol = 1e-10;
    int max_iter_petviashvili = 10000;
    int max_iter_newton = 50;
    double petviashvili_exponent = 2.0;
    double tail_tol = 1e-8;
    int tail_window = 10;
    int n_min = 64;
    int n_max = 8192;
    double continuation_step = 0.05;
    double step_min = 1e-4;
    double step_max_factor = 5.0;  // adaptive step cap, relative to continuation_step
    double zero_tol = 1e-6;        // eigenvalue zero window, relative to ||L||
    double b_prime_tol = 1e-6;     // marginal-stability window on b'
    double analysis_tail_tol = 0;  // mode cutoff for per-point analysis (0: tail_tol)
    bool with_stability = true;    // fill eigenvalue counts along branches

    void validate() const;
};

struct SolveInfo {
    int iterations = 0;
    double residual = 0.0;
    double stabilizing_factor = 0.0;    // Petviashvili M at acceptance
    std::vector<double> residual_history;  // max-norm residual per iteration
};

// Fixed point of phi -> M^gamma (D^alpha + omega)^{-1}(phi^2) with
// M = <(D^alpha + omega) phi, phi> / <phi^2, phi>. Convergence is expected
// for omega > 1; smaller omega > 0 is accepted because the failure mode on
// the two-negative-eigenvalue sub-branch (drift to the constant solution)
// is itself of interest.
NormalizedWave petviashvili_solve(double alpha, double omega, const NormalizedWave& seed,
                                  const SolverConfig& cfg, SolveInfo* info = nullptr);

// Newton in the even cosine subspace at fixed omega (normalized form).
NormalizedWave newton_solve_omega(double alpha, double omega, const NormalizedWave& seed,
                                  const SolverConfig& cfg, SolveInfo* info = nullptr);

// Newton in the even zero-mean cosine subspace at fixed c (boundary-value
// form); the mode-0 row/column is absent so the translation kernel and the
// fold direction are both gone from the Jacobian.
ZeroMeanWave newton_solve_c(double alpha, double c, const ZeroMeanWave& seed,
                            const SolverConfig& cfg, SolveInfo* info = nullptr);

// Projected descent for min B_c(u) over {int u^3 = 1, int u = 0}, followed
// by the rescaling psi = 2 B_c(u*) u*. Solver-independent of the Newton
// route; iterates are not symmetry-constrained.
ZeroMeanWave variational_minimize(double alpha, double c, const SolverConfig& cfg,
                                  SolveInfo* info = nullptr);

double residual_norm(const NormalizedWave& w);
double residual_norm(const ZeroMeanWave& w);

struct BranchPoint {
    double c = 0.0, b = 0.0, omega = 0.0, mu = 0.0, gamma = 0.0;
    double b_prime = 0.0, c_plus_2bprime = 0.0;
    int n_L = 0, z_L = 0;
    VerdictKind verdict = VerdictKind::stable;
    int n_modes = 0;
    double residual = 0.0;
    // smallest singular value of L|X0 on the even subspace: the numerical
    // test of the kernel conjecture at this point (not part of the CSV)
    double kernel_sv = 0.0;
};

struct FoldBracket {
    double c_lo = 0.0, c_hi = 0.0;
    double second_eigenvalue = 0.0;  // |lambda_2| at the closest point
};

struct Branch {
    double alpha = 0.0;
    std::vector<BranchPoint> points;  // strictly ordered by c
    std::vector<ZeroMeanWave> waves;  // same order as points
    std::vector<FoldBracket> folds;
    SolverConfig config;
    std::string seed_provenance;
    bool aborted = false;
    std::string abort_reason;
};

// Trace the existence curve over [c_min, c_max] with a secant predictor,
// fixed-c Newton corrector, adaptive Fourier resolution (N doubles whenever
// the tail rule fires) and fold bracketing on sign changes of c + 2 b'(c).
Branch continue_branch(double alpha, double c_min, double c_max, const SolverConfig& cfg);

// Single wave at speed c via a quick stability-free continuation from the
// Stokes regime.
ZeroMeanWave solve_at_speed(double alpha, double c, const SolverConfig& cfg);

// Existence curve traced with the fixed-omega Petviashvili iteration
// (stops where the iteration fails, e.g. below the fold for alpha < alpha_0).
Branch trace_branch_petviashvili(double alpha, double c_min, double c_max,
                                 const SolverConfig& cfg);

// Existence curve sampled with the constrained variational minimizer.
Branch trace_branch_variational(double alpha, double c_min, double c_max,
                                const SolverConfig& cfg);

}  // namespace fkdv
