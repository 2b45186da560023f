#include "fkdv/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>

#include "fkdv/stokes.hpp"
#include "spectral_ops.hpp"

namespace fkdv {

namespace {

const double kPi = FourierGrid::pi();

// Cosine-sector coefficient vector q[i] = psi_hat(m0 + i) (real parts).
Eigen::VectorXd sector_coeffs(const PeriodicField& f, int m0, int count) {
    Eigen::VectorXd q(count);
    for (int i = 0; i < count; ++i) q[i] = f.coeff(m0 + i).real();
    return q;
}

PeriodicField field_from_sector(const FourierGrid& grid, const Eigen::VectorXd& q, int m0) {
    const int half = grid.size() / 2;
    std::vector<std::complex<double>> coeffs(grid.size() + 1, {0.0, 0.0});
    for (int i = 0; i < q.size(); ++i) {
        int m = m0 + i;
        if (m > half) break;
        coeffs[half + m] = {q[i], 0.0};
        coeffs[half - m] = {q[i], 0.0};
    }
    return PeriodicField::from_coeffs(grid, std::move(coeffs));
}

double multiplier(double alpha, double shift, int m) {
    return (m == 0) ? shift : std::pow(double(m), alpha) + shift;
}

// Reusable factorization of the dense low-mode Jacobian block. Chord
// iterations keep using it while the contraction stays good, across Newton
// iterations and across nearby continuation points.
struct JacCache {
    bool valid = false;
    int n = 0;
    int m0 = -1;
    int k_lin = 0;
    double shift = 0.0;
    double psi0 = 0.0;  // mean of the potential when the factorization was built
    Eigen::PartialPivLU<Eigen::MatrixXd> lu;
};

// Shared Newton loop for both stationary forms. m0 = 1 solves the zero-mean
// problem at fixed c (shift = c); m0 = 0 solves the normalized problem at
// fixed omega (shift = omega).
Eigen::VectorXd newton_core(double alpha, double shift, int m0, const PeriodicField& seed,
                            const SolverConfig& cfg, SolveInfo* info,
                            JacCache* cache_io = nullptr) {
    const FourierGrid& grid = seed.grid();
    const int n = grid.size();
    const int K = n / 2 - m0 + 1;  // unknowns: modes m0 .. n/2
    Eigen::VectorXd q = sector_coeffs(seed, m0, K);

    auto residual_field = [&](const Eigen::VectorXd& qv, PeriodicField* psi_out,
                              Eigen::VectorXd* rvec) {
        PeriodicField psi = field_from_sector(grid, qv, m0);
        PeriodicField u = multiply(psi, psi);
        Eigen::VectorXd r(K);
        for (int i = 0; i < K; ++i) {
            int m = m0 + i;
            r[i] = multiplier(alpha, shift, m) * qv[i] - u.coeff(m).real();
        }
        if (psi_out) *psi_out = std::move(psi);
        if (rvec) *rvec = r;
        return field_from_sector(grid, r, m0).max_abs();
    };

    PeriodicField psi(grid);
    Eigen::VectorXd r(K);
    double rmax = residual_field(q, &psi, &r);
    if (info) info->residual_history.push_back(rmax);

    JacCache local;
    JacCache& cache = cache_io ? *cache_io : local;
    int rebuilds = 0;

    auto rebuild = [&](int iter) {
        int significant = last_mode_above(psi, 1e-9 * std::max(1.0, psi.max_abs()));
        int k_lin = std::clamp(significant + 16, 24, K);
        Eigen::VectorXd psi_hat = sector_coeffs(psi, 0, 2 * (m0 + k_lin) + 2);
        Eigen::MatrixXd J = detail::even_operator(psi_hat, alpha, shift, m0, k_lin);
        cache.lu.compute(J);
        if (cache.lu.rcond() < 1e-10) {
            cache.valid = false;
            throw SolveError(SolveError::Kind::near_fold,
                             "newton: Jacobian conditioning beyond 1e10", rmax, 0.0, iter);
        }
        cache.valid = true;
        cache.n = n;
        cache.m0 = m0;
        cache.k_lin = k_lin;
        cache.shift = shift;
        cache.psi0 = psi.coeff(0).real();
        ++rebuilds;
    };

    bool compatible = cache.valid && cache.n == n && cache.m0 == m0 &&
                      std::fabs(cache.shift - shift) < 0.1 * (1.0 + std::fabs(shift));
    if (!compatible) rebuild(0);

    int bad_steps = 0;
    for (int iter = 0; iter < cfg.max_iter_newton; ++iter) {
        if (rmax < cfg.residual_tol) {
            if (info) {
                info->iterations = iter;
                info->residual = rmax;
            }
            return q;
        }

        const int k_lin = cache.k_lin;
        Eigen::VectorXd delta(K);
        delta.head(k_lin) = cache.lu.solve(Eigen::VectorXd(-r.head(k_lin)));
        for (int i = k_lin; i < K; ++i) {
            int m = m0 + i;
            double am = multiplier(alpha, shift, m);
            double diag = am - 2.0 * cache.psi0;
            if (std::fabs(diag) < 0.3 * am) diag = am;
            delta[i] = -r[i] / diag;
        }

        double lambda = 1.0;
        bool accepted = false;
        double rmax_new = rmax;
        for (int bt = 0; bt < 6; ++bt) {
            Eigen::VectorXd q_try = q + lambda * delta;
            PeriodicField psi_try(grid);
            Eigen::VectorXd r_try;
            double rmax_try = residual_field(q_try, &psi_try, &r_try);
            if (rmax_try < rmax || rmax_try < cfg.residual_tol) {
                q = std::move(q_try);
                psi = std::move(psi_try);
                r = std::move(r_try);
                rmax_new = rmax_try;
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }

        if (!accepted) {
            if (rebuilds < 5) {
                rebuild(iter);
                continue;  // retry the step with a fresh Jacobian
            }
            if (++bad_steps >= 2)
                throw SolveError(SolveError::Kind::divergence,
                                 "newton: residual stopped decreasing", rmax, 0.0, iter);
            continue;
        }

        // Poor chord contraction: refresh the factorization for the next pass.
        if (rmax_new > 0.25 * rmax && rmax_new >= cfg.residual_tol && rebuilds < 5)
            rebuild(iter);
        rmax = rmax_new;
        if (info) info->residual_history.push_back(rmax);
    }
    if (rmax < cfg.residual_tol) {
        if (info) {
            info->iterations = cfg.max_iter_newton;
            info->residual = rmax;
        }
        return q;
    }
    throw SolveError(SolveError::Kind::divergence, "newton: iteration limit reached", rmax,
                     0.0, cfg.max_iter_newton);
}

}  // namespace

void SolverConfig::validate() const {
    auto fail = [](const std::string& what) {
        throw std::invalid_argument("SolverConfig: " + what);
    };
    if (!(residual_tol > 0) || !(tail_tol > 0) || !(zero_tol > 0) || !(b_prime_tol > 0))
        fail("tolerances must be positive");
    if (max_iter_petviashvili < 1 || max_iter_newton < 1) fail("iteration limits");
    if (n_min < 8 || n_min % 2 != 0 || n_max % 2 != 0 || n_min > n_max)
        fail("n_min/n_max must be even with n_min <= n_max");
    if (!(continuation_step > 0) || !(step_min > 0) || step_min > continuation_step)
        fail("continuation steps");
    if (tail_window < 1) fail("tail_window");
    if (!(petviashvili_exponent > 0)) fail("petviashvili_exponent");
}

NormalizedWave petviashvili_solve(double alpha, double omega, const NormalizedWave& seed,
                                  const SolverConfig& cfg, SolveInfo* info) {
    if (!(omega > 0.0))
        throw std::invalid_argument("petviashvili_solve: omega must be positive");
    const FourierGrid& grid = seed.phi.grid();
    const int n = grid.size();
    const int K = n / 2 + 1;
    Eigen::VectorXd q = sector_coeffs(seed.phi, 0, K);
    if (q.norm() == 0.0)
        throw std::invalid_argument("petviashvili_solve: zero seed");

    double M = 0.0, rmax = 0.0;
    const double gamma = cfg.petviashvili_exponent;
    for (int iter = 0; iter < cfg.max_iter_petviashvili; ++iter) {
        PeriodicField phi = field_from_sector(grid, q, 0);
        PeriodicField u = multiply(phi, phi);

        double num = 0.0, den = 0.0;
        for (int m = 0; m < K; ++m) {
            double w = (m == 0) ? 1.0 : 2.0;
            num += w * multiplier(alpha, omega, m) * q[m] * q[m];
            den += w * u.coeff(m).real() * q[m];
        }
        Eigen::VectorXd r(K);
        for (int m = 0; m < K; ++m)
            r[m] = multiplier(alpha, omega, m) * q[m] - u.coeff(m).real();
        rmax = field_from_sector(grid, r, 0).max_abs();

        if (rmax < cfg.residual_tol && std::fabs(M - 1.0) < 1e-10 && iter > 0) {
            PeriodicField p0 = project_zero_mean(phi);
            double rel = std::sqrt(inner_product(p0, p0) / std::max(inner_product(phi, phi), 1e-300));
            if (rel < 1e-6)
                throw SolveError(SolveError::Kind::constant_collapse,
                                 "petviashvili: converged to the constant solution", rmax,
                                 M, iter);
            if (info) {
                info->iterations = iter;
                info->residual = rmax;
                info->stabilizing_factor = M;
            }
            return NormalizedWave{alpha, omega, std::move(phi), rmax};
        }

        if (den == 0.0 || !std::isfinite(den) || !std::isfinite(num) || num / den <= 0.0)
            throw SolveError(SolveError::Kind::divergence,
                             "petviashvili: stabilizing factor broke down", rmax, M, iter);
        M = num / den;
        double boost = std::pow(M, gamma);
        for (int m = 0; m < K; ++m)
            q[m] = boost * u.coeff(m).real() / multiplier(alpha, omega, m);
    }
    throw SolveError(SolveError::Kind::divergence, "petviashvili: iteration limit reached",
                     rmax, M, cfg.max_iter_petviashvili);
}

NormalizedWave newton_solve_omega(double alpha, double omega, const NormalizedWave& seed,
                                  const SolverConfig& cfg, SolveInfo* info) {
    if (!(omega > 0.0))
        throw std::invalid_argument("newton_solve_omega: omega must be positive");
    SolveInfo local;
    Eigen::VectorXd q = newton_core(alpha, omega, 0, seed.phi, cfg, &local);
    PeriodicField phi = field_from_sector(seed.phi.grid(), q, 0);
    PeriodicField p0 = project_zero_mean(phi);
    double rel = std::sqrt(inner_product(p0, p0) / std::max(inner_product(phi, phi), 1e-300));
    if (rel < 1e-6)
        throw SolveError(SolveError::Kind::constant_collapse,
                         "newton: converged to the constant solution", local.residual, 0.0,
                         local.iterations);
    if (info) *info = local;
    return NormalizedWave{alpha, omega, std::move(phi), local.residual};
}

ZeroMeanWave newton_solve_c(double alpha, double c, const ZeroMeanWave& seed,
                            const SolverConfig& cfg, SolveInfo* info) {
    if (!(c > -1.0)) throw std::invalid_argument("newton_solve_c: need c > -1");
    SolveInfo local;
    Eigen::VectorXd q = newton_core(alpha, c, 1, seed.psi, cfg, &local);
    PeriodicField psi = field_from_sector(seed.psi.grid(), q, 1);
    if (psi.max_abs() < 1e-12)
        throw SolveError(SolveError::Kind::constant_collapse,
                         "newton: converged to the zero solution", local.residual, 0.0,
                         local.iterations);
    if (info) *info = local;
    return make_zero_mean_wave(alpha, c, std::move(psi), local.residual);
}

ZeroMeanWave variational_minimize(double alpha, double c, const SolverConfig& cfg,
                                  SolveInfo* info) {
    if (!(c > -1.0)) throw std::invalid_argument("variational_minimize: need c > -1");

    auto quad_form = [&](const PeriodicField& u) {
        PeriodicField du = frac_derivative(u, 0.5 * alpha);
        return 0.5 * (inner_product(du, du) + c * inner_product(u, u));
    };

    int n = cfg.n_min;
    // Deliberately off-phase, non-even start: the minimizer must find the
    // symmetry on its own.
    PeriodicField u = PeriodicField::sample(FourierGrid(n), [](double x) {
        return std::cos(x - 0.4) + 0.3 * std::cos(2.0 * (x - 0.4));
    });
    auto renorm = [&](PeriodicField& v) {
        PeriodicField v2 = multiply(v, v);
        double i3 = inner_product(v2, v);
        if (!(i3 > 0.0))
            throw SolveError(SolveError::Kind::stagnation,
                             "variational: cubic constraint lost positivity", i3);
        v = scale(1.0 / std::cbrt(i3), v);
    };
    renorm(u);

    double eta = 0.5;
    int total_iter = 0;
    const int max_iter = 60000;
    double grad_rel = 1.0;

    while (true) {
        bool converged = false;
        for (; total_iter < max_iter; ++total_iter) {
            PeriodicField u2 = multiply(u, u);
            // A^{-1} Pi_0 u^2 over nonzero modes
            const int half = u.size() / 2;
            std::vector<std::complex<double>> zc(u.size() + 1, {0.0, 0.0});
            for (int m = -half; m <= half; ++m) {
                if (m == 0) continue;
                zc[half + m] = u2.coeff(m) / multiplier(alpha, c, std::abs(m));
            }
            PeriodicField z = PeriodicField::from_coeffs(u.grid(), std::move(zc));
            double denom = inner_product(u2, z);
            if (std::fabs(denom) < 1e-300)
                throw SolveError(SolveError::Kind::stagnation, "variational: degenerate metric");
            double s = inner_product(u2, u) / denom;
            PeriodicField d = axpby(1.0, u, -s, z);  // A-metric projected gradient

            double gnorm = quad_form(d);
            double unorm = quad_form(u);
            grad_rel = std::sqrt(std::max(gnorm, 0.0) / std::max(unorm, 1e-300));
            if (grad_rel < 1e-7) {
                converged = true;
                break;
            }

            double B0 = quad_form(u);
            bool accepted = false;
            double try_eta = std::min(1.0, eta * 1.5);
            for (int bt = 0; bt < 40; ++bt) {
                PeriodicField v = axpby(1.0, u, -try_eta, d);
                v = project_zero_mean(v);
                PeriodicField v2 = multiply(v, v);
                double i3 = inner_product(v2, v);
                if (i3 > 0.0) {
                    PeriodicField w = scale(1.0 / std::cbrt(i3), v);
                    double B1 = quad_form(w);
                    if (B1 < B0 - 1e-4 * try_eta * gnorm) {
                        u = std::move(w);
                        eta = try_eta;
                        accepted = true;
                        break;
                    }
                }
                try_eta *= 0.5;
            }
            if (!accepted) {
                // double-precision descent floor; accept if the gradient is
                // already small enough for the downstream tolerances
                if (grad_rel < 1e-6) {
                    converged = true;
                    break;
                }
                throw SolveError(SolveError::Kind::stagnation,
                                 "variational: line search stagnated", grad_rel);
            }
        }
        if (!converged)
            throw SolveError(SolveError::Kind::stagnation,
                             "variational: iteration limit reached", grad_rel, 0.0,
                             total_iter);

        // Resolution control, then continue descending on the finer grid.
        if (spectral_tail_max(u, cfg.tail_window) <= cfg.tail_tol || n >= cfg.n_max) break;
        n *= 2;
        u = resample(u, FourierGrid(n));
        renorm(u);
    }

    double c1 = 2.0 * quad_form(u);
    PeriodicField psi = scale(c1, u);
    ZeroMeanWave w = make_zero_mean_wave(alpha, c, std::move(psi));
    w.residual = residual_norm(w);
    if (info) {
        info->iterations = total_iter;
        info->residual = w.residual;
    }
    return w;
}

double residual_norm(const NormalizedWave& w) {
    PeriodicField lhs = axpby(1.0, frac_derivative(w.phi, w.alpha), w.omega, w.phi);
    PeriodicField r = axpby(1.0, lhs, -1.0, multiply(w.phi, w.phi));
    return r.max_abs();
}

double residual_norm(const ZeroMeanWave& w) {
    PeriodicField lhs = axpby(1.0, frac_derivative(w.psi, w.alpha), w.c, w.psi);
    PeriodicField r = axpby(1.0, lhs, -1.0, project_zero_mean(multiply(w.psi, w.psi)));
    return r.max_abs();
}

// ---------------------------------------------------------------------------
// Branch continuation
// ---------------------------------------------------------------------------

namespace {

struct PointData {
    BranchPoint bp;
    EigenCounts counts;
    BPrime bprime;
};

PointData analyze_point(const ZeroMeanWave& w, const SolverConfig& cfg) {
    PointData pd;
    WaveDiagnostics dg = diagnostics(w);
    pd.bp.c = w.c;
    pd.bp.b = w.b;
    pd.bp.omega = std::sqrt(w.c * w.c + 4.0 * w.b);
    pd.bp.mu = dg.mu;
    pd.bp.gamma = dg.gamma;
    pd.bp.n_modes = w.psi.size();
    pd.bp.residual = w.residual;

    double atol = cfg.analysis_tail_tol > 0 ? cfg.analysis_tail_tol : cfg.tail_tol;
    int K = default_mode_count(w.psi, atol, cfg.tail_window);
    pd.bprime = b_prime(w, K);
    if (cfg.with_stability) {
        OperatorMatrix L = assemble_linearized(w, K);
        pd.counts = eigen_counts(L, cfg.zero_tol);
    } else {
        pd.counts.n = pd.counts.z = -1;
    }
    StabilityVerdict v = classify(w, pd.bprime, pd.counts, cfg.b_prime_tol);
    pd.bp.verdict = v.kind;
    pd.bp.n_L = pd.counts.n;
    pd.bp.z_L = pd.counts.z;
    pd.bp.b_prime = pd.bprime.value;
    pd.bp.c_plus_2bprime = w.c + 2.0 * pd.bprime.value;
    pd.bp.kernel_sv = pd.bprime.smallest_singular_value;
    return pd;
}

// Second-smallest |eigenvalue| among the reported lowest ones.
double second_abs_eigenvalue(const EigenCounts& counts) {
    std::vector<double> mags;
    for (double ev : counts.lowest) mags.push_back(std::fabs(ev));
    std::sort(mags.begin(), mags.end());
    return mags.size() > 1 ? mags[1] : 0.0;
}

ZeroMeanWave corrector(double alpha, double c, ZeroMeanWave seed, const SolverConfig& cfg,
                       int* n_io, int* iters, JacCache* cache = nullptr) {
    int n = std::max(*n_io, cfg.n_min);
    if (seed.psi.size() != n) seed.psi = resample(seed.psi, FourierGrid(n));
    while (true) {
        SolveInfo si;
        Eigen::VectorXd q = newton_core(alpha, c, 1, seed.psi, cfg, &si, cache);
        PeriodicField psi = field_from_sector(seed.psi.grid(), q, 1);
        if (psi.max_abs() < 1e-12)
            throw SolveError(SolveError::Kind::constant_collapse,
                             "newton: converged to the zero solution", si.residual);
        ZeroMeanWave w = make_zero_mean_wave(alpha, c, std::move(psi), si.residual);
        if (spectral_tail_max(w.psi, cfg.tail_window) <= cfg.tail_tol) {
            *n_io = n;
            if (iters) *iters = si.iterations;
            return w;
        }
        if (n >= cfg.n_max)
            throw SolveError(SolveError::Kind::unresolved,
                             "continuation: tail exceeds tolerance at n_max",
                             spectral_tail_max(w.psi, cfg.tail_window));
        n *= 2;
        seed = w;
        seed.psi = resample(seed.psi, FourierGrid(n));
    }
}

ZeroMeanWave secant_seed(double alpha, const ZeroMeanWave& w0, const ZeroMeanWave& w1,
                         double c_next, int n) {
    FourierGrid grid(n);
    PeriodicField p0 = resample(w0.psi, grid);
    PeriodicField p1 = resample(w1.psi, grid);
    double t = (w1.c != w0.c) ? (c_next - w1.c) / (w1.c - w0.c) : 0.0;
    PeriodicField pred = axpby(1.0 + t, p1, -t, p0);
    return make_zero_mean_wave(alpha, c_next, std::move(pred));
}

void insert_sorted(Branch& br, PointData pd, ZeroMeanWave w) {
    auto it = std::lower_bound(br.points.begin(), br.points.end(), pd.bp.c,
                               [](const BranchPoint& p, double c) { return p.c < c; });
    size_t idx = it - br.points.begin();
    br.points.insert(it, pd.bp);
    br.waves.insert(br.waves.begin() + idx, std::move(w));
}

ZeroMeanWave first_point(double alpha, double c_min, const SolverConfig& cfg, int* n_io,
                         int* iters, JacCache* cache = nullptr) {
    FourierGrid grid(std::max(*n_io, cfg.n_min));
    try {
        double a = stokes_amplitude_for_speed(alpha, c_min);
        return corrector(alpha, c_min, stokes_zero_mean(alpha, a, grid), cfg, n_io, iters,
                         cache);
    } catch (const SolveError&) {
        // Homotopy from closer to the bifurcation point.
        double c0 = -1.0 + 0.25 * (c_min + 1.0);
        double a0 = stokes_amplitude_for_speed(alpha, c0);
        ZeroMeanWave w = corrector(alpha, c0, stokes_zero_mean(alpha, a0, grid), cfg, n_io,
                                   iters, cache);
        ZeroMeanWave prev = w;
        for (int k = 1; k <= 4; ++k) {
            double ck = c0 + (c_min - c0) * k / 4.0;
            ZeroMeanWave seed = secant_seed(alpha, prev, w, ck, *n_io);
            prev = w;
            w = corrector(alpha, ck, seed, cfg, n_io, iters, cache);
        }
        return w;
    }
}

void refine_fold(Branch& br, double alpha, const SolverConfig& cfg, int* n_io,
                 JacCache* cache = nullptr) {
    // Bracket the most recent sign change of c + 2 b'(c).
    size_t i_hi = br.points.size() - 1;
    size_t i_lo = i_hi - 1;
    ZeroMeanWave lo_w = br.waves[i_lo], hi_w = br.waves[i_hi];
    double s_lo = br.points[i_lo].c_plus_2bprime;
    double s_hi = br.points[i_hi].c_plus_2bprime;
    double best_lambda2 = std::min(std::fabs(s_lo), std::fabs(s_hi));

    for (int iter = 0; iter < 40; ++iter) {
        double width = hi_w.c - lo_w.c;
        if (width < std::max(cfg.step_min, 1e-6)) break;
        double t = s_lo / (s_lo - s_hi);
        t = std::clamp(t, 0.2, 0.8);
        double c_mid = lo_w.c + t * width;
        ZeroMeanWave seed = secant_seed(alpha, lo_w, hi_w, c_mid, *n_io);
        std::optional<ZeroMeanWave> mid;
        try {
            mid = corrector(alpha, c_mid, seed, cfg, n_io, nullptr, cache);
        } catch (const SolveError&) {
            break;  // keep the bracket as-is
        }
        ZeroMeanWave& w_mid = *mid;
        PointData pd = analyze_point(w_mid, cfg);
        double s_mid = pd.bp.c_plus_2bprime;
        double lambda2 = cfg.with_stability ? second_abs_eigenvalue(pd.counts)
                                            : std::fabs(s_mid);
        double scale = pd.counts.scale;
        insert_sorted(br, pd, w_mid);
        best_lambda2 = std::min(best_lambda2, lambda2);
        if (cfg.with_stability && lambda2 < 10.0 * cfg.zero_tol * scale) {
            if ((s_mid > 0) == (s_hi > 0))
                hi_w = w_mid;
            else
                lo_w = w_mid;
            break;
        }
        if ((s_mid > 0) == (s_hi > 0)) {
            hi_w = w_mid;
            s_hi = s_mid;
        } else {
            lo_w = w_mid;
            s_lo = s_mid;
        }
    }
    br.folds.push_back({lo_w.c, hi_w.c, best_lambda2});
}

}  // namespace

Branch continue_branch(double alpha, double c_min, double c_max, const SolverConfig& cfg) {
    cfg.validate();
    if (!(c_min > -1.0) || !(c_min < c_max))
        throw std::invalid_argument("continue_branch: need -1 < c_min < c_max");

    Branch br;
    br.alpha = alpha;
    br.config = cfg;
    {
        std::ostringstream os;
        os << "stokes_zero_mean seed at c = " << c_min << ", secant continuation";
        br.seed_provenance = os.str();
    }

    int n = cfg.n_min;
    int iters = 0;
    JacCache cache;
    std::optional<ZeroMeanWave> first;
    try {
        first = first_point(alpha, c_min, cfg, &n, &iters, &cache);
    } catch (const SolveError& e) {
        br.aborted = true;
        br.abort_reason = std::string("first point failed: ") + e.what();
        return br;
    }
    PointData first_pd = analyze_point(*first, cfg);
    insert_sorted(br, std::move(first_pd), std::move(*first));

    double step = cfg.continuation_step;
    const double step_cap = cfg.step_max_factor * cfg.continuation_step;

    while (br.points.back().c < c_max - 1e-12) {
        double c_cur = br.points.back().c;
        // near the bifurcation point the natural branch parameter is
        // a^2 ~ 1 + c; cap the step accordingly so finite differences of
        // branch scalars keep their accuracy there
        double step_eff = std::min(step, std::max(5.0 * cfg.step_min, 0.18 * (c_cur + 1.0)));
        double c_next = std::min(c_cur + step_eff, c_max);
        ZeroMeanWave seed = br.waves.back();
        if (br.waves.size() >= 2) {
            seed = secant_seed(alpha, br.waves[br.waves.size() - 2], br.waves.back(), c_next,
                               n);
        } else {
            // first step: Stokes-derivative predictor about the current point
            FourierGrid grid(n);
            ZeroMeanWave s1 = stokes_zero_mean(alpha, stokes_amplitude_for_speed(alpha, c_next), grid);
            ZeroMeanWave s0 = stokes_zero_mean(alpha, stokes_amplitude_for_speed(alpha, c_cur), grid);
            PeriodicField pred = axpby(1.0, resample(seed.psi, grid), 1.0,
                                       axpby(1.0, s1.psi, -1.0, s0.psi));
            seed = make_zero_mean_wave(alpha, c_next, std::move(pred));
        }

        std::optional<ZeroMeanWave> next;
        try {
            next = corrector(alpha, c_next, seed, cfg, &n, &iters, &cache);
        } catch (const SolveError& e) {
            if (e.kind() == SolveError::Kind::unresolved) {
                br.aborted = true;
                br.abort_reason = e.what();
                break;
            }
            step *= 0.5;
            if (step < cfg.step_min) {
                br.aborted = true;
                br.abort_reason = std::string("step underflow near c = ") +
                                  std::to_string(c_next) + ": " + e.what();
                break;
            }
            continue;
        }

        PointData pd = analyze_point(*next, cfg);
        double s_prev = br.points.back().c_plus_2bprime;
        insert_sorted(br, pd, std::move(*next));
        if (s_prev * pd.bp.c_plus_2bprime < 0.0) refine_fold(br, alpha, cfg, &n, &cache);

        // chord iterations are cheap; only long solves signal a hard step
        if (iters <= 7)
            step = std::min(step * 1.4, step_cap);
        else if (iters >= 15)
            step = std::max(step * 0.6, cfg.step_min);
    }
    return br;
}

ZeroMeanWave solve_at_speed(double alpha, double c, const SolverConfig& cfg) {
    cfg.validate();
    if (!(c > -1.0)) throw std::invalid_argument("solve_at_speed: need c > -1");
    int n = cfg.n_min;
    int iters = 0;
    if (c <= -0.85) return first_point(alpha, c, cfg, &n, &iters);

    SolverConfig fast = cfg;
    fast.with_stability = false;
    fast.continuation_step = std::max(cfg.continuation_step, (c + 0.9) / 60.0);
    Branch br = continue_branch(alpha, -0.9, c, fast);
    if (br.aborted || br.points.empty() || std::fabs(br.points.back().c - c) > 1e-9)
        throw SolveError(SolveError::Kind::divergence,
                         "solve_at_speed: continuation aborted: " + br.abort_reason);
    return br.waves.back();
}

Branch trace_branch_petviashvili(double alpha, double c_min, double c_max,
                                 const SolverConfig& cfg) {
    cfg.validate();
    Branch br;
    br.alpha = alpha;
    br.config = cfg;
    br.seed_provenance = "petviashvili march in omega from 1+";

    int n = cfg.n_min;
    double domega = cfg.continuation_step;
    NormalizedWave cur = stokes_wave(alpha, 0.5, FourierGrid(n));
    const double omega_cap = 4.0 * (c_max + 2.0) + 10.0;
    for (double omega = 1.0 + domega; omega < omega_cap; omega += domega) {
        NormalizedWave w(NormalizedWave{alpha, omega, PeriodicField(FourierGrid(n)), 0});
        try {
            while (true) {
                NormalizedWave seed = cur;
                if (seed.phi.size() != n) seed.phi = resample(seed.phi, FourierGrid(n));
                w = petviashvili_solve(alpha, omega, seed, cfg);
                if (spectral_tail_max(w.phi, cfg.tail_window) <= cfg.tail_tol) break;
                if (n >= cfg.n_max)
                    throw SolveError(SolveError::Kind::unresolved,
                                     "petviashvili trace: tail at n_max");
                n *= 2;
            }
            cur = w;
        } catch (const SolveError& e) {
            br.aborted = true;
            br.abort_reason = e.what();
            break;
        }
        ZeroMeanWave z{alpha, 0, 0, PeriodicField(FourierGrid(8)), 0};
        try {
            z = to_zero_mean(w);
        } catch (const DegenerateWave& e) {
            br.aborted = true;
            br.abort_reason = e.what();
            break;
        }
        if (z.c > c_max) break;
        if (z.c >= c_min) insert_sorted(br, analyze_point(z, cfg), z);
    }
    return br;
}

Branch trace_branch_variational(double alpha, double c_min, double c_max,
                                const SolverConfig& cfg) {
    cfg.validate();
    Branch br;
    br.alpha = alpha;
    br.config = cfg;
    br.seed_provenance = "independent variational minimization per speed";
    for (double c = c_min; c <= c_max + 1e-12; c += cfg.continuation_step) {
        try {
            ZeroMeanWave w = variational_minimize(alpha, c, cfg);
            insert_sorted(br, analyze_point(w, cfg), w);
        } catch (const SolveError& e) {
            br.aborted = true;
            br.abort_reason = e.what();
            break;
        }
    }
    return br;
}

}  // namespace fkdv
