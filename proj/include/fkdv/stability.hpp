#pragma once

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fkdv/waves.hpp"

namespace fkdv {

// Truncated Fourier-Galerkin matrix of L = D^alpha + c - 2 psi over the
// exponential basis e^{imx}, |m| <= K (index i = m + K). psi real and even
// makes the matrix real symmetric.
struct OperatorMatrix {
    double alpha = 0.0;
    double c = 0.0;
    int K = 0;
    Eigen::MatrixXd entries;
    Eigen::VectorXd psi_hat;  // psi_hat(0 .. 2K), zeros beyond the grid
};

OperatorMatrix assemble_linearized(const ZeroMeanWave& w, int K);

struct EigenCounts {
    int n = 0;                   // eigenvalues below -zero_tol * scale
    int z = 0;                   // eigenvalues within +-zero_tol * scale
    std::vector<double> lowest;  // 6 lowest eigenvalues, ascending
    double scale = 0.0;          // max |eigenvalue|
};

EigenCounts eigen_counts(const OperatorMatrix& L, double zero_tol);

// (n, z) predicted from the sign of c + 2 b'(c).
std::pair<int, int> predicted_counts(double c_plus_2bprime, double tol);

struct BPrime {
    double value = 0.0;
    double method_gap = 0.0;  // |linear solve - finite difference|
    bool has_gap = false;
    double smallest_singular_value = 0.0;  // of L|X0 on the even subspace
    bool degenerate = false;               // restricted operator near-singular
    Eigen::VectorXd v_even;                // solved dc psi, cosine modes 1..K
};

// Primary route: solve L|X0 v = -psi on the even zero-mean subspace (the
// matrix is L with the mode-0 row/column removed) and set
// b' = <psi, v>/pi. When branch neighbors (c, b) are supplied, the centered
// finite difference through them is the cross-check.
BPrime b_prime(const ZeroMeanWave& w, int K,
               std::optional<std::array<std::pair<double, double>, 2>> neighbors =
                   std::nullopt);

// 2x2 constrained matrices P(0) (constraints {1, psi^2}) and D(0)
// (constraints {1, psi}) by even-subspace solves, compared against their
// closed forms in terms of b, b', gamma.
struct ConstraintMatrixReport {
    Eigen::Matrix2d P = Eigen::Matrix2d::Zero();
    Eigen::Matrix2d D = Eigen::Matrix2d::Zero();
    double det_P_direct = 0.0, det_P_closed = 0.0, rel_err_det_P = 0.0;
    double det_D_direct = 0.0, det_D_closed = 0.0, rel_err_det_D = 0.0;
    // entries <L^-1 1,1>, <L^-1 1,psi>, <L^-1 psi,psi>, <L^-1 1,psi^2>
    std::array<double, 4> entries_direct{};
    std::array<double, 4> entries_closed{};
    std::array<double, 4> entries_rel_err{};
    bool near_fold = false;  // |c + 2b'| too small, closed forms skipped
};

ConstraintMatrixReport constraint_matrices(const ZeroMeanWave& w, double b_prime_value,
                                           int K, double fold_tol = 1e-4);

enum class VerdictKind { stable, marginally_stable, unstable, degenerate_kernel };

const char* verdict_name(VerdictKind kind);
std::optional<VerdictKind> verdict_from_name(const std::string& name);

struct StabilityVerdict {
    VerdictKind kind = VerdictKind::stable;
    int n_L = 0;
    int z_L = 0;
    double b_prime = 0.0;
    double c_plus_2bprime = 0.0;
};

StabilityVerdict classify(const ZeroMeanWave& w, const BPrime& bp,
                          const EigenCounts& counts, double b_prime_tol);

// Spectrum of dx L restricted to the zero-mean subspace, assembled in the
// real (cos, sin) basis over modes 1..K.
std::vector<std::complex<double>> advection_spectrum(const ZeroMeanWave& w, int K);

struct SpectralPoint {
    double max_real_part = 0.0;
    std::complex<double> eigenvalue;  // eigenvalue attaining the abscissa
    int n_unstable = 0;               // eigenvalues with Re > 1e-4
};

SpectralPoint unstable_eigenvalue(const ZeroMeanWave& w, int K);

// Grid values of the eigenfunction for the lowest eigenvalue of L.
std::vector<double> ground_state_values(const OperatorMatrix& L, const FourierGrid& grid);

// All eigenvalues of the truncated L, ascending.
Eigen::VectorXd operator_eigenvalues(const OperatorMatrix& L);

// Resolution-based mode count for stability work: last significant mode of
// psi plus the tail window, clamped to the assembly limit 2K+1 <= N.
int default_mode_count(const PeriodicField& psi, double tail_tol, int window);

}  // namespace fkdv
