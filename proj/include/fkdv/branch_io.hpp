#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "fkdv/solvers.hpp"

namespace fkdv {

struct RunConfig {
    std::string command = "trace";  // trace | verify | stokes | spectrum | exact
    double alpha = 1.0;
    double c_min = -0.9;
    double c_max = 5.0;
    double c_value = 0.0;  // spectrum: target speed
    double param = 0.0;    // exact: profile parameter (gamma or modulus); 0 = none
    int modes = 0;         // initial grid size override
    std::string method = "newton";  // trace: newton | petviashvili | variational
    SolverConfig solver;
    std::string out_dir = ".";
    bool csv = true;
    bool json = true;
    bool svg = false;

    void validate() const;
};

// Exit codes: 0 success, 1 verification failure, 2 solver abort, 3 config error.
int run_trace(const RunConfig& cfg);
int run_verify(const RunConfig& cfg);
int run_spectrum(const RunConfig& cfg);
int run_stokes(const RunConfig& cfg);
int run_exact(const RunConfig& cfg);
int run_command(const RunConfig& cfg);

extern const char* const kBranchCsvHeader;

// Deterministic CSV (17 significant digits, no timestamps). Rows violating
// the BranchPoint invariants are dropped with a note on stderr.
void write_branch_csv(const Branch& br, std::ostream& os);

struct BranchCsv {
    std::vector<BranchPoint> points;
};

// Throws std::runtime_error naming the offending row on malformed input.
BranchCsv read_branch_csv(std::istream& is);

enum class PlotKind { b_vs_c, mu_vs_omega };

// Deterministic 700x600 SVG; stable and unstable points styled differently;
// the mu-omega plot overlays the constant-solution parabola mu = omega^2.
void emit_plot(const std::string& csv_path, PlotKind kind, const std::string& svg_path);

struct CheckResult {
    std::string name;
    bool pass = false;
    double error = 0.0;
    double tolerance = 0.0;
    std::string detail;
};

// The oracle suites behind `verify`: exact-solution equivalence, determinant
// closed forms, range identities, Stokes order fits, gamma' = 3b.
std::vector<CheckResult> verify_checks(double alpha, const SolverConfig& solver);

}  // namespace fkdv
