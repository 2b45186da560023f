#include <CLI11.hpp>

#include <iostream>
#include <sstream>
#include <string>

#include "fkdv/branch_io.hpp"

namespace {

// "lo:hi" -> (c_min, c_max)
bool parse_range(const std::string& s, double* lo, double* hi) {
    auto pos = s.find(':');
    if (pos == std::string::npos) return false;
    try {
        size_t used = 0;
        *lo = std::stod(s.substr(0, pos), &used);
        if (used != pos) return false;
        *hi = std::stod(s.substr(pos + 1), &used);
        if (used != s.size() - pos - 1) return false;
    } catch (const std::exception&) {
        return false;
    }
    return true;
}

void add_common(CLI::App* sub, fkdv::RunConfig* cfg, std::string* formats) {
    sub->add_option("--alpha", cfg->alpha, "dispersion exponent in (1/3, 2]")->required();
    sub->add_option("--modes", cfg->modes, "initial number of Fourier modes (even)");
    sub->add_option("--tol", cfg->solver.residual_tol, "residual tolerance");
    sub->add_option("--tail-tol", cfg->solver.tail_tol,
                    "spectral tail tolerance (default 1e-8)");
    sub->add_option("--step", cfg->solver.continuation_step, "continuation step in c");
    sub->add_option("--out", cfg->out_dir, "output directory");
    sub->add_option("--format", *formats, "comma-separated subset of csv,json,svg");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fkdv: periodic traveling waves of the fractional KdV equation"};
    app.require_subcommand(1);

    fkdv::RunConfig cfg;
    std::string range = "-0.9:5";
    std::string formats = "csv,json";

    CLI::App* trace = app.add_subcommand("trace", "trace the existence curve b(c)");
    add_common(trace, &cfg, &formats);
    trace->add_option("--c-range", range, "speed range lo:hi with lo > -1");
    trace->add_option("--method", cfg.method, "newton | petviashvili | variational");

    CLI::App* verify = app.add_subcommand("verify", "run the oracle verification suites");
    add_common(verify, &cfg, &formats);

    CLI::App* spectrum =
        app.add_subcommand("spectrum", "eigenvalues of L and dxL at one speed");
    add_common(spectrum, &cfg, &formats);
    spectrum->add_option("--c", cfg.c_value, "wave speed c > -1")->required();

    CLI::App* stokes = app.add_subcommand("stokes", "small-amplitude expansion data");
    add_common(stokes, &cfg, &formats);

    CLI::App* exact = app.add_subcommand("exact", "closed-form existence curves (alpha 1, 2)");
    add_common(exact, &cfg, &formats);
    exact->add_option("--param", cfg.param, "profile parameter (gamma or modulus)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 3;
    }

    if (trace->parsed()) {
        cfg.command = "trace";
        if (!parse_range(range, &cfg.c_min, &cfg.c_max)) {
            std::cerr << "config error: bad --c-range '" << range << "' (want lo:hi)\n";
            return 3;
        }
    } else if (verify->parsed()) {
        cfg.command = "verify";
    } else if (spectrum->parsed()) {
        cfg.command = "spectrum";
    } else if (stokes->parsed()) {
        cfg.command = "stokes";
    } else if (exact->parsed()) {
        cfg.command = "exact";
    }

    cfg.csv = formats.find("csv") != std::string::npos;
    cfg.json = formats.find("json") != std::string::npos;
    cfg.svg = formats.find("svg") != std::string::npos;

    return fkdv::run_command(cfg);
}
