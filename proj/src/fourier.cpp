#include "fkdv/fourier.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstring>
#include <mutex>
#include <stdexcept>
#include <unordered_map>

namespace fkdv {

double FourierGrid::pi() { return 3.14159265358979323846; }

FourierGrid::FourierGrid(int n_modes) : n_(n_modes) {
    if (n_modes < 8 || n_modes % 2 != 0)
        throw std::invalid_argument("FourierGrid: n_modes must be even and >= 8, got " +
                                    std::to_string(n_modes));
    nodes_.resize(n_);
    const double h = 2.0 * pi() / n_;
    for (int j = 0; j < n_; ++j) nodes_[j] = -pi() + h * j;
}

FourierGrid make_grid(int n_modes) { return FourierGrid(n_modes); }

// ---------------------------------------------------------------------------
// FFTW plan cache. Plan creation is not thread-safe, execution with the
// new-array interface is. Buffers are allocated per call.
// ---------------------------------------------------------------------------
namespace {

struct PlanPair {
    fftw_plan fwd = nullptr;  // r2c
    fftw_plan bwd = nullptr;  // c2r
};

class PlanCache {
  public:
    static PlanCache& instance() {
        static PlanCache cache;
        return cache;
    }

    PlanPair get(int n) {
        std::lock_guard<std::mutex> lock(mu_);
        auto it = plans_.find(n);
        if (it != plans_.end()) return it->second;
        double* re = fftw_alloc_real(n);
        fftw_complex* cx = fftw_alloc_complex(n / 2 + 1);
        PlanPair p;
        p.fwd = fftw_plan_dft_r2c_1d(n, re, cx, FFTW_ESTIMATE);
        p.bwd = fftw_plan_dft_c2r_1d(n, cx, re, FFTW_ESTIMATE);
        fftw_free(re);
        fftw_free(cx);
        plans_[n] = p;
        return p;
    }

  private:
    std::mutex mu_;
    std::unordered_map<int, PlanPair> plans_;
};

// Forward transform: values on the grid -> coefficients indexed m = -N/2..N/2.
std::vector<std::complex<double>> to_coeffs(int n, const std::vector<double>& values) {
    PlanPair plans = PlanCache::instance().get(n);
    double* re = fftw_alloc_real(n);
    fftw_complex* cx = fftw_alloc_complex(n / 2 + 1);
    std::memcpy(re, values.data(), n * sizeof(double));
    fftw_execute_dft_r2c(plans.fwd, re, cx);

    const int half = n / 2;
    std::vector<std::complex<double>> coeffs(n + 1);
    // Nodes start at -pi, so the DFT of the sample sequence picks up the
    // phase e^{i m pi} = (-1)^m relative to g_hat.
    for (int m = 0; m <= half; ++m) {
        double sgn = (m % 2 == 0) ? 1.0 : -1.0;
        std::complex<double> c(cx[m][0], cx[m][1]);
        coeffs[half + m] = sgn * c / double(n);
    }
    // Split the Nyquist coefficient between +N/2 and -N/2 and force it real.
    std::complex<double> nyq = coeffs[2 * half];
    coeffs[2 * half] = std::complex<double>(0.5 * nyq.real(), 0.0);
    for (int m = 1; m <= half; ++m) coeffs[half - m] = std::conj(coeffs[half + m]);

    fftw_free(re);
    fftw_free(cx);
    return coeffs;
}

// Inverse transform: coefficients -> values.
std::vector<double> to_values(int n, const std::vector<std::complex<double>>& coeffs) {
    PlanPair plans = PlanCache::instance().get(n);
    double* re = fftw_alloc_real(n);
    fftw_complex* cx = fftw_alloc_complex(n / 2 + 1);
    const int half = n / 2;
    for (int m = 0; m < half; ++m) {
        double sgn = (m % 2 == 0) ? 1.0 : -1.0;
        std::complex<double> c = sgn * coeffs[half + m];
        cx[m][0] = c.real();
        cx[m][1] = c.imag();
    }
    {
        // c2r counts the Nyquist bin once; our convention splits it in two.
        double sgn = (half % 2 == 0) ? 1.0 : -1.0;
        cx[half][0] = sgn * 2.0 * coeffs[2 * half].real();
        cx[half][1] = 0.0;
    }
    fftw_execute_dft_c2r(plans.bwd, cx, re);
    std::vector<double> values(re, re + n);
    fftw_free(re);
    fftw_free(cx);
    return values;
}

}  // namespace

// ---------------------------------------------------------------------------
// PeriodicField
// ---------------------------------------------------------------------------

PeriodicField::PeriodicField(const FourierGrid& grid)
    : grid_(grid), values_(grid.size(), 0.0), coeffs_(grid.size() + 1, {0.0, 0.0}) {}

PeriodicField::PeriodicField(const FourierGrid& grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
    if (int(values_.size()) != grid_.size())
        throw std::invalid_argument("PeriodicField: values size does not match grid");
    coeffs_ = to_coeffs(grid_.size(), values_);
}

PeriodicField::PeriodicField(const FourierGrid& grid, std::vector<double> values,
                             std::vector<std::complex<double>> coeffs)
    : grid_(grid), values_(std::move(values)), coeffs_(std::move(coeffs)) {}

PeriodicField PeriodicField::from_coeffs(const FourierGrid& grid,
                                         std::vector<std::complex<double>> coeffs) {
    const int n = grid.size();
    if (int(coeffs.size()) != n + 1)
        throw std::invalid_argument("PeriodicField: expected N+1 coefficients");
    // Enforce conjugate symmetry and a real Nyquist mode so the field is real.
    const int half = n / 2;
    coeffs[half] = std::complex<double>(coeffs[half].real(), 0.0);
    double nyq = 0.5 * (coeffs[0].real() + coeffs[n].real());
    coeffs[0] = coeffs[n] = std::complex<double>(nyq, 0.0);
    for (int m = 1; m < half; ++m) {
        std::complex<double> avg = 0.5 * (coeffs[half + m] + std::conj(coeffs[half - m]));
        coeffs[half + m] = avg;
        coeffs[half - m] = std::conj(avg);
    }
    std::vector<double> values = to_values(n, coeffs);
    return PeriodicField(grid, std::move(values), std::move(coeffs));
}

PeriodicField PeriodicField::sample(const FourierGrid& grid,
                                    const std::function<double(double)>& f) {
    std::vector<double> values(grid.size());
    for (int j = 0; j < grid.size(); ++j) values[j] = f(grid.node(j));
    return PeriodicField(grid, std::move(values));
}

std::complex<double> PeriodicField::coeff(int m) const {
    const int half = grid_.size() / 2;
    if (m < -half || m > half) return {0.0, 0.0};
    return coeffs_[half + m];
}

double PeriodicField::mean() const { return coeffs_[grid_.size() / 2].real(); }

double PeriodicField::max_abs() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::fabs(v));
    return m;
}

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

PeriodicField frac_derivative(const PeriodicField& f, double alpha) {
    if (alpha < 0.0)
        throw std::invalid_argument("frac_derivative: negative alpha is unsupported");
    const int n = f.size();
    const int half = n / 2;
    std::vector<std::complex<double>> coeffs = f.coeffs();
    for (int m = -half; m <= half; ++m) {
        double mult;
        if (m == 0)
            mult = (alpha == 0.0) ? 1.0 : 0.0;  // 0^0 = 1 convention
        else
            mult = std::pow(std::fabs(double(m)), alpha);
        coeffs[half + m] *= mult;
    }
    return PeriodicField::from_coeffs(f.grid(), std::move(coeffs));
}

PeriodicField derivative(const PeriodicField& f) {
    const int n = f.size();
    const int half = n / 2;
    std::vector<std::complex<double>> coeffs(n + 1);
    for (int m = -half; m <= half; ++m)
        coeffs[half + m] = std::complex<double>(0.0, double(m)) * f.coeff(m);
    coeffs[0] = coeffs[n] = {0.0, 0.0};
    return PeriodicField::from_coeffs(f.grid(), std::move(coeffs));
}

PeriodicField project_zero_mean(const PeriodicField& f) {
    std::vector<std::complex<double>> coeffs = f.coeffs();
    coeffs[f.size() / 2] = {0.0, 0.0};
    return PeriodicField::from_coeffs(f.grid(), std::move(coeffs));
}

double inner_product(const PeriodicField& f, const PeriodicField& g) {
    if (f.grid() != g.grid()) throw std::invalid_argument("inner_product: grid mismatch");
    double s = 0.0;
    const auto& a = f.values();
    const auto& b = g.values();
    for (int j = 0; j < f.size(); ++j) s += a[j] * b[j];
    return s * f.grid().spacing();
}

double integral(const PeriodicField& f) {
    double s = 0.0;
    for (double v : f.values()) s += v;
    return s * f.grid().spacing();
}

double spectral_tail_max(const PeriodicField& f, int k) {
    const int half = f.size() / 2;
    if (k < 1 || k >= half)
        throw std::invalid_argument("spectral_tail_max: need 1 <= k < N/2");
    double m = 0.0;
    for (int j = half - k + 1; j <= half; ++j) m = std::max(m, std::abs(f.coeff(j)));
    return m;
}

PeriodicField multiply(const PeriodicField& f, const PeriodicField& g) {
    if (f.grid() != g.grid()) throw std::invalid_argument("multiply: grid mismatch");
    const int n = f.size();
    int np = (3 * n) / 2;
    if (np % 2 != 0) ++np;
    const int halfp = np / 2;
    const int half = n / 2;

    auto pad = [&](const PeriodicField& h) {
        std::vector<std::complex<double>> c(np + 1, {0.0, 0.0});
        // The Nyquist mode of the input is dropped so the padded product is
        // alias-free on all retained modes.
        for (int m = -(half - 1); m <= half - 1; ++m) c[halfp + m] = h.coeff(m);
        return to_values(np, c);
    };

    std::vector<double> a = pad(f), b = pad(g);
    for (int j = 0; j < np; ++j) a[j] *= b[j];
    std::vector<std::complex<double>> cp = to_coeffs(np, a);

    std::vector<std::complex<double>> out(n + 1, {0.0, 0.0});
    for (int m = -half; m <= half; ++m) out[half + m] = cp[halfp + m];
    return PeriodicField::from_coeffs(f.grid(), std::move(out));
}

PeriodicField axpby(double a, const PeriodicField& f, double b, const PeriodicField& g) {
    if (f.grid() != g.grid()) throw std::invalid_argument("axpby: grid mismatch");
    std::vector<double> values(f.size());
    for (int j = 0; j < f.size(); ++j) values[j] = a * f.values()[j] + b * g.values()[j];
    return PeriodicField(f.grid(), std::move(values));
}

PeriodicField scale(double a, const PeriodicField& f) {
    std::vector<double> values(f.size());
    for (int j = 0; j < f.size(); ++j) values[j] = a * f.values()[j];
    return PeriodicField(f.grid(), std::move(values));
}

PeriodicField resample(const PeriodicField& f, const FourierGrid& target) {
    if (target == f.grid()) return f;
    const int halfs = f.size() / 2;
    const int halft = target.size() / 2;
    std::vector<std::complex<double>> coeffs(target.size() + 1, {0.0, 0.0});
    const int keep = std::min(halfs, halft);
    for (int m = -keep; m <= keep; ++m) coeffs[halft + m] = f.coeff(m);
    return PeriodicField::from_coeffs(target, std::move(coeffs));
}

PeriodicField translate(const PeriodicField& f, double shift) {
    const int half = f.size() / 2;
    std::vector<std::complex<double>> coeffs(f.size() + 1);
    for (int m = -half; m <= half; ++m) {
        std::complex<double> phase(std::cos(m * shift), std::sin(m * shift));
        coeffs[half + m] = f.coeff(m) * phase;
    }
    return PeriodicField::from_coeffs(f.grid(), std::move(coeffs));
}

int last_mode_above(const PeriodicField& f, double tol) {
    const int half = f.size() / 2;
    for (int m = half; m >= 1; --m)
        if (std::abs(f.coeff(m)) >= tol) return m;
    return 0;
}

double odd_part_norm(const PeriodicField& f) {
    const int half = f.size() / 2;
    double s = 0.0;
    for (int m = 1; m <= half; ++m) {
        double im = f.coeff(m).imag();
        s += 2.0 * im * im;
    }
    return std::sqrt(2.0 * FourierGrid::pi() * s);
}

}  // namespace fkdv
