#pragma once

#include <complex>
#include <functional>
#include <vector>

namespace fkdv {

// Uniform collocation grid on the torus [-pi, pi): x_j = -pi + 2*pi*j/N.
class FourierGrid {
  public:
    explicit FourierGrid(int n_modes);

    int size() const { return n_; }
    double node(int j) const { return nodes_[j]; }
    const std::vector<double>& nodes() const { return nodes_; }
    double spacing() const { return 2.0 * pi() / n_; }

    bool operator==(const FourierGrid& other) const { return n_ == other.n_; }
    bool operator!=(const FourierGrid& other) const { return n_ != other.n_; }

    static double pi();

  private:
    int n_;
    std::vector<double> nodes_;
};

FourierGrid make_grid(int n_modes);

// Real 2pi-periodic function on a FourierGrid together with its Fourier
// coefficients g_hat(m), |m| <= N/2, normalized so that
//   g(x) = sum_m g_hat(m) exp(i m x),  g_hat(-m) = conj(g_hat(m)).
// The Nyquist coefficient is split evenly between +N/2 and -N/2 and kept
// real. Values and coefficients are both computed at construction, so the
// object is immutable and safe to share across threads.
class PeriodicField {
  public:
    explicit PeriodicField(const FourierGrid& grid);  // zero field
    PeriodicField(const FourierGrid& grid, std::vector<double> values);
    static PeriodicField from_coeffs(const FourierGrid& grid,
                                     std::vector<std::complex<double>> coeffs);
    static PeriodicField sample(const FourierGrid& grid,
                                const std::function<double(double)>& f);

    const FourierGrid& grid() const { return grid_; }
    int size() const { return grid_.size(); }
    const std::vector<double>& values() const { return values_; }

    // Coefficients indexed i = m + N/2 for m = -N/2 .. N/2 (size N+1).
    const std::vector<std::complex<double>>& coeffs() const { return coeffs_; }
    std::complex<double> coeff(int m) const;

    double mean() const;
    double max_abs() const;

  private:
    PeriodicField(const FourierGrid& grid, std::vector<double> values,
                  std::vector<std::complex<double>> coeffs);

    FourierGrid grid_;
    std::vector<double> values_;
    std::vector<std::complex<double>> coeffs_;
};

// D^alpha: multiplies g_hat(m) by |m|^alpha; the mean is annihilated for
// alpha > 0 and kept for alpha = 0 (convention 0^0 = 1). alpha < 0 is not
// supported.
PeriodicField frac_derivative(const PeriodicField& f, double alpha);

// d/dx via the multiplier i*m (Nyquist mode zeroed).
PeriodicField derivative(const PeriodicField& f);

// Pi_0 f = f - mean(f).
PeriodicField project_zero_mean(const PeriodicField& f);

// Trapezoidal (spectrally exact) approximation of the integral of f*g
// over [-pi, pi]. Throws on grid mismatch.
double inner_product(const PeriodicField& f, const PeriodicField& g);

double integral(const PeriodicField& f);

// Max of |g_hat(m)| over the k highest retained frequencies
// m in (N/2 - k, N/2].
double spectral_tail_max(const PeriodicField& f, int k);

// Pointwise product, dealiased by zero-padding to 3N/2 (exact for the
// quadratic nonlinearity).
PeriodicField multiply(const PeriodicField& f, const PeriodicField& g);

// Linear combination a*f + b*g.
PeriodicField axpby(double a, const PeriodicField& f, double b, const PeriodicField& g);
PeriodicField scale(double a, const PeriodicField& f);

// Spectral interpolation onto a finer or coarser grid.
PeriodicField resample(const PeriodicField& f, const FourierGrid& target);

// Translated field x -> f(x + shift).
PeriodicField translate(const PeriodicField& f, double shift);

// Largest |m| with |g_hat(m)| >= tol (0 if none).
int last_mode_above(const PeriodicField& f, double tol);

// L2 norm of the odd part (f(x) - f(-x))/2.
double odd_part_norm(const PeriodicField& f);

}  // namespace fkdv
