#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <vector>

namespace obslab {

// Real trigonometric polynomial on the circle of circumference W,
// u(x) = sum_{|j| <= J} a_j e^{2 pi i j x / W} with 2 pi J / W <= N.
struct BandLimited {
    double N = 1.0;
    int W = 64;
    std::vector<std::complex<double>> a;  // a[J + j], a_{-j} = conj(a_j)

    int J() const { return static_cast<int>(a.size() / 2); }
    double freq(int j) const;
    double eval(double x, int m = 0) const;
};

int max_index(double N, int W);

// Complex Gaussian coefficients on every admissible frequency.
BandLimited random_bandlimited(double N, int W, std::mt19937_64& rng);
// sin(xi x) at the largest window frequency xi <= N.
BandLimited single_mode(double N, int W);

// Per-cell sup of |u^{(m)}| on [k, k+1], k = 0..W-1, from a dense FFT grid.
std::vector<double> cell_sups(const BandLimited& u, int m);
// (sum_k sup_{[k,k+1]} |u^{(m)}|^2)^{1/2}.
double amalgam_norm(const BandLimited& u, int m = 0);

struct BernsteinFit {
    double C = 0;
    std::vector<double> per_trial;  // max_m (||u^{(m)}|| / ||u||)^{1/m} / N
};

BernsteinFit bernstein_check(double N, int m_max, std::size_t trials, std::uint64_t seed, int W = 64);

struct CellClassification {
    std::vector<int> good, bad;
    double bad_mass_fraction = 0;  // sum_bad sup^2 / ||u||^2
    double chain_rhs_fraction = 0;  // sum_{m<=m_cap} (AN)^{-2m} ||u^{(m)}||^2 / ||u||^2
};

// Good iff ||u^{(m)}||_{L^inf(I_k)} <= (A N)^m ||u||_{L^inf(I_k)} for m <= m_cap.
// MassViolation if the bad cells carry more than half the squared norm.
CellClassification classify_cells(const BandLimited& u, double A, int m_cap = 12);

// Points of a 1-periodic (or period-p) set inside one period.
struct PeriodicSample {
    double period = 1.0;
    std::vector<double> points;
};

// ln[(4C(L+1))^{CLN} e^{CN} exp{C N^2 (log(CN/log 2 + e))^{-2 alpha/3} / gamma^2}].
double uncertainty_bound_ln(double C, double N, double L, double alpha, double gamma);

// Minimal C with uncertainty_bound_ln(C, ...) >= target, by scan and bisection.
double fit_uncertainty_C(double N, double L, double alpha, double gamma, double target);

struct UncertaintyPoint {
    double N = 0;
    double ln_ratio = 0;  // max over trials
    double ln_bound = 0;  // at the fitted C
    bool pass = true;
};

struct UncertaintyResult {
    double fitted_C = 0;
    std::size_t violations = 0;
    std::vector<UncertaintyPoint> points;
};

// ratio = ||u||_{l^2 L^inf} / ||{sup_{E cap [k, k+L]} |u|}_k||_{l^2} over the window.
double uncertainty_ratio(const BandLimited& u, const PeriodicSample& E, double L);

UncertaintyResult uncertainty_experiment(const PeriodicSample& E, double alpha, double gamma, double L,
                                         const std::vector<double>& N_grid, std::size_t trials,
                                         std::uint64_t seed, int W = 64);

}  // namespace obslab
