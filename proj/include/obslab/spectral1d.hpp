#pragma once

#include "obslab/polynomial.hpp"

#include <cstdint>
#include <vector>

namespace obslab {

enum class Normalization {
    L2,           // ||phi||_{L^2(0,L)} = 1, i.e. (L/2) sum c_k^2 = 1
    Coefficient,  // sum c_k^2 = 1
};

// phi(x) = sum_k c_k sin(k pi x / L), k = 1..K.
struct SpectralVector {
    double L = 1.0;
    double lambda = 0.0;
    std::vector<double> coeffs;

    std::size_t K() const { return coeffs.size(); }
    double coeff_norm() const;     // (sum c_k^2)^{1/2}
    double l2_norm() const;        // ||phi||_{L^2(0,L)}
    double lipschitz() const;      // sum |c_k| k pi / L >= sup |phi'|
};

// floor(sqrt(lambda) L / pi).
std::size_t spectral_dimension(double L, double lambda);

// Gaussian coefficients. Draws are nested: the same seed and trial give
// the same leading coefficients for every lambda.
SpectralVector sample_spectral(double L, double lambda, std::uint64_t seed, std::uint64_t trial = 0,
                               Normalization norm = Normalization::L2);

// phi^{(m)}(z) = sum c_k (k pi/L)^m sin(k pi z/L + m pi/2). For m = 0 the
// growth bound ||c||_2 sqrt(L lambda^{1/2}/pi) e^{sqrt(lambda)|z|} is checked.
cplx evaluate(const SpectralVector& v, cplx z, int m = 0);

struct SupBracket {
    double value = 0;  // grid max
    double slack = 0;  // true sup in [value, value + slack]
    std::size_t grid_points = 0;
};

// sup over [0, L] on max(4096, 8K) points.
SupBracket sup_interval(const SpectralVector& v);
double sup_points(const SpectralVector& v, const std::vector<double>& pts);

struct CostPoint {
    double lambda = 0;
    std::size_t K = 0;
    double ln_cost = 0;      // running max over the nested grid
    double ln_cost_raw = 0;  // this lambda alone
    double ln_bound = 0;     // at the fitted C
    bool pass = true;
};

struct CostCurve {
    double c = 0;
    double L = 1;
    double alpha = 0;
    double fitted_C = 0;
    double holdout_C = 0;  // C fitted on even grid indices only
    std::size_t holdout_violations = 0;  // odd indices above the holdout bound
    std::size_t violations = 0;
    std::vector<CostPoint> curve;
};

// (L+1)^2 (sqrt(lambda) + lambda (log(lambda+e))^{-2 alpha/3} / c^2).
double spectral_exponent(double L, double lambda, double alpha, double c);

// cost(lambda) = max over trials of sup_{[0,L]}|phi| / sup_E|phi|.
CostCurve spectral_cost_experiment(const std::vector<double>& E, double c, double L, double alpha,
                                   const std::vector<double>& lambda_grid, std::size_t trials,
                                   std::uint64_t seed);

struct ExpTerm {
    cplx c;
    cplx mu;
};

struct NazarovTuranResult {
    double ln_ratio = 0;
    double ln_front = 0;   // |I| max |Re mu|
    double needed_C = 0;   // smallest C for this instance
};

// I = [a, b]; E a finite union of disjoint subintervals of I.
NazarovTuranResult nazarov_turan_check(const std::vector<ExpTerm>& p, double a, double b,
                                       const std::vector<std::pair<double, double>>& E,
                                       std::size_t grid = 20000);
double nazarov_turan_bound_ln(const std::vector<ExpTerm>& p, double I_len, double E_len, double C);

}  // namespace obslab
