#pragma once

#include "obslab/lognum.hpp"
#include "obslab/spectral1d.hpp"
#include "obslab/tower.hpp"

#include <cstddef>
#include <vector>

namespace obslab {

// psi(t) = t ln t and its inverse on the branch t >= 1, psi^{-1}(y) = y / W(y).
double psi(double t);
double psi_inverse(double y);

// tau(lambda) = 1 / psi^{-1}(phi(lambda) / (4C)) with phi = (ln lambda)^{2 alpha/3}.
// Equivalently tau = e^{-W(y)}. Requires y >= e; DomainError reports the
// threshold otherwise. L does not enter tau and is accepted for symmetry.
double tau(double lambda, double alpha, double C, double L = 1.0);
double tau_from_ln(double ln_lambda, double alpha, double C);
// Smallest lambda with phi(lambda) / (4C) >= e.
double tau_threshold(double alpha, double C);

// Certified upper bound on (1/ln q) int_{u0}^inf tau(e^u) du, q = 5/4:
// Gauss-Kronrod on a finite window plus its error estimate, plus the
// closed-form tail from W(y) <= ln y. Infinite for alpha <= 3/2.
double tau_tail_upper(double ln_lambda0, double alpha, double C);
// (1/ln q) int_{u0}^{u1} tau(e^u) du without certification slack.
double tau_integral(double ln_lambda0, double ln_lambda1, double alpha, double C);

struct LRRow {
    std::size_t k = 0;
    double ln_lambda = 0;  // ln lambda_k = ln lambda_1 + (k-1) ln(5/4)
    double tau = 0;
    double T = 0;          // certified upper bound on T_k = sum_{j>=k} tau_j
    double ln_f = 0;       // ln of e^{-lambda_k tau_k / 4} / (2 sqrt L)
};

struct LRSchedule {
    double alpha = 0, C = 0, L = 1, lambda1 = 0;
    std::size_t decreasing_from = 1;  // tau_k strictly decreasing for k >= this
    std::vector<LRRow> rows;
};

// Rows k = 1..n_max. T_k is the finite sum up to n_max - 1 plus the
// integral tail sum_{k>=n} tau_k <= (1/ln q) int_{ln lambda_{n-1}}^inf tau.
LRSchedule schedule(double lambda1, double alpha, double C, double L, std::size_t n_max);

struct ConvergenceResult {
    bool converges = false;
    double T1_bound = 0;       // certified, when converging
    double target = 0;         // bound the divergence witness exceeds
    std::size_t witness_k = 0; // partial sum up to k exceeds target
    double witness_partial_sum = 0;  // 0 if not summed directly
    double integral_lower = 0;  // certified lower bound on the partial sum
};

// target <= 0 means 10 T_1 for alpha = 2 at the same C, L, lambda_1.
ConvergenceResult convergence_test(double alpha, double C, double L, double lambda1, double target = 0);

// Largest tau with ln(1/tau) + b <= ln(1/tau) b, b = C lambda / phi(lambda),
// over the schedule's lambda grid: min_k exp(-b_k/(b_k - 1)). DomainError if
// some b_k <= 1.
double T0_threshold(const LRSchedule& s);

struct CostConstant {
    double N = 0;          // index; can exceed 2^53 only in principle
    double ln_lambda_N = 0;
    double tau_N = 0;
    double T_N = 0;        // certified: tau_N + (1/ln q) int_{ln lambda_N}^inf tau
    double T0 = 0;
    Tower ln_C_obs;        // ln(2 sqrt L) + lambda_N tau_N / 4
};

// Smallest N with T_N <= min(T, T0), found by bisection on the certified
// bound. T0 < 0 means T0_threshold over the first n_max schedule rows.
// NoFeasibleN if N would pass 2^52.
CostConstant cost_constant(double T, double alpha, double C, double L, double lambda1, std::size_t n_max = 400,
                           double T0 = -1);

// a_0 with ||e^{tA}||_{L^2 -> L^inf} <= a_0 t^{-1/4}, maximized on a log grid in t.
double heat_l2_linf_constant(double L);

// Smallest lambda on the schedule grid beyond which
// a_0 (6/tau)^{1/4} e^{-lambda tau/3} + f(lambda) e^{-lambda tau} <= f(5 lambda/4)
// holds at every later grid point. Returns 0 if it never holds.
double lambda1_crossover(const LRSchedule& s, double a0);

// LR constant from a spectral cost fit exp(Cf (L+1)^2 (sqrt(lam) + lam (ln lam)^{-p}/c^2)):
// Cf (L+1)^2 (1/c^2 + sup_{lam >= lambda1} (ln lam)^p / sqrt(lam)), p = 2 alpha/3.
double lr_constant_from_spectral(double fit_C, double L, double c, double alpha, double lambda1);

struct TelescopingResult {
    std::size_t N = 0, rows = 0;
    std::size_t violations = 0;  // per-step recurrence failures
    LogNum lhs;                  // f(lambda_N) ||u(T_N)|| - f(lambda_M) ||u(T_M)||
    LogNum rhs;                  // int_{T_M}^{T_N} sup_E |u|
};

// Checks f(lambda_k)||u(T_k)|| - f(lambda_{k+1})||u(T_{k+1})|| <= int_{T_{k+1}}^{T_k} sup_E|u|
// for k = N..N+rows-1 and the telescoped sum.
TelescopingResult telescoping_check(const LRSchedule& s, const SpectralVector& v0, const std::vector<double>& E,
                                    std::size_t N, std::size_t rows);

}  // namespace obslab
