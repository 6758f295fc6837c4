#include "obslab/lr.hpp"

#include "obslab/errors.hpp"
#include "obslab/heat1d.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/lambert_w.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace obslab {

namespace {

const double kLnQ = std::log(1.25);
const double kInf = std::numeric_limits<double>::infinity();

double p_of(double alpha) { return 2 * alpha / 3; }

void check_params(double alpha, double C) {
    if (!(alpha > 0) || !std::isfinite(alpha)) throw ParamError("alpha must be positive");
    if (!(C > 0) || !std::isfinite(C)) throw ParamError("C must be positive");
}

// int_{v0}^{v1} tau(e^v) e^v dv, in chunks of unit length; err accumulates
// the Gauss-Kronrod error estimates.
double integrate_v(double v0, double v1, double alpha, double C, double* err) {
    using boost::math::quadrature::gauss_kronrod;
    auto f = [&](double v) { return tau_from_ln(std::exp(v), alpha, C) * std::exp(v); };
    double total = 0, e_total = 0;
    int chunks = std::max(1, static_cast<int>(std::ceil(v1 - v0)));
    for (int i = 0; i < chunks; ++i) {
        double a = v0 + (v1 - v0) * i / chunks, b = v0 + (v1 - v0) * (i + 1) / chunks;
        double e = 0;
        total += gauss_kronrod<double, 61>::integrate(f, a, b, 15, 1e-13, &e);
        e_total += std::fabs(e);
    }
    if (err) *err = e_total;
    return total;
}

}  // namespace

double psi(double t) { return t * std::log(t); }

double psi_inverse(double y) {
    if (!(y >= 0)) throw DomainError("psi inverse on the t >= 1 branch needs y >= 0");
    if (y == 0) return 1.0;
    return y / boost::math::lambert_w0(y);
}

double tau_threshold(double alpha, double C) {
    check_params(alpha, C);
    return std::exp(std::pow(4 * C * std::numbers::e, 1 / p_of(alpha)));
}

double tau_from_ln(double u, double alpha, double C) {
    check_params(alpha, C);
    double y = u > 0 ? std::pow(u, p_of(alpha)) / (4 * C) : -kInf;
    if (!(y >= std::numbers::e * (1 - 1e-14)))
        throw DomainError(fmt::format("tau needs lambda >= {:.17g}", tau_threshold(alpha, C)));
    return std::exp(-boost::math::lambert_w0(y));
}

double tau(double lambda, double alpha, double C, double /*L*/) {
    if (!(lambda > 1)) throw DomainError(fmt::format("tau needs lambda >= {:.17g}", tau_threshold(alpha, C)));
    return tau_from_ln(std::log(lambda), alpha, C);
}

double tau_integral(double u0, double u1, double alpha, double C) {
    if (u1 <= u0) return 0;
    return integrate_v(std::log(u0), std::log(u1), alpha, C, nullptr) / kLnQ;
}

double tau_tail_upper(double u0, double alpha, double C) {
    check_params(alpha, C);
    const double p = p_of(alpha);
    if (!(p > 1)) return kInf;
    tau_from_ln(u0, alpha, C);  // threshold check
    const double v0 = std::log(u0), v1 = v0 + 20;
    double err = 0;
    double body = integrate_v(v0, v1, alpha, C, &err);
    // Beyond U: tau <= ln y / y = 4C (p ln u - ln 4C) u^{-p}.
    const double lnU = v1, U1p = std::exp((1 - p) * lnU);
    double tail = 4 * C * (p * U1p * (lnU / (p - 1) + 1 / ((p - 1) * (p - 1))) - std::log(4 * C) * U1p / (p - 1));
    return (body + err + std::max(tail, 0.0)) / kLnQ;
}

LRSchedule schedule(double lambda1, double alpha, double C, double L, std::size_t n_max) {
    check_params(alpha, C);
    if (!(L > 0)) throw ParamError("L must be positive");
    if (n_max < 2) throw ParamError("schedule needs at least two rows");
    LRSchedule s;
    s.alpha = alpha;
    s.C = C;
    s.L = L;
    s.lambda1 = lambda1;
    if (!(lambda1 > 1)) throw DomainError(fmt::format("tau needs lambda >= {:.17g}", tau_threshold(alpha, C)));
    const double u1 = std::log(lambda1);
    const double ln_2sqrtL = std::log(2 * std::sqrt(L));
    for (std::size_t k = 1; k <= n_max; ++k) {
        LRRow r;
        r.k = k;
        r.ln_lambda = u1 + (k - 1) * kLnQ;
        r.tau = tau_from_ln(r.ln_lambda, alpha, C);
        r.ln_f = -ln_2sqrtL - std::exp(r.ln_lambda + std::log(r.tau)) / 4;
        s.rows.push_back(r);
    }
    // sum_{k >= n_max} tau_k <= (1/ln q) int_{ln lambda_{n_max - 1}}^inf tau.
    double tail_sum = tau_tail_upper(s.rows[n_max - 2].ln_lambda, alpha, C);
    s.rows[n_max - 1].T = tail_sum;
    for (std::size_t i = n_max - 1; i-- > 0;) s.rows[i].T = s.rows[i].tau + s.rows[i + 1].T;

    s.decreasing_from = n_max;
    for (std::size_t i = n_max - 1; i-- > 0;) {
        if (!(s.rows[i].tau > s.rows[i + 1].tau)) break;
        s.decreasing_from = i + 1;
    }
    return s;
}

ConvergenceResult convergence_test(double alpha, double C, double L, double lambda1, double target) {
    ConvergenceResult r;
    if (p_of(alpha) > 1) {
        r.converges = true;
        r.T1_bound = schedule(lambda1, alpha, C, L, 64).rows[0].T;
        return r;
    }
    r.target = target > 0 ? target : 10 * schedule(lambda1, 2.0, C, L, 64).rows[0].T;
    const double u1 = std::log(lambda1);
    tau_from_ln(u1, alpha, C);
    const double v1 = std::log(u1);
    // Sum_{k=1}^{M} tau_k >= (1/ln q) int_{u_1}^{u_{M+1}} tau, as tau is decreasing.
    double lo = v1, hi = v1 + 1;
    while (tau_integral(u1, std::exp(hi), alpha, C) < r.target) {
        lo = hi;
        hi = v1 + 2 * (hi - v1);
        if (hi > 700) throw NoConvergence("divergence witness beyond u = e^700");
    }
    for (int it = 0; it < 60; ++it) {
        double mid = 0.5 * (lo + hi);
        (tau_integral(u1, std::exp(mid), alpha, C) >= r.target ? hi : lo) = mid;
    }
    double M = std::ceil((std::exp(hi) - u1) / kLnQ);
    r.witness_k = static_cast<std::size_t>(M);
    r.integral_lower = tau_integral(u1, u1 + M * kLnQ, alpha, C);
    if (r.witness_k <= 50'000'000) {
        long double sum = 0;
        for (std::size_t k = 1; k <= r.witness_k; ++k) sum += tau_from_ln(u1 + (k - 1) * kLnQ, alpha, C);
        r.witness_partial_sum = static_cast<double>(sum);
    }
    return r;
}

double T0_threshold(const LRSchedule& s) {
    const double p = p_of(s.alpha);
    double best = kInf;
    for (const auto& r : s.rows) {
        double ln_b = std::log(s.C) + r.ln_lambda - p * std::log(r.ln_lambda);
        double val;
        if (ln_b > 700) {
            val = std::exp(-1.0);
        } else {
            double b = std::exp(ln_b);
            if (!(b > 1)) throw DomainError(fmt::format("C lambda / phi(lambda) <= 1 at lambda = e^{:.6g}", r.ln_lambda));
            val = std::exp(-b / (b - 1));
        }
        best = std::min(best, val);
    }
    return best;
}

CostConstant cost_constant(double T, double alpha, double C, double L, double lambda1, std::size_t n_max,
                           double T0) {
    if (!(p_of(alpha) > 1)) throw ParamError("cost constant needs alpha > 3/2");
    if (!(T > 0)) throw ParamError("T must be positive");
    LRSchedule s = schedule(lambda1, alpha, C, L, n_max);
    CostConstant c;
    c.T0 = T0 < 0 ? T0_threshold(s) : T0;
    const double bound = std::min(T, c.T0);
    const double u1 = std::log(lambda1);
    // Rows use the backward sums; past the table T_n <= tau_n + tail(u_n).
    auto T_at = [&](double n) {
        if (n <= static_cast<double>(n_max)) return s.rows[static_cast<std::size_t>(n) - 1].T;
        double u = u1 + (n - 1) * kLnQ;
        return tau_from_ln(u, alpha, C) + tau_tail_upper(u, alpha, C);
    };
    double lo = 0, hi = 1;  // T_at(lo) > bound >= T_at(hi) once bracketed
    const double cap = std::ldexp(1.0, 52);
    while (T_at(hi) > bound) {
        lo = hi;
        hi *= 2;
        if (hi > cap) throw NoFeasibleN(fmt::format("no N <= 2^52 with T_N <= {:.6g}", bound));
    }
    while (hi - lo > 1) {
        double mid = std::floor(0.5 * (lo + hi));
        (T_at(mid) <= bound ? hi : lo) = mid;
    }
    c.N = hi;
    c.ln_lambda_N = u1 + (hi - 1) * kLnQ;
    c.tau_N = tau_from_ln(c.ln_lambda_N, alpha, C);
    c.T_N = T_at(hi);
    double ln_quarter_lt = c.ln_lambda_N + std::log(c.tau_N) - std::log(4.0);
    if (ln_quarter_lt > 700) c.ln_C_obs = Tower::exp_of(Tower::from_double(ln_quarter_lt));
    else c.ln_C_obs = Tower::from_double(std::log(2 * std::sqrt(L)) + std::exp(ln_quarter_lt));
    return c;
}

double heat_l2_linf_constant(double L) {
    if (!(L > 0)) throw ParamError("L must be positive");
    // sup_x |e^{tA} phi| <= ||phi|| ((2/L) sum_k e^{-2 (k pi/L)^2 t})^{1/2} and
    // sum_{k>=1} e^{-2 (k pi/L)^2 t} <= int_0^inf = L / sqrt(8 pi t).
    return std::pow(2 * std::numbers::pi, -0.25);
}

double lambda1_crossover(const LRSchedule& s, double a0) {
    std::size_t first = s.rows.size();
    for (std::size_t i = s.rows.size() - 1; i-- > 0;) {
        const LRRow& r = s.rows[i];
        double lt = std::exp(r.ln_lambda + std::log(r.tau));
        double t1 = std::log(a0) + 0.25 * std::log(6 / r.tau) - lt / 3;
        double t2 = r.ln_f - lt;
        double m = std::max(t1, t2);
        double lhs = m + std::log(std::exp(t1 - m) + std::exp(t2 - m));
        if (!(lhs <= s.rows[i + 1].ln_f)) break;
        first = i;
    }
    return first == s.rows.size() ? 0.0 : s.rows[first].ln_lambda;
}

double lr_constant_from_spectral(double fit_C, double L, double c, double alpha, double lambda1) {
    if (!(c > 0)) throw ParamError("content must be positive");
    const double p = p_of(alpha);
    double u = std::max(std::log(lambda1), 2 * p);
    double sup = std::exp(p * std::log(u) - u / 2);
    if (p == 0) sup = std::exp(-std::log(lambda1) / 2);
    return fit_C * (L + 1) * (L + 1) * (1 / (c * c) + sup);
}

TelescopingResult telescoping_check(const LRSchedule& s, const SpectralVector& v0, const std::vector<double>& E,
                                    std::size_t N, std::size_t rows) {
    if (N < 1 || N + rows > s.rows.size()) throw ParamError("telescoping rows exceed the schedule");
    if (!std::isfinite(s.rows[N - 1].T)) throw ParamError("schedule tail diverges");
    HeatState s0 = heat_solution(v0, 0.0);
    auto weighted = [&](std::size_t k) {
        const LRRow& r = s.rows[k - 1];
        return LogNum::from_ln(r.ln_f) * heat_solution(s0, r.T).l2_norm();
    };
    TelescopingResult res;
    res.N = N;
    res.rows = rows;
    for (std::size_t k = N; k < N + rows; ++k) {
        LogNum lhs = weighted(k) - weighted(k + 1);
        LogNum rhs = observation_integral(s0, s.rows[k].T, s.rows[k - 1].T, E).value;
        if (lhs > rhs) ++res.violations;
    }
    res.lhs = weighted(N) - weighted(N + rows);
    res.rhs = observation_integral(s0, s.rows[N + rows - 1].T, s.rows[N - 1].T, E).value;
    return res;
}

}  // namespace obslab
