#pragma once

#include "obslab/lognum.hpp"
#include "obslab/spectral1d.hpp"
#include "obslab/tower.hpp"

#include <string>
#include <vector>

namespace obslab {

// u(t, x) = sum_k c_k e^{-(k pi/L)^2 t} sin(k pi x / L), with each
// coefficient kept as sign and ln|c_k| so long times never underflow.
struct HeatState {
    double L = 1.0;
    double t = 0.0;
    std::vector<int> sign;
    std::vector<double> ln_coeff;

    std::size_t K() const { return sign.size(); }
    double eigenvalue(std::size_t k) const;  // (k pi / L)^2, k >= 1
    LogNum l2_norm() const;
    // |u(t, x)| maximized over the points, in log domain. Cancellation below
    // 64 eps of sum |c_k| counts as an exact zero.
    LogNum sup_points(const std::vector<double>& pts) const;
    SpectralVector to_spectral() const;  // may underflow to 0
};

HeatState heat_solution(const SpectralVector& v0, double t);
HeatState heat_solution(const HeatState& s, double t);

struct ObservationIntegral {
    LogNum value;               // int_{t0}^{t1} sup_E |u(t)| dt
    std::size_t intervals = 0;  // final Simpson subintervals
};

// Composite Simpson from `nodes` subintervals, doubled until the log of the
// integral changes by at most 1e-6. Times are measured from s.t.
ObservationIntegral observation_integral(const HeatState& s, double t0, double t1, const std::vector<double>& E,
                                         std::size_t nodes = 16);

struct ObservabilityResult {
    LogNum ratio;            // +inf on zero observation
    bool zero_observation = false;
    LogNum numerator;        // ||u(T)||
    LogNum denominator;      // int_0^T sup_E |u|
    std::size_t intervals = 0;  // final Simpson subintervals
};

// ||u(T)||_{L^2} / int_0^T sup_E|u(t)| dt. Composite Simpson starts at
// quadrature_nodes subintervals and doubles until the log of the integral
// changes by at most 1e-6.
ObservabilityResult observability_ratio(const SpectralVector& v0, double T, const std::vector<double>& E,
                                        std::size_t quadrature_nodes = 16);

// Linear form constant + sum_l coef[l-1] ln q_l in the level logarithms.
// scale tracks the absolute size of every contribution so that exact
// cancellations can be snapped to zero.
struct LevelExpr {
    double constant = 0;
    std::vector<double> coef;
    std::vector<double> scale;

    static LevelExpr ln_q(int l);
    static LevelExpr constant_of(double c);
    LevelExpr operator+(const LevelExpr& o) const;
    LevelExpr operator-(const LevelExpr& o) const;
    LevelExpr operator*(double s) const;
};

struct EInfLevel {
    int k = 0;
    Tower ln_q;
    Tower ln_length;       // -q_k^{2+eps1}
    LevelExpr ln_J_upper;  // k ln 2 + ln(q_1...q_k) - sum_{l<k} q_l^{2+eps1}
    LevelExpr ln_Jp_lower; // -k ln 2 + same tail
    LevelExpr ln_J_rec;    // J_1 = q_1, J_k = 2 J_{k-1} q_k e^{-q_{k-1}^{2+eps1}}
    LevelExpr ln_Jp_rec;   // J'_1 = q_1 - 1, J'_k = J'_{k-1} q_k e^{-q_{k-1}^{2+eps1}} / 2
    LevelExpr ln_ln_q;     // ln ln q_k
};

struct EInfSpec {
    double eps = 0, eps1 = 0, eps2 = 0;
    int N = 0;
    std::vector<EInfLevel> levels;

    const EInfLevel& level(int k) const;
    Tower value(const LevelExpr& e) const;
    std::string to_json() const;
};

// q_1 = 4 and ln q_k = q_{k-1}^{2+eps1} / eps2, eps2 = min(eps/4, 1/4),
// eps1 = (2+eps)(1-eps2) - 2. Every level invariant is checked.
EInfSpec build_counterexample(double eps, int levels);

// ln of (pi q_k)^{-1} e^{-q_k^{2+eps1}} / (e^{-q_k^2 pi^2 T} / sqrt 2).
Tower counterexample_ratio(const EInfSpec& spec, int k, double T);

struct EInfContent {
    int k = 0;
    Tower ln_f_eps_sum;    // (J_k + 1) f_eps(|I_k|)
    Tower ln_f_eps_lower;  // J'_k f_eps(|I_k|)
    Tower ln_f0_sum;
    Tower ln_h_sum;
    Tower ln_h_gap;        // ln f_0 sum - ln h_alpha sum, resolved exactly
    Tower ln_f0_bound;     // ln 3 - (eps1/2) ln q_k
    Tower ln_mu;           // ln mu(I_{k,j}) = -ln J'_k
};

// Level-k cover sums for f_eps, f_0 and h_alpha. Throws BoundViolation if
// the f_0 sum exceeds 3 q_k^{-eps1/2}, if h_alpha does not sit below f_0,
// or if the f_eps lower sum drops below its level-1 and level-2 minimum.
EInfContent einf_content_report(const EInfSpec& spec, int k, double alpha = 1.0);

}  // namespace obslab
