#pragma once

#include "obslab/lognum.hpp"

#include <string>

namespace obslab {

enum class GaugeFamily { HAlpha, HAlphaBeta, FAlphaBeta, PowerDelta, FEps };

// Gauge functions of log type, all written in terms of L = log(1/t):
//   HAlpha      L^{-1/2} (log L)^{-alpha}
//   HAlphaBeta  L^{-beta} (log L)^{-alpha}
//   FAlphaBeta  t^{d-1} L^{-beta} (log L)^{-alpha}
//   PowerDelta  t^delta
//   FEps        L^{-1/(2+eps)}
// The closed formula holds on (0, cutoff]. Above the cutoff the gauge
// continues as the tangent line at the cutoff.
class Gauge {
public:
    static Gauge h_alpha(double alpha);
    static Gauge h_alpha_beta(double alpha, double beta);
    static Gauge f_alpha_beta(double alpha, double beta, int d);
    static Gauge power(double delta);
    static Gauge f_eps(double eps);

    Gauge with_cutoff(double ln_cutoff) const;

    GaugeFamily family() const { return family_; }
    double alpha() const { return alpha_; }
    double beta() const { return beta_; }
    double delta() const { return delta_; }
    double eps() const { return eps_; }
    int dim() const { return d_; }
    double ln_cutoff() const { return ln_cutoff_; }
    std::string family_name() const;

    // g(t) for t > 0, with the linear cap above the cutoff.
    LogNum eval(const LogNum& t) const;
    // g(t) restricted to (0, cutoff]; DomainError outside.
    LogNum eval_strict(const LogNum& t) const;
    // ln g(t) from ln t, full domain.
    double ln_eval(double ln_t) const;
    // d ln g / d ln t on the strict domain.
    double elasticity(double ln_t) const;

    // t with g(t) = y. Newton on ln t, safeguarded by a bisection bracket.
    LogNum inverse(const LogNum& y) const;
    double ln_inverse(double ln_y) const;

    LogNum at_cutoff() const { return LogNum::from_ln(ln_g_cut_); }

private:
    Gauge(GaugeFamily f, double alpha, double beta, double delta, double eps, int d);
    double ln_eval_formula(double ln_t) const;
    void refresh_cap();

    GaugeFamily family_;
    double alpha_ = 0, beta_ = 0, delta_ = 1, eps_ = 0;
    int d_ = 1;
    double ln_cutoff_ = -3.0;
    double ln_g_cut_ = 0;  // ln g(cutoff)
    double slope_ = 0;     // g'(cutoff)
};

}  // namespace obslab
