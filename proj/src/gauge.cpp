#include "obslab/gauge.hpp"

#include "obslab/errors.hpp"

#include <boost/math/tools/roots.hpp>
#include <fmt/format.h>

#include <cstdint>
#include <tuple>

namespace obslab {

Gauge::Gauge(GaugeFamily f, double alpha, double beta, double delta, double eps, int d)
    : family_(f), alpha_(alpha), beta_(beta), delta_(delta), eps_(eps), d_(d) {
    if (alpha < 0 || beta < 0) throw ParamError("gauge exponents must be nonnegative");
    if (f == GaugeFamily::PowerDelta && !(delta > 0)) throw ParamError("delta must be positive");
    if (f == GaugeFamily::FEps && eps < 0) throw ParamError("eps must be nonnegative");
    if (d < 1) throw ParamError("dimension must be >= 1");
    if ((f == GaugeFamily::HAlphaBeta || (f == GaugeFamily::FAlphaBeta && d == 1)) &&
        alpha == 0 && beta == 0)
        throw ParamError("alpha = beta = 0 is not a gauge");
    refresh_cap();
}

Gauge Gauge::h_alpha(double alpha) { return {GaugeFamily::HAlpha, alpha, 0.5, 1, 0, 1}; }
Gauge Gauge::h_alpha_beta(double alpha, double beta) {
    return {GaugeFamily::HAlphaBeta, alpha, beta, 1, 0, 1};
}
Gauge Gauge::f_alpha_beta(double alpha, double beta, int d) {
    return {GaugeFamily::FAlphaBeta, alpha, beta, 1, 0, d};
}
Gauge Gauge::power(double delta) { return {GaugeFamily::PowerDelta, 0, 0, delta, 0, 1}; }
Gauge Gauge::f_eps(double eps) { return {GaugeFamily::FEps, 0, 0, 1, eps, 1}; }

Gauge Gauge::with_cutoff(double ln_cutoff) const {
    if (!(ln_cutoff < -1.0)) throw ParamError("cutoff must be below 1/e");
    Gauge g = *this;
    g.ln_cutoff_ = ln_cutoff;
    g.refresh_cap();
    return g;
}

void Gauge::refresh_cap() {
    ln_g_cut_ = ln_eval_formula(ln_cutoff_);
    slope_ = std::exp(ln_g_cut_ - ln_cutoff_) * elasticity(ln_cutoff_);
}

std::string Gauge::family_name() const {
    switch (family_) {
        case GaugeFamily::HAlpha: return "h_alpha";
        case GaugeFamily::HAlphaBeta: return "h_alpha_beta";
        case GaugeFamily::FAlphaBeta: return "F_alpha_beta";
        case GaugeFamily::PowerDelta: return "power";
        case GaugeFamily::FEps: return "f_eps";
    }
    return "?";
}

double Gauge::ln_eval_formula(double ln_t) const {
    double L = -ln_t;
    auto loglog = [&]() { return alpha_ == 0 ? 0.0 : alpha_ * std::log(std::log(L)); };
    switch (family_) {
        case GaugeFamily::HAlpha: return -0.5 * std::log(L) - loglog();
        case GaugeFamily::HAlphaBeta: return -beta_ * std::log(L) - loglog();
        case GaugeFamily::FAlphaBeta:
            return (d_ - 1) * ln_t - beta_ * std::log(L) - loglog();
        case GaugeFamily::PowerDelta: return delta_ * ln_t;
        case GaugeFamily::FEps: return -std::log(L) / (2.0 + eps_);
    }
    return 0;
}

double Gauge::elasticity(double ln_t) const {
    double L = -ln_t;
    double ll = alpha_ == 0 ? 0.0 : alpha_ / (L * std::log(L));
    switch (family_) {
        case GaugeFamily::HAlpha: return 0.5 / L + ll;
        case GaugeFamily::HAlphaBeta: return beta_ / L + ll;
        case GaugeFamily::FAlphaBeta: return (d_ - 1) + beta_ / L + ll;
        case GaugeFamily::PowerDelta: return delta_;
        case GaugeFamily::FEps: return 1.0 / ((2.0 + eps_) * L);
    }
    return 0;
}

double Gauge::ln_eval(double ln_t) const {
    if (std::isnan(ln_t)) throw DomainError("ln t is NaN");
    if (ln_t <= ln_cutoff_) return ln_eval_formula(ln_t);
    double t = std::exp(ln_t);
    double c = std::exp(ln_cutoff_);
    return std::log(std::exp(ln_g_cut_) + slope_ * (t - c));
}

LogNum Gauge::eval(const LogNum& t) const {
    if (t.sign <= 0) throw DomainError("gauge argument must be positive");
    return LogNum::from_ln(ln_eval(t.ln_mag));
}

LogNum Gauge::eval_strict(const LogNum& t) const {
    if (t.sign <= 0 || t.ln_mag > ln_cutoff_)
        throw DomainError(fmt::format("t = {} outside (0, e^{}]", t.str(), ln_cutoff_));
    return LogNum::from_ln(ln_eval_formula(t.ln_mag));
}

double Gauge::ln_inverse(double ln_y) const {
    if (std::isnan(ln_y)) throw DomainError("inverse of NaN");
    if (ln_y > ln_g_cut_) {
        double t = std::exp(ln_cutoff_) + (std::exp(ln_y) - std::exp(ln_g_cut_)) / slope_;
        return std::log(t);
    }
    if (ln_y == ln_g_cut_) return ln_cutoff_;
    if (ln_y == -std::numeric_limits<double>::infinity())
        throw DomainError("inverse of zero");

    auto F = [&](double u) { return ln_eval_formula(u) - ln_y; };
    double hi = ln_cutoff_;
    double lo = -1e8;
    while (F(lo) > 0) {
        lo *= 10;
        if (!std::isfinite(lo) || lo < -1e300)
            throw NoConvergence(fmt::format("inverse bracket exhausted for ln y = {}", ln_y));
    }

    // Initial guess from the leading power of L, ignoring the log log factor.
    double guess = 0.5 * (lo + hi);
    switch (family_) {
        case GaugeFamily::HAlpha: guess = -std::exp(-2.0 * ln_y); break;
        case GaugeFamily::HAlphaBeta:
            if (beta_ > 0) guess = -std::exp(-ln_y / beta_);
            break;
        case GaugeFamily::FEps: guess = -std::exp(-(2.0 + eps_) * ln_y); break;
        case GaugeFamily::PowerDelta: guess = ln_y / delta_; break;
        case GaugeFamily::FAlphaBeta:
            if (d_ > 1) guess = ln_y / (d_ - 1);
            else if (beta_ > 0) guess = -std::exp(-ln_y / beta_);
            break;
    }
    if (!(guess > lo && guess < hi)) guess = 0.5 * (lo + hi);

    std::uintmax_t iters = 300;
    auto fd = [&](double u) { return std::make_tuple(F(u), elasticity(u)); };
    double u = boost::math::tools::newton_raphson_iterate(fd, guess, lo, hi, 50, iters);
    if (iters >= 300) throw NoConvergence(fmt::format("inverse stalled for ln y = {}", ln_y));
    return u;
}

LogNum Gauge::inverse(const LogNum& y) const {
    if (y.sign <= 0) throw DomainError("gauge inverse needs y > 0");
    return LogNum::from_ln(ln_inverse(y.ln_mag));
}

}  // namespace obslab
