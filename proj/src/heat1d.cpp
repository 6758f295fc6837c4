#include "obslab/heat1d.hpp"

#include "obslab/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace obslab {

namespace {

constexpr double kPi = std::numbers::pi;
const double kInf = std::numeric_limits<double>::infinity();

double log_sum_exp(const std::vector<double>& v) {
    double m = -kInf;
    for (double x : v) m = std::max(m, x);
    if (m == -kInf) return m;
    double s = 0;
    for (double x : v) s += std::exp(x - m);
    return m + std::log(s);
}

}  // namespace

double HeatState::eigenvalue(std::size_t k) const {
    double w = k * kPi / L;
    return w * w;
}

LogNum HeatState::l2_norm() const {
    std::vector<double> sq;
    for (std::size_t i = 0; i < K(); ++i)
        if (sign[i] != 0) sq.push_back(2 * ln_coeff[i]);
    if (sq.empty()) return LogNum::zero();
    return LogNum::from_ln(0.5 * std::log(L / 2) + 0.5 * log_sum_exp(sq));
}

LogNum HeatState::sup_points(const std::vector<double>& pts) const {
    double m = -kInf;
    for (std::size_t i = 0; i < K(); ++i)
        if (sign[i] != 0) m = std::max(m, ln_coeff[i]);
    if (m == -kInf) return LogNum::zero();
    std::vector<double> w(K());
    double total = 0;
    for (std::size_t i = 0; i < K(); ++i) {
        w[i] = sign[i] == 0 ? 0.0 : sign[i] * std::exp(ln_coeff[i] - m);
        total += std::fabs(w[i]);
    }
    const double floor = 64 * std::numeric_limits<double>::epsilon() * total;
    double best = 0;
    for (double x : pts) {
        double s = 0;
        for (std::size_t i = 0; i < K(); ++i)
            if (w[i] != 0) s += w[i] * std::sin((i + 1) * kPi * x / L);
        best = std::max(best, std::fabs(s));
    }
    if (best <= floor) return LogNum::zero();
    return LogNum::from_ln(m + std::log(best));
}

SpectralVector HeatState::to_spectral() const {
    SpectralVector v;
    v.L = L;
    v.coeffs.resize(K());
    for (std::size_t i = 0; i < K(); ++i) v.coeffs[i] = sign[i] * std::exp(ln_coeff[i]);
    v.lambda = eigenvalue(K());
    return v;
}

HeatState heat_solution(const SpectralVector& v0, double t) {
    HeatState s;
    s.L = v0.L;
    for (double c : v0.coeffs) {
        s.sign.push_back(c > 0 ? 1 : (c < 0 ? -1 : 0));
        s.ln_coeff.push_back(c == 0 ? -kInf : std::log(std::fabs(c)));
    }
    return heat_solution(s, t);
}

HeatState heat_solution(const HeatState& s, double t) {
    if (!(t >= 0)) throw ParamError("heat time must be nonnegative");
    HeatState r = s;
    r.t = s.t + t;
    for (std::size_t i = 0; i < r.K(); ++i)
        if (r.sign[i] != 0) r.ln_coeff[i] -= r.eigenvalue(i + 1) * t;
    return r;
}

ObservationIntegral observation_integral(const HeatState& s0, double t0, double t1, const std::vector<double>& E,
                                         std::size_t nodes) {
    if (!(t1 >= t0 && t0 >= 0)) throw ParamError("integration window must satisfy 0 <= t0 <= t1");
    if (E.empty()) throw ParamError("observation set is empty");
    ObservationIntegral res;
    if (t1 == t0) return res;
    std::size_t n = std::max<std::size_t>(2, nodes + nodes % 2);
    const double len = t1 - t0;
    auto sample = [&](double t) { return heat_solution(s0, t).sup_points(E).ln_mag; };

    // f[i] = ln sup_E |u(t0 + i len / n)|, reused as n doubles.
    std::vector<double> f(n + 1);
    for (std::size_t i = 0; i <= n; ++i) f[i] = sample(t0 + len * i / n);
    auto simpson = [&](std::size_t m) {
        std::vector<double> terms(m + 1);
        for (std::size_t i = 0; i <= m; ++i) {
            double w = (i == 0 || i == m) ? 1.0 : (i % 2 ? 4.0 : 2.0);
            terms[i] = f[i] + std::log(w);
        }
        return std::log(len / m / 3) + log_sum_exp(terms);
    };

    double prev = simpson(n);
    const std::size_t max_n = std::size_t(1) << 22;
    for (;;) {
        if (n >= max_n) throw QuadratureError("Simpson refinement did not reach 1e-6");
        std::vector<double> g(2 * n + 1);
        for (std::size_t i = 0; i <= n; ++i) g[2 * i] = f[i];
        for (std::size_t i = 0; i < n; ++i) g[2 * i + 1] = sample(t0 + len * (2 * i + 1) / (2 * n));
        f.swap(g);
        n *= 2;
        double cur = simpson(n);
        bool both_zero = prev == -kInf && cur == -kInf;
        bool done = both_zero || std::fabs(cur - prev) <= 1e-6;
        prev = cur;
        if (done) break;
    }
    res.intervals = n;
    res.value = prev == -kInf ? LogNum::zero() : LogNum::from_ln(prev);
    return res;
}

ObservabilityResult observability_ratio(const SpectralVector& v0, double T, const std::vector<double>& E,
                                        std::size_t quadrature_nodes) {
    if (!(T > 0)) throw ParamError("observability time must be positive");
    HeatState s0 = heat_solution(v0, 0.0);
    ObservabilityResult res;
    res.numerator = heat_solution(s0, T).l2_norm();
    ObservationIntegral in = observation_integral(s0, 0.0, T, E, quadrature_nodes);
    res.intervals = in.intervals;
    res.denominator = in.value;
    if (res.denominator.is_zero()) {
        res.zero_observation = true;
        res.ratio = LogNum::from_ln(kInf);
    } else {
        res.ratio = res.numerator / res.denominator;
    }
    return res;
}

LevelExpr LevelExpr::ln_q(int l) {
    LevelExpr e;
    e.coef.assign(l, 0.0);
    e.scale.assign(l, 0.0);
    e.coef[l - 1] = 1;
    e.scale[l - 1] = 1;
    return e;
}

LevelExpr LevelExpr::constant_of(double c) {
    LevelExpr e;
    e.constant = c;
    return e;
}

LevelExpr LevelExpr::operator+(const LevelExpr& o) const {
    LevelExpr r;
    r.constant = constant + o.constant;
    std::size_t n = std::max(coef.size(), o.coef.size());
    r.coef.assign(n, 0.0);
    r.scale.assign(n, 0.0);
    for (std::size_t i = 0; i < coef.size(); ++i) {
        r.coef[i] += coef[i];
        r.scale[i] += scale[i];
    }
    for (std::size_t i = 0; i < o.coef.size(); ++i) {
        r.coef[i] += o.coef[i];
        r.scale[i] += o.scale[i];
    }
    return r;
}

LevelExpr LevelExpr::operator*(double s) const {
    LevelExpr r = *this;
    r.constant *= s;
    for (std::size_t i = 0; i < r.coef.size(); ++i) {
        r.coef[i] *= s;
        r.scale[i] *= std::fabs(s);
    }
    return r;
}

LevelExpr LevelExpr::operator-(const LevelExpr& o) const { return *this + o * -1.0; }

const EInfLevel& EInfSpec::level(int k) const {
    if (k < 1 || k > static_cast<int>(levels.size())) throw ParamError("level out of range");
    return levels[k - 1];
}

Tower EInfSpec::value(const LevelExpr& e) const {
    int top = -1;
    for (int i = static_cast<int>(e.coef.size()) - 1; i >= 0; --i) {
        if (std::fabs(e.coef[i]) > 1e-12 * e.scale[i]) {
            top = i;
            break;
        }
    }
    if (top < 0) return Tower::from_double(e.constant);
    if (top >= static_cast<int>(levels.size())) throw ParamError("expression refers to a missing level");
    const Tower& lead = levels[top].ln_q;
    if (lead.fits_double()) {
        long double s = e.constant;
        for (int i = 0; i <= top; ++i)
            if (std::fabs(e.coef[i]) > 1e-12 * e.scale[i])
                s += static_cast<long double>(e.coef[i]) * levels[i].ln_q.to_double();
        if (std::isfinite(static_cast<double>(s))) return Tower::from_double(static_cast<double>(s));
    }
    // ln q_top exceeds e^709 times every lower term, so it alone decides.
    Tower t = lead.scaled(std::fabs(e.coef[top]));
    return e.coef[top] > 0 ? t : -t;
}

std::string EInfSpec::to_json() const {
    nlohmann::ordered_json j;
    j["eps"] = eps;
    j["eps1"] = eps1;
    j["eps2"] = eps2;
    j["N"] = N;
    j["q1"] = 4;
    auto& arr = j["levels"] = nlohmann::ordered_json::array();
    for (const auto& lv : levels) {
        arr.push_back({{"k", lv.k},
                       {"ln_q", lv.ln_q.str()},
                       {"ln_length", lv.ln_length.str()},
                       {"ln_J_upper", value(lv.ln_J_upper).str()},
                       {"ln_Jp_lower", value(lv.ln_Jp_lower).str()}});
    }
    return j.dump(2);
}

EInfSpec build_counterexample(double eps, int levels) {
    if (!(eps > 0) || !std::isfinite(eps)) throw ParamError("eps must be positive and finite");
    if (levels < 1) throw ParamError("at least one level is required");
    EInfSpec s;
    s.eps = eps;
    s.eps2 = std::min(eps / 4, 0.25);
    s.eps1 = (2 + eps) * (1 - s.eps2) - 2;
    if (!(s.eps1 > 0 && s.eps1 < eps)) throw ParamError("derived eps1 outside (0, eps)");
    s.N = static_cast<int>(std::floor(1 / s.eps2)) + 1;
    const double p = 2 + s.eps1;
    const double ln2 = std::log(2.0);

    for (int k = 1; k <= levels; ++k) {
        EInfLevel lv;
        lv.k = k;
        LevelExpr lq = LevelExpr::ln_q(k);
        if (k == 1) {
            lv.ln_q = Tower::from_double(std::log(4.0));
            lv.ln_J_rec = lq;
            lv.ln_Jp_rec = LevelExpr::constant_of(std::log(3.0));
            lv.ln_ln_q = LevelExpr::constant_of(std::log(std::log(4.0)));
        } else {
            const EInfLevel& pr = s.levels.back();
            lv.ln_q = Tower::exp_of(pr.ln_q.scaled(p)).scaled(1 / s.eps2);
            // ln q_k - q_{k-1}^{2+eps1} = (1 - eps2) ln q_k under the minimal choice.
            LevelExpr step = lq - lq * s.eps2;
            lv.ln_J_rec = pr.ln_J_rec + step + LevelExpr::constant_of(ln2);
            lv.ln_Jp_rec = pr.ln_Jp_rec + step - LevelExpr::constant_of(ln2);
            lv.ln_ln_q = LevelExpr::constant_of(std::log(1 / s.eps2)) + LevelExpr::ln_q(k - 1) * p;
        }
        lv.ln_length = -Tower::exp_of(lv.ln_q.scaled(p));
        LevelExpr tail = LevelExpr::ln_q(1);
        for (int l = 2; l <= k; ++l) tail = tail + LevelExpr::ln_q(l) * (1 - s.eps2);
        lv.ln_J_upper = tail + LevelExpr::constant_of(k * ln2);
        lv.ln_Jp_lower = tail - LevelExpr::constant_of(k * ln2);
        s.levels.push_back(lv);

        if (std::fabs((2 + eps) * (1 - s.eps2) - p) > 1e-12)
            throw BoundViolation("(2+eps)(1-eps2) != 2+eps1");
        if (k >= 2) {
            const Tower& prev_q = s.levels[k - 2].ln_q;
            Tower Qprev = Tower::exp_of(prev_q.scaled(p));
            if (lv.ln_q < Qprev.scaled(1 / s.eps2) || Qprev.scaled(s.N) < lv.ln_q)
                throw BoundViolation("ln q_k outside [Q_{k-1}/eps2, N Q_{k-1}]");
            // The recursion needs q_k e^{-Q_{k-1}} >= 4.
            if (s.value(lq - lq * s.eps2 - LevelExpr::constant_of(std::log(4.0))).sign < 0)
                throw BoundViolation("level too thin for the count recursion");
        }
        if (s.value(lv.ln_J_rec - lv.ln_Jp_rec).sign < 0) throw BoundViolation("J'_k > J_k");
        if (s.value(lv.ln_Jp_rec - lv.ln_Jp_lower).sign <= 0)
            throw BoundViolation("J'_k below 2^{-k} q_1...q_k e^{-sum Q_l}");
        if (s.value(lv.ln_J_upper - lv.ln_J_rec).sign < 0)
            throw BoundViolation("J_k above 2^k q_1...q_k e^{-sum Q_l}");
    }
    return s;
}

Tower counterexample_ratio(const EInfSpec& spec, int k, double T) {
    if (!(T > 0)) throw ParamError("T must be positive");
    const Tower& lq = spec.level(k).ln_q;
    const double p = 2 + spec.eps1;
    const double ln_pi2T = std::log(kPi * kPi * T);
    const double tail = -std::log(kPi) + 0.5 * std::log(2.0);
    if (!lq.fits_double()) return -Tower::exp_of(lq.scaled(p));
    const double l = lq.to_double();
    const double A = p * l;           // ln q^{2+eps1}
    const double B = 2 * l + ln_pi2T; // ln q^2 pi^2 T
    if (A <= 700 && B <= 700) return Tower::from_double(tail - l - std::exp(A) + std::exp(B));
    // One exponential dominates; the remaining terms are below e^{-600} of it.
    if (A > B) return -Tower::exp_of(Tower::from_double(A + std::log1p(-std::exp(B - A))));
    return Tower::exp_of(Tower::from_double(B + std::log1p(-std::exp(A - B))));
}

EInfContent einf_content_report(const EInfSpec& spec, int k, double alpha) {
    if (alpha < 0) throw ParamError("alpha must be nonnegative");
    const EInfLevel& lv = spec.level(k);
    const double p = 2 + spec.eps1;
    LevelExpr lq = LevelExpr::ln_q(k);

    Tower ln_J = spec.value(lv.ln_J_upper);
    double plus_one = ln_J.fits_double() ? std::log1p(std::exp(-ln_J.to_double())) : 0.0;
    LevelExpr ln_count = lv.ln_J_upper + LevelExpr::constant_of(plus_one);

    // With L = ln(1/|I_k|) = q_k^{p}: f_0 = L^{-1/2}, f_eps = L^{-1/(2+eps)},
    // h_alpha = f_0 (ln L)^{-alpha}.
    LevelExpr ln_f0 = lq * -(p / 2);
    LevelExpr ln_feps = lq * -(p / (2 + spec.eps));
    LevelExpr ln_lnL = lv.ln_ln_q + LevelExpr::constant_of(std::log(p));
    LevelExpr ln_h = ln_f0 - ln_lnL * alpha;
    LevelExpr bound = LevelExpr::constant_of(std::log(3.0)) - lq * (spec.eps1 / 2);

    EInfContent r;
    r.k = k;
    r.ln_f_eps_sum = spec.value(ln_count + ln_feps);
    r.ln_f_eps_lower = spec.value(lv.ln_Jp_rec + ln_feps);
    r.ln_f0_sum = spec.value(ln_count + ln_f0);
    r.ln_h_sum = spec.value(ln_count + ln_h);
    r.ln_f0_bound = spec.value(bound);
    r.ln_mu = spec.value(lv.ln_Jp_rec * -1.0);

    if (spec.value(bound - ln_count - ln_f0).sign < 0) throw BoundViolation("f_0 sum above 3 q_k^{-eps1/2}");
    r.ln_h_gap = spec.value(ln_lnL * alpha);
    int gap = r.ln_h_gap.sign;
    if (alpha > 0 ? gap <= 0 : gap != 0) throw BoundViolation("h_alpha sum not below the f_0 sum");
    if (spec.levels.size() >= 2) {
        Tower floor = spec.value(spec.levels[0].ln_Jp_rec + LevelExpr::ln_q(1) * -(p / (2 + spec.eps)));
        Tower second = spec.value(spec.levels[1].ln_Jp_rec + LevelExpr::ln_q(2) * -(p / (2 + spec.eps)));
        if (second < floor) floor = second;
        if (r.ln_f_eps_lower.fits_double() && r.ln_f_eps_lower.to_double() < floor.to_double() - 1e-9)
            throw BoundViolation("f_eps lower sum fell below its level-1/level-2 floor");
        if (!r.ln_f_eps_lower.fits_double() && r.ln_f_eps_lower.sign < 0)
            throw BoundViolation("f_eps lower sum fell below its level-1/level-2 floor");
    }
    return r;
}

}  // namespace obslab
