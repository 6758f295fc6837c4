#include "obslab/experiments.hpp"

#include "obslab/bandlimited.hpp"
#include "obslab/capacity.hpp"
#include "obslab/errors.hpp"
#include "obslab/fractal.hpp"
#include "obslab/heat1d.hpp"
#include "obslab/lemniscate.hpp"
#include "obslab/lr.hpp"
#include "obslab/parallel.hpp"
#include "obslab/remez.hpp"
#include "obslab/spectral1d.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <random>

namespace obslab {

namespace {

constexpr double kPi = std::numbers::pi;

// Typed read access to a resolved parameter table.
class Params {
public:
    explicit Params(const ordered_json& j) : j_(j) {}
    double d(const char* k) const { return j_.at(k).get<double>(); }
    long long i(const char* k) const { return j_.at(k).get<long long>(); }
    std::size_t u(const char* k) const {
        long long v = i(k);
        if (v < 0) throw ParamError(fmt::format("{} must be nonnegative", k));
        return static_cast<std::size_t>(v);
    }
    int n(const char* k) const { return static_cast<int>(i(k)); }
    std::string s(const char* k) const { return j_.at(k).get<std::string>(); }
    bool b(const char* k) const { return j_.at(k).get<bool>(); }
    std::vector<double> vd(const char* k) const { return j_.at(k).get<std::vector<double>>(); }
    std::vector<int> vi(const char* k) const { return j_.at(k).get<std::vector<int>>(); }

private:
    const ordered_json& j_;
};

ordered_json gauge_defaults(const std::string& family, double alpha) {
    return {{"family", family}, {"alpha", alpha}, {"beta", 0.5}, {"delta", 1.0}, {"eps", 0.0}, {"d", 1}};
}

Gauge make_gauge(const Params& p) {
    std::string f = p.s("family");
    if (f == "h_alpha") return Gauge::h_alpha(p.d("alpha"));
    if (f == "h_alpha_beta") return Gauge::h_alpha_beta(p.d("alpha"), p.d("beta"));
    if (f == "f_alpha_beta") return Gauge::f_alpha_beta(p.d("alpha"), p.d("beta"), p.n("d"));
    if (f == "power") return Gauge::power(p.d("delta"));
    if (f == "f_eps") return Gauge::f_eps(p.d("eps"));
    throw ParamError("unknown gauge family '" + f + "'");
}

ordered_json merge(ordered_json base, const ordered_json& extra) {
    for (auto it = extra.begin(); it != extra.end(); ++it) base[it.key()] = it.value();
    return base;
}

std::vector<double> log_grid(double a, double b, std::size_t n) {
    if (!(a > 0 && b >= a) || n == 0) throw ParamError("log grid needs 0 < a <= b and n >= 1");
    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i) g[i] = n == 1 ? a : std::exp(std::log(a) + std::log(b / a) * double(i) / double(n - 1));
    return g;
}

CantorLevel h0_cantor(int depth, double a, double b, int shift = 0) {
    return build_cantor(CantorSpec::gauge_rule(Gauge::h_alpha(0), a, b, shift), depth);
}

double ln_or_neg_inf(const LogNum& x) { return x.is_zero() ? -INFINITY : x.ln_mag; }

std::string tower_cell(const Tower& t) { return t.fits_double() ? cell(t.to_double()) : t.str(); }

// ---------------------------------------------------------------- content

Report run_content(const Params& p, std::uint64_t) {
    Gauge g = make_gauge(p);
    CantorSpec spec = CantorSpec::gauge_rule(g, p.d("a"), p.d("b"), p.n("shift"));
    const int depth = p.n("depth"), fmax = p.n("frostman_depth_max");
    MassModel model = p.s("model") == "uniform" ? MassModel::Uniform : MassModel::LimitCounting;
    if (p.s("model") != "uniform" && p.s("model") != "limit") throw ParamError("model is 'limit' or 'uniform'");
    Report r;
    r.header = {"depth", "ln_length", "ln_upper", "upper", "ln_lower", "lower", "A2_hat", "balls_tested"};
    double max_identity_err = 0;
    LogNum last_upper, last_lower;
    bool have_lower = false;
    for (int k = 0; k <= depth; ++k) {
        CantorLevel lv = build_cantor(spec, k);
        LogNum up = content_upper(lv, g);
        if (k >= 1) max_identity_err = std::max(max_identity_err, std::fabs(up.ln_mag));
        std::vector<std::string> row{cell(k), cell(lv.ln_length()), cell(up.ln_mag), cell(up.to_real())};
        if (k <= fmax) {
            FrostmanCertificate c = frostman_lower(lv, g, model);
            row.insert(row.end(), {cell(ln_or_neg_inf(c.lower_bound)), cell(c.lower_bound.to_real()),
                                   cell(c.A2_hat.to_real()), cell(c.balls_tested)});
            if (c.lower_bound > up * LogNum::from_real(1 + 1e-9)) ++r.violations;
            last_lower = c.lower_bound;
            have_lower = true;
        } else {
            row.insert(row.end(), {"", "", "", ""});
        }
        last_upper = up;
        r.add_row(row);
    }
    r.summary["gauge"] = g.family_name();
    r.summary["upper"] = lognum_json(last_upper);
    r.summary["lower"] = have_lower ? lognum_json(last_lower) : ordered_json(nullptr);
    r.summary["max_abs_ln_upper"] = max_identity_err;
    return r;
}

// ----------------------------------------------------------------- cartan

const RootEnsemble kCoverEnsembles[3] = {RootEnsemble::UniformD2, RootEnsemble::OnePoint, RootEnsemble::UnitCircle};

Report run_cartan_cover(const Params& p, std::uint64_t seed) {
    Gauge g = make_gauge(p);
    const LogNum H = LogNum::from_ln(p.d("ln_H"));
    const std::size_t trials = p.u("trials"), samples = p.u("samples");
    const int n_max = p.n("n_max");
    if (n_max < 1) throw ParamError("n_max must be at least 1");
    struct Row {
        int n = 0;
        RootEnsemble e{};
        std::size_t balls = 0, hits = 0, bad = 0;
        int mult = 0;
        double rel = 0;
    };
    std::vector<Row> rows(trials);
    parallel_for(trials, [&](std::size_t t) {
        auto rng = make_rng(seed, 3, t);
        std::uniform_int_distribution<int> deg(1, n_max);
        Row& row = rows[t];
        row.n = deg(rng);
        row.e = kCoverEnsembles[t % 3];
        Polynomial poly = random_polynomial(row.e, row.n, rng);
        auto radii = cartan_radii(g, H, row.n);
        BallCover cov = cartan_cover(poly, radii, 0);
        LogNum prod = LogNum::one();
        for (const auto& x : radii) prod *= x;
        VerifyReport v = verify_cover(poly, prod, cov, samples, seed ^ (0x9e3779b97f4a7c15ULL * (t + 1)));
        row.balls = cov.balls.size();
        row.mult = cov.total_multiplicity();
        row.rel = rel_diff(content_of_cover(cov, g), g.eval(H));
        row.hits = v.sublevel_hits;
        row.bad = v.violations.size();
    });
    Report r;
    r.header = {"trial", "ensemble", "n", "balls", "multiplicity", "content_rel_err", "sublevel_hits", "violations"};
    double worst_rel = 0;
    std::size_t bad_trials = 0;
    for (std::size_t t = 0; t < trials; ++t) {
        const Row& x = rows[t];
        r.add_row({cell(t), ensemble_name(x.e), cell(x.n), cell(x.balls), cell(x.mult), cell(x.rel), cell(x.hits),
                   cell(x.bad)});
        worst_rel = std::max(worst_rel, x.rel);
        bool ok = x.mult == x.n && x.rel <= 1e-10 && x.bad == 0;
        if (!ok) ++bad_trials;
    }
    r.violations = bad_trials;
    r.summary["mode"] = "cover";
    r.summary["g_of_H"] = lognum_json(g.eval(H));
    r.summary["max_content_rel_err"] = worst_rel;
    r.summary["failed_trials"] = bad_trials;
    return r;
}

Report run_cartan_lemniscate(const Params& p, std::uint64_t seed) {
    const std::vector<double> alphas = p.vd("alphas"), scales = p.vd("decades");
    const int n_min = p.n("n_min"), n_max = p.n("n_max");
    if (n_min < 1 || n_max < n_min) throw ParamError("bad degree range");
    struct Inst {
        double alpha, scale;
        int n, ens;
        double ln_delta = 0, content = 0, shape = 0;
    };
    std::vector<Inst> inst;
    for (double a : alphas)
        for (int n = n_min; n <= n_max; ++n)
            for (double s : scales)
                for (int e = 0; e < 3; ++e) inst.push_back({a, s, n, e});
    parallel_for(inst.size(), [&](std::size_t i) {
        Inst& x = inst[i];
        auto rng = make_rng(seed, 4, i);
        Polynomial poly = random_polynomial(kCoverEnsembles[x.ens], x.n, rng);
        x.ln_delta = -(6.0 * x.n + 10.0) * x.scale;
        LogNum delta = LogNum::from_ln(x.ln_delta);
        x.content = lemniscate_content(poly, delta, Gauge::h_alpha(x.alpha)).to_real();
        x.shape = lemniscate_shape(x.alpha, delta, x.n);
    });
    std::map<double, double> fitted;
    for (const auto& x : inst) fitted[x.alpha] = std::max(fitted[x.alpha], x.content / x.shape);
    Report r;
    r.header = {"alpha", "n", "ln_delta", "ensemble", "content", "shape", "ratio", "pass"};
    for (const auto& x : inst) {
        double ratio = x.content / x.shape;
        bool pass = x.content <= fitted[x.alpha] * x.shape * (1 + 1e-12);
        if (!pass) ++r.violations;
        r.add_row({cell(x.alpha), cell(x.n), cell(x.ln_delta), ensemble_name(kCoverEnsembles[x.ens]), cell(x.content),
                   cell(x.shape), cell(ratio), cell(pass)});
    }
    r.summary["mode"] = "lemniscate";
    ordered_json fits = ordered_json::array();
    for (double a : alphas) {
        // Largest ratio on each half of the degree range, to show C does not drift with n.
        double lo = 0, hi = 0;
        int mid = (n_min + n_max) / 2;
        for (const auto& x : inst)
            if (x.alpha == a) (x.n <= mid ? lo : hi) = std::max(x.n <= mid ? lo : hi, x.content / x.shape);
        fits.push_back({{"alpha", a}, {"C", fitted[a]}, {"C_low_n", lo}, {"C_high_n", hi}});
    }
    r.summary["fits"] = fits;
    r.summary["instances"] = inst.size();
    return r;
}

Report run_cartan(const Params& p, std::uint64_t seed) {
    std::string mode = p.s("mode");
    if (mode == "cover") return run_cartan_cover(p, seed);
    if (mode == "lemniscate") return run_cartan_lemniscate(p, seed);
    throw ParamError("mode is 'cover' or 'lemniscate'");
}

// ------------------------------------------------------------------ remez

Report run_remez(const Params& p, std::uint64_t seed) {
    CantorLevel E = h0_cantor(p.n("depth"), p.d("a"), p.d("b"));
    RemezConfig cfg;
    cfg.degrees = p.vi("degrees");
    cfg.alpha = p.d("alpha");
    cfg.seed = seed;
    cfg.trials = p.u("trials_small");
    RemezResult small = remez_experiment(E, cfg);
    cfg.trials = p.u("trials");
    RemezResult full = remez_experiment(E, cfg);
    const double stab = full.fitted_C > 0 ? std::fabs(small.fitted_C - full.fitted_C) / full.fitted_C : 0.0;
    const bool stable = stab <= 0.2;

    const std::size_t jt = p.u("jensen_trials");
    const int jn = p.n("jensen_n_max");
    std::vector<JensenResult> jr(jt);
    parallel_for(jt, [&](std::size_t t) {
        auto rng = make_rng(seed, 6, t);
        std::uniform_int_distribution<int> deg(1, jn);
        int n = deg(rng);
        jr[t] = jensen_zero_bound(random_polynomial(kCoverEnsembles[t % 3], n, rng));
    });
    std::size_t jensen_bad = 0;
    int m_max = 0;
    for (const auto& j : jr) {
        if (!j.holds) ++jensen_bad;
        m_max = std::max(m_max, j.m);
    }

    Report r;
    r.header = {"trial", "n", "ensemble", "ratio_ln", "rhs_ln", "pass"};
    for (const auto& t : full.trials)
        r.add_row({cell(t.trial), cell(t.n), ensemble_name(t.ensemble), cell(t.ratio_ln), cell(t.rhs_ln), cell(t.pass)});
    r.violations = full.violations + (stable ? 0 : 1) + jensen_bad;
    r.summary["c"] = full.c;
    r.summary["fitted_C"] = full.fitted_C;
    r.summary["fitted_C_small"] = small.fitted_C;
    r.summary["C_relative_change"] = stab;
    r.summary["stable"] = stable;
    r.summary["remez_violations"] = full.violations;
    r.summary["jensen"] = {{"trials", jt}, {"exceptions", jensen_bad}, {"max_m", m_max}};
    return r;
}

// ---------------------------------------------------------- spectral-cost

Report run_spectral_cost(const Params& p, std::uint64_t seed) {
    const double L = p.d("L");
    CantorLevel E = h0_cantor(p.n("depth"), 0, L);
    const double c = frostman_lower(E, Gauge::h_alpha(0), MassModel::LimitCounting).lower_bound.to_real();
    auto grid = log_grid(p.d("lambda_min"), p.d("lambda_max"), p.u("points"));
    CostCurve cur = spectral_cost_experiment(E.sample_points(), c, L, p.d("alpha"), grid, p.u("trials"), seed);
    Report r;
    r.header = {"lambda", "K", "ln_cost", "ln_cost_raw", "ln_bound", "pass"};
    std::size_t monotone_breaks = 0;
    for (std::size_t i = 0; i < cur.curve.size(); ++i) {
        const auto& q = cur.curve[i];
        if (i > 0 && q.ln_cost < cur.curve[i - 1].ln_cost) ++monotone_breaks;
        r.add_row({cell(q.lambda), cell(q.K), cell(q.ln_cost), cell(q.ln_cost_raw), cell(q.ln_bound), cell(q.pass)});
    }
    r.violations = cur.violations + monotone_breaks;
    r.summary["c"] = c;
    r.summary["fitted_C"] = cur.fitted_C;
    r.summary["holdout_C"] = cur.holdout_C;
    r.summary["holdout_violations"] = cur.holdout_violations;
    r.summary["monotone_breaks"] = monotone_breaks;
    return r;
}

// ---------------------------------------------------------- nazarov-turan

Report run_nazarov_turan(const Params& p, std::uint64_t seed) {
    const std::size_t trials = p.u("trials"), grid = p.u("grid");
    const int terms = p.n("terms");
    const double re = p.d("re_mu"), im = p.d("im_mu"), w = p.d("piece");
    std::vector<NazarovTuranResult> res(2 * trials);
    parallel_for(2 * trials, [&](std::size_t i) {
        auto rng = make_rng(seed, 7, i);
        std::uniform_real_distribution<double> U(0, 1);
        std::vector<ExpTerm> poly;
        for (int k = 0; k < terms; ++k)
            poly.push_back({std::polar(1.0, 2 * kPi * U(rng)), cplx(-re + 2 * re * U(rng), -im + 2 * im * U(rng))});
        double a = 0.4 * U(rng), b = 0.5 + 0.45 * U(rng);
        res[i] = nazarov_turan_check(poly, 0, 1, {{a, a + w}, {b, b + w}}, grid);
    });
    double C_fit = 0, C_fresh = 0;
    Report r;
    r.header = {"block", "trial", "ln_ratio", "ln_front", "needed_C"};
    for (std::size_t i = 0; i < 2 * trials; ++i) {
        (i < trials ? C_fit : C_fresh) = std::max(i < trials ? C_fit : C_fresh, res[i].needed_C);
        r.add_row({i < trials ? "fit" : "fresh", cell(i), cell(res[i].ln_ratio), cell(res[i].ln_front),
                   cell(res[i].needed_C)});
    }
    const double change = C_fit > 0 ? std::fabs(C_fresh - C_fit) / C_fit : 0.0;
    r.violations = change <= 0.2 ? 0 : 1;
    r.summary["fitted_C"] = C_fit;
    r.summary["fresh_C"] = C_fresh;
    r.summary["C_relative_change"] = change;
    return r;
}

// -------------------------------------------------------------- bernstein

Report run_bernstein(const Params& p, std::uint64_t seed) {
    const double N = p.d("N");
    const int m_max = p.n("m_max"), W = p.n("W");
    BernsteinFit small = bernstein_check(N, m_max, p.u("trials_small"), seed, W);
    BernsteinFit full = bernstein_check(N, m_max, p.u("trials"), seed, W);
    const double change = full.C > 0 ? std::fabs(small.C - full.C) / full.C : 0.0;
    const std::size_t ct = p.u("cell_trials");
    const double A = p.d("A_factor") * full.C;
    std::vector<CellClassification> cls(ct);
    std::vector<char> failed(ct, 0);
    parallel_for(ct, [&](std::size_t t) {
        auto rng = make_rng(seed, 8, t);
        BandLimited u = random_bandlimited(N, W, rng);
        try {
            cls[t] = classify_cells(u, A);
        } catch (const MassViolation&) {
            failed[t] = 1;
        }
    });
    Report r;
    r.header = {"trial", "good", "bad", "bad_mass_fraction", "chain_rhs_fraction", "pass"};
    std::size_t mass_bad = 0;
    double worst = 0;
    for (std::size_t t = 0; t < ct; ++t) {
        bool pass = !failed[t] && cls[t].bad_mass_fraction <= 0.5;
        if (!pass) ++mass_bad;
        worst = std::max(worst, failed[t] ? 1.0 : cls[t].bad_mass_fraction);
        r.add_row({cell(t), cell(cls[t].good.size()), cell(cls[t].bad.size()), cell(cls[t].bad_mass_fraction),
                   cell(cls[t].chain_rhs_fraction), cell(pass)});
    }
    r.violations = mass_bad + (change <= 0.1 ? 0 : 1);
    r.summary["C"] = full.C;
    r.summary["C_small"] = small.C;
    r.summary["C_relative_change"] = change;
    r.summary["A"] = A;
    r.summary["max_bad_mass_fraction"] = worst;
    r.summary["mass_failures"] = mass_bad;
    return r;
}

// ----------------------------------------------------------- uncertainty

Report run_uncertainty(const Params& p, std::uint64_t seed) {
    CantorLevel c = h0_cantor(p.n("depth"), 0, 1);
    PeriodicSample E{1.0, c.sample_points()};
    UncertaintyResult res = uncertainty_experiment(E, p.d("alpha"), p.d("gamma"), p.d("L"), p.vd("N"), p.u("trials"),
                                                   seed, p.n("W"));
    Report r;
    r.header = {"N", "ln_ratio", "ln_bound", "pass"};
    for (const auto& q : res.points) r.add_row({cell(q.N), cell(q.ln_ratio), cell(q.ln_bound), cell(q.pass)});
    r.violations = res.violations;
    r.summary["fitted_C"] = res.fitted_C;
    r.summary["gamma"] = p.d("gamma");
    return r;
}

// ------------------------------------------------------------ heat-ratio

Report run_heat_ratio(const Params& p, std::uint64_t seed) {
    const double L = p.d("L");
    auto E = h0_cantor(p.n("depth"), 0, L).sample_points();
    const std::vector<double> Ts = p.vd("T");
    const std::size_t trials = p.u("trials"), nodes = p.u("nodes");
    std::vector<ObservabilityResult> res(trials * Ts.size());
    parallel_for(res.size(), [&](std::size_t i) {
        SpectralVector v = sample_spectral(L, p.d("lambda"), seed, i / Ts.size());
        res[i] = observability_ratio(v, Ts[i % Ts.size()], E, nodes);
    });
    Report r;
    r.header = {"trial", "T", "ln_ratio", "ln_numerator", "ln_denominator", "intervals", "zero_observation"};
    ordered_json worst = ordered_json::array();
    std::vector<double> max_ln(Ts.size(), -INFINITY);
    for (std::size_t i = 0; i < res.size(); ++i) {
        const auto& x = res[i];
        if (x.zero_observation) ++r.violations;
        max_ln[i % Ts.size()] = std::max(max_ln[i % Ts.size()], x.ratio.ln_mag);
        r.add_row({cell(i / Ts.size()), cell(Ts[i % Ts.size()]), cell(x.ratio.ln_mag), cell(ln_or_neg_inf(x.numerator)),
                   cell(ln_or_neg_inf(x.denominator)), cell(x.intervals), cell(x.zero_observation)});
    }
    for (std::size_t j = 0; j < Ts.size(); ++j) worst.push_back({{"T", Ts[j]}, {"max_ln_ratio", num(max_ln[j])}});
    r.summary["max_ratio"] = worst;
    r.summary["zero_observations"] = r.violations;
    return r;
}

// -------------------------------------------------------- counterexample

Report run_counterexample(const Params& p, std::uint64_t) {
    EInfSpec spec = build_counterexample(p.d("eps"), p.n("levels"));
    const double T = p.d("T"), alpha = p.d("alpha");
    Report r;
    r.header = {"k", "ln_q", "ln_ratio", "ln_ratio_height", "ln_f0_sum", "ln_f0_bound", "ln_h_sum", "ln_f_eps_lower",
                "ln_mu", "decreasing"};
    Tower prev;
    std::size_t f0_bad = 0, order_bad = 0;
    for (int k = 1; k <= p.n("levels"); ++k) {
        Tower ratio = counterexample_ratio(spec, k, T);
        EInfContent c = einf_content_report(spec, k, alpha);
        bool dec = k < 2 || ratio < prev;
        if (k >= 3 && !dec) ++order_bad;
        if (!(c.ln_f0_sum <= c.ln_f0_bound)) ++f0_bad;
        r.add_row({cell(k), tower_cell(spec.level(k).ln_q), tower_cell(ratio), cell(ratio.height),
                   tower_cell(c.ln_f0_sum), tower_cell(c.ln_f0_bound), tower_cell(c.ln_h_sum),
                   tower_cell(c.ln_f_eps_lower), tower_cell(c.ln_mu), k < 2 ? "" : cell(dec)});
        prev = ratio;
    }
    r.violations = f0_bad + order_bad;
    r.summary["spec"] = ordered_json::parse(spec.to_json());
    r.summary["ratio_k2"] = p.n("levels") >= 2 ? tower_json(counterexample_ratio(spec, 2, T)) : ordered_json(nullptr);
    r.summary["f0_bound_failures"] = f0_bad;
    r.summary["order_failures"] = order_bad;
    return r;
}

// ------------------------------------------------------------- lr-schedule

Report run_lr_schedule(const Params& p, std::uint64_t seed) {
    const double alpha = p.d("alpha"), C = p.d("C"), L = p.d("L"), lambda1 = p.d("lambda1");
    LRSchedule s = schedule(lambda1, alpha, C, L, p.u("n_max"));
    Report r;
    r.header = {"k", "ln_lambda", "tau", "T", "ln_f"};
    for (const auto& row : s.rows) r.add_row({cell(row.k), cell(row.ln_lambda), cell(row.tau), cell(row.T), cell(row.ln_f)});

    ordered_json conv = ordered_json::array();
    for (double a : p.vd("alphas_test")) {
        ConvergenceResult c = convergence_test(a, C, L, lambda1);
        conv.push_back({{"alpha", a},
                        {"converges", c.converges},
                        {"T1_bound", num(c.T1_bound)},
                        {"target", num(c.target)},
                        {"witness_k", c.witness_k},
                        {"witness_partial_sum", num(c.witness_partial_sum)},
                        {"integral_lower", num(c.integral_lower)}});
    }
    // tau(lambda) (ln lambda)^{2 alpha/3} / ln ln lambda over [1e6, 1e12].
    double fmin = INFINITY, fmax = 0;
    for (double lam : log_grid(1e6, 1e12, 25)) {
        double ll = std::log(lam);
        double f = tau(lam, alpha, C, L) * std::pow(ll, 2 * alpha / 3) / std::log(ll);
        fmin = std::min(fmin, f);
        fmax = std::max(fmax, f);
    }
    const double spread = (fmax - fmin) / fmin;

    CantorLevel E = h0_cantor(p.n("depth"), 0, L);
    SpectralVector v0 = sample_spectral(L, p.d("lambda_tel"), seed, 0);
    TelescopingResult tel = telescoping_check(s, v0, E.sample_points(), 1, p.u("telescoping_rows"));
    r.violations = tel.violations + (tel.lhs <= tel.rhs ? 0 : 1);

    ordered_json cost = nullptr;
    if (p.b("cost")) {
        CostConstant cc = cost_constant(p.d("T"), alpha, C, L, lambda1);
        cost = {{"T", p.d("T")},
                {"N", cc.N},
                {"ln_lambda_N", cc.ln_lambda_N},
                {"tau_N", cc.tau_N},
                {"T_N", cc.T_N},
                {"T0", cc.T0},
                {"ln_C_obs", tower_json(cc.ln_C_obs)}};
    }
    r.summary["decreasing_from"] = s.decreasing_from;
    r.summary["T1"] = s.rows.empty() ? ordered_json(nullptr) : num(s.rows.front().T);
    r.summary["T0"] = num(T0_threshold(s));
    r.summary["convergence"] = conv;
    r.summary["flattening"] = {{"min", fmin}, {"max", fmax}, {"relative_spread", spread}};
    r.summary["telescoping"] = {{"rows", tel.rows}, {"violations", tel.violations}, {"lhs", lognum_json(tel.lhs)},
                                {"rhs", lognum_json(tel.rhs)}};
    r.summary["cost_constant"] = cost;
    return r;
}

// --------------------------------------------------------------- capacity

std::vector<std::array<double, 2>> disc_points(double r, int M) {
    std::vector<std::array<double, 2>> pts;
    for (int i = 0; i < M; ++i)
        for (int j = 0; j < M; ++j) {
            double x = -r + (i + 0.5) * 2 * r / M, y = -r + (j + 0.5) * 2 * r / M;
            if (std::hypot(x, y) <= r) pts.push_back({x, y});
        }
    return pts;
}

Report run_capacity(const Params& p, std::uint64_t seed) {
    const double tol = p.d("tol");
    Report r;
    r.header = {"set", "depth", "ln_content", "ln_cap", "slack", "ln_cap_shifted", "ratio_ln"};

    // Ball bound after refinement.
    const double rad = p.d("r");
    const int M = p.n("grid");
    Gauge hb = Gauge::h_alpha_beta(p.d("ball_alpha"), p.d("ball_beta"));
    AtomSet ball = AtomSet::from_points(disc_points(rad, M), 2, std::log(2 * rad / M));
    RefinedCapacity rb = capacity_refined(ball, KernelSpec{hb}, tol);
    const double h2r = hb.eval(LogNum::from_real(2 * rad)).to_real();
    const double ball_ratio = std::max(rb.at_cell.cap.to_real(), rb.at_quarter.cap.to_real()) / h2r;
    if (ball_ratio > 1.02) ++r.violations;

    auto add_rows = [&](const std::string& name, const ContentCapacityReport& rep) {
        for (const auto& row : rep.rows)
            r.add_row({name, cell(row.depth), cell(row.content.ln_mag), cell(row.cap.ln_mag), cell(row.slack),
                       rep.direction_ii ? cell(row.cap_shifted.ln_mag) : "", rep.direction_ii ? cell(row.ratio_ln) : ""});
        if (!rep.holds_i) ++r.violations;
    };
    Gauge g = make_gauge(p);
    const int dmin = p.n("depth_min"), dmax = p.n("depth_max");
    ContentCapacityReport main = content_capacity_check(CantorSpec::gauge_rule(g, 0, p.d("b"), p.n("shift")), dmin,
                                                        dmax, g, p.d("eps_shift"));
    add_rows("rule", main);

    ordered_json second = nullptr;
    if (p.b("f_rule")) {
        Gauge F = Gauge::f_alpha_beta(p.d("f_alpha"), p.d("f_beta"), 1);
        ContentCapacityReport fr = content_capacity_check(CantorSpec::gauge_rule(F, 0, std::exp(-3.0), p.n("f_shift")),
                                                          dmin, dmax, F, p.d("f_eps_shift"));
        add_rows("f_rule", fr);
        second = {{"max_slack", fr.max_slack},
                  {"holds_i", fr.holds_i},
                  {"direction_ii", fr.direction_ii},
                  {"integrable", fr.integrability.finite},
                  {"integral", num(fr.integrability.value)},
                  {"tail_exponent", fr.integrability.tail_exponent},
                  {"min_ratio_ln", num(fr.min_ratio_ln)}};
    }

    // Frank-Wolfe certificate and restarts on one Cantor level.
    AtomSet atoms = AtomSet::from_cantor(build_cantor(CantorSpec::gauge_rule(g, 0, p.d("b"), p.n("shift")), dmax));
    CapacityResult base = capacity_estimate(atoms, KernelSpec{g}, tol);
    const std::size_t restarts = p.u("restarts");
    std::vector<CapacityResult> again(restarts);
    parallel_for(restarts, [&](std::size_t i) { again[i] = capacity_estimate(atoms, KernelSpec{g}, tol, seed + i + 1); });
    double worst_gap = base.gap, worst_change = 0;
    for (const auto& a : again) {
        worst_gap = std::max(worst_gap, a.gap);
        worst_change = std::max(worst_change, std::fabs(std::expm1(a.cap.ln_mag - base.cap.ln_mag)));
    }
    if (worst_gap > tol) ++r.violations;
    if (worst_change > 2 * tol) ++r.violations;

    r.summary["ball"] = {{"atoms", ball.n},
                         {"cap", lognum_json(rb.at_cell.cap)},
                         {"cap_quarter_cell", lognum_json(rb.at_quarter.cap)},
                         {"sensitivity", rb.sensitivity},
                         {"gap", rb.at_cell.gap},
                         {"h_2r", h2r},
                         {"ratio", ball_ratio}};
    r.summary["rule"] = {{"gauge", g.family_name()}, {"max_slack", main.max_slack}, {"holds_i", main.holds_i}};
    r.summary["f_rule"] = second;
    r.summary["restarts"] = {{"count", restarts},
                             {"cap", lognum_json(base.cap)},
                             {"max_gap", worst_gap},
                             {"max_relative_change", worst_change},
                             {"iterations", base.iterations}};
    return r;
}

// ---------------------------------------------------------------- slicing

Report run_slicing(const Params& p, std::uint64_t seed) {
    const double side = std::exp(p.d("ln_side"));
    const double rad = side / std::sqrt(2.0) * (1 + 1e-9);
    const std::array<double, 2> center{side / 2, side / 2};
    const double alpha = p.d("alpha"), beta = p.d("beta"), k = p.d("k");
    const std::size_t offsets = p.u("offsets");
    auto spec = CantorSpec::gauge_rule(Gauge::h_alpha(0), 0, side, p.n("shift"));
    double c = p.d("c");
    ordered_json fits = ordered_json::array();
    if (c <= 0) {
        c = INFINITY;
        for (int depth : p.vi("fit_depths")) {
            Factor1D X = Factor1D::from_cantor(build_cantor(spec, depth));
            double cd = slicing_experiment(X, X, center, rad, alpha, beta, offsets, seed, k).c;
            fits.push_back({{"depth", depth}, {"c", cd}});
            c = std::min(c, cd);
        }
        if (!std::isfinite(c)) throw ParamError("fit_depths is empty and c is not given");
    }
    Factor1D X = Factor1D::from_cantor(build_cantor(spec, p.n("depth")));
    SlicingResult s = slicing_experiment(X, X, center, rad, alpha, beta, offsets, seed, k, c);
    Report r;
    r.header = {"offset", "slice_cap", "threshold", "good", "ln_slice_cap", "ln_threshold", "stratum", "half"};
    for (const auto& row : s.rows)
        r.add_row({cell(row.offset), cell(row.slice_cap.to_real()), cell(s.threshold.to_real()), cell(row.good),
                   cell(ln_or_neg_inf(row.slice_cap)), cell(ln_or_neg_inf(s.threshold)), cell(row.stratum),
                   row.calibration ? "calibration" : "validation"});
    r.violations = s.violations;
    r.summary["r"] = rad;
    r.summary["k"] = k;
    r.summary["c"] = c;
    r.summary["c_fits"] = fits;
    r.summary["cap_F"] = lognum_json(s.cap_F);
    r.summary["threshold"] = lognum_json(s.threshold);
    r.summary["good_calibration"] = lognum_json(s.good_cal);
    r.summary["good_validation"] = lognum_json(s.good_val);
    r.summary["rhs"] = lognum_json(s.rhs);
    r.summary["projection"] = lognum_json(s.projection);
    r.summary["offsets"] = s.rows.size();
    return r;
}

// --------------------------------------------------------------- registry

struct Entry {
    std::string name;
    std::function<ordered_json()> defaults;
    std::function<Report(const Params&, std::uint64_t)> run;
};

const std::vector<Entry>& registry() {
    static const std::vector<Entry> r = {
        {"content",
         [] {
             return merge(gauge_defaults("h_alpha", 0.0), {{"a", 0.0},
                                                           {"b", 1.0},
                                                           {"shift", 0},
                                                           {"depth", 8},
                                                           {"frostman_depth_max", 8},
                                                           {"model", "limit"}});
         },
         run_content},
        {"cartan",
         [] {
             return merge(gauge_defaults("h_alpha", 0.0), {{"mode", "cover"},
                                                           {"trials", 200},
                                                           {"n_min", 2},
                                                           {"n_max", 32},
                                                           {"ln_H", -9.0},
                                                           {"samples", 100000},
                                                           {"alphas", {0.0, 1.0, 3.0}},
                                                           {"decades", {1.0, 10.0, 100.0}}});
         },
         run_cartan},
        {"remez",
         [] {
             return ordered_json{{"alpha", 1.0},
                                 {"depth", 8},
                                 {"a", -1.0},
                                 {"b", 1.0},
                                 {"degrees", {2, 4, 8, 16, 32}},
                                 {"trials", 1000},
                                 {"trials_small", 100},
                                 {"jensen_trials", 10000},
                                 {"jensen_n_max", 64}};
         },
         run_remez},
        {"spectral-cost",
         [] {
             return ordered_json{{"alpha", 0.0}, {"depth", 8},        {"L", 1.0},  {"lambda_min", 100.0},
                                 {"lambda_max", 1e4}, {"points", 9}, {"trials", 100}};
         },
         run_spectral_cost},
        {"nazarov-turan",
         [] {
             return ordered_json{{"terms", 6}, {"trials", 1000}, {"re_mu", 10.0}, {"im_mu", 20.0},
                                 {"piece", 0.05}, {"grid", 4000}};
         },
         run_nazarov_turan},
        {"bernstein",
         [] {
             return ordered_json{{"N", 8.0},          {"m_max", 8},      {"W", 64},           {"trials", 1000},
                                 {"trials_small", 100}, {"A_factor", 2.0}, {"cell_trials", 100}};
         },
         run_bernstein},
        {"uncertainty",
         [] {
             return ordered_json{{"alpha", 0.0}, {"gamma", 0.5}, {"L", 1.0},  {"N", {4.0, 8.0, 16.0, 32.0}},
                                 {"trials", 20}, {"W", 64},      {"depth", 8}};
         },
         run_uncertainty},
        {"heat-ratio",
         [] {
             return ordered_json{{"L", 1.0},     {"depth", 8},  {"lambda", 400.0}, {"T", {0.01, 0.1, 1.0}},
                                 {"trials", 10}, {"nodes", 16}};
         },
         run_heat_ratio},
        {"counterexample",
         [] { return ordered_json{{"eps", 1.0}, {"levels", 4}, {"T", 1.0}, {"alpha", 1.0}}; },
         run_counterexample},
        {"lr-schedule",
         [] {
             return ordered_json{{"alpha", 2.0},
                                 {"C", 0.1},
                                 {"L", 1.0},
                                 {"lambda1", 1000.0},
                                 {"n_max", 60},
                                 {"alphas_test", {1.0, 1.5, 1.6, 2.0, 3.0}},
                                 {"depth", 8},
                                 {"lambda_tel", 400.0},
                                 {"telescoping_rows", 6},
                                 {"cost", true},
                                 {"T", 1.0}};
         },
         run_lr_schedule},
        {"capacity",
         [] {
             return merge(gauge_defaults("h_alpha", 0.0), {{"b", 1.0},
                                                           {"shift", 0},
                                                           {"depth_min", 1},
                                                           {"depth_max", 6},
                                                           {"eps_shift", 0.0},
                                                           {"r", 0.02},
                                                           {"grid", 12},
                                                           {"ball_alpha", 1.0},
                                                           {"ball_beta", 0.5},
                                                           {"tol", 1e-6},
                                                           {"restarts", 5},
                                                           {"f_rule", true},
                                                           {"f_alpha", 2.0},
                                                           {"f_beta", 1.5},
                                                           {"f_shift", 4},
                                                           {"f_eps_shift", 0.5}});
         },
         run_capacity},
        {"slicing",
         [] {
             return ordered_json{{"ln_side", -4.0}, {"shift", 1},   {"depth", 5},       {"fit_depths", {3, 4}},
                                 {"alpha", 1.0},    {"beta", 0.5},  {"k", 0.25},        {"c", 0.0},
                                 {"offsets", 1000}};
         },
         run_slicing},
    };
    return r;
}

const Entry& find_entry(const std::string& name) {
    for (const auto& e : registry())
        if (e.name == name) return e;
    throw ConfigError("unknown experiment '" + name + "'");
}

// Checks `given` against the type of `def` and returns the value to store.
ordered_json typed_value(const std::string& key, const ordered_json& def, const ordered_json& given) {
    auto bad = [&](const char* want) { return ConfigError(fmt::format("params.{} must be {}", key, want)); };
    if (def.is_boolean()) {
        if (!given.is_boolean()) throw bad("a boolean");
        return given;
    }
    if (def.is_string()) {
        if (!given.is_string()) throw bad("a string");
        return given;
    }
    if (def.is_number_integer()) {
        if (!given.is_number_integer()) throw bad("an integer");
        return given;
    }
    if (def.is_number()) {
        if (!given.is_number()) throw bad("a number");
        return given.get<double>();
    }
    if (def.is_array()) {
        if (!given.is_array()) throw bad("an array");
        bool ints = !def.empty() && def.front().is_number_integer();
        ordered_json out = ordered_json::array();
        for (const auto& x : given) {
            if (ints ? !x.is_number_integer() : !x.is_number()) throw bad(ints ? "an array of integers" : "an array of numbers");
            out.push_back(ints ? x : ordered_json(x.get<double>()));
        }
        return out;
    }
    throw bad("of a supported type");
}

}  // namespace

ordered_json ExperimentConfig::to_json() const {
    return {{"experiment", experiment}, {"seed", seed}, {"output", output}, {"params", params}};
}

const std::vector<std::string>& experiment_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> n;
        for (const auto& e : registry()) n.push_back(e.name);
        return n;
    }();
    return names;
}

ordered_json default_params(const std::string& experiment) { return find_entry(experiment).defaults(); }

ExperimentConfig parse_config(const ordered_json& doc, const std::string& experiment) {
    if (!doc.is_object()) throw ConfigError("config must be a JSON object");
    for (auto it = doc.begin(); it != doc.end(); ++it)
        if (it.key() != "experiment" && it.key() != "seed" && it.key() != "output" && it.key() != "params")
            throw ConfigError("unknown key '" + it.key() + "'");
    ExperimentConfig cfg;
    if (doc.contains("experiment")) {
        if (!doc["experiment"].is_string()) throw ConfigError("experiment must be a string");
        cfg.experiment = doc["experiment"].get<std::string>();
        if (!experiment.empty() && experiment != cfg.experiment)
            throw ConfigError("config is for '" + cfg.experiment + "', not '" + experiment + "'");
    } else {
        cfg.experiment = experiment;
    }
    if (cfg.experiment.empty()) throw ConfigError("no experiment given");
    const Entry& entry = find_entry(cfg.experiment);
    if (doc.contains("seed")) {
        if (!doc["seed"].is_number_unsigned() && !(doc["seed"].is_number_integer() && doc["seed"].get<long long>() >= 0))
            throw ConfigError("seed must be a nonnegative integer");
        cfg.seed = doc["seed"].get<std::uint64_t>();
    }
    cfg.output = cfg.experiment;
    if (doc.contains("output")) {
        if (!doc["output"].is_string() || doc["output"].get<std::string>().empty())
            throw ConfigError("output must be a nonempty string");
        cfg.output = doc["output"].get<std::string>();
    }
    cfg.params = entry.defaults();
    if (doc.contains("params")) {
        const auto& given = doc["params"];
        if (!given.is_object()) throw ConfigError("params must be an object");
        for (auto it = given.begin(); it != given.end(); ++it) {
            if (!cfg.params.contains(it.key()))
                throw ConfigError(fmt::format("unknown parameter '{}' for {}", it.key(), cfg.experiment));
            cfg.params[it.key()] = typed_value(it.key(), cfg.params[it.key()], it.value());
        }
    }
    return cfg;
}

Report run_experiment(const ExperimentConfig& cfg) {
    const Entry& entry = find_entry(cfg.experiment);
    Params p(cfg.params);
    return entry.run(p, cfg.seed);
}

}  // namespace obslab
