#include "obslab/remez.hpp"

#include "obslab/errors.hpp"
#include "obslab/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace obslab {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
const double kLn12 = std::log(12.0);
}  // namespace

SupEstimate sup_disc(const Polynomial& p, double radius, std::size_t min_points) {
    if (!(radius > 0)) throw ParamError("radius must be positive");
    const int n = p.degree();
    const std::size_t M = std::max<std::size_t>(min_points, 64 * static_cast<std::size_t>(n));
    double best = -kInf;
    for (std::size_t k = 0; k < M; ++k) {
        double th = 2 * std::numbers::pi * double(k) / double(M);
        best = std::max(best, p.ln_abs(std::polar(radius, th)));
    }
    SupEstimate s;
    s.value = LogNum::from_ln(best);
    s.grid_points = M;
    // |P'| <= (n/R) sup|P| on the circle and every point is within pi R/M
    // of the grid, so sup <= value / (1 - n pi / M).
    double q = n * std::numbers::pi / double(M);
    s.lipschitz_slack = n == 0 ? LogNum::zero() : LogNum::from_ln(best + std::log(q / (1 - q)));
    return s;
}

double ln_sup_points(const Polynomial& p, const std::vector<double>& pts) {
    double best = -kInf;
    for (double x : pts) best = std::max(best, p.ln_abs(cplx(x, 0.0)));
    return best;
}

const char* ensemble_name(RootEnsemble e) {
    switch (e) {
        case RootEnsemble::UniformD2: return "uniform_D2";
        case RootEnsemble::OnePoint: return "one_point";
        case RootEnsemble::UnitCircle: return "unit_circle";
        case RootEnsemble::RealSegment: return "real_segment";
    }
    return "?";
}

Polynomial random_polynomial(RootEnsemble e, int n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> U(0.0, 1.0);
    const double tau = 2 * std::numbers::pi;
    std::vector<cplx> z;
    switch (e) {
        case RootEnsemble::UniformD2:
            for (int i = 0; i < n; ++i) z.push_back(std::polar(2 * std::sqrt(U(rng)), tau * U(rng)));
            break;
        case RootEnsemble::OnePoint: {
            cplx a = std::polar(2 * std::sqrt(U(rng)), tau * U(rng));
            z.assign(static_cast<std::size_t>(n), a);
            break;
        }
        case RootEnsemble::UnitCircle:
            for (int i = 0; i < n; ++i) z.push_back(std::polar(1.0, tau * U(rng)));
            break;
        case RootEnsemble::RealSegment:
            for (int i = 0; i < n; ++i) z.push_back(cplx(2 * U(rng) - 1, 0.0));
            break;
    }
    return Polynomial::monic(std::move(z));
}

double remez_rhs_ln(int n, double C, double alpha, double c) {
    return n * kLn12 + C * n * double(n) * std::pow(std::log(n + std::numbers::e), -2 * alpha / 3) / (c * c);
}

double remez_needed_C(int n, double ratio_ln, double alpha, double c) {
    if (n == 0) return ratio_ln > 0 ? kInf : -kInf;
    return (ratio_ln - n * kLn12) * c * c /
           (n * double(n) * std::pow(std::log(n + std::numbers::e), -2 * alpha / 3));
}

RemezResult remez_experiment(const std::vector<double>& Z, double c, const RemezConfig& cfg) {
    if (!(c > 0)) throw DegenerateSet("content lower bound of Z is zero");
    if (Z.empty()) throw DegenerateSet("empty point sample");
    for (double x : Z)
        if (std::fabs(x) > 1.0) throw ParamError("Z must lie in [-1, 1]");
    if (cfg.ensembles.empty()) throw ParamError("no root ensembles");

    RemezResult res;
    res.c = c;
    const std::size_t T = cfg.trials;
    res.trials.resize(cfg.degrees.size() * T);
    std::vector<double> needed(res.trials.size());
    parallel_for(res.trials.size(), [&](std::size_t idx) {
        std::size_t di = idx / T, t = idx % T;
        int n = cfg.degrees[di];
        auto rng = make_rng(cfg.seed, 0x4e3u + static_cast<std::uint64_t>(n), t);
        RootEnsemble e = cfg.ensembles[t % cfg.ensembles.size()];
        Polynomial p = random_polynomial(e, n, rng);
        double top = sup_disc(p, 1.0).upper().ln_mag;
        double onz = ln_sup_points(p, Z);
        auto& row = res.trials[idx];
        row.trial = t;
        row.n = n;
        row.ensemble = e;
        row.ratio_ln = top - onz;
        needed[idx] = remez_needed_C(n, row.ratio_ln, cfg.alpha, c);
    });

    res.max_ratio_ln = -kInf;
    double fit = 0;
    for (std::size_t i = 0; i < needed.size(); ++i) {
        fit = std::max(fit, needed[i]);
        res.max_ratio_ln = std::max(res.max_ratio_ln, res.trials[i].ratio_ln);
    }
    res.fitted_C = fit;
    res.tested_C = cfg.test_C >= 0 ? cfg.test_C : fit;
    for (auto& row : res.trials) {
        row.rhs_ln = remez_rhs_ln(row.n, res.tested_C, cfg.alpha, c);
        row.pass = row.ratio_ln <= row.rhs_ln + 1e-12 * std::max(1.0, std::fabs(row.rhs_ln));
        if (!row.pass) ++res.violations;
    }
    return res;
}

RemezResult remez_experiment(const CantorLevel& E, const RemezConfig& cfg) {
    if (E.a() < -1.0 || E.b() > 1.0) throw ParamError("Cantor level must lie in [-1, 1]");
    double c = frostman_lower(E, Gauge::h_alpha(cfg.alpha), MassModel::LimitCounting)
                   .lower_bound.to_real();
    if (!(c > 0)) throw DegenerateSet("Frostman lower bound is zero");
    return remez_experiment(E.sample_points(), c, cfg);
}

JensenResult jensen_zero_bound(const Polynomial& p) {
    cplx p0 = p.eval(0.0);
    if (std::abs(p0) == 0.0) throw DomainError("P(0) = 0 cannot be rescaled to |P(0)| = 1");
    Polynomial q = p.scaled(1.0 / std::abs(p0));
    JensenResult r;
    for (const auto& z : q.roots())
        if (std::abs(z) <= 2.0) ++r.m;
    r.bound = q.degree() == 0 ? 0.0 : sup_disc(q, 4.0).value.ln_mag / std::numbers::ln2;
    r.holds = r.m <= r.bound + 1e-12;
    return r;
}

PropagationResult propagation_experiment(const std::vector<AnalyticFn>& fns, double I_lo,
                                         double I_hi, const std::vector<double>& E, double alpha,
                                         const std::vector<double>& ln_eps_grid) {
    if (!(I_hi > I_lo)) throw ParamError("empty interval");
    if (E.empty()) throw DegenerateSet("empty point sample");
    for (double x : E)
        if (x < I_lo || x > I_hi) throw ParamError("E must lie in I");
    for (double le : ln_eps_grid)
        if (!(le <= -3.0)) throw ParamError("eps must lie in (0, e^-3]");

    constexpr std::size_t G = 8192;
    struct Sups {
        double X, Y, Z;
    };
    std::vector<Sups> sups(fns.size());
    parallel_for(fns.size(), [&](std::size_t i) {
        const auto& f = fns[i].f;
        double Y = 0, Z = 0, X = 0;
        for (std::size_t k = 0; k < G; ++k) Y = std::max(Y, std::abs(f(I_lo + (I_hi - I_lo) * double(k) / (G - 1))));
        Y += fns[i].lipschitz_I * (I_hi - I_lo) / (2.0 * (G - 1));
        for (std::size_t k = 0; k < G; ++k)
            Z = std::max(Z, std::abs(f(std::polar(5.0, 2 * std::numbers::pi * double(k) / G))));
        for (double x : E) X = std::max(X, std::abs(f(x)));
        sups[i] = {X, std::max(Y, X), std::max(Z, Y)};
    });

    PropagationResult res;
    double fit = 0;
    for (std::size_t i = 0; i < fns.size(); ++i) {
        const auto& s = sups[i];
        for (double le : ln_eps_grid) {
            PropagationRow row;
            row.fn = i;
            row.ln_eps = le;
            row.ln_X = std::log(s.X);
            row.ln_Y = std::log(s.Y);
            row.ln_Z = std::log(s.Z);
            row.calibration = fns.size() == 1 || i % 2 == 0;
            double L = -le;
            double q = L * L / std::pow(std::log(L), 2 * alpha / 3);
            double gap = s.Y - std::exp(le) * s.Z;
            if (gap <= 0) row.C_needed = -kInf;
            else if (s.X == 0) row.C_needed = kInf;
            else row.C_needed = std::log(gap / s.X) / q;
            if (row.calibration) fit = std::max(fit, row.C_needed);
            res.rows.push_back(row);
        }
    }
    res.fitted_C = fit;
    for (auto& row : res.rows) {
        row.pass = row.C_needed <= fit + 1e-12 * std::max(1.0, fit);
        if (!row.pass) ++res.violations;
    }
    return res;
}

}  // namespace obslab
