#include "obslab/bandlimited.hpp"

#include "obslab/errors.hpp"
#include "obslab/parallel.hpp"

#include <fftw3.h>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>

namespace obslab {

namespace {

constexpr double kPi = std::numbers::pi;
std::mutex planner_mutex;

int points_per_cell(double N) { return std::max(32, 8 * static_cast<int>(std::ceil(N))); }

}  // namespace

double BandLimited::freq(int j) const { return 2 * kPi * j / W; }

int max_index(double N, int W) {
    if (!(N > 0)) throw ParamError("bandwidth must be positive");
    if (W < 1) throw ParamError("window must have at least one cell");
    return static_cast<int>(std::floor(N * W / (2 * kPi) + 1e-12));
}

double BandLimited::eval(double x, int m) const {
    const int Jm = J();
    std::complex<double> s = 0;
    for (int j = -Jm; j <= Jm; ++j) {
        double w = freq(j);
        s += a[static_cast<std::size_t>(Jm + j)] * std::pow(std::complex<double>(0, w), m) *
             std::polar(1.0, w * x);
    }
    return s.real();
}

BandLimited random_bandlimited(double N, int W, std::mt19937_64& rng) {
    int Jm = max_index(N, W);
    std::normal_distribution<double> G(0.0, 1.0);
    BandLimited u{N, W, std::vector<std::complex<double>>(static_cast<std::size_t>(2 * Jm + 1))};
    u.a[Jm] = G(rng);
    for (int j = 1; j <= Jm; ++j) {
        std::complex<double> z(G(rng), G(rng));
        u.a[Jm + j] = z / std::sqrt(2.0);
        u.a[Jm - j] = std::conj(u.a[Jm + j]);
    }
    return u;
}

BandLimited single_mode(double N, int W) {
    int Jm = max_index(N, W);
    if (Jm < 1) throw ParamError("no nonzero window frequency below N");
    BandLimited u{N, W, std::vector<std::complex<double>>(static_cast<std::size_t>(2 * Jm + 1))};
    u.a[Jm + Jm] = std::complex<double>(0, -0.5);
    u.a[0] = std::complex<double>(0, 0.5);
    return u;
}

std::vector<double> cell_sups(const BandLimited& u, int m) {
    const int P = points_per_cell(u.N);
    const int M = u.W * P;
    const int Jm = u.J();
    if (2 * Jm + 1 > M) throw ParamError("grid too coarse for the spectrum");
    fftw_complex* buf = fftw_alloc_complex(static_cast<std::size_t>(M));
    for (int i = 0; i < M; ++i) buf[i][0] = buf[i][1] = 0;
    for (int j = -Jm; j <= Jm; ++j) {
        std::complex<double> c = u.a[static_cast<std::size_t>(Jm + j)] *
                                 std::pow(std::complex<double>(0, u.freq(j)), m);
        int slot = (j + M) % M;
        buf[slot][0] = c.real();
        buf[slot][1] = c.imag();
    }
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(planner_mutex);
        plan = fftw_plan_dft_1d(M, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    std::vector<double> sup(static_cast<std::size_t>(u.W), 0.0);
    for (int k = 0; k < u.W; ++k)
        for (int i = 0; i <= P; ++i) {
            int idx = (k * P + i) % M;
            sup[k] = std::max(sup[k], std::fabs(buf[idx][0]));
        }
    {
        std::lock_guard<std::mutex> lock(planner_mutex);
        fftw_destroy_plan(plan);
    }
    fftw_free(buf);
    return sup;
}

double amalgam_norm(const BandLimited& u, int m) {
    double s = 0;
    for (double v : cell_sups(u, m)) s += v * v;
    return std::sqrt(s);
}

BernsteinFit bernstein_check(double N, int m_max, std::size_t trials, std::uint64_t seed, int W) {
    if (m_max < 0 || m_max > 8) throw ParamError("m_max must lie in [0, 8]");
    BernsteinFit fit;
    fit.per_trial.assign(trials, 0.0);
    parallel_for(trials, [&](std::size_t t) {
        auto rng = make_rng(seed, 0xbe5, t);
        BandLimited u = random_bandlimited(N, W, rng);
        double base = amalgam_norm(u, 0);
        double worst = 0;
        for (int m = 1; m <= m_max; ++m)
            worst = std::max(worst, std::pow(amalgam_norm(u, m) / base, 1.0 / m) / N);
        fit.per_trial[t] = worst;
    });
    for (double v : fit.per_trial) fit.C = std::max(fit.C, v);
    return fit;
}

CellClassification classify_cells(const BandLimited& u, double A, int m_cap) {
    if (!(A > 0)) throw ParamError("A must be positive");
    std::vector<std::vector<double>> s(static_cast<std::size_t>(m_cap + 1));
    for (int m = 0; m <= m_cap; ++m) s[m] = cell_sups(u, m);
    CellClassification out;
    double total = 0, bad = 0;
    for (int k = 0; k < u.W; ++k) {
        bool good = true;
        double an = 1;
        for (int m = 1; m <= m_cap && good; ++m) {
            an *= A * u.N;
            if (s[m][k] > an * s[0][k] * (1 + 1e-12)) good = false;
        }
        total += s[0][k] * s[0][k];
        if (good) out.good.push_back(k);
        else {
            out.bad.push_back(k);
            bad += s[0][k] * s[0][k];
        }
    }
    out.bad_mass_fraction = total > 0 ? bad / total : 0;
    double chain = 0, an2 = 1;
    for (int m = 1; m <= m_cap; ++m) {
        an2 *= (A * u.N) * (A * u.N);
        double nm = 0;
        for (double v : s[m]) nm += v * v;
        chain += nm / an2;
    }
    out.chain_rhs_fraction = total > 0 ? chain / total : 0;
    if (out.bad_mass_fraction > 0.5)
        throw MassViolation(fmt::format("bad cells carry {:.4f} of the squared amalgam norm", out.bad_mass_fraction));
    return out;
}

double uncertainty_bound_ln(double C, double N, double L, double alpha, double gamma) {
    if (!(C > 0)) return 0.0;
    double lead = C * L * N * std::log(4 * C * (L + 1));
    double tail = C * N * N * std::pow(std::log(C * N / std::numbers::ln2 + std::numbers::e), -2 * alpha / 3) /
                  (gamma * gamma);
    return lead + C * N + tail;
}

double fit_uncertainty_C(double N, double L, double alpha, double gamma, double target) {
    if (target <= 0) return 0.0;
    double hi = 1e-6, lo = 0;
    while (uncertainty_bound_ln(hi, N, L, alpha, gamma) < target) {
        lo = hi;
        hi *= 2;
        if (hi > 1e12) throw NoConvergence("no constant reaches the observed ratio");
    }
    for (int it = 0; it < 200 && hi - lo > 1e-12 * hi; ++it) {
        double mid = 0.5 * (lo + hi);
        (uncertainty_bound_ln(mid, N, L, alpha, gamma) >= target ? hi : lo) = mid;
    }
    return hi;
}

double uncertainty_ratio(const BandLimited& u, const PeriodicSample& E, double L) {
    if (E.points.empty() || !(E.period > 0)) throw DegenerateSet("empty set sample");
    // |u| at every E point inside the window, by period copy.
    std::vector<std::pair<double, double>> vals;
    int copies = static_cast<int>(std::ceil((u.W + L) / E.period)) + 1;
    for (int c = -1; c <= copies; ++c)
        for (double p : E.points) {
            double x = p + c * E.period;
            if (x < 0 || x > u.W + L) continue;
            vals.emplace_back(x, std::fabs(u.eval(x)));
        }
    std::sort(vals.begin(), vals.end());
    double den = 0;
    for (int k = 0; k < u.W; ++k) {
        double best = 0;
        auto it = std::lower_bound(vals.begin(), vals.end(), std::make_pair(double(k), -1.0));
        for (; it != vals.end() && it->first <= k + L; ++it) best = std::max(best, it->second);
        den += best * best;
    }
    if (den == 0) return std::numeric_limits<double>::infinity();
    return amalgam_norm(u) / std::sqrt(den);
}

UncertaintyResult uncertainty_experiment(const PeriodicSample& E, double alpha, double gamma, double L,
                                         const std::vector<double>& N_grid, std::size_t trials,
                                         std::uint64_t seed, int W) {
    if (!(gamma > 0)) throw DegenerateSet("thickness constant is zero");
    if (E.points.empty()) throw DegenerateSet("empty set sample");
    const std::size_t G = N_grid.size();
    std::vector<double> lr(G * trials, 0.0);
    parallel_for(G * trials, [&](std::size_t idx) {
        std::size_t gi = idx / trials, t = idx % trials;
        auto rng = make_rng(seed, 0x0c7 + gi, t);
        BandLimited u = random_bandlimited(N_grid[gi], W, rng);
        lr[idx] = std::log(uncertainty_ratio(u, E, L));
    });
    UncertaintyResult res;
    double C = 0;
    for (std::size_t gi = 0; gi < G; ++gi) {
        UncertaintyPoint p;
        p.N = N_grid[gi];
        p.ln_ratio = 0;
        for (std::size_t t = 0; t < trials; ++t) p.ln_ratio = std::max(p.ln_ratio, lr[gi * trials + t]);
        C = std::max(C, fit_uncertainty_C(p.N, L, alpha, gamma, p.ln_ratio));
        res.points.push_back(p);
    }
    res.fitted_C = C;
    for (auto& p : res.points) {
        p.ln_bound = uncertainty_bound_ln(C, p.N, L, alpha, gamma);
        p.pass = p.ln_ratio <= p.ln_bound * (1 + 1e-9) + 1e-12;
        if (!p.pass) ++res.violations;
    }
    return res;
}

}  // namespace obslab
