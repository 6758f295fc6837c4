#include "obslab/lemniscate.hpp"

#include "obslab/errors.hpp"
#include "obslab/parallel.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace obslab {

namespace {

constexpr double kLn4 = 1.3862943611198906;

// int_{ln a}^{ln b} f(e^u) du / f(H), split at the cutoff. Below the
// cutoff the variable v = ln(-u) keeps the integrand smooth over very
// long ranges of u.
double scaled_log_integral(const Gauge& g, double ln_a, double ln_b, double ln_fH) {
    using boost::math::quadrature::gauss_kronrod;
    double total = 0, err_total = 0;
    double cut = g.ln_cutoff();
    auto check = [](double value, double err) {
        if (err > 1e-9 * std::fabs(value) + 1e-300)
            throw QuadratureError(fmt::format("quadrature error {} on value {}", err, value));
    };
    if (ln_b > cut) {
        double lo = std::max(ln_a, cut);
        double err = 0;
        double v = gauss_kronrod<double, 61>::integrate(
            [&](double u) { return std::exp(g.ln_eval(u) - ln_fH); }, lo, ln_b, 15, 1e-12, &err);
        check(v, err);
        total += v;
        err_total += err;
        ln_b = lo;
    }
    if (ln_a < ln_b) {
        double va = std::log(-ln_b), vb = std::log(-ln_a);
        double err = 0;
        double v = gauss_kronrod<double, 61>::integrate(
            [&](double w) { return std::exp(w + g.ln_eval(-std::exp(w)) - ln_fH); }, va, vb, 15,
            1e-12, &err);
        check(v, err);
        total += v;
        err_total += err;
    }
    return total;
}

}  // namespace

int BallCover::total_multiplicity() const {
    int s = 0;
    for (const auto& b : balls) s += b.multiplicity;
    return s;
}

std::vector<LogNum> cartan_radii(const Gauge& g, const LogNum& H, int n) {
    if (n < 1) throw ParamError("n must be at least 1");
    if (H.sign <= 0) throw DomainError("H must be positive");
    double ln_fH = g.eval(H).ln_mag;
    std::vector<LogNum> r(static_cast<std::size_t>(n));
    for (int j = 1; j < n; ++j)
        r[j - 1] = LogNum::from_ln(g.ln_inverse(ln_fH + std::log(double(j) / n)) - kLn4);
    r[n - 1] = LogNum::from_ln(H.ln_mag - kLn4);
    return r;
}

LogNum lubinsky_threshold(const Gauge& g, const LogNum& H, int n) {
    if (n < 1) throw ParamError("n must be at least 1");
    if (H.sign <= 0) throw DomainError("H must be positive");
    double ln_fH = g.eval(H).ln_mag;
    double integral = 0;
    if (n > 1) {
        double ln_t = g.ln_inverse(ln_fH - std::log(double(n)));
        integral = scaled_log_integral(g, ln_t, H.ln_mag, ln_fH);
    }
    return LogNum::from_ln(-n * kLn4 + n * (H.ln_mag - integral));
}

VerifyReport verify_cover(const Polynomial& p, const LogNum& threshold, const BallCover& cover,
                          std::size_t samples, std::uint64_t seed) {
    VerifyReport rep;
    const auto& z = p.roots();
    const std::size_t n = z.size();
    const double T = threshold.ln_mag;
    if (n == 0 || samples == 0) return rep;
    const double lnA = std::log(std::abs(p.leading()));

    // Radius around a root where the sublevel boundary sits.
    std::vector<double> rho_star(n);
    double ln_pad = std::log(2.0) + (T - lnA) / double(n);
    for (std::size_t k = 0; k < n; ++k) {
        int mult = 0;
        double s = 0;
        for (std::size_t j = 0; j < n; ++j) {
            double d = std::abs(z[k] - z[j]);
            if (d == 0) ++mult;
            else s += std::log(d);
        }
        rho_star[k] = std::min((T - lnA - s) / mult, ln_pad);
    }
    double re_lo = z[0].real(), re_hi = re_lo, im_lo = z[0].imag(), im_hi = im_lo;
    for (const auto& r : z) {
        re_lo = std::min(re_lo, r.real());
        re_hi = std::max(re_hi, r.real());
        im_lo = std::min(im_lo, r.imag());
        im_hi = std::max(im_hi, r.imag());
    }
    double pad = std::exp(ln_pad);
    re_lo -= pad, re_hi += pad, im_lo -= pad, im_hi += pad;

    auto covered = [&](std::size_t k, double ln_r, double th) {
        for (const auto& b : cover.balls) {
            if (b.diameter.sign <= 0) continue;
            double ln_rad = b.diameter.ln_mag - std::numbers::ln2;
            if (ln_abs_offset(z[k] - b.center, ln_r, th) <= ln_rad) return true;
        }
        return false;
    };

    constexpr std::size_t kChunk = 2048, kBatch = 16;
    struct ChunkOut {
        std::size_t hits = 0;
        std::vector<CoverViolation> bad;
    };
    const std::size_t max_chunks = std::max<std::size_t>(1, 50 * samples / kChunk);
    for (std::size_t c0 = 0; c0 < max_chunks && rep.sublevel_hits < samples; c0 += kBatch) {
        std::size_t nb = std::min(kBatch, max_chunks - c0);
        std::vector<ChunkOut> outs(nb);
        parallel_for(nb, [&](std::size_t b) {
            auto rng = make_rng(seed, 0x1e3, c0 + b);
            std::uniform_real_distribution<double> U(0.0, 1.0);
            std::uniform_int_distribution<std::size_t> pick(0, n - 1);
            auto& out = outs[b];
            for (std::size_t i = 0; i < kChunk; ++i) {
                std::size_t idx = (c0 + b) * kChunk + i;
                std::size_t k;
                double ln_r, th;
                double u = U(rng);
                if (u < 0.2) {
                    cplx q(re_lo + (re_hi - re_lo) * U(rng), im_lo + (im_hi - im_lo) * U(rng));
                    k = 0;
                    for (std::size_t j = 1; j < n; ++j)
                        if (std::abs(q - z[j]) < std::abs(q - z[k])) k = j;
                    cplx w = q - z[k];
                    if (w == cplx(0.0)) continue;
                    ln_r = std::log(std::abs(w));
                    th = std::arg(w);
                } else {
                    k = pick(rng);
                    th = 2 * std::numbers::pi * U(rng);
                    double hi = u < 0.7 ? rho_star[k] + 1.0 : ln_pad + 1.0;
                    double lo = rho_star[k] - 6.0;
                    ln_r = lo + (hi - lo) * U(rng);
                }
                double lp = p.ln_abs_near(k, ln_r, th);
                if (lp > T) continue;
                ++out.hits;
                if (!covered(k, ln_r, th)) out.bad.push_back({idx, k, ln_r, th, lp});
            }
        });
        for (auto& o : outs) {
            rep.sublevel_hits += o.hits;
            for (auto& v : o.bad) rep.violations.push_back(v);
        }
        rep.proposals += nb * kChunk;
    }
    return rep;
}

BallCover cartan_cover(const Polynomial& p, const std::vector<LogNum>& radii,
                       std::size_t verify_samples, std::uint64_t seed) {
    const auto& z = p.roots();
    const int n = p.degree();
    if (static_cast<int>(radii.size()) != n) throw ParamError("need one radius per root");
    for (int j = 1; j < n; ++j)
        if (!(radii[j - 1] < radii[j])) throw ParamError("radii must be strictly increasing");

    BallCover cover;
    std::vector<std::size_t> rest(static_cast<std::size_t>(n));
    std::iota(rest.begin(), rest.end(), 0);
    while (!rest.empty()) {
        const std::size_t m = rest.size();
        std::vector<cplx> cand;
        for (std::size_t a = 0; a < m; ++a) {
            cand.push_back(z[rest[a]]);
            for (std::size_t b = a + 1; b < m; ++b) cand.push_back(0.5 * (z[rest[a]] + z[rest[b]]));
        }
        std::size_t best = 0;
        cplx center = cand[0];
        std::vector<double> d(m);
        for (const auto& c : cand) {
            for (std::size_t i = 0; i < m; ++i) d[i] = std::log(std::abs(z[rest[i]] - c));
            std::sort(d.begin(), d.end());
            for (std::size_t lam = m; lam > best; --lam) {
                if (d[lam - 1] <= radii[lam - 1].ln_mag) {
                    best = lam;
                    center = c;
                    break;
                }
            }
            if (best == m) break;
        }
        std::stable_sort(rest.begin(), rest.end(), [&](std::size_t u, std::size_t v) {
            return std::abs(z[u] - center) < std::abs(z[v] - center);
        });
        cover.balls.push_back(
            {center, LogNum::from_ln(radii[best - 1].ln_mag + kLn4), static_cast<int>(best)});
        rest.erase(rest.begin(), rest.begin() + static_cast<std::ptrdiff_t>(best));
    }

    if (verify_samples > 0) {
        LogNum thr = LogNum::one();
        for (const auto& r : radii) thr *= r;
        auto rep = verify_cover(p, thr, cover, verify_samples, seed);
        if (!rep.violations.empty())
            throw CoverageFailure(fmt::format("{} sublevel samples outside the Cartan cover",
                                              rep.violations.size()));
    }
    return cover;
}

LogNum content_of_cover(const BallCover& cover, const Gauge& g) {
    LogNum s = LogNum::zero();
    for (const auto& b : cover.balls) s += g.eval(b.diameter);
    return s;
}

double lemniscate_shape(double alpha, const LogNum& delta, int n) {
    if (n < 1) throw ParamError("n must be at least 1");
    if (delta.sign <= 0 || delta.ln_mag >= 0) throw DomainError("delta must lie in (0, 1)");
    double L4 = -(delta.ln_mag + kLn4);
    if (!(L4 > 0)) throw DomainError("log(1/(4 delta)) must be positive");
    return std::pow(L4, -0.5) * std::sqrt(double(n)) *
           std::pow(std::log(n + std::numbers::e), -alpha / 3.0);
}

LemniscateBound lemniscate_bound_rhs(double alpha, const LogNum& delta, int n) {
    LemniscateBound out;
    out.rhs_shape = lemniscate_shape(alpha, delta, n);
    auto& bd = out.breakdown;
    bd.n = n;
    bd.rhs_shape = out.rhs_shape;
    bd.threshold = LogNum::from_ln(n * delta.ln_mag);

    Gauge h = Gauge::h_alpha(alpha);
    const double target = bd.threshold.ln_mag;
    auto F = [&](double lnH) { return lubinsky_threshold(h, LogNum::from_ln(lnH), n).ln_mag; };
    double hi = -3.0;
    if (F(hi) < target) throw NoRoot("delta^n above the threshold range on (0, e^-3]");
    double lo = -6.0;
    while (F(lo) > target) {
        hi = lo;
        lo *= 2;
        if (lo < -1e300) throw NoRoot("no H reaches delta^n");
    }
    for (int it = 0; it < 200 && hi - lo > 1e-12 * std::fabs(lo); ++it) {
        double mid = 0.5 * (lo + hi);
        (F(mid) > target ? hi : lo) = mid;
    }
    double lnH = 0.5 * (lo + hi);
    bd.H = LogNum::from_ln(lnH);
    double ln_t = h.ln_inverse(h.ln_eval(lnH) - std::log(double(n)));
    double llH = std::log(-lnH), llt = std::log(-ln_t);
    double ln_n2 = 2 * std::log(double(n));
    bd.xi = 2 * alpha * std::log(llH / llt);
    bd.A = llH / (ln_n2 + llH + bd.xi);
    bd.xi_lo = -(2 * alpha / (2 * alpha + 1)) * ln_n2;
    bd.xi_hi = 0;
    return out;
}

namespace {

struct ClusterCover {
    LogNum content;
    std::vector<CoverBall> balls;
};

ClusterCover single_ball(const std::vector<cplx>& pts, double ln_d, const Gauge& g) {
    cplx c = 0;
    for (const auto& q : pts) c += q;
    c /= double(pts.size());
    double R = 0;
    for (const auto& q : pts) R = std::max(R, std::abs(q - c));
    if (pts.size() == 1) c = pts[0], R = 0;
    LogNum rad = LogNum::from_real(R) + LogNum::from_ln(ln_d);
    LogNum diam = rad * LogNum::from_real(2.0);
    return {g.eval(diam), {{c, diam, static_cast<int>(pts.size())}}};
}

// pts: roots of a cluster; the relevant sublevel set lies in
// {prod |z - q| <= e^{m ln_d}} intersected with the discs D(q, e^{ln_d}).
ClusterCover cover_cluster(const std::vector<cplx>& pts, double ln_d, const Gauge& g, int depth) {
    const std::size_t m = pts.size();
    ClusterCover whole = single_ball(pts, ln_d, g);
    if (m == 1 || depth > 64) return whole;

    const double two_d = 2.0 * std::exp(ln_d);
    std::vector<std::size_t> parent(m);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i + 1; j < m; ++j)
            if (std::abs(pts[i] - pts[j]) <= two_d) parent[find(i)] = find(j);
    std::vector<std::vector<std::size_t>> groups;
    std::vector<long> slot(m, -1);
    for (std::size_t i = 0; i < m; ++i) {
        std::size_t r = find(i);
        if (slot[r] < 0) {
            slot[r] = static_cast<long>(groups.size());
            groups.emplace_back();
        }
        groups[slot[r]].push_back(i);
    }
    if (groups.size() == 1) return whole;

    ClusterCover split{LogNum::zero(), {}};
    const LogNum d = LogNum::from_ln(ln_d);
    for (const auto& gr : groups) {
        std::vector<bool> in(m, false);
        for (auto i : gr) in[i] = true;
        double ln_eta = double(m) * ln_d;
        for (std::size_t k = 0; k < m; ++k) {
            if (in[k]) continue;
            double dmin = std::numeric_limits<double>::infinity();
            for (auto j : gr) dmin = std::min(dmin, std::abs(pts[k] - pts[j]));
            ln_eta -= (LogNum::from_real(dmin) - d).ln_mag;
        }
        std::vector<cplx> sub;
        for (auto i : gr) sub.push_back(pts[i]);
        auto c = cover_cluster(sub, ln_eta / double(sub.size()), g, depth + 1);
        split.content += c.content;
        split.balls.insert(split.balls.end(), c.balls.begin(), c.balls.end());
    }
    return split.content < whole.content ? split : whole;
}

}  // namespace

LogNum lemniscate_content(const Polynomial& p, const LogNum& delta, const Gauge& g,
                          BallCover* cover_out) {
    if (delta.sign <= 0) throw DomainError("delta must be positive");
    if (p.degree() == 0) {
        if (cover_out) cover_out->balls.clear();
        return LogNum::zero();
    }
    double ln_d = delta.ln_mag - std::log(std::abs(p.leading())) / p.degree();
    auto c = cover_cluster(p.roots(), ln_d, g, 0);
    if (cover_out) cover_out->balls = c.balls;
    return c.content;
}

}  // namespace obslab
