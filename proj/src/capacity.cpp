#include "obslab/capacity.hpp"

#include "obslab/errors.hpp"
#include "obslab/parallel.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>

namespace obslab {

namespace {

const double kInf = std::numeric_limits<double>::infinity();

double ln_abs(const LogNum& x) { return x.is_zero() ? -kInf : x.ln_mag; }

double lse2(double a, double b) {
    double m = std::max(a, b);
    if (m == -kInf) return m;
    return m + std::log(std::exp(a - m) + std::exp(b - m));
}

// ln K for every pair, with the diagonal at delta_cell.
std::vector<double> ln_kernel(const AtomSet& A, const KernelSpec& K) {
    std::vector<double> lk(A.n * A.n);
    for (std::size_t i = 0; i < A.n; ++i)
        for (std::size_t j = 0; j < A.n; ++j) lk[i * A.n + j] = K.ln_K(A.ln_d(i, j), A.ln_cell);
    return lk;
}

}  // namespace

AtomSet AtomSet::from_points(const std::vector<std::array<double, 2>>& pts, int dim, double ln_cell) {
    if (dim != 1 && dim != 2) throw ParamError("atoms live in dimension 1 or 2");
    AtomSet a;
    a.n = pts.size();
    a.dim = dim;
    a.ln_cell = ln_cell;
    a.ln_dist.assign(a.n * a.n, -kInf);
    for (std::size_t i = 0; i < a.n; ++i)
        for (std::size_t j = 0; j < a.n; ++j) {
            if (i == j) continue;
            double dx = pts[i][0] - pts[j][0], dy = dim == 2 ? pts[i][1] - pts[j][1] : 0.0;
            double d = std::hypot(dx, dy);
            a.ln_dist[i * a.n + j] = d > 0 ? std::log(d) : -kInf;
        }
    return a;
}

AtomSet AtomSet::from_cantor(const CantorLevel& lv) {
    AtomSet a;
    a.n = lv.count();
    a.dim = 1;
    a.ln_cell = lv.ln_length();
    a.ln_dist.assign(a.n * a.n, -kInf);
    std::vector<Position> left(a.n);
    for (std::size_t j = 0; j < a.n; ++j) left[j] = lv.left(j);
    // Equal cell lengths: center distances equal left-endpoint distances.
    for (std::size_t i = 0; i < a.n; ++i)
        for (std::size_t j = i + 1; j < a.n; ++j)
            a.ln_dist[i * a.n + j] = a.ln_dist[j * a.n + i] = ln_abs(difference(left[j], left[i]));
    return a;
}

AtomSet AtomSet::subset(const std::vector<std::size_t>& idx) const {
    AtomSet s;
    s.n = idx.size();
    s.dim = dim;
    s.ln_cell = ln_cell;
    s.ln_dist.resize(s.n * s.n);
    for (std::size_t i = 0; i < s.n; ++i)
        for (std::size_t j = 0; j < s.n; ++j) s.ln_dist[i * s.n + j] = ln_d(idx[i], idx[j]);
    return s;
}

AtomSet AtomSet::with_cell(double lc) const {
    AtomSet s = *this;
    s.ln_cell = lc;
    return s;
}

double KernelSpec::ln_K(double ln_t, double ln_cell) const { return -g.ln_eval(std::max(ln_t, ln_cell)); }

LogNum energy(const DiscreteMeasure& mu, const KernelSpec& K) {
    const AtomSet& A = mu.atoms;
    if (mu.weights.size() != A.n) throw ParamError("weights and atoms differ in size");
    double total = 0;
    for (double w : mu.weights) {
        if (w < 0) throw ParamError("negative weight");
        total += w;
    }
    if (std::fabs(total - 1) > 1e-12) throw ParamError("weights must sum to 1");
    std::vector<double> terms;
    for (std::size_t i = 0; i < A.n; ++i)
        for (std::size_t j = 0; j < A.n; ++j)
            if (mu.weights[i] > 0 && mu.weights[j] > 0)
                terms.push_back(std::log(mu.weights[i]) + std::log(mu.weights[j]) +
                                K.ln_K(A.ln_d(i, j), A.ln_cell));
    double m = -kInf;
    for (double t : terms) m = std::max(m, t);
    double s = 0;
    for (double t : terms) s += std::exp(t - m);
    return LogNum::from_ln(m + std::log(s));
}

CapacityResult capacity_estimate(const AtomSet& atoms, const KernelSpec& K, double tol, std::uint64_t seed,
                                 std::size_t max_iter) {
    CapacityResult res;
    const std::size_t n = atoms.n;
    if (n == 0) throw ParamError("capacity needs at least one atom");
    std::vector<double> lk = ln_kernel(atoms, K);
    double m = -kInf;
    for (double v : lk) m = std::max(m, v);
    // A = K e^{-m}, entries in [0, 1].
    std::vector<double> A(n * n);
    for (std::size_t i = 0; i < n * n; ++i) A[i] = std::exp(lk[i] - m);

    std::vector<double> w(n, 1.0 / n);
    if (seed != 0) {
        auto rng = make_rng(seed, 0xca9, 0);
        std::exponential_distribution<double> ex(1.0);
        double s = 0;
        for (double& x : w) s += (x = ex(rng));
        for (double& x : w) x /= s;
    }
    std::vector<double> Aw(n);
    auto refresh = [&]() {
        for (std::size_t i = 0; i < n; ++i) {
            double s = 0;
            for (std::size_t j = 0; j < n; ++j) s += A[i * n + j] * w[j];
            Aw[i] = s;
        }
    };
    auto quad = [&]() {
        double s = 0;
        for (std::size_t i = 0; i < n; ++i) s += w[i] * Aw[i];
        return s;
    };
    refresh();
    double E = quad();
    double gap = kInf;
    std::size_t it = 0;
    for (; it < max_iter; ++it) {
        std::size_t s = 0, v = n;
        for (std::size_t i = 0; i < n; ++i) {
            if (Aw[i] < Aw[s]) s = i;
            if (w[i] > 0 && (v == n || Aw[i] > Aw[v])) v = i;
        }
        gap = 2 * (E - Aw[s]);
        if (gap <= tol * E) break;
        double away = 2 * (Aw[v] - E);
        if (gap >= away) {
            double dKw = Aw[s] - E, dKd = A[s * n + s] - 2 * Aw[s] + E;
            double g = dKd > 0 ? std::clamp(-dKw / dKd, 0.0, 1.0) : 1.0;
            for (std::size_t i = 0; i < n; ++i) {
                w[i] *= 1 - g;
                Aw[i] = (1 - g) * Aw[i] + g * A[i * n + s];
            }
            w[s] += g;
        } else {
            double gmax = w[v] < 1 ? w[v] / (1 - w[v]) : kInf;
            double dKw = E - Aw[v], dKd = E - 2 * Aw[v] + A[v * n + v];
            double g = dKd > 0 ? std::min(-dKw / dKd, gmax) : gmax;
            if (!std::isfinite(g)) break;
            for (std::size_t i = 0; i < n; ++i) {
                w[i] *= 1 + g;
                Aw[i] = (1 + g) * Aw[i] - g * A[i * n + v];
            }
            w[v] -= g;
            if (g == gmax || w[v] < 0) w[v] = 0;
        }
        if (it % 256 == 255) {
            double s2 = 0;
            for (double& x : w) s2 += (x = std::max(x, 0.0));
            for (double& x : w) x /= s2;
            refresh();
        }
        E = quad();
    }
    if (!(gap <= tol * E))
        throw NoConvergence(fmt::format("Frank-Wolfe gap {:.3g} above tol after {} iterations", gap / E, it));
    res.iterations = it;
    res.gap = gap / E;
    res.weights = w;
    res.energy = LogNum::from_ln(m + std::log(E));
    res.cap = LogNum::from_ln(-(m + std::log(E)));
    return res;
}

RefinedCapacity capacity_refined(const AtomSet& atoms, const KernelSpec& K, double tol) {
    RefinedCapacity r;
    r.at_cell = capacity_estimate(atoms, K, tol);
    r.at_quarter = capacity_estimate(atoms.with_cell(atoms.ln_cell - std::log(4.0)), K, tol);
    r.sensitivity = std::fabs(r.at_cell.cap.ln_mag - r.at_quarter.cap.ln_mag);
    return r;
}

namespace {

// ln g(t) = p ln t + rest(w) on the strict domain, w = ln ln(1/t). Keeping the
// power of t apart lets t^{d-1} cancel exactly between h and K.
struct SplitLn {
    double p;
    double rest;
};

SplitLn split_ln(const Gauge& g, double w) {
    switch (g.family()) {
    case GaugeFamily::HAlpha: return {0.0, -0.5 * w - g.alpha() * std::log(w)};
    case GaugeFamily::HAlphaBeta: return {0.0, -g.beta() * w - g.alpha() * std::log(w)};
    case GaugeFamily::FAlphaBeta: return {double(g.dim() - 1), -g.beta() * w - g.alpha() * std::log(w)};
    case GaugeFamily::PowerDelta: return {g.delta(), 0.0};
    case GaugeFamily::FEps: return {0.0, -w / (2 + g.eps())};
    }
    return {0.0, 0.0};
}

}  // namespace

IntegrabilityReport integrability(const Gauge& h, const Gauge& Kg, double ln_dhat) {
    using boost::math::quadrature::gauss_kronrod;
    if (!(ln_dhat <= std::min(h.ln_cutoff(), Kg.ln_cutoff())))
        throw ParamError("d_hat must lie below both cutoffs");
    // t = e^{-L}, L = e^w: int K dh = int K(t) h(t) |d ln h/d ln t| L dw.
    auto ln_u = [&](double w) {
        SplitLn a = split_ln(h, w), b = split_ln(Kg, w);
        double ln_t = -std::exp(w);
        double pw = a.p == b.p ? 0.0 : (a.p - b.p) * ln_t;
        return pw + a.rest - b.rest + std::log(std::fabs(h.elasticity(ln_t))) + w;
    };
    IntegrabilityReport r;
    for (double w = 1; w <= 512; w *= 2) {
        SplitLn a = split_ln(h, w), b = split_ln(Kg, w);
        r.ln_Kh.push_back((a.p == b.p ? 0.0 : -(a.p - b.p) * std::exp(w)) + a.rest - b.rest);
    }
    const double w0 = std::log(-ln_dhat), W = 600;
    const double a = (ln_u(W) - ln_u(W - 100)) / 100;
    if (a < -1e-2) {
        r.tail_exponent = a;
        r.finite = true;
    } else {
        double b = (ln_u(W) - ln_u(W / 2)) / std::log(2.0);
        r.tail_exponent = b;
        r.finite = b < -1 - 1e-3;
    }
    if (!r.finite) {
        r.value = kInf;
        return r;
    }
    double body = 0;
    for (double lo = w0; lo < W; lo += 1) {
        double hi = std::min(W, lo + 1);
        body += gauss_kronrod<double, 31>::integrate([&](double w) { return std::exp(ln_u(w)); }, lo, hi, 10, 1e-10);
    }
    double tail = r.tail_exponent < 0 && a < -1e-2 ? std::exp(ln_u(W)) / -a
                                                   : std::exp(ln_u(W)) * W / (-r.tail_exponent - 1);
    r.value = body + tail;
    return r;
}

ContentCapacityReport content_capacity_check(const CantorSpec& spec, int depth_min, int depth_max, const Gauge& g,
                                             double eps_shift) {
    if (depth_min < 0 || depth_max < depth_min) throw ParamError("bad depth range");
    ContentCapacityReport rep;
    std::optional<Gauge> shifted;
    if (g.family() == GaugeFamily::FAlphaBeta && g.alpha() >= 1 + eps_shift && g.beta() >= 1 && eps_shift > 0) {
        rep.direction_ii = true;
        shifted = Gauge::f_alpha_beta(g.alpha() - 1 - eps_shift, g.beta() - 1, g.dim());
        double ln_dhat = std::min(std::log(spec.b - spec.a), -3.0);
        rep.integrability = integrability(g, *shifted, ln_dhat);
    }
    rep.min_ratio_ln = kInf;
    for (int depth = depth_min; depth <= depth_max; ++depth) {
        CantorLevel lv = build_cantor(spec, depth);
        AtomSet atoms = AtomSet::from_cantor(lv);
        ContentCapacityRow row;
        row.depth = depth;
        row.content = content_upper(lv, g);
        row.cap = capacity_estimate(atoms, KernelSpec{g}).cap;
        row.slack = std::max(0.0, std::exp(row.cap.ln_mag - std::log(2.0) - row.content.ln_mag) - 1);
        rep.max_slack = std::max(rep.max_slack, row.slack);
        if (shifted) {
            row.cap_shifted = capacity_estimate(atoms, KernelSpec{*shifted}).cap;
            row.ratio_ln = row.cap_shifted.ln_mag - row.content.ln_mag;
            rep.min_ratio_ln = std::min(rep.min_ratio_ln, row.ratio_ln);
        }
        rep.rows.push_back(row);
    }
    rep.holds_i = rep.max_slack <= 0.1;
    if (!shifted) rep.min_ratio_ln = 0;
    return rep;
}

Factor1D Factor1D::from_cantor(const CantorLevel& lv) {
    Factor1D f;
    f.ln_len = lv.ln_length();
    for (std::size_t j = 0; j < lv.count(); ++j) f.left.push_back(lv.left(j));
    return f;
}

Factor1D Factor1D::grid(double a, double side, std::size_t M) {
    if (!(side > 0) || M == 0) throw ParamError("grid needs positive side and cells");
    Factor1D f;
    f.ln_len = std::log(side / M);
    for (std::size_t j = 0; j < M; ++j) f.left.push_back(Position::constant(a + side * j / M));
    return f;
}

SlicingResult slicing_experiment(const Factor1D& X, const Factor1D& Y, std::array<double, 2> center, double r,
                                 double alpha, double beta, std::size_t offsets, std::uint64_t seed, double k,
                                 double c) {
    if (!(r > 0 && r <= std::exp(-3.0) / 2)) throw ParamError("slicing needs 0 < r <= e^{-3}/2");
    if (!(k > 0)) throw ParamError("k must be positive");
    const Gauge h = Gauge::h_alpha_beta(alpha, beta);
    const Gauge F = Gauge::f_alpha_beta(alpha, beta, 2);
    const double len = std::exp(std::max(X.ln_len, Y.ln_len));
    for (const auto& xl : X.left)
        for (const auto& yl : Y.left)
            for (double dx : {0.0, 1.0})
                for (double dy : {0.0, 1.0}) {
                    double px = xl.approx() + dx * std::exp(X.ln_len) - center[0];
                    double py = yl.approx() + dy * std::exp(Y.ln_len) - center[1];
                    if (std::hypot(px, py) > r * (1 + 1e-12)) throw DegenerateSet("E2 is not inside B_r");
                }
    (void)len;

    SlicingResult res;
    res.k = k;
    const std::size_t nx = X.left.size(), ny = Y.left.size();
    if (nx > 0 && ny > 0) {
        AtomSet E2;
        E2.n = nx * ny;
        E2.dim = 2;
        E2.ln_cell = std::max(X.ln_len, Y.ln_len);
        E2.ln_dist.assign(E2.n * E2.n, -kInf);
        std::vector<double> lx(nx * nx, -kInf), ly(ny * ny, -kInf);
        for (std::size_t i = 0; i < nx; ++i)
            for (std::size_t j = 0; j < nx; ++j)
                if (i != j) lx[i * nx + j] = ln_abs(difference(X.left[i], X.left[j]));
        for (std::size_t i = 0; i < ny; ++i)
            for (std::size_t j = 0; j < ny; ++j)
                if (i != j) ly[i * ny + j] = ln_abs(difference(Y.left[i], Y.left[j]));
        for (std::size_t a = 0; a < E2.n; ++a)
            for (std::size_t b = 0; b < E2.n; ++b) {
                if (a == b) continue;
                double dx = lx[(a % nx) * nx + b % nx], dy = ly[(a / nx) * ny + b / nx];
                E2.ln_dist[a * E2.n + b] = 0.5 * lse2(2 * dx, 2 * dy);
            }
        res.cap_F = capacity_estimate(E2, KernelSpec{F}).cap;
    }
    res.threshold = LogNum::from_real(k / r) * res.cap_F;

    // Slice capacities per row of Y. Every row carries the same copy of X,
    // but each is computed on its own.
    AtomSet slice;
    slice.n = nx;
    slice.dim = 1;
    slice.ln_cell = X.ln_len;
    slice.ln_dist.assign(nx * nx, -kInf);
    for (std::size_t i = 0; i < nx; ++i)
        for (std::size_t j = 0; j < nx; ++j)
            if (i != j) slice.ln_dist[i * nx + j] = ln_abs(difference(X.left[i], X.left[j]));
    std::vector<LogNum> row_cap(ny);
    parallel_for(ny, [&](std::size_t j) { row_cap[j] = nx ? capacity_estimate(slice, KernelSpec{h}).cap : LogNum{}; });

    // Strata: the ny rows, then the gaps in [cy - r, cy + r].
    const double row_len = std::exp(Y.ln_len);
    const std::size_t per_row = ny ? std::max<std::size_t>(2, offsets / 2 / ny) : 0;
    const std::size_t gap_count = std::max<std::size_t>(2, offsets > per_row * ny ? offsets - per_row * ny : 2);
    auto rng = make_rng(seed, 0x511ce, 0);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    std::vector<std::size_t> cal_n(ny + 1, 0), val_n(ny + 1, 0), cal_good(ny + 1, 0), val_good(ny + 1, 0);
    for (std::size_t j = 0; j < ny; ++j) {
        for (std::size_t q = 0; q < per_row; ++q) {
            SliceRow row;
            row.stratum = j;
            row.offset = Y.left[j].approx() + U(rng) * row_len;
            row.slice_cap = row_cap[j];
            row.good = !row.slice_cap.is_zero() && row.slice_cap >= res.threshold;
            row.calibration = q % 2 == 0;
            res.rows.push_back(row);
        }
    }
    for (std::size_t q = 0; q < gap_count; ++q) {
        SliceRow row;
        row.stratum = ny;
        for (;;) {
            row.offset = center[1] - r + 2 * r * U(rng);
            bool inside = false;
            for (std::size_t j = 0; j < ny && !inside; ++j) {
                double lo = Y.left[j].approx();
                inside = row.offset >= lo && row.offset <= lo + row_len;
            }
            if (!inside) break;
        }
        row.good = false;  // empty slice
        row.calibration = q % 2 == 0;
        res.rows.push_back(row);
    }
    for (const auto& row : res.rows) {
        auto& n = row.calibration ? cal_n : val_n;
        auto& g = row.calibration ? cal_good : val_good;
        ++n[row.stratum];
        if (row.good) ++g[row.stratum];
    }
    // Stratum lengths: rows have length e^{ln_len}; the gap stratum holds the rest.
    LogNum rows_total = LogNum::from_real(static_cast<double>(ny)) * LogNum::from_ln(Y.ln_len);
    res.projection = rows_total;
    LogNum gap_len = LogNum::from_real(2 * r) - rows_total;
    auto estimate = [&](const std::vector<std::size_t>& n, const std::vector<std::size_t>& g) {
        LogNum s;
        for (std::size_t j = 0; j <= ny; ++j) {
            if (n[j] == 0 || g[j] == 0) continue;
            LogNum lenj = j < ny ? LogNum::from_ln(Y.ln_len) : gap_len;
            s += lenj * LogNum::from_real(static_cast<double>(g[j]) / n[j]);
        }
        return s;
    };
    res.good_cal = estimate(cal_n, cal_good);
    res.good_val = estimate(val_n, val_good);
    LogNum h2r = h.eval(LogNum::from_real(2 * r));
    if (c <= 0) c = res.cap_F.is_zero() ? 0.0 : (res.good_cal * h2r / res.cap_F).to_real();
    res.c = c;
    res.rhs = LogNum::from_real(c) * res.cap_F / h2r;
    if (!res.rhs.is_zero() && res.good_val < res.rhs * LogNum::from_real(1 - 1e-12)) res.violations = 1;
    return res;
}

}  // namespace obslab
