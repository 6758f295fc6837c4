#include "obslab/fractal.hpp"

#include "obslab/errors.hpp"
#include "obslab/parallel.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace obslab {

namespace {
const double kLn2 = std::log(2.0);
}

CantorSpec CantorSpec::gauge_rule(const Gauge& g, double a, double b, int shift) {
    CantorSpec s;
    s.a = a;
    s.b = b;
    s.rule_gauge = g;
    s.level_shift = shift;
    return s;
}

CantorSpec CantorSpec::explicit_rule(std::vector<double> ln_lengths, double a, double b) {
    CantorSpec s;
    s.a = a;
    s.b = b;
    s.explicit_ln_lengths = std::move(ln_lengths);
    return s;
}

CantorLevel build_cantor(const CantorSpec& spec, int depth) {
    if (depth < 0) throw ParamError("depth must be nonnegative");
    if (!(spec.b > spec.a)) throw ParamError("base interval must have b > a");
    if (depth > 30) throw ParamError("depth above 30 is not supported");
    CantorLevel lv;
    lv.depth_ = depth;
    lv.a_ = spec.a;
    lv.b_ = spec.b;
    lv.ln_c_.push_back(std::log(spec.b - spec.a));
    for (int k = 1; k <= depth; ++k) {
        double lc;
        if (spec.rule_gauge) {
            lc = spec.rule_gauge->ln_inverse(-(k + spec.level_shift) * kLn2);
        } else {
            if (static_cast<std::size_t>(k) > spec.explicit_ln_lengths.size())
                throw ParamError(fmt::format("explicit rule has no length for level {}", k));
            lc = spec.explicit_ln_lengths[k - 1];
        }
        double prev = lv.ln_c_.back();
        bool ok = (k == 1) ? lc <= prev - kLn2 : lc < prev - kLn2;
        if (!ok)
            throw SeparationError(
                fmt::format("level {}: ln c = {} does not fit twice into ln c = {}", k, lc, prev));
        lv.ln_c_.push_back(lc);
    }
    return lv;
}

Position CantorLevel::left(std::size_t j) const {
    Position p = Position::constant(a_);
    for (int i = 1; i <= depth_; ++i) {
        if ((j >> (depth_ - i)) & 1u) {
            Position prev = i == 1 ? Position::constant(b_ - a_) : Position::term(1.0, ln_c_[i - 1]);
            p = p + prev + Position::term(-1.0, ln_c_[i]);
        }
    }
    return p;
}

Position CantorLevel::right(std::size_t j) const {
    if (depth_ == 0) return Position::constant(b_);
    return left(j) + Position::term(1.0, ln_c_.back());
}

std::vector<Interval> CantorLevel::intervals(const Position& shift) const {
    std::vector<Interval> out;
    out.reserve(count());
    double mass = std::ldexp(1.0, -depth_);
    for (std::size_t j = 0; j < count(); ++j)
        out.push_back({left(j) + shift, right(j) + shift, ln_length(), mass});
    return out;
}

std::vector<double> CantorLevel::sample_points(double scale, double offset) const {
    std::vector<double> pts;
    pts.reserve(3 * count());
    for (std::size_t j = 0; j < count(); ++j) {
        Position l = left(j), r = right(j);
        pts.push_back(offset + scale * l.approx());
        pts.push_back(offset + scale * (l + r).scaled(0.5).approx());
        pts.push_back(offset + scale * r.approx());
    }
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
}

LogNum content_upper(const CantorLevel& level, const Gauge& g) {
    return LogNum::from_ln(level.depth() * kLn2 + g.ln_eval(level.ln_length()));
}

namespace {

struct CenterResult {
    double best_ln_ratio = -std::numeric_limits<double>::infinity();
    std::size_t tested = 0;
    std::vector<Ball> balls;
};

void keep_top(std::vector<Ball>& balls, std::size_t keep) {
    std::stable_sort(balls.begin(), balls.end(), [](const Ball& x, const Ball& y) {
        return std::log(x.mass) - x.ln_gauge > std::log(y.mass) - y.ln_gauge;
    });
    if (balls.size() > keep) balls.resize(keep);
}

}  // namespace

FrostmanCertificate frostman_lower(const std::vector<Interval>& pieces, const Gauge& g,
                                   MassModel model, std::size_t keep_worst) {
    FrostmanCertificate cert;
    if (pieces.empty()) return cert;
    const std::size_t n = pieces.size();

    std::vector<Position> centers;
    double ln_len_min = pieces[0].ln_len;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& p = pieces[i];
        ln_len_min = std::min(ln_len_min, p.ln_len);
        cert.total_mass += p.mass;
        centers.push_back(p.left);
        centers.push_back((p.left + p.right).scaled(0.5));
        centers.push_back(p.right);
        if (i + 1 < n) centers.push_back((p.right + pieces[i + 1].left).scaled(0.5));
    }
    const LogNum r_min = LogNum::from_ln(ln_len_min - kLn2);

    std::vector<CenterResult> results(centers.size());
    parallel_for(centers.size(), [&](std::size_t ci) {
        const Position& x = centers[ci];
        CenterResult& res = results[ci];
        std::vector<LogNum> dl(n), dr(n), len(n), nearv(n);
        for (std::size_t i = 0; i < n; ++i) {
            dl[i] = difference(x, pieces[i].left);
            dr[i] = difference(x, pieces[i].right);
            len[i] = LogNum::from_ln(pieces[i].ln_len);
            if (dl[i].sign < 0) nearv[i] = -dl[i];
            else if (dr[i].sign <= 0) nearv[i] = LogNum::zero();
            else nearv[i] = dr[i];
        }
        double cx = x.approx();
        auto consider = [&](const LogNum& r, double mass) {
            if (mass <= 0) return;
            double lg = g.ln_eval(r.ln_mag + kLn2);
            double lr = std::log(mass) - lg;
            ++res.tested;
            if (lr > res.best_ln_ratio) res.best_ln_ratio = lr;
            res.balls.push_back({cx, r.ln_mag, mass, lg});
            if (res.balls.size() > 4 * keep_worst + 16) keep_top(res.balls, keep_worst);
        };

        if (model == MassModel::LimitCounting) {
            std::vector<std::size_t> order(n);
            for (std::size_t i = 0; i < n; ++i) order[i] = i;
            std::stable_sort(order.begin(), order.end(), [&](std::size_t u, std::size_t v) {
                return nearv[u] < nearv[v];
            });
            double mass = 0;
            std::size_t m = 0;
            while (m < n) {
                LogNum r = max(nearv[order[m]], r_min);
                while (m < n && nearv[order[m]] <= r) mass += pieces[order[m++]].mass;
                consider(r, mass);
            }
        } else {
            std::vector<LogNum> radii;
            for (std::size_t i = 0; i < n; ++i) {
                if (nearv[i].sign > 0) radii.push_back(nearv[i]);
                LogNum far = max(dl[i].abs(), dr[i].abs());
                radii.push_back(far);
                if (nearv[i].is_zero())
                    for (int j = 1; j <= 30; ++j)
                        radii.push_back(LogNum::from_ln(pieces[i].ln_len - j * kLn2));
            }
            for (const auto& r : radii) {
                if (r.is_zero()) continue;
                double mass = 0;
                for (std::size_t i = 0; i < n; ++i) {
                    LogNum ov = min(r, -dr[i]) + min(r, dl[i]);
                    if (ov.sign <= 0) continue;
                    ov = min(ov, len[i]);
                    mass += pieces[i].mass * std::exp(ov.ln_mag - len[i].ln_mag);
                }
                consider(r, mass);
            }
        }
        keep_top(res.balls, keep_worst);
    });

    double best = -std::numeric_limits<double>::infinity();
    for (auto& r : results) {
        best = std::max(best, r.best_ln_ratio);
        cert.balls_tested += r.tested;
        cert.worst_balls.insert(cert.worst_balls.end(), r.balls.begin(), r.balls.end());
    }
    keep_top(cert.worst_balls, keep_worst);
    cert.A2_hat = LogNum::from_ln(best);
    cert.lower_bound = LogNum::from_real(cert.total_mass) / cert.A2_hat;
    return cert;
}

FrostmanCertificate frostman_lower(const CantorLevel& level, const Gauge& g, MassModel model) {
    return frostman_lower(level.intervals(), g, model);
}

ThicknessReport thickness_report(const PeriodicSet& set, const Gauge& g, double L,
                                 const std::vector<double>& x_samples) {
    if (!(L > 0)) throw ParamError("window length must be positive");
    if (set.cells.empty()) throw ParamError("periodic set needs at least one cell");
    ThicknessReport rep;
    rep.gamma_hat = std::numeric_limits<double>::infinity();
    const long P = static_cast<long>(set.cells.size());
    for (double x : x_samples) {
        Position lo = Position::constant(x);
        Position hi = Position::constant(x + L);
        std::vector<Interval> pieces;
        for (long m = static_cast<long>(std::floor(x)) - 1; m <= static_cast<long>(std::ceil(x + L));
             ++m) {
            const auto& cell = set.cells[((m % P) + P) % P];
            if (!cell) continue;
            for (auto iv : cell->intervals(Position::constant(static_cast<double>(m)))) {
                const Position& right = iv.right;
                LogNum from_lo = difference(iv.left, lo);
                LogNum to_hi = difference(hi, right);
                if (from_lo.sign >= 0 && to_hi.sign >= 0) {
                    pieces.push_back(iv);
                    continue;
                }
                if (set.model != MassModel::Uniform) continue;
                Position l = from_lo.sign >= 0 ? iv.left : lo;
                Position r = to_hi.sign >= 0 ? right : hi;
                LogNum w = difference(r, l);
                if (w.sign <= 0) continue;
                pieces.push_back({l, r, w.ln_mag, iv.mass * std::exp(w.ln_mag - iv.ln_len)});
            }
        }
        double gamma = 0;
        if (!pieces.empty()) gamma = frostman_lower(pieces, g, set.model).lower_bound.to_real() / L;
        rep.per_window.push_back(gamma);
        if (gamma < rep.gamma_hat) {
            rep.gamma_hat = gamma;
            rep.worst_window = x;
        }
    }
    if (x_samples.empty()) rep.gamma_hat = 0;
    return rep;
}

}  // namespace obslab
