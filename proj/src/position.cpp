#include "obslab/position.hpp"

#include <algorithm>
#include <cmath>

namespace obslab {

Position Position::constant(double x) {
    Position p;
    if (x != 0.0) p.terms_.emplace_back(0.0, x);
    return p;
}

Position Position::term(double coef, double ln_mag) {
    Position p;
    if (coef != 0.0 && std::isfinite(ln_mag)) p.terms_.emplace_back(ln_mag, coef);
    return p;
}

void Position::add_term(double coef, double ln_mag) {
    auto it = std::lower_bound(terms_.begin(), terms_.end(), ln_mag,
                               [](const auto& t, double v) { return t.first < v; });
    if (it != terms_.end() && it->first == ln_mag) {
        it->second += coef;
        if (it->second == 0.0) terms_.erase(it);
    } else {
        terms_.insert(it, {ln_mag, coef});
    }
}

Position Position::operator+(const Position& o) const {
    Position r = *this;
    for (const auto& [m, c] : o.terms_) r.add_term(c, m);
    return r;
}

Position Position::operator-(const Position& o) const {
    Position r = *this;
    for (const auto& [m, c] : o.terms_) r.add_term(-c, m);
    return r;
}

Position Position::scaled(double s) const {
    Position r;
    if (s == 0.0) return r;
    r.terms_ = terms_;
    for (auto& t : r.terms_) t.second *= s;
    return r;
}

LogNum Position::value() const {
    std::vector<LogNum> parts;
    parts.reserve(terms_.size());
    for (const auto& [m, c] : terms_) parts.push_back(LogNum::from_real(c) * LogNum::from_ln(m));
    std::sort(parts.begin(), parts.end(),
              [](const LogNum& a, const LogNum& b) { return a.ln_mag < b.ln_mag; });
    LogNum s;
    for (const auto& p : parts) s += p;
    return s;
}

}  // namespace obslab
