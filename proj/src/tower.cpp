#include "obslab/tower.hpp"

#include "obslab/errors.hpp"

#include <fmt/format.h>

#include <cmath>
#include <limits>

namespace obslab {

namespace {

constexpr double kLnCap = 709.0;
const double kCap = std::exp(kLnCap);

Tower canonical(int sign, int h, double x) {
    if (sign == 0 || x == 0) return {};
    while (x > kCap) {
        x = std::log(x);
        ++h;
    }
    while (h > 0 && x <= kLnCap) {
        x = std::exp(x);
        --h;
    }
    return {sign, h, x};
}

}  // namespace

Tower Tower::from_double(double v) {
    if (std::isnan(v)) throw DomainError("tower from NaN");
    if (std::isinf(v)) throw DomainError("tower from infinity");
    if (v == 0) return {};
    return canonical(v > 0 ? 1 : -1, 0, std::fabs(v));
}

Tower Tower::exp_of(const Tower& t) {
    if (t.sign == 0) return from_double(1.0);
    if (t.sign < 0) {
        if (t.height > 0) return {};  // e^{-huge} underflows to 0
        return from_double(std::exp(-t.x));
    }
    return canonical(1, t.height + 1, t.x);
}

Tower Tower::log() const {
    if (sign <= 0) throw DomainError("tower log of a non-positive value");
    if (height == 0) return from_double(std::log(x));
    return canonical(1, height - 1, x);
}

Tower Tower::scaled(double c) const {
    if (!(c > 0)) throw DomainError("tower scale must be positive");
    if (height == 0) return canonical(sign, 0, x * c);
    if (height == 1) return canonical(sign, 1, x + std::log(c));
    return *this;
}

double Tower::to_double() const {
    if (height == 0) return sign * x;
    return sign * std::numeric_limits<double>::infinity();
}

std::string Tower::str() const {
    if (height == 0) return fmt::format("{:.17g}", sign * x);
    return fmt::format("{}exp^{}({:.17g})", sign < 0 ? "-" : "", height, x);
}

int compare(const Tower& a, const Tower& b) {
    if (a.sign != b.sign) return a.sign < b.sign ? -1 : 1;
    if (a.sign == 0) return 0;
    int mag = 0;
    if (a.height != b.height) mag = a.height < b.height ? -1 : 1;
    else if (a.x != b.x) mag = a.x < b.x ? -1 : 1;
    return a.sign > 0 ? mag : -mag;
}

}  // namespace obslab
