#include "obslab/lognum.hpp"

#include <fmt/format.h>

#include <stdexcept>

namespace obslab {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

LogNum LogNum::from_real(double x) {
    if (std::isnan(x)) throw std::invalid_argument("LogNum::from_real: NaN");
    if (x == 0.0) return zero();
    return {x > 0 ? 1 : -1, std::log(std::fabs(x))};
}

double LogNum::to_real() const {
    if (sign == 0) return 0.0;
    return sign * std::exp(ln_mag);
}

LogNum LogNum::pow(double p) const {
    if (sign < 0) throw std::domain_error("LogNum::pow of negative value");
    if (sign == 0) {
        if (p > 0) return zero();
        if (p == 0) return one();
        return {1, std::numeric_limits<double>::infinity()};
    }
    return {1, p * ln_mag};
}

std::string LogNum::str() const {
    if (sign == 0) return "0";
    return fmt::format("{}e^{}", sign < 0 ? "-" : "", ln_mag);
}

LogNum operator+(const LogNum& a, const LogNum& b) {
    if (a.sign == 0) return b;
    if (b.sign == 0) return a;
    const LogNum& hi = a.ln_mag >= b.ln_mag ? a : b;
    const LogNum& lo = a.ln_mag >= b.ln_mag ? b : a;
    double d = lo.ln_mag - hi.ln_mag;  // <= 0
    if (hi.sign == lo.sign) return {hi.sign, hi.ln_mag + std::log1p(std::exp(d))};
    if (d == 0.0) return LogNum::zero();
    return {hi.sign, hi.ln_mag + std::log1p(-std::exp(d))};
}

LogNum operator-(const LogNum& a, const LogNum& b) { return a + (-b); }

LogNum operator*(const LogNum& a, const LogNum& b) {
    if (a.sign == 0 || b.sign == 0) return LogNum::zero();
    return {a.sign * b.sign, a.ln_mag + b.ln_mag};
}

LogNum operator/(const LogNum& a, const LogNum& b) {
    if (b.sign == 0) throw std::domain_error("LogNum division by zero");
    if (a.sign == 0) return LogNum::zero();
    return {a.sign * b.sign, a.ln_mag - b.ln_mag};
}

int compare(const LogNum& a, const LogNum& b) {
    if (a.sign != b.sign) return a.sign < b.sign ? -1 : 1;
    if (a.sign == 0 || a.ln_mag == b.ln_mag) return 0;
    bool mag_less = a.ln_mag < b.ln_mag;
    return (a.sign > 0) == mag_less ? -1 : 1;
}

LogNum max(const LogNum& a, const LogNum& b) { return compare(a, b) >= 0 ? a : b; }
LogNum min(const LogNum& a, const LogNum& b) { return compare(a, b) <= 0 ? a : b; }

double rel_diff(const LogNum& a, const LogNum& b) {
    LogNum d = (a - b).abs();
    if (d.is_zero()) return 0.0;
    double scale = std::max(a.ln_mag, b.ln_mag);
    if (scale == kNegInf) return 0.0;
    return std::exp(d.ln_mag - scale);
}

}  // namespace obslab
