#pragma once

#include <cmath>
#include <limits>
#include <string>

namespace obslab {

// Signed real stored as sign and natural log of the magnitude.
// Zero is sign 0 with ln_mag = -inf.
struct LogNum {
    int sign = 0;
    double ln_mag = -std::numeric_limits<double>::infinity();

    static LogNum zero() { return {}; }
    static LogNum one() { return {1, 0.0}; }
    static LogNum from_real(double x);
    // Positive value e^{ln}.
    static LogNum from_ln(double ln) { return {1, ln}; }

    double to_real() const;
    bool is_zero() const { return sign == 0; }

    LogNum operator-() const { return {-sign, ln_mag}; }
    LogNum abs() const { return {sign == 0 ? 0 : 1, ln_mag}; }
    LogNum pow(double p) const;  // requires sign >= 0
    LogNum sqrt() const { return pow(0.5); }

    std::string str() const;
};

LogNum operator+(const LogNum& a, const LogNum& b);
LogNum operator-(const LogNum& a, const LogNum& b);
LogNum operator*(const LogNum& a, const LogNum& b);
LogNum operator/(const LogNum& a, const LogNum& b);
inline LogNum& operator+=(LogNum& a, const LogNum& b) { return a = a + b; }
inline LogNum& operator*=(LogNum& a, const LogNum& b) { return a = a * b; }

// Three-way comparison on real values.
int compare(const LogNum& a, const LogNum& b);
inline bool operator<(const LogNum& a, const LogNum& b) { return compare(a, b) < 0; }
inline bool operator<=(const LogNum& a, const LogNum& b) { return compare(a, b) <= 0; }
inline bool operator>(const LogNum& a, const LogNum& b) { return compare(a, b) > 0; }
inline bool operator>=(const LogNum& a, const LogNum& b) { return compare(a, b) >= 0; }

LogNum max(const LogNum& a, const LogNum& b);
LogNum min(const LogNum& a, const LogNum& b);

// Relative distance |a-b|/max(|a|,|b|), computed in log domain.
double rel_diff(const LogNum& a, const LogNum& b);

}  // namespace obslab
