#pragma once

#include <string>

namespace obslab {

// Signed real sign * exp^h(x) for magnitudes beyond LogNum's range.
// Canonical form: h = 0 holds the plain magnitude x <= e^709. For h >= 1,
// x lies in (709, e^709]. Magnitudes are then ordered by (h, x).
struct Tower {
    int sign = 0;
    int height = 0;
    double x = 0;

    static Tower from_double(double v);
    // e^t for t >= 0, or for t small enough that e^t is a double.
    static Tower exp_of(const Tower& t);

    Tower log() const;  // requires sign > 0
    // Multiply by c > 0. At height >= 2 a positive constant factor is
    // below double resolution and leaves x unchanged.
    Tower scaled(double c) const;
    Tower operator-() const { return {-sign, height, x}; }
    double to_double() const;  // +-inf beyond range
    bool fits_double() const { return height == 0; }
    std::string str() const;
};

int compare(const Tower& a, const Tower& b);
inline bool operator<(const Tower& a, const Tower& b) { return compare(a, b) < 0; }
inline bool operator>(const Tower& a, const Tower& b) { return compare(a, b) > 0; }
inline bool operator<=(const Tower& a, const Tower& b) { return compare(a, b) <= 0; }

}  // namespace obslab
