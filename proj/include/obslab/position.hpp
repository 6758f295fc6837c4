#pragma once

#include "obslab/lognum.hpp"

#include <utility>
#include <vector>

namespace obslab {

// A real number kept as a finite sum of signed exponential terms
// coef * e^{ln_mag}. Terms with equal ln_mag are merged exactly, so
// differences of positions built from the same length scales cancel
// symbolically before any rounding happens. Plain constants share the
// ln_mag = 0 bucket, so integer shifts cancel exactly too.
class Position {
public:
    Position() = default;
    static Position constant(double x);
    static Position term(double coef, double ln_mag);

    Position operator+(const Position& o) const;
    Position operator-(const Position& o) const;
    Position scaled(double s) const;

    // Sum of the terms, accumulated from the smallest magnitude upwards.
    LogNum value() const;
    double approx() const { return value().to_real(); }
    bool empty() const { return terms_.empty(); }
    const std::vector<std::pair<double, double>>& terms() const { return terms_; }

private:
    void add_term(double coef, double ln_mag);
    std::vector<std::pair<double, double>> terms_;  // (ln_mag, coef), sorted by ln_mag
};

inline LogNum difference(const Position& a, const Position& b) { return (a - b).value(); }

}  // namespace obslab
