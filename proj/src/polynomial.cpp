#include "obslab/polynomial.hpp"

#include "obslab/errors.hpp"

#include <Eigen/Dense>
#include <unsupported/Eigen/Polynomials>

#include <cmath>

namespace obslab {

Polynomial::Polynomial(cplx leading, std::vector<cplx> roots)
    : leading_(leading), roots_(std::move(roots)) {
    if (leading_ == cplx(0.0)) throw ParamError("leading coefficient must be nonzero");
}

Polynomial Polynomial::from_coefficients(const std::vector<cplx>& coeffs) {
    std::size_t deg = coeffs.size();
    while (deg > 0 && coeffs[deg - 1] == cplx(0.0)) --deg;
    if (deg == 0) throw ParamError("zero polynomial");
    if (deg == 1) return Polynomial(coeffs[0], {});
    Eigen::VectorXcd c(deg);
    for (std::size_t i = 0; i < deg; ++i) c[static_cast<Eigen::Index>(i)] = coeffs[i];
    Eigen::PolynomialSolver<cplx, Eigen::Dynamic> solver(c);
    std::vector<cplx> roots;
    for (Eigen::Index i = 0; i < solver.roots().size(); ++i) roots.push_back(solver.roots()[i]);
    return Polynomial(coeffs[deg - 1], std::move(roots));
}

cplx Polynomial::eval(cplx z) const {
    cplx p = leading_;
    for (const auto& r : roots_) p *= (z - r);
    return p;
}

double Polynomial::ln_abs(cplx z) const {
    double s = std::log(std::abs(leading_));
    for (const auto& r : roots_) s += std::log(std::abs(z - r));
    return s;
}

double ln_abs_offset(cplx d, double ln_r, double theta) {
    double ad = std::abs(d);
    if (ad == 0.0) return ln_r;
    double ld = std::log(ad);
    if (ln_r < ld - 40.0) return ld;
    if (ln_r > ld + 40.0) return ln_r;
    cplx w = std::polar(std::exp(ln_r - ld), theta);
    return ld + std::log(std::abs(d / ad + w));
}

double Polynomial::ln_abs_near(std::size_t k, double ln_r, double theta) const {
    double s = std::log(std::abs(leading_));
    for (const auto& r : roots_) s += ln_abs_offset(roots_[k] - r, ln_r, theta);
    return s;
}

std::vector<cplx> Polynomial::coefficients() const {
    std::vector<cplx> c{leading_};
    for (const auto& r : roots_) {
        c.push_back(0.0);
        for (std::size_t i = c.size() - 1; i > 0; --i) c[i] = c[i - 1] - r * c[i];
        c[0] = -r * c[0];
    }
    return c;
}

cplx Polynomial::horner(cplx z) const {
    auto c = coefficients();
    cplx p = 0.0;
    for (std::size_t i = c.size(); i-- > 0;) p = p * z + c[i];
    return p;
}

}  // namespace obslab
