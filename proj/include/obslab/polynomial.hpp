#pragma once

#include <complex>
#include <vector>

namespace obslab {

using cplx = std::complex<double>;

// P(z) = A * prod (z - z_j), stored by its roots.
class Polynomial {
public:
    Polynomial() = default;
    Polynomial(cplx leading, std::vector<cplx> roots);
    static Polynomial monic(std::vector<cplx> roots) { return Polynomial(1.0, std::move(roots)); }
    // Ascending coefficients a_0 + a_1 z + ... ; roots via the companion matrix.
    static Polynomial from_coefficients(const std::vector<cplx>& coeffs);

    int degree() const { return static_cast<int>(roots_.size()); }
    cplx leading() const { return leading_; }
    const std::vector<cplx>& roots() const { return roots_; }

    cplx eval(cplx z) const;
    double ln_abs(cplx z) const;
    // ln|P(z_k + w)| with |w| = e^{ln_r}, arg w = theta, without forming z_k + w.
    double ln_abs_near(std::size_t k, double ln_r, double theta) const;

    std::vector<cplx> coefficients() const;
    cplx horner(cplx z) const;

    Polynomial scaled(cplx s) const { return Polynomial(leading_ * s, roots_); }

private:
    cplx leading_ = 1.0;
    std::vector<cplx> roots_;
};

// ln|d + w| for |w| = e^{ln_r}, arg w = theta. Exact in the limit where
// w is far below the resolution of d.
double ln_abs_offset(cplx d, double ln_r, double theta);

}  // namespace obslab
