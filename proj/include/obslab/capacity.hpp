#pragma once

#include "obslab/fractal.hpp"
#include "obslab/gauge.hpp"
#include "obslab/lognum.hpp"
#include "obslab/position.hpp"

#include <array>
#include <cstdint>
#include <vector>

namespace obslab {

// Atoms standing for cells of size delta_cell. Pairwise distances are kept
// as logarithms so Cantor cells e^{-4^k} apart stay distinct.
struct AtomSet {
    std::size_t n = 0;
    int dim = 1;
    double ln_cell = 0;           // ln delta_cell
    std::vector<double> ln_dist;  // n x n, row-major, -inf on the diagonal

    double ln_d(std::size_t i, std::size_t j) const { return ln_dist[i * n + j]; }
    static AtomSet from_points(const std::vector<std::array<double, 2>>& pts, int dim, double ln_cell);
    // Cell centers of a Cantor level, delta_cell = c_depth.
    static AtomSet from_cantor(const CantorLevel& lv);
    AtomSet subset(const std::vector<std::size_t>& idx) const;
    AtomSet with_cell(double ln_cell) const;
};

// K(x, y) = 1 / g(max(|x - y|, delta_cell)).
struct KernelSpec {
    Gauge g;
    double ln_K(double ln_t, double ln_cell) const;
};

struct DiscreteMeasure {
    AtomSet atoms;
    std::vector<double> weights;  // on the simplex to 1e-12
};

// sum_i sum_j w_i w_j K(max(|x_i - x_j|, delta_cell)).
LogNum energy(const DiscreteMeasure& mu, const KernelSpec& K);

struct CapacityResult {
    LogNum cap;     // 1 / E*
    LogNum energy;  // E*
    std::vector<double> weights;
    double gap = 0;  // Frank-Wolfe duality gap relative to E*
    std::size_t iterations = 0;
};

// Minimizes the energy over the simplex by Frank-Wolfe with away steps and
// exact line search. seed = 0 starts from uniform weights, otherwise from a
// Dirichlet(1) draw. NoConvergence if the gap stays above tol after max_iter.
CapacityResult capacity_estimate(const AtomSet& atoms, const KernelSpec& K, double tol = 1e-6,
                                 std::uint64_t seed = 0, std::size_t max_iter = 100000);

struct RefinedCapacity {
    CapacityResult at_cell;     // delta_cell
    CapacityResult at_quarter;  // delta_cell / 4
    double sensitivity = 0;     // |ln cap(delta) - ln cap(delta/4)|
};
RefinedCapacity capacity_refined(const AtomSet& atoms, const KernelSpec& K, double tol = 1e-6);

struct IntegrabilityReport {
    bool finite = false;
    double value = 0;           // int_0^{d_hat} K dh, quadrature plus tail estimate
    double tail_exponent = 0;   // decay of the integrand in w = ln ln(1/t)
    std::vector<double> ln_Kh;  // ln(K h) at ln ln(1/t) = 1, 2, 4, ..., 512
};

// Integral of K(t) dh(t) on (0, d_hat], in the variable w = ln ln(1/t).
// Finite when the integrand decays exponentially in w or faster than 1/w.
IntegrabilityReport integrability(const Gauge& h, const Gauge& K_gauge, double ln_dhat);

struct ContentCapacityRow {
    int depth = 0;
    LogNum content;        // content_upper(E, g)
    LogNum cap;            // C_{1/g}(E) at delta_cell
    double slack = 0;      // max(0, cap / (2 content) - 1)
    LogNum cap_shifted;    // C_{1/F_{alpha-1-eps, beta-1}}(E), if (ii) applies
    double ratio_ln = 0;   // ln(cap_shifted / content_F), if (ii) applies
};

struct ContentCapacityReport {
    std::vector<ContentCapacityRow> rows;
    double max_slack = 0;
    bool holds_i = true;         // every row within 10% slack
    bool direction_ii = false;   // g = F_{alpha,beta} with alpha >= 1 + eps, beta >= 1
    IntegrabilityReport integrability;
    double min_ratio_ln = 0;
};

// Checks c_g(E) >= C_{1/g}(E) / 2 on the Cantor levels depth_min..depth_max.
// When g is F_{alpha,beta} with alpha >= 1 + eps_shift and beta >= 1, also
// reports C_{1/F_{alpha-1-eps,beta-1}}(E) / c_{F_{alpha,beta}}(E) per depth.
ContentCapacityReport content_capacity_check(const CantorSpec& spec, int depth_min, int depth_max, const Gauge& g,
                                             double eps_shift);

// One coordinate factor of a product set: cells [left_j, left_j + e^{ln_len}].
struct Factor1D {
    std::vector<Position> left;
    double ln_len = 0;

    static Factor1D from_cantor(const CantorLevel& lv);
    static Factor1D grid(double a, double side, std::size_t M);
    static Factor1D empty() { return {}; }
};

struct SliceRow {
    double offset = 0;  // approximate offset, for reporting
    std::size_t stratum = 0;
    LogNum slice_cap;
    bool good = false;
    bool calibration = false;
};

struct SlicingResult {
    double k = 0, c = 0;
    LogNum cap_F;          // C_{1/F_{alpha,beta}}(E2), d = 2
    LogNum threshold;      // k r^{-1} cap_F
    LogNum good_cal;       // measure of good offsets, calibration half
    LogNum good_val;       // validation half
    LogNum rhs;            // c cap_F / h_{alpha,beta}(2r)
    LogNum projection;     // measure of offsets with nonempty slices
    std::size_t violations = 0;
    std::vector<SliceRow> rows;
};

// Horizontal slices of E2 = X x Y inside B_r(center), offsets stratified over
// the cells of Y plus the gaps. c <= 0 fits the largest c on the calibration
// half; the validation half must then satisfy good_val >= rhs.
SlicingResult slicing_experiment(const Factor1D& X, const Factor1D& Y, std::array<double, 2> center, double r,
                                 double alpha, double beta, std::size_t offsets, std::uint64_t seed,
                                 double k = 0.25, double c = 0);

}  // namespace obslab
