#pragma once

#include "obslab/gauge.hpp"
#include "obslab/lognum.hpp"
#include "obslab/polynomial.hpp"

#include <cstdint>
#include <vector>

namespace obslab {

struct CoverBall {
    cplx center;
    LogNum diameter;
    int multiplicity = 1;
};

struct BallCover {
    std::vector<CoverBall> balls;
    int total_multiplicity() const;
};

// r_j = f^{-1}(j f(H) / n) / 4, j = 1..n.
std::vector<LogNum> cartan_radii(const Gauge& g, const LogNum& H, int n);

// (g_n(H)/4)^n = 4^{-n} exp{n (log H - (1/f(H)) int_{f^{-1}(f(H)/n)}^H f(s)/s ds)}.
LogNum lubinsky_threshold(const Gauge& g, const LogNum& H, int n);

struct CoverViolation {
    std::size_t index;
    std::size_t root;  // sample is roots[root] + e^{ln_r} e^{i theta}
    double ln_r;
    double theta;
    double ln_abs_p;
};

struct VerifyReport {
    std::size_t proposals = 0;
    std::size_t sublevel_hits = 0;
    std::vector<CoverViolation> violations;
};

// Samples {|P| <= threshold} and lists the points not covered. Proposals
// mix the padded bounding box with log-radial draws around each root.
VerifyReport verify_cover(const Polynomial& p, const LogNum& threshold, const BallCover& cover,
                          std::size_t samples, std::uint64_t seed = 0);

// Greedy Cartan selection; the result is gated by verify_cover.
BallCover cartan_cover(const Polynomial& p, const std::vector<LogNum>& radii,
                       std::size_t verify_samples = 20000, std::uint64_t seed = 0);

LogNum content_of_cover(const BallCover& cover, const Gauge& g);

struct CartanBoundBreakdown {
    LogNum H;
    int n = 0;
    double A = 0;
    double xi = 0;
    double xi_lo = 0, xi_hi = 0;
    LogNum threshold;  // delta^n
    double rhs_shape = 0;
};

struct LemniscateBound {
    double rhs_shape = 0;
    CartanBoundBreakdown breakdown;
};

// (log 1/(4 delta))^{-1/2} n^{1/2} (log(n+e))^{-alpha/3}.
double lemniscate_shape(double alpha, const LogNum& delta, int n);

// Shape plus the breakdown at the H solving lubinsky_threshold(h_alpha, H, n)
// = delta^n on (0, e^{-3}]. NoRoot when delta^n is out of reach.
LemniscateBound lemniscate_bound_rhs(double alpha, const LogNum& delta, int n);

// Upper estimate of c_g({|P| <= delta^n}) by nested clustering of the roots.
// Clusters further than 2 delta apart are separated; each cluster's own
// sublevel radius is recomputed from the remaining factors.
LogNum lemniscate_content(const Polynomial& p, const LogNum& delta, const Gauge& g,
                          BallCover* cover_out = nullptr);

}  // namespace obslab
