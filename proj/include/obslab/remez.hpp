#pragma once

#include "obslab/fractal.hpp"
#include "obslab/lognum.hpp"
#include "obslab/polynomial.hpp"

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

namespace obslab {

struct SupEstimate {
    LogNum value;
    std::size_t grid_points = 0;
    LogNum lipschitz_slack;  // true sup lies in [value, value + slack]
    LogNum upper() const { return value + lipschitz_slack; }
};

// Max of |P| on the circle |z| = radius over max(4096, 64n) points.
SupEstimate sup_disc(const Polynomial& p, double radius, std::size_t min_points = 4096);

// ln max |P(x)| over a finite point set.
double ln_sup_points(const Polynomial& p, const std::vector<double>& pts);

enum class RootEnsemble { UniformD2, OnePoint, UnitCircle, RealSegment };
const char* ensemble_name(RootEnsemble e);
Polynomial random_polynomial(RootEnsemble e, int n, std::mt19937_64& rng);

struct RemezTrial {
    std::size_t trial = 0;
    int n = 0;
    RootEnsemble ensemble = RootEnsemble::UniformD2;
    double ratio_ln = 0;
    double rhs_ln = 0;  // at the fitted (or given) C
    bool pass = true;
};

struct RemezResult {
    double c = 0;           // content lower bound used for Z
    double max_ratio_ln = 0;
    double fitted_C = 0;    // smallest C passing every trial
    double tested_C = 0;    // C the rows were judged at
    std::size_t violations = 0;
    std::vector<RemezTrial> trials;
};

// ln 12^n exp{C n^2 (log(n+e))^{-2 alpha/3} / c^2}.
double remez_rhs_ln(int n, double C, double alpha, double c);
// C needed for one trial (may be negative when 12^n alone suffices).
double remez_needed_C(int n, double ratio_ln, double alpha, double c);

struct RemezConfig {
    std::vector<int> degrees{8};
    std::size_t trials = 100;  // per degree
    std::vector<RootEnsemble> ensembles{RootEnsemble::UniformD2, RootEnsemble::OnePoint,
                                        RootEnsemble::UnitCircle, RootEnsemble::RealSegment};
    double alpha = 1.0;
    std::uint64_t seed = 0;
    // Judge rows at this C instead of the fitted one (negative: use fitted).
    double test_C = -1.0;
};

// Z is a point sample of a set inside [-1, 1] with h_alpha content >= c.
RemezResult remez_experiment(const std::vector<double>& Z, double c, const RemezConfig& cfg);
// Z from the endpoints and midpoints of a Cantor level inside [-1, 1];
// c from its Frostman certificate under h_alpha.
RemezResult remez_experiment(const CantorLevel& E, const RemezConfig& cfg);

struct JensenResult {
    int m = 0;
    double bound = 0;
    bool holds = true;
};

// Rescales P so |P(0)| = 1, then m = #{|z_j| <= 2} and bound = ln sup_{D_4}|P| / ln 2.
JensenResult jensen_zero_bound(const Polynomial& p);

// An analytic function with a bound on |phi'| over the interval I.
struct AnalyticFn {
    std::function<cplx(cplx)> f;
    double lipschitz_I = 0;
};

struct PropagationRow {
    std::size_t fn = 0;
    double ln_eps = 0;
    double ln_X = 0, ln_Y = 0, ln_Z = 0;  // sup_E, sup_I (upper), sup_{D_5}
    double C_needed = 0;
    bool calibration = false;
    bool pass = true;
};

struct PropagationResult {
    double fitted_C = 0;  // from calibration rows
    std::size_t violations = 0;  // over all rows at fitted_C
    std::vector<PropagationRow> rows;
};

// sup_I |phi| <= eps sup_{D_5}|phi| + exp{C (log 1/eps)^2/(loglog 1/eps)^{2 alpha/3}} sup_E|phi|.
// Even-indexed functions calibrate C, odd-indexed ones are held out.
PropagationResult propagation_experiment(const std::vector<AnalyticFn>& fns, double I_lo,
                                         double I_hi, const std::vector<double>& E, double alpha,
                                         const std::vector<double>& ln_eps_grid);

}  // namespace obslab
