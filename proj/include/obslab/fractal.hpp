#pragma once

#include "obslab/gauge.hpp"
#include "obslab/lognum.hpp"
#include "obslab/position.hpp"

#include <optional>
#include <vector>

namespace obslab {

// Length rule for a generalized Cantor set. Either explicit ln c_k
// (k = 1, 2, ...) or gauge driven: g(c_k) = 2^{-(k + level_shift)}.
struct CantorSpec {
    double a = 0.0;
    double b = 1.0;
    std::vector<double> explicit_ln_lengths;
    std::optional<Gauge> rule_gauge;
    int level_shift = 0;

    static CantorSpec gauge_rule(const Gauge& g, double a = 0.0, double b = 1.0, int shift = 0);
    static CantorSpec explicit_rule(std::vector<double> ln_lengths, double a = 0.0, double b = 1.0);
};

// How the natural measure is spread over the level intervals.
// LimitCounting: the Cantor measure of the limit set, ball masses bounded
// above by counting the level intervals a ball touches.
// Uniform: the level intervals are the set itself, mass spread uniformly.
enum class MassModel { LimitCounting, Uniform };

struct Interval {
    Position left;
    Position right;
    double ln_len;
    double mass;
};

class CantorLevel {
public:
    int depth() const { return depth_; }
    double a() const { return a_; }
    double b() const { return b_; }
    // ln c_j for j = 0..depth, with c_0 = b - a.
    const std::vector<double>& ln_lengths() const { return ln_c_; }
    double ln_length() const { return ln_c_.back(); }
    std::size_t count() const { return std::size_t(1) << depth_; }

    // Left endpoint of the j-th interval in spatial order.
    Position left(std::size_t j) const;
    Position right(std::size_t j) const;
    std::vector<Interval> intervals(const Position& shift = {}) const;
    // Endpoints and midpoints in double precision (duplicates collapse).
    std::vector<double> sample_points(double scale = 1.0, double offset = 0.0) const;

    friend CantorLevel build_cantor(const CantorSpec& spec, int depth);

private:
    int depth_ = 0;
    double a_ = 0, b_ = 1;
    std::vector<double> ln_c_;
};

CantorLevel build_cantor(const CantorSpec& spec, int depth);

LogNum content_upper(const CantorLevel& level, const Gauge& g);

struct Ball {
    double center;  // approximate, for reporting only
    double ln_radius;
    double mass;
    double ln_gauge;  // ln g(2r)
};

struct FrostmanCertificate {
    double total_mass = 0;
    LogNum A2_hat;
    LogNum lower_bound;
    std::size_t balls_tested = 0;
    std::vector<Ball> worst_balls;  // largest mu(B)/g(d(B)) first
};

// Empirical Frostman constant over the ball family: centers at interval
// endpoints, midpoints and gap midpoints; radii at every breakpoint where
// the ball mass changes (plus dyadic fractions of the lengths for the
// uniform model).
FrostmanCertificate frostman_lower(const std::vector<Interval>& pieces, const Gauge& g,
                                   MassModel model, std::size_t keep_worst = 8);
FrostmanCertificate frostman_lower(const CantorLevel& level, const Gauge& g,
                                   MassModel model = MassModel::LimitCounting);

// Z-periodic set: cell m holds a copy of cells[m mod P] shifted by m, or
// nothing when the entry is empty.
struct PeriodicSet {
    std::vector<std::optional<CantorLevel>> cells;
    MassModel model = MassModel::LimitCounting;
};

struct ThicknessReport {
    double gamma_hat = 0;
    double worst_window = 0;
    std::vector<double> per_window;
};

ThicknessReport thickness_report(const PeriodicSet& set, const Gauge& g, double L,
                                 const std::vector<double>& x_samples);

}  // namespace obslab
