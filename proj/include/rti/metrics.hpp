#pragma once

#include <map>
#include <stdexcept>
#include <vector>

#include "rti/common.hpp"

namespace rti {

// Raised when a set metric has no defined value (an empty set where the
// definition needs at least one point). Frame loops catch this, skip the
// frame and count it instead of aborting.
struct UndefinedMetric : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Fraction of frames whose estimated target count differs from the truth.
double cardinality_error(const std::vector<int>& estimated,
                         const std::vector<int>& truth);

// Optimal mass transfer distance between two point sets. For equal sizes
// this is the q-norm average over the best one-to-one pairing (RMSE for
// q = 2); unequal sizes are handled by replicating each set up to the least
// common multiple and solving the balanced pairing. Throws UndefinedMetric
// if either set is empty.
double omat(const std::vector<Vec2>& t, const std::vector<Vec2>& z, int q = 2);

// Cutoff-based miss-distance with cardinality penalty g per unmatched point.
// Two empty sets score 0 by convention.
double ospa(const std::vector<Vec2>& t, const std::vector<Vec2>& z, double g,
            int q = 2);

// Nearest-rank 95th percentile (sorted ascending, element ceil(0.95 n)).
double q95(std::vector<double> series);

struct MetricsReport {
    double cardinality_err = 0.0;
    double omat_mean = 0.0;
    double omat_q95 = 0.0;
    std::vector<double> omat_series;       // one value per evaluable frame
    std::map<double, double> ospa_mean;    // cutoff g -> mean over frames
    long frames_total = 0;
    long frames_skipped_empty = 0;  // either set empty: no OMAT value
    bool has_timing = false;
    double time_max_ms = 0.0;
    double time_mean_ms = 0.0;
};

// Frame-aligned series of estimated (confirmed) and true target positions.
MetricsReport evaluate_frames(const std::vector<std::vector<Vec2>>& estimated,
                              const std::vector<std::vector<Vec2>>& truth,
                              const std::vector<double>& ospa_cutoffs, int q = 2);

}  // namespace rti
