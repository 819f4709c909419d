#include "rti/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rti/assignment.hpp"

namespace rti {

double cardinality_error(const std::vector<int>& estimated,
                         const std::vector<int>& truth) {
    if (estimated.size() != truth.size())
        throw std::invalid_argument("count series lengths differ");
    if (estimated.empty()) throw std::invalid_argument("empty count series");
    long wrong = 0;
    for (std::size_t i = 0; i < estimated.size(); ++i)
        if (estimated[i] != truth[i]) ++wrong;
    return static_cast<double>(wrong) / static_cast<double>(estimated.size());
}

double omat(const std::vector<Vec2>& t, const std::vector<Vec2>& z, int q) {
    if (t.empty() || z.empty())
        throw UndefinedMetric("distance between point sets needs both non-empty");
    if (q < 1) throw std::invalid_argument("q must be >= 1");

    const int nt = static_cast<int>(t.size());
    const int nz = static_cast<int>(z.size());
    const int l = std::lcm(nt, nz);
    const int rep_t = l / nt;
    const int rep_z = l / nz;

    MatX cost(l, l);
    for (int i = 0; i < l; ++i)
        for (int j = 0; j < l; ++j)
            cost(i, j) = std::pow((t[i / rep_t] - z[j / rep_z]).norm(), q);

    const Assignment a = assign_gnn(cost);
    return std::pow(a.total_cost / static_cast<double>(l), 1.0 / q);
}

double ospa(const std::vector<Vec2>& t, const std::vector<Vec2>& z, double g,
            int q) {
    if (!(g > 0.0)) throw std::invalid_argument("cutoff must be positive");
    if (q < 1) throw std::invalid_argument("q must be >= 1");
    if (t.empty() && z.empty()) return 0.0;

    const std::vector<Vec2>& small = t.size() <= z.size() ? t : z;
    const std::vector<Vec2>& large = t.size() <= z.size() ? z : t;
    const int ns = static_cast<int>(small.size());
    const int nl = static_cast<int>(large.size());

    double matched = 0.0;
    if (ns > 0) {
        MatX cost(ns, nl);
        for (int i = 0; i < ns; ++i)
            for (int j = 0; j < nl; ++j)
                cost(i, j) =
                    std::pow(std::min((small[i] - large[j]).norm(), g), q);
        matched = assign_gnn(cost).total_cost;
    }
    const double penalty = std::pow(g, q) * (nl - ns);
    return std::pow((matched + penalty) / nl, 1.0 / q);
}

double q95(std::vector<double> series) {
    if (series.empty()) throw std::invalid_argument("empty series");
    std::sort(series.begin(), series.end());
    const auto n = static_cast<double>(series.size());
    const auto rank = static_cast<std::size_t>(std::ceil(0.95 * n));
    return series[std::max<std::size_t>(rank, 1) - 1];
}

MetricsReport evaluate_frames(const std::vector<std::vector<Vec2>>& estimated,
                              const std::vector<std::vector<Vec2>>& truth,
                              const std::vector<double>& ospa_cutoffs, int q) {
    if (estimated.size() != truth.size())
        throw std::invalid_argument("estimated/truth frame counts differ");
    if (estimated.empty()) throw std::invalid_argument("no frames to evaluate");

    MetricsReport rep;
    rep.frames_total = static_cast<long>(estimated.size());

    std::vector<int> est_counts(estimated.size()), true_counts(truth.size());
    for (std::size_t k = 0; k < estimated.size(); ++k) {
        est_counts[k] = static_cast<int>(estimated[k].size());
        true_counts[k] = static_cast<int>(truth[k].size());
    }
    rep.cardinality_err = cardinality_error(est_counts, true_counts);

    std::map<double, double> ospa_sum;
    for (double g : ospa_cutoffs) ospa_sum[g] = 0.0;

    for (std::size_t k = 0; k < estimated.size(); ++k) {
        if (estimated[k].empty() || truth[k].empty()) {
            ++rep.frames_skipped_empty;
        } else {
            rep.omat_series.push_back(omat(estimated[k], truth[k], q));
        }
        for (double g : ospa_cutoffs)
            ospa_sum[g] += ospa(estimated[k], truth[k], g, q);
    }

    if (!rep.omat_series.empty()) {
        rep.omat_mean =
            std::accumulate(rep.omat_series.begin(), rep.omat_series.end(), 0.0) /
            static_cast<double>(rep.omat_series.size());
        rep.omat_q95 = q95(rep.omat_series);
    }
    for (double g : ospa_cutoffs)
        rep.ospa_mean[g] = ospa_sum[g] / static_cast<double>(rep.frames_total);
    return rep;
}

}  // namespace rti
