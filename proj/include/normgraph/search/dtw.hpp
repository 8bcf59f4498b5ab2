#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "normgraph/core/rng.hpp"
#include "normgraph/core/vec2.hpp"

namespace normgraph {

// Classic dynamic time warping with full window:
//   d(i,j) = cost(i,j) + min(d(i-1,j), d(i,j-1), d(i-1,j-1))
template <class T, class Ground>
double dtw_distance(const std::vector<T>& a, const std::vector<T>& b, Ground ground) {
    if (a.empty() || b.empty()) throw std::invalid_argument("dtw_distance: empty sequence");
    const size_t n = a.size(), m = b.size();
    constexpr double inf = std::numeric_limits<double>::infinity();
    std::vector<double> prev(m + 1, inf), cur(m + 1, inf);
    prev[0] = 0.0;
    for (size_t i = 1; i <= n; ++i) {
        cur[0] = inf;
        for (size_t j = 1; j <= m; ++j)
            cur[j] = ground(a[i - 1], b[j - 1]) +
                     std::min({prev[j], cur[j - 1], prev[j - 1]});
        std::swap(prev, cur);
    }
    return prev[m];
}

// 2-D point series with L1 ground distance.
inline double dtw_distance(const std::vector<Vec2>& a, const std::vector<Vec2>& b) {
    return dtw_distance(a, b, [](const Vec2& x, const Vec2& y) { return dist_l1(x, y); });
}

inline double dtw_distance(const std::vector<double>& a, const std::vector<double>& b) {
    return dtw_distance(a, b, [](double x, double y) { return std::abs(x - y); });
}

// Optimal alignment path (pairs of 0-based indices, ascending). Ties prefer
// the diagonal, then the (i-1, j) predecessor.
template <class T, class Ground>
std::vector<std::pair<int, int>> dtw_path(const std::vector<T>& a, const std::vector<T>& b,
                                          Ground ground) {
    if (a.empty() || b.empty()) throw std::invalid_argument("dtw_path: empty sequence");
    const size_t n = a.size(), m = b.size();
    constexpr double inf = std::numeric_limits<double>::infinity();
    std::vector<double> d((n + 1) * (m + 1), inf);
    auto at = [&](size_t i, size_t j) -> double& { return d[i * (m + 1) + j]; };
    at(0, 0) = 0.0;
    for (size_t i = 1; i <= n; ++i)
        for (size_t j = 1; j <= m; ++j)
            at(i, j) = ground(a[i - 1], b[j - 1]) +
                       std::min({at(i - 1, j - 1), at(i - 1, j), at(i, j - 1)});
    std::vector<std::pair<int, int>> path;
    size_t i = n, j = m;
    while (i > 1 || j > 1) {
        path.emplace_back(static_cast<int>(i - 1), static_cast<int>(j - 1));
        if (i == 1) {
            --j;
        } else if (j == 1) {
            --i;
        } else {
            const double dd = at(i - 1, j - 1), du = at(i - 1, j), dl = at(i, j - 1);
            if (dd <= du && dd <= dl) {
                --i;
                --j;
            } else if (du <= dl) {
                --i;
            } else {
                --j;
            }
        }
    }
    path.emplace_back(0, 0);
    std::reverse(path.begin(), path.end());
    return path;
}

// Linear resampling of a 2-D series to a fixed length.
inline std::vector<Vec2> resample_series(const std::vector<Vec2>& s, size_t len) {
    if (s.empty()) throw std::invalid_argument("resample_series: empty series");
    if (len == 0) throw std::invalid_argument("resample_series: zero target length");
    std::vector<Vec2> out(len);
    if (s.size() == 1 || len == 1) {
        for (auto& p : out) p = s[0];
        if (len == 1) out[0] = s[s.size() / 2];
        return out;
    }
    for (size_t i = 0; i < len; ++i) {
        const double x = static_cast<double>(i) * (s.size() - 1) / static_cast<double>(len - 1);
        const size_t lo = static_cast<size_t>(x);
        const size_t hi = std::min(lo + 1, s.size() - 1);
        const double f = x - static_cast<double>(lo);
        out[i] = s[lo] * (1.0 - f) + s[hi] * f;
    }
    return out;
}

// One DTW barycenter averaging pass: each centroid sample becomes the mean of
// all member samples aligned to it.
inline std::vector<Vec2> dba_update(const std::vector<std::vector<Vec2>>& members,
                                    const std::vector<int>& member_ids,
                                    const std::vector<Vec2>& centroid) {
    std::vector<Vec2> sums(centroid.size(), {0.0, 0.0});
    std::vector<int> counts(centroid.size(), 0);
    for (int id : member_ids) {
        const auto path = dtw_path(members[id], centroid,
                                   [](const Vec2& x, const Vec2& y) { return dist_l1(x, y); });
        for (const auto& [i, j] : path) {
            sums[j] += members[id][i];
            ++counts[j];
        }
    }
    std::vector<Vec2> out = centroid;
    for (size_t j = 0; j < out.size(); ++j)
        if (counts[j] > 0) out[j] = sums[j] * (1.0 / counts[j]);
    return out;
}

struct TSxMParams {
    int epsilon = 20;    // maximum cluster count explored
    int restarts = 2;    // independent k-means runs per k
    int dba_iters = 4;   // barycenter refinement passes per update
    double tol = 1e-3;   // relative inertia improvement to keep iterating
    int kmeans_iters = 15;
    int min_transition_count = 1;  // edge-inference pruning threshold
};

struct KMeansResult {
    std::vector<std::vector<Vec2>> centroids;
    std::vector<int> assignments;
    double inertia = 0.0;
    std::vector<double> inertia_history;  // one entry per k-means iteration
};

// k-means under DTW with k-means++-style seeding and DBA centroid updates.
// Centroid length is fixed to the (lower) median series length. A DBA update
// is kept only when it does not increase its cluster cost, so the recorded
// inertia history is non-increasing.
inline KMeansResult dtw_kmeans(const std::vector<std::vector<Vec2>>& series, int k,
                               const TSxMParams& tp, Rng& rng) {
    const int n = static_cast<int>(series.size());
    if (k < 1 || k > n) throw std::invalid_argument("dtw_kmeans: need 1 <= k <= |series|");
    for (const auto& s : series)
        if (s.empty()) throw std::invalid_argument("dtw_kmeans: empty series");

    std::vector<size_t> lens(n);
    for (int i = 0; i < n; ++i) lens[i] = series[i].size();
    std::sort(lens.begin(), lens.end());
    const size_t clen = lens[(n - 1) / 2];

    KMeansResult res;
    // k-means++ seeding under DTW
    std::vector<int> seed_ids;
    seed_ids.push_back(static_cast<int>(rng.uniform_int(0, n - 1)));
    std::vector<double> d2(n);
    while (static_cast<int>(seed_ids.size()) < k) {
        double total = 0.0;
        for (int i = 0; i < n; ++i) {
            double best = std::numeric_limits<double>::infinity();
            for (int s : seed_ids) best = std::min(best, dtw_distance(series[i], series[s]));
            d2[i] = best * best;
            total += d2[i];
        }
        int pick;
        if (total <= 0.0) {
            pick = static_cast<int>(rng.uniform_int(0, n - 1));
        } else {
            const double u = rng.uniform() * total;
            double acc = 0.0;
            pick = n - 1;
            for (int i = 0; i < n; ++i) {
                acc += d2[i];
                if (u < acc) {
                    pick = i;
                    break;
                }
            }
        }
        seed_ids.push_back(pick);
    }
    res.centroids.reserve(k);
    for (int s : seed_ids) res.centroids.push_back(resample_series(series[s], clen));

    res.assignments.assign(n, 0);
    std::vector<double> assign_dist(n, 0.0);
    double prev_inertia = std::numeric_limits<double>::infinity();
    for (int it = 0; it < tp.kmeans_iters; ++it) {
        // assignment
        for (int i = 0; i < n; ++i) {
            double best = std::numeric_limits<double>::infinity();
            int best_c = 0;
            for (int c = 0; c < k; ++c) {
                const double d = dtw_distance(series[i], res.centroids[c]);
                if (d < best) {
                    best = d;
                    best_c = c;
                }
            }
            res.assignments[i] = best_c;
            assign_dist[i] = best;
        }
        // repair empty clusters with the farthest-assigned series
        for (int c = 0; c < k; ++c) {
            if (std::count(res.assignments.begin(), res.assignments.end(), c) > 0) continue;
            int worst = 0;
            for (int i = 1; i < n; ++i)
                if (assign_dist[i] > assign_dist[worst]) worst = i;
            res.assignments[worst] = c;
            res.centroids[c] = resample_series(series[worst], clen);
            assign_dist[worst] = 0.0;
        }
        // centroid update, kept only when the cluster cost does not increase
        for (int c = 0; c < k; ++c) {
            std::vector<int> ids;
            for (int i = 0; i < n; ++i)
                if (res.assignments[i] == c) ids.push_back(i);
            if (ids.empty()) continue;
            double old_cost = 0.0;
            for (int i : ids) old_cost += dtw_distance(series[i], res.centroids[c]);
            std::vector<Vec2> cand = res.centroids[c];
            for (int pass = 0; pass < tp.dba_iters; ++pass)
                cand = dba_update(series, ids, cand);
            double new_cost = 0.0;
            for (int i : ids) new_cost += dtw_distance(series[i], cand);
            if (new_cost <= old_cost) res.centroids[c] = std::move(cand);
        }
        double inertia = 0.0;
        for (int i = 0; i < n; ++i)
            inertia += dtw_distance(series[i], res.centroids[res.assignments[i]]);
        res.inertia = inertia;
        res.inertia_history.push_back(inertia);
        if (prev_inertia - inertia <= tp.tol * std::max(prev_inertia, 1e-12)) break;
        prev_inertia = inertia;
    }
    return res;
}

// Elbow point: the k whose (k, inertia) point lies farthest from the chord
// joining the first and last points after min-max normalizing both axes.
// Collinear profiles and ties resolve to the smallest k.
inline int elbow_select(const std::vector<double>& inertias) {
    const int n = static_cast<int>(inertias.size());
    if (n == 0) throw std::invalid_argument("elbow_select: empty inertia list");
    if (n == 1) return 1;
    const double imin = *std::min_element(inertias.begin(), inertias.end());
    const double imax = *std::max_element(inertias.begin(), inertias.end());
    const double range = imax - imin;
    auto yy = [&](int idx) { return range > 0.0 ? (inertias[idx] - imin) / range : 0.0; };
    auto xx = [&](int idx) { return static_cast<double>(idx) / (n - 1); };
    const double x1 = xx(0), y1 = yy(0), x2 = xx(n - 1), y2 = yy(n - 1);
    const double len = std::hypot(x2 - x1, y2 - y1);
    int best_k = 1;
    double best_d = 0.0;
    for (int idx = 0; idx < n; ++idx) {
        const double cross = (x2 - x1) * (yy(idx) - y1) - (y2 - y1) * (xx(idx) - x1);
        const double d = len > 0.0 ? std::abs(cross) / len : 0.0;
        if (d > best_d + 1e-12) {
            best_d = d;
            best_k = idx + 1;
        }
    }
    return best_k;
}

}  // namespace normgraph
