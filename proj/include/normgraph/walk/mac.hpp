#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "normgraph/core/rng.hpp"
#include "normgraph/sim/trajectory.hpp"
#include "normgraph/space/graph.hpp"
#include "normgraph/walk/mc.hpp"

namespace normgraph {

struct MacTrainParams {
    double learning_rate = 0.05;
    int epochs = 200;
    double l2 = 1e-4;
    int batch_size = 32;
    int max_samples_per_node = 2000;  // 0 = unlimited
};

// Feature layout per node: [one-hot macro-class (3) | theta/gamma | t/T |
// per-neighbor occupancy fractions by macro-class (3 * degree)], neighbor
// slots ordered by id. An implicit bias input of 1 is appended.
inline int mac_feature_dim(int degree) { return 5 + 3 * degree; }

inline std::vector<double> mac_features(const WalkContext& ctx, int degree) {
    std::vector<double> x(mac_feature_dim(degree), 0.0);
    x[static_cast<int>(ctx.macro)] = 1.0;
    x[3] = ctx.theta_frac;
    x[4] = ctx.t_frac;
    for (int k = 0; k < degree; ++k)
        for (int m = 0; m < 3; ++m) x[5 + 3 * k + m] = ctx.neighbor_occupancy[k][m];
    return x;
}

namespace detail {

inline void softmax_inplace(std::vector<double>& z) {
    const double mx = *std::max_element(z.begin(), z.end());
    double sum = 0.0;
    for (auto& v : z) {
        v = std::exp(v - mx);
        sum += v;
    }
    for (auto& v : z) v /= sum;
}

}  // namespace detail

// Mean cross-entropy with L2 penalty over a sample set, plus its analytic
// gradient. W is row-major K x (d+1); the last column multiplies the bias
// input. Exposed separately so the gradient can be checked against finite
// differences.
inline double mac_loss_grad(const std::vector<double>& W, int K, int d,
                            const std::vector<std::vector<double>>& X, const std::vector<int>& Y,
                            double l2, std::vector<double>* grad_out) {
    if (X.empty()) throw std::invalid_argument("mac_loss_grad: no samples");
    const int dc = d + 1;
    if (static_cast<int>(W.size()) != K * dc)
        throw std::invalid_argument("mac_loss_grad: weight shape mismatch");
    if (grad_out) grad_out->assign(W.size(), 0.0);
    const double inv_n = 1.0 / static_cast<double>(X.size());
    double loss = 0.0;
    std::vector<double> z(K);
    for (size_t s = 0; s < X.size(); ++s) {
        const auto& x = X[s];
        for (int k = 0; k < K; ++k) {
            double acc = W[k * dc + d];  // bias
            for (int j = 0; j < d; ++j) acc += W[k * dc + j] * x[j];
            z[k] = acc;
        }
        detail::softmax_inplace(z);
        loss -= std::log(std::max(z[Y[s]], 1e-300)) * inv_n;
        if (grad_out) {
            for (int k = 0; k < K; ++k) {
                const double g = (z[k] - (k == Y[s] ? 1.0 : 0.0)) * inv_n;
                for (int j = 0; j < d; ++j) (*grad_out)[k * dc + j] += g * x[j];
                (*grad_out)[k * dc + d] += g;
            }
        }
    }
    double reg = 0.0;
    for (size_t i = 0; i < W.size(); ++i) {
        reg += W[i] * W[i];
        if (grad_out) (*grad_out)[i] += l2 * W[i];
    }
    return loss + 0.5 * l2 * reg;
}

struct MacNodeModel {
    std::vector<int> neighbors;  // ascending; option k+1 moves to neighbors[k]
    std::vector<double> W;       // K x (d+1), zero-initialized (= uniform softmax)

    int degree() const { return static_cast<int>(neighbors.size()); }
    int n_classes() const { return degree() + 1; }

    bool operator==(const MacNodeModel&) const = default;

    std::vector<double> probabilities(const WalkContext& ctx) const {
        const int K = n_classes();
        const int d = mac_feature_dim(degree());
        const auto x = mac_features(ctx, degree());
        std::vector<double> z(K);
        for (int k = 0; k < K; ++k) {
            double acc = W[k * (d + 1) + d];
            for (int j = 0; j < d; ++j) acc += W[k * (d + 1) + j] * x[j];
            z[k] = acc;
        }
        detail::softmax_inplace(z);
        return z;
    }
};

// One softmax classifier per graph node, predicting the next location among
// {stay} u neighbors from the walk context.
struct MACWalkModel {
    std::vector<MacNodeModel> per_node;

    bool operator==(const MACWalkModel&) const = default;

    int sample_next(const WalkContext& ctx, Rng& rng) const {
        const auto& nm = per_node[ctx.node];
        const auto probs = nm.probabilities(ctx);
        const int opt = detail::sample_categorical(probs, rng);
        return opt == 0 ? kStay : nm.neighbors[opt - 1];
    }
};

struct MacFitReport {
    double initial_loss = 0.0;  // sample-weighted mean over nodes with data
    double final_loss = 0.0;
    uint64_t illegal_training_targets = 0;
};

inline MACWalkModel fit_mac(const std::vector<std::vector<int>>& sequences, const EpiLog& epi,
                            const SpatialGraph& graph, const MacTrainParams& tp, Rng& rng,
                            MacFitReport* report = nullptr) {
    if (sequences.empty() || sequences[0].size() < 2)
        throw std::invalid_argument("fit_mac: need at least one transition");
    const size_t T1 = sequences[0].size();
    if (epi.obs.size() != T1 || epi.obs[0].size() != sequences.size())
        throw std::invalid_argument("fit_mac: epi log shape mismatch");
    const int n_nodes = graph.size();

    // occupancy fractions per node per step, from the projected log
    std::vector<std::vector<std::array<double, 3>>> occ(
        T1, std::vector<std::array<double, 3>>(n_nodes, {0.0, 0.0, 0.0}));
    {
        std::vector<int> totals(n_nodes);
        for (size_t t = 0; t < T1; ++t) {
            std::fill(totals.begin(), totals.end(), 0);
            for (size_t i = 0; i < sequences.size(); ++i) {
                const int v = sequences[i][t];
                ++occ[t][v][static_cast<int>(epi.obs[t][i].macro)];
                ++totals[v];
            }
            for (int v = 0; v < n_nodes; ++v)
                if (totals[v] > 0)
                    for (auto& f : occ[t][v]) f /= totals[v];
        }
    }

    MACWalkModel model;
    model.per_node.resize(n_nodes);
    MacFitReport rep;

    // gather samples per node
    std::vector<std::vector<std::vector<double>>> X(n_nodes);
    std::vector<std::vector<int>> Y(n_nodes);
    WalkContext ctx;
    for (size_t i = 0; i < sequences.size(); ++i) {
        if (sequences[i].size() != T1) throw std::invalid_argument("fit_mac: ragged sequences");
        for (size_t t = 0; t + 1 < T1; ++t) {
            const int u = sequences[i][t];
            const int v = sequences[i][t + 1];
            const auto& nb = graph.adj[u];
            int opt = 0;
            if (v != u) {
                const auto it = std::lower_bound(nb.begin(), nb.end(), v);
                if (it != nb.end() && *it == v)
                    opt = static_cast<int>(it - nb.begin()) + 1;
                else
                    ++rep.illegal_training_targets;
            }
            ctx.macro = epi.obs[t][i].macro;
            ctx.theta_frac = epi.obs[t][i].theta_frac;
            ctx.node = u;
            ctx.t_frac = T1 > 1 ? static_cast<double>(t) / static_cast<double>(T1 - 1) : 0.0;
            ctx.neighbor_occupancy.assign(nb.size(), {0.0, 0.0, 0.0});
            for (size_t kk = 0; kk < nb.size(); ++kk) ctx.neighbor_occupancy[kk] = occ[t][nb[kk]];
            X[u].push_back(mac_features(ctx, static_cast<int>(nb.size())));
            Y[u].push_back(opt);
        }
    }

    double init_sum = 0.0, final_sum = 0.0;
    int64_t total_samples = 0;
    for (int v = 0; v < n_nodes; ++v) {
        auto& nm = model.per_node[v];
        nm.neighbors = graph.adj[v];
        const int K = nm.n_classes();
        const int d = mac_feature_dim(nm.degree());
        nm.W.assign(static_cast<size_t>(K) * (d + 1), 0.0);
        if (X[v].empty() || K < 2) continue;  // no data or single option: uniform/stay

        // deterministic subsample cap
        if (tp.max_samples_per_node > 0 &&
            static_cast<int>(X[v].size()) > tp.max_samples_per_node) {
            std::vector<size_t> idx(X[v].size());
            std::iota(idx.begin(), idx.end(), size_t{0});
            for (size_t i = idx.size() - 1; i > 0; --i)
                std::swap(idx[i], idx[rng.uniform_int(0, static_cast<int64_t>(i))]);
            idx.resize(tp.max_samples_per_node);
            std::vector<std::vector<double>> xs;
            std::vector<int> ys;
            xs.reserve(idx.size());
            ys.reserve(idx.size());
            for (size_t s : idx) {
                xs.push_back(std::move(X[v][s]));
                ys.push_back(Y[v][s]);
            }
            X[v] = std::move(xs);
            Y[v] = std::move(ys);
        }

        const int n_samples = static_cast<int>(X[v].size());
        init_sum += mac_loss_grad(nm.W, K, d, X[v], Y[v], tp.l2, nullptr) * n_samples;

        std::vector<size_t> order(n_samples);
        std::iota(order.begin(), order.end(), size_t{0});
        std::vector<std::vector<double>> bx;
        std::vector<int> by;
        std::vector<double> grad;
        const int batch = std::max(1, tp.batch_size);
        for (int epoch = 0; epoch < tp.epochs; ++epoch) {
            for (size_t i = order.size() - 1; i > 0; --i)
                std::swap(order[i], order[rng.uniform_int(0, static_cast<int64_t>(i))]);
            for (int start = 0; start < n_samples; start += batch) {
                const int stop = std::min(start + batch, n_samples);
                bx.clear();
                by.clear();
                for (int s = start; s < stop; ++s) {
                    bx.push_back(X[v][order[s]]);
                    by.push_back(Y[v][order[s]]);
                }
                mac_loss_grad(nm.W, K, d, bx, by, tp.l2, &grad);
                for (size_t w = 0; w < nm.W.size(); ++w) nm.W[w] -= tp.learning_rate * grad[w];
            }
        }
        final_sum += mac_loss_grad(nm.W, K, d, X[v], Y[v], tp.l2, nullptr) * n_samples;
        total_samples += n_samples;
    }
    if (total_samples > 0) {
        rep.initial_loss = init_sum / static_cast<double>(total_samples);
        rep.final_loss = final_sum / static_cast<double>(total_samples);
    }
    if (report) *report = rep;
    return model;
}

inline int mac_predict(const MACWalkModel& model, const WalkContext& ctx, Rng& rng) {
    return model.sample_next(ctx, rng);
}

}  // namespace normgraph
