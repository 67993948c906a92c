#include "pathmatch/gbdt.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "pathmatch/bytes.hpp"
#include "pathmatch/errors.hpp"

namespace pathmatch {

namespace {

constexpr std::uint32_t kMagic = 0x54424d50U;  // "PMBT"

struct Split {
    bool found = false;
    std::int32_t feature = -1;
    double threshold = 0.0;
    double gain = 0.0;
};

struct TreeBuilder {
    const std::vector<std::vector<double>>& rows;
    std::span<const double> residual;
    std::span<const double> weight;
    const GBDTParams& params;
    std::vector<GBDTModel::Node> nodes;

    std::uint32_t build(std::vector<std::uint32_t> idx, std::uint32_t depth) {
        double wsum = 0.0, wy = 0.0;
        for (std::uint32_t i : idx) {
            wsum += weight[i];
            wy += weight[i] * residual[i];
        }
        const double mean = wsum > 0.0 ? wy / wsum : 0.0;

        GBDTModel::Node node;
        node.value = mean;
        const std::uint32_t id = static_cast<std::uint32_t>(nodes.size());
        nodes.push_back(node);
        if (depth >= params.max_depth || idx.size() < 2)
            return id;

        const Split s = best_split(idx, wsum, wy);
        if (!s.found)
            return id;

        std::vector<std::uint32_t> left, right;
        for (std::uint32_t i : idx)
            (rows[i][static_cast<std::size_t>(s.feature)] <= s.threshold ? left : right)
                .push_back(i);
        if (left.empty() || right.empty())
            return id;

        idx.clear();
        idx.shrink_to_fit();
        const std::uint32_t l = build(std::move(left), depth + 1);
        const std::uint32_t r = build(std::move(right), depth + 1);
        nodes[id].feature = s.feature;
        nodes[id].threshold = s.threshold;
        nodes[id].left = l;
        nodes[id].right = r;
        return id;
    }

    Split best_split(const std::vector<std::uint32_t>& idx, double wsum, double wy) {
        Split best;
        const std::size_t nf = rows[idx[0]].size();
        const double parent_score = wsum > 0.0 ? wy * wy / wsum : 0.0;
        std::vector<std::uint32_t> order = idx;
        for (std::size_t f = 0; f < nf; ++f) {
            std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
                const double va = rows[a][f], vb = rows[b][f];
                return va != vb ? va < vb : a < b;
            });
            double lw = 0.0, ly = 0.0;
            for (std::size_t k = 0; k + 1 < order.size(); ++k) {
                lw += weight[order[k]];
                ly += weight[order[k]] * residual[order[k]];
                const double cur = rows[order[k]][f];
                const double nxt = rows[order[k + 1]][f];
                if (cur == nxt)
                    continue;
                const double rw = wsum - lw, ry = wy - ly;
                if (lw < params.min_child_weight || rw < params.min_child_weight)
                    continue;
                const double gain =
                    ly * ly / lw + ry * ry / rw - parent_score;
                if (gain > best.gain + 1e-12) {
                    best.found = true;
                    best.feature = static_cast<std::int32_t>(f);
                    best.threshold = 0.5 * (cur + nxt);
                    best.gain = gain;
                }
            }
        }
        return best;
    }
};

double eval_tree(const std::vector<GBDTModel::Node>& nodes, std::span<const double> x) {
    std::uint32_t at = 0;
    while (nodes[at].feature >= 0)
        at = x[static_cast<std::size_t>(nodes[at].feature)] <= nodes[at].threshold
                 ? nodes[at].left
                 : nodes[at].right;
    return nodes[at].value;
}

} // namespace

GBDTModel GBDTModel::train(const std::vector<std::vector<double>>& rows,
                           std::span<const double> targets,
                           std::span<const double> sample_weights,
                           const GBDTParams& params) {
    if (rows.empty() || rows.size() != targets.size())
        throw ConfigError("GBDTModel::train: rows/targets size mismatch");
    std::vector<double> w(rows.size(), 1.0);
    if (!sample_weights.empty()) {
        if (sample_weights.size() != rows.size())
            throw ConfigError("GBDTModel::train: weight size mismatch");
        w.assign(sample_weights.begin(), sample_weights.end());
    }

    GBDTModel model;
    model.rate_ = params.learning_rate;
    double wsum = 0.0, wy = 0.0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        wsum += w[i];
        wy += w[i] * targets[i];
    }
    model.base_ = wsum > 0.0 ? wy / wsum : 0.0;

    std::vector<double> pred(rows.size(), model.base_);
    std::vector<double> residual(rows.size());
    std::vector<std::uint32_t> all(rows.size());
    std::iota(all.begin(), all.end(), 0);

    for (std::uint32_t t = 0; t < params.num_trees; ++t) {
        double resid_mass = 0.0;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            residual[i] = targets[i] - pred[i];
            resid_mass += std::abs(residual[i]);
        }
        if (resid_mass < 1e-12)
            break;  // converged (constant target hits this immediately)

        TreeBuilder builder{rows, residual, w, params, {}};
        builder.build(all, 0);
        for (std::size_t i = 0; i < rows.size(); ++i)
            pred[i] += model.rate_ * eval_tree(builder.nodes, rows[i]);
        model.trees_.push_back(std::move(builder.nodes));
    }
    return model;
}

double GBDTModel::predict(std::span<const double> features) const {
    double y = base_;
    for (const auto& t : trees_)
        y += rate_ * eval_tree(t, features);
    return y;
}

void GBDTModel::predict_batch(const std::vector<std::vector<double>>& rows,
                              std::vector<double>& out) const {
    out.resize(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        out[i] = predict(rows[i]);
}

std::vector<std::byte> GBDTModel::serialize() const {
    ByteWriter wtr;
    wtr.u32(kMagic);
    wtr.f64(base_);
    wtr.f64(rate_);
    wtr.u32(static_cast<std::uint32_t>(trees_.size()));
    for (const auto& t : trees_) {
        wtr.u32(static_cast<std::uint32_t>(t.size()));
        for (const Node& n : t) {
            wtr.u32(static_cast<std::uint32_t>(n.feature));
            wtr.f64(n.threshold);
            wtr.u32(n.left);
            wtr.u32(n.right);
            wtr.f64(n.value);
        }
    }
    return wtr.take();
}

GBDTModel GBDTModel::deserialize(std::span<const std::byte> blob) {
    ByteReader r(blob);
    if (r.u32() != kMagic)
        throw std::invalid_argument("GBDTModel::deserialize: bad magic");
    GBDTModel m;
    m.base_ = r.f64();
    m.rate_ = r.f64();
    const std::uint32_t nt = r.u32();
    m.trees_.resize(nt);
    for (auto& t : m.trees_) {
        const std::uint32_t nn = r.u32();
        t.resize(nn);
        for (Node& n : t) {
            n.feature = static_cast<std::int32_t>(r.u32());
            n.threshold = r.f64();
            n.left = r.u32();
            n.right = r.u32();
            n.value = r.f64();
        }
    }
    if (!r.done())
        throw std::invalid_argument("GBDTModel::deserialize: trailing bytes");
    return m;
}

} // namespace pathmatch
