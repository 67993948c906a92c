#include "pathmatch/weight_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "pathmatch/rng.hpp"

namespace pathmatch {

namespace {

constexpr int kIn = 4;
constexpr int kHidden = 32;
constexpr int kOut = 4;

// Flat parameter layout.
constexpr int kW1 = 0;                       // kHidden x kIn
constexpr int kB1 = kW1 + kHidden * kIn;     // kHidden
constexpr int kW2 = kB1 + kHidden;           // kHidden x kHidden
constexpr int kB2 = kW2 + kHidden * kHidden; // kHidden
constexpr int kW3 = kB2 + kHidden;           // kOut x kHidden
constexpr int kB3 = kW3 + kOut * kHidden;    // kOut
constexpr int kParamCount = kB3 + kOut;

struct Activations {
    std::array<double, kHidden> a1, h1, a2, h2;
    std::array<double, kOut> z, out;
};

void run_forward(const std::vector<double>& p, const FeatureVec& x, Activations& act) {
    for (int i = 0; i < kHidden; ++i) {
        double s = p[kB1 + i];
        for (int j = 0; j < kIn; ++j)
            s += p[kW1 + i * kIn + j] * x[j];
        act.a1[i] = s;
        act.h1[i] = std::max(s, 0.0);
    }
    for (int i = 0; i < kHidden; ++i) {
        double s = p[kB2 + i];
        for (int j = 0; j < kHidden; ++j)
            s += p[kW2 + i * kHidden + j] * act.h1[j];
        act.a2[i] = act.h1[i] + s;  // residual connection
        act.h2[i] = std::max(act.a2[i], 0.0);
    }
    double zmax = -1e300;
    for (int i = 0; i < kOut; ++i) {
        double s = p[kB3 + i];
        for (int j = 0; j < kHidden; ++j)
            s += p[kW3 + i * kHidden + j] * act.h2[j];
        act.z[i] = s;
        zmax = std::max(zmax, s);
    }
    double sum = 0.0;
    for (int i = 0; i < kOut; ++i) {
        act.out[i] = std::exp(act.z[i] - zmax);
        sum += act.out[i];
    }
    for (int i = 0; i < kOut; ++i)
        act.out[i] /= sum;
}

// MSE-vs-target gradient accumulated into `grad`.
void run_backward(const std::vector<double>& p, const FeatureVec& x, const Activations& act,
                  const Weights& target, std::vector<double>& grad) {
    std::array<double, kOut> dz{};
    // d(mse)/d(out) through the softmax Jacobian.
    std::array<double, kOut> dout{};
    for (int i = 0; i < kOut; ++i)
        dout[i] = 2.0 * (act.out[i] - target[i]) / kOut;
    double dot = 0.0;
    for (int i = 0; i < kOut; ++i)
        dot += dout[i] * act.out[i];
    for (int i = 0; i < kOut; ++i)
        dz[i] = act.out[i] * (dout[i] - dot);

    std::array<double, kHidden> dh2{};
    for (int i = 0; i < kOut; ++i) {
        grad[kB3 + i] += dz[i];
        for (int j = 0; j < kHidden; ++j) {
            grad[kW3 + i * kHidden + j] += dz[i] * act.h2[j];
            dh2[j] += dz[i] * p[kW3 + i * kHidden + j];
        }
    }

    std::array<double, kHidden> da2{};
    for (int i = 0; i < kHidden; ++i)
        da2[i] = act.a2[i] > 0.0 ? dh2[i] : 0.0;

    std::array<double, kHidden> dh1{};
    for (int i = 0; i < kHidden; ++i) {
        grad[kB2 + i] += da2[i];
        dh1[i] += da2[i];  // residual skip
        for (int j = 0; j < kHidden; ++j) {
            grad[kW2 + i * kHidden + j] += da2[i] * act.h1[j];
            dh1[j] += da2[i] * p[kW2 + i * kHidden + j];
        }
    }

    for (int i = 0; i < kHidden; ++i) {
        const double da1 = act.a1[i] > 0.0 ? dh1[i] : 0.0;
        grad[kB1 + i] += da1;
        for (int j = 0; j < kIn; ++j)
            grad[kW1 + i * kIn + j] += da1 * x[j];
    }
}

} // namespace

Weights init_weights(std::span<const FeatureSnapshot> warmup) {
    if (warmup.size() < kInitSnapshotCount)
        return {0.25, 0.25, 0.25, 0.25};

    std::array<double, 4> contrib{};
    double total = 0.0;
    for (int i = 0; i < 4; ++i) {
        double mean = 0.0;
        for (const auto& s : warmup)
            mean += s.features[i];
        mean /= static_cast<double>(warmup.size());
        double var = 0.0;
        for (const auto& s : warmup)
            var += (s.features[i] - mean) * (s.features[i] - mean);
        var /= static_cast<double>(warmup.size());
        contrib[i] = var;
        total += var;
    }
    if (total == 0.0)
        contrib = {0.25, 0.25, 0.25, 0.25};
    else
        for (double& c : contrib)
            c /= total;

    const double max_w = *std::max_element(contrib.begin(), contrib.end());
    Weights w;
    double sum = 0.0;
    for (int i = 0; i < 4; ++i) {
        w[i] = 0.2 + 0.1 * contrib[i] / max_w;
        sum += w[i];
    }
    for (double& v : w)
        v /= sum;
    return w;
}

double reward_lambda(double h_prev, double l_prev_ms) {
    return (h_prev < 0.6 && l_prev_ms <= 20.0) ? 0.8 : 0.4;
}

WeightModel WeightModel::from_weights(const Weights& w, std::uint64_t seed) {
    WeightModel m;
    m.params_.assign(kParamCount, 0.0);
    Rng rng(derive_seed(seed, "weight-model-init"));
    const double s1 = 0.5 / std::sqrt(static_cast<double>(kIn));
    const double s2 = 0.5 / std::sqrt(static_cast<double>(kHidden));
    for (int i = 0; i < kHidden * kIn; ++i)
        m.params_[kW1 + i] = (rng.next_double() * 2.0 - 1.0) * s1;
    for (int i = 0; i < kHidden * kHidden; ++i)
        m.params_[kW2 + i] = (rng.next_double() * 2.0 - 1.0) * s2;
    // W3 = 0 and b3 = log(w) make the initial output exactly w.
    for (int i = 0; i < kOut; ++i)
        m.params_[kB3 + i] = std::log(w[i]);
    return m;
}

Weights WeightModel::forward(const FeatureVec& x) const {
    if (params_.empty())
        return {0.25, 0.25, 0.25, 0.25};
    Activations act;
    run_forward(params_, x, act);
    return {act.out[0], act.out[1], act.out[2], act.out[3]};
}

double model_reward(const WeightModel& model, std::span<const FeatureSnapshot> rows,
                    double lambda, double l_prev_ms) {
    if (rows.empty())
        return 0.0;
    std::vector<std::pair<double, std::size_t>> ranked(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const Weights w = model.forward(rows[i].features);
        double v = 0.0;
        for (int k = 0; k < 4; ++k)
            v += w[k] * rows[i].features[k];
        ranked[i] = {v, i};
    }
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        return a.first != b.first ? a.first > b.first : a.second < b.second;
    });
    const std::size_t take = (rows.size() + 1) / 2;
    double h = 0.0, l = 0.0;
    for (std::size_t i = 0; i < take; ++i) {
        h += rows[ranked[i].second].hit;
        l += rows[ranked[i].second].latency_ms;
    }
    h /= static_cast<double>(take);
    l /= static_cast<double>(take);
    const double l_ref = l_prev_ms > 0.0 ? l_prev_ms : 1.0;
    return lambda * h - (1.0 - lambda) * l / l_ref;
}

TrainOutcome incremental_train(const WeightModel& old_model,
                               std::span<const FeatureSnapshot> snapshots, double h_prev,
                               double l_prev_ms, std::uint64_t seed) {
    TrainOutcome out;
    out.model = old_model;
    out.lambda = reward_lambda(h_prev, l_prev_ms);
    if (snapshots.size() < 100)
        return out;

    if (snapshots.size() > kTrainSnapshotCount)
        snapshots = snapshots.subspan(snapshots.size() - kTrainSnapshotCount);

    Rng rng(derive_seed(seed, "weight-model-train"));
    std::vector<std::size_t> idx(snapshots.size());
    std::iota(idx.begin(), idx.end(), 0);
    for (std::size_t i = idx.size(); i > 1; --i)
        std::swap(idx[i - 1], idx[rng.next_below(i)]);
    const std::size_t held = std::max<std::size_t>(idx.size() / 5, 1);
    std::vector<FeatureSnapshot> train_rows, test_rows;
    for (std::size_t i = 0; i < idx.size(); ++i)
        (i < idx.size() - held ? train_rows : test_rows).push_back(snapshots[idx[i]]);

    // Oracle target: softmax of per-feature Pearson correlation with the hit
    // outcome over the training split.
    Weights target;
    {
        std::array<double, 4> corr{};
        double hit_mean = 0.0;
        for (const auto& r : train_rows)
            hit_mean += r.hit;
        hit_mean /= static_cast<double>(train_rows.size());
        double hit_var = 0.0;
        for (const auto& r : train_rows)
            hit_var += (r.hit - hit_mean) * (r.hit - hit_mean);
        for (int k = 0; k < 4; ++k) {
            double mean = 0.0;
            for (const auto& r : train_rows)
                mean += r.features[k];
            mean /= static_cast<double>(train_rows.size());
            double var = 0.0, cov = 0.0;
            for (const auto& r : train_rows) {
                var += (r.features[k] - mean) * (r.features[k] - mean);
                cov += (r.features[k] - mean) * (r.hit - hit_mean);
            }
            corr[k] = (var > 0.0 && hit_var > 0.0) ? cov / std::sqrt(var * hit_var) : 0.0;
        }
        double mx = *std::max_element(corr.begin(), corr.end());
        double sum = 0.0;
        for (int k = 0; k < 4; ++k) {
            target[k] = std::exp(2.0 * (corr[k] - mx));
            sum += target[k];
        }
        for (double& t : target)
            t /= sum;
    }

    WeightModel candidate = old_model;
    if (candidate.params_.empty())
        candidate = WeightModel::from_weights({0.25, 0.25, 0.25, 0.25}, seed);

    std::vector<double> m1(kParamCount, 0.0), m2(kParamCount, 0.0);
    std::vector<double> grad(kParamCount, 0.0);
    const double lr = 0.02, beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
    int step = 0;
    Activations act;
    for (int epoch = 0; epoch < 30; ++epoch) {
        for (std::size_t start = 0; start < train_rows.size(); start += kTrainBatchSize) {
            const std::size_t end = std::min(train_rows.size(),
                                             start + static_cast<std::size_t>(kTrainBatchSize));
            std::fill(grad.begin(), grad.end(), 0.0);
            for (std::size_t i = start; i < end; ++i) {
                run_forward(candidate.params_, train_rows[i].features, act);
                run_backward(candidate.params_, train_rows[i].features, act, target, grad);
            }
            const double inv = 1.0 / static_cast<double>(end - start);
            ++step;
            const double bc1 = 1.0 - std::pow(beta1, step);
            const double bc2 = 1.0 - std::pow(beta2, step);
            for (int pi = 0; pi < kParamCount; ++pi) {
                const double g = grad[pi] * inv;
                m1[pi] = beta1 * m1[pi] + (1.0 - beta1) * g;
                m2[pi] = beta2 * m2[pi] + (1.0 - beta2) * g * g;
                candidate.params_[pi] -= lr * (m1[pi] / bc1) / (std::sqrt(m2[pi] / bc2) + eps);
            }
        }
    }

    out.reward_old = model_reward(old_model, test_rows, out.lambda, l_prev_ms);
    out.reward_new = model_reward(candidate, test_rows, out.lambda, l_prev_ms);
    if (out.reward_new - out.reward_old >= kModelAcceptGain) {
        candidate.version_ = old_model.version_ + 1;
        out.model = std::move(candidate);
        out.accepted = true;
    }
    return out;
}

} // namespace pathmatch
