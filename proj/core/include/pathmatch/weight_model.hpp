#ifndef PATHMATCH_WEIGHT_MODEL_HPP
#define PATHMATCH_WEIGHT_MODEL_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "pathmatch/cache.hpp"

namespace pathmatch {

inline constexpr std::uint32_t kInitSnapshotCount = 100;
inline constexpr std::uint32_t kTrainSnapshotCount = 500;  // latest rows fed to training
inline constexpr std::uint32_t kTrainBatchSize = 256;
inline constexpr double kModelAcceptGain = 0.03;

struct FeatureSnapshot {
    FeatureVec features{};
    double hit = 0.0;  // observed hit outcome for the epoch
    double latency_ms = 0.0;
};

/// Variance-share warm-up weights: features that moved during the first 100
/// queries earn more weight. Fewer than 100 rows (or zero total variance)
/// falls back to the uniform quarter split.
Weights init_weights(std::span<const FeatureSnapshot> warmup);

double reward_lambda(double h_prev, double l_prev_ms);

struct TrainOutcome;
class WeightModel;

/// One training round: regress onto hit-correlation oracle weights over the
/// latest 500 snapshots (Adam, batches of 256), then keep the candidate only
/// if its held-out reward beats the old model by at least 0.03.
TrainOutcome incremental_train(const WeightModel& old_model,
                               std::span<const FeatureSnapshot> snapshots, double h_prev,
                               double l_prev_ms, std::uint64_t seed);

/// 4 -> 32 residual unit -> 4 regressor whose outputs pass through a softmax,
/// so inferred weights are always positive and sum to one.
class WeightModel {
public:
    WeightModel() = default;

    // Fresh model whose output equals `w` exactly (final layer biased to the
    // log-weights), hidden layers seeded pseudo-randomly.
    static WeightModel from_weights(const Weights& w, std::uint64_t seed);

    Weights forward(const FeatureVec& x) const;

    std::uint32_t version() const { return version_; }
    std::span<const double> parameters() const { return params_; }

private:
    friend TrainOutcome incremental_train(const WeightModel&,
                                          std::span<const FeatureSnapshot>, double,
                                          double, std::uint64_t);

    std::vector<double> params_;  // W1 b1 W2 b2 W3 b3, row-major
    std::uint32_t version_ = 0;
};

struct TrainOutcome {
    WeightModel model;
    bool accepted = false;
    double reward_old = 0.0;
    double reward_new = 0.0;
    double lambda = 0.0;
};

/// Reward of ranking `rows` by the model's weighted feature sum and serving
/// the top half: lambda * hit_rate - (1 - lambda) * latency / l_prev.
double model_reward(const WeightModel& model, std::span<const FeatureSnapshot> rows,
                    double lambda, double l_prev_ms);

} // namespace pathmatch

#endif
