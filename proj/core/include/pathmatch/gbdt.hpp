#ifndef PATHMATCH_GBDT_HPP
#define PATHMATCH_GBDT_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace pathmatch {

struct GBDTParams {
    std::uint32_t num_trees = 100;
    std::uint32_t max_depth = 4;
    double learning_rate = 0.1;
    double min_child_weight = 1e-9;
};

/// Gradient-boosted regression trees with exact greedy splits and squared
/// loss. Fully deterministic: features scanned in order, thresholds at
/// midpoints of consecutive distinct values, first best split wins.
class GBDTModel {
public:
    struct Node {
        std::int32_t feature = -1;  // -1 marks a leaf
        double threshold = 0.0;
        std::uint32_t left = 0;
        std::uint32_t right = 0;
        double value = 0.0;
    };

    static GBDTModel train(const std::vector<std::vector<double>>& rows,
                           std::span<const double> targets,
                           std::span<const double> sample_weights, const GBDTParams& params);

    double predict(std::span<const double> features) const;
    void predict_batch(const std::vector<std::vector<double>>& rows,
                       std::vector<double>& out) const;

    std::size_t tree_count() const { return trees_.size(); }
    double base_value() const { return base_; }

    std::vector<std::byte> serialize() const;
    static GBDTModel deserialize(std::span<const std::byte> blob);

private:
    double base_ = 0.0;
    double rate_ = 0.1;
    std::vector<std::vector<Node>> trees_;
};

} // namespace pathmatch

#endif
