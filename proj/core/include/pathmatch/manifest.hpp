#ifndef PATHMATCH_MANIFEST_HPP
#define PATHMATCH_MANIFEST_HPP

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "pathmatch/cache.hpp"
#include "pathmatch/partition.hpp"

namespace pathmatch {

struct ToggleSet {
    bool balancing = true;
    CachePolicy cache_policy = CachePolicy::Adaptive;
    bool ranking = true;

    bool operator==(const ToggleSet&) const = default;
};

// The full sweep grid: balancing x cache policy x ranking.
std::array<ToggleSet, 8> all_toggle_combinations();

std::string toggle_label(const ToggleSet& t);

struct GraphParams {
    std::uint32_t n = 300;
    std::uint32_t k = 4;
    double p_add = 0.1;
    std::uint32_t label_count = 5;

    bool operator==(const GraphParams&) const = default;
};

/// Everything a run needs. Two runs with equal manifests and the same binary
/// produce byte-identical metrics streams.
struct RunManifest {
    std::string config_path;
    std::uint64_t seed = 0;
    ToggleSet toggles;
    std::string out_dir = "out";
    std::string version = "pathmatch-0.1.0";

    GraphParams graph;
    std::vector<MachineSpec> machines;
    std::uint32_t shard_count = 8;
    std::uint32_t warmup_queries = 120;
    std::uint32_t query_count = 30;
    double fault_probability = 0.0;
    bool reverse_plan = false;  // debugging knob: execute plans worst-first

    bool operator==(const RunManifest&) const = default;
};

std::vector<MachineSpec> default_machines(std::uint32_t n);

std::string manifest_to_json(const RunManifest& m);
RunManifest manifest_from_json(const std::string& text);  // throws ParseError

RunManifest load_manifest(const std::string& path);  // throws ConfigError on IO
void save_manifest(const RunManifest& m, const std::string& path);

} // namespace pathmatch

#endif
