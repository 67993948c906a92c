#include "pathmatch/manifest.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "pathmatch/errors.hpp"

namespace pathmatch {

using nlohmann::json;

std::array<ToggleSet, 8> all_toggle_combinations() {
    std::array<ToggleSet, 8> out;
    std::size_t i = 0;
    for (bool bal : {false, true})
        for (CachePolicy pol : {CachePolicy::Lru, CachePolicy::Adaptive})
            for (bool rank : {false, true})
                out[i++] = ToggleSet{bal, pol, rank};
    return out;
}

std::string toggle_label(const ToggleSet& t) {
    std::string s;
    s += t.balancing ? "bal" : "nobal";
    s += t.cache_policy == CachePolicy::Adaptive ? "+adaptive" : "+lru";
    s += t.ranking ? "+rank" : "+norank";
    return s;
}

std::vector<MachineSpec> default_machines(std::uint32_t n) {
    std::vector<MachineSpec> out;
    out.reserve(n);
    for (std::uint32_t i = 0; i < n; ++i) {
        MachineSpec m;
        m.id = i;
        m.cores = 8;
        m.freq_ghz = 3.0;
        m.mem_bandwidth_gbs = 25.6;
        m.gpu_tflops = 10.0;
        m.gpu_vram_gb = 8.0;
        m.mem_capacity_bytes = 1ULL << 30;
        out.push_back(m);
    }
    return out;
}

namespace {

json machine_to_json(const MachineSpec& m) {
    return json{{"id", m.id},
                {"cores", m.cores},
                {"freq_ghz", m.freq_ghz},
                {"mem_bandwidth_gbs", m.mem_bandwidth_gbs},
                {"gpu_tflops", m.gpu_tflops},
                {"gpu_vram_gb", m.gpu_vram_gb},
                {"mem_capacity_bytes", m.mem_capacity_bytes}};
}

MachineSpec machine_from_json(const json& j) {
    MachineSpec m;
    m.id = j.at("id").get<std::uint32_t>();
    m.cores = j.at("cores").get<std::uint32_t>();
    m.freq_ghz = j.at("freq_ghz").get<double>();
    m.mem_bandwidth_gbs = j.at("mem_bandwidth_gbs").get<double>();
    m.gpu_tflops = j.at("gpu_tflops").get<double>();
    m.gpu_vram_gb = j.at("gpu_vram_gb").get<double>();
    m.mem_capacity_bytes = j.at("mem_capacity_bytes").get<std::uint64_t>();
    return m;
}

} // namespace

std::string manifest_to_json(const RunManifest& m) {
    json j;
    j["config_path"] = m.config_path;
    j["seed"] = m.seed;
    j["toggles"] = json{
        {"balancing", m.toggles.balancing},
        {"cache_policy", m.toggles.cache_policy == CachePolicy::Adaptive ? "adaptive" : "lru"},
        {"ranking", m.toggles.ranking}};
    j["out_dir"] = m.out_dir;
    j["version"] = m.version;
    j["graph"] = json{{"n", m.graph.n},
                      {"k", m.graph.k},
                      {"p_add", m.graph.p_add},
                      {"label_count", m.graph.label_count}};
    j["machines"] = json::array();
    for (const MachineSpec& spec : m.machines)
        j["machines"].push_back(machine_to_json(spec));
    j["shard_count"] = m.shard_count;
    j["warmup_queries"] = m.warmup_queries;
    j["query_count"] = m.query_count;
    j["fault_probability"] = m.fault_probability;
    j["reverse_plan"] = m.reverse_plan;
    return j.dump(2) + "\n";
}

RunManifest manifest_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("manifest: ") + e.what());
    }
    try {
        RunManifest m;
        m.config_path = j.at("config_path").get<std::string>();
        m.seed = j.at("seed").get<std::uint64_t>();
        const json& t = j.at("toggles");
        m.toggles.balancing = t.at("balancing").get<bool>();
        const std::string pol = t.at("cache_policy").get<std::string>();
        if (pol == "adaptive")
            m.toggles.cache_policy = CachePolicy::Adaptive;
        else if (pol == "lru")
            m.toggles.cache_policy = CachePolicy::Lru;
        else
            throw ParseError("manifest: unknown cache_policy \"" + pol + "\"");
        m.toggles.ranking = t.at("ranking").get<bool>();
        m.out_dir = j.at("out_dir").get<std::string>();
        m.version = j.at("version").get<std::string>();
        const json& g = j.at("graph");
        m.graph.n = g.at("n").get<std::uint32_t>();
        m.graph.k = g.at("k").get<std::uint32_t>();
        m.graph.p_add = g.at("p_add").get<double>();
        m.graph.label_count = g.at("label_count").get<std::uint32_t>();
        m.machines.clear();
        for (const json& spec : j.at("machines"))
            m.machines.push_back(machine_from_json(spec));
        m.shard_count = j.at("shard_count").get<std::uint32_t>();
        m.warmup_queries = j.at("warmup_queries").get<std::uint32_t>();
        m.query_count = j.at("query_count").get<std::uint32_t>();
        m.fault_probability = j.at("fault_probability").get<double>();
        m.reverse_plan = j.at("reverse_plan").get<bool>();
        return m;
    } catch (const json::exception& e) {
        throw ParseError(std::string("manifest: ") + e.what());
    }
}

RunManifest load_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open manifest file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    RunManifest m = manifest_from_json(buf.str());
    m.config_path = path;
    return m;
}

void save_manifest(const RunManifest& m, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw ConfigError("cannot write manifest file: " + path);
    out << manifest_to_json(m);
}

} // namespace pathmatch
