#ifndef PATHMATCH_METRICS_HPP
#define PATHMATCH_METRICS_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace pathmatch {

/// One line-delimited record: "KIND key=value key=value ...".
/// Field order is insertion order; numeric formatting is locale-free and
/// shortest-round-trip, so equal runs emit byte-identical streams.
struct MetricsRecord {
    std::string kind;
    std::vector<std::pair<std::string, std::string>> fields;

    MetricsRecord() = default;
    explicit MetricsRecord(std::string k) : kind(std::move(k)) {}

    MetricsRecord& add(std::string_view key, std::string_view value);
    MetricsRecord& add(std::string_view key, std::uint64_t value);
    MetricsRecord& add(std::string_view key, std::int64_t value);
    MetricsRecord& add(std::string_view key, double value);

    const std::string* find(std::string_view key) const;
    double number(std::string_view key, double fallback = 0.0) const;

    std::string to_line() const;
    static MetricsRecord parse(std::string_view line);
};

std::string format_double(double v);

class MetricsLog {
public:
    MetricsRecord& add(std::string kind);
    void append(MetricsRecord rec) { records_.push_back(std::move(rec)); }

    const std::vector<MetricsRecord>& records() const { return records_; }
    std::vector<const MetricsRecord*> of_kind(std::string_view kind) const;

    void write(std::ostream& out) const;
    std::string to_string() const;
    static MetricsLog read(std::istream& in);
    static MetricsLog from_string(std::string_view text);

private:
    std::vector<MetricsRecord> records_;
};

} // namespace pathmatch

#endif
