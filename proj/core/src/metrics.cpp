#include "pathmatch/metrics.hpp"

#include <charconv>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "pathmatch/errors.hpp"

namespace pathmatch {

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

MetricsRecord& MetricsRecord::add(std::string_view key, std::string_view value) {
    fields.emplace_back(std::string(key), std::string(value));
    return *this;
}

MetricsRecord& MetricsRecord::add(std::string_view key, std::uint64_t value) {
    return add(key, std::string_view(std::to_string(value)));
}

MetricsRecord& MetricsRecord::add(std::string_view key, std::int64_t value) {
    return add(key, std::string_view(std::to_string(value)));
}

MetricsRecord& MetricsRecord::add(std::string_view key, double value) {
    return add(key, std::string_view(format_double(value)));
}

const std::string* MetricsRecord::find(std::string_view key) const {
    for (const auto& [k, v] : fields)
        if (k == key)
            return &v;
    return nullptr;
}

double MetricsRecord::number(std::string_view key, double fallback) const {
    const std::string* v = find(key);
    if (!v)
        return fallback;
    double out = fallback;
    std::from_chars(v->data(), v->data() + v->size(), out);
    return out;
}

std::string MetricsRecord::to_line() const {
    std::string line = kind;
    for (const auto& [k, v] : fields) {
        line += ' ';
        line += k;
        line += '=';
        line += v;
    }
    return line;
}

MetricsRecord MetricsRecord::parse(std::string_view line) {
    MetricsRecord rec;
    std::size_t pos = 0;
    auto next_token = [&]() -> std::string_view {
        while (pos < line.size() && line[pos] == ' ')
            ++pos;
        const std::size_t start = pos;
        while (pos < line.size() && line[pos] != ' ')
            ++pos;
        return line.substr(start, pos - start);
    };
    const std::string_view kind = next_token();
    if (kind.empty())
        throw ParseError("metrics record: empty line", 0);
    rec.kind = std::string(kind);
    for (std::string_view tok = next_token(); !tok.empty(); tok = next_token()) {
        const std::size_t eq = tok.find('=');
        if (eq == std::string_view::npos)
            throw ParseError("metrics record: token without '='", 0);
        rec.add(tok.substr(0, eq), tok.substr(eq + 1));
    }
    return rec;
}

MetricsRecord& MetricsLog::add(std::string kind) {
    records_.emplace_back(std::move(kind));
    return records_.back();
}

std::vector<const MetricsRecord*> MetricsLog::of_kind(std::string_view kind) const {
    std::vector<const MetricsRecord*> out;
    for (const auto& r : records_)
        if (r.kind == kind)
            out.push_back(&r);
    return out;
}

void MetricsLog::write(std::ostream& out) const {
    for (const auto& r : records_)
        out << r.to_line() << '\n';
}

std::string MetricsLog::to_string() const {
    std::ostringstream ss;
    write(ss);
    return ss.str();
}

MetricsLog MetricsLog::read(std::istream& in) {
    MetricsLog log;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        log.records_.push_back(MetricsRecord::parse(line));
    }
    return log;
}

MetricsLog MetricsLog::from_string(std::string_view text) {
    std::istringstream ss{std::string(text)};
    return read(ss);
}

} // namespace pathmatch
