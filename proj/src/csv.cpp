#include "infoflow/csv.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>

#include "infoflow/common.hpp"

namespace infoflow {

std::string_view trim(std::string_view s) {
    const auto is_space = [](char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; };
    while (!s.empty() && is_space(s.front()))
        s.remove_prefix(1);
    while (!s.empty() && is_space(s.back()))
        s.remove_suffix(1);
    return s;
}

std::string to_lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::optional<bool> parse_bool(std::string_view s) {
    const std::string v = to_lower(trim(s));
    if (v == "true" || v == "1" || v == "yes" || v == "t" || v == "y")
        return true;
    if (v == "false" || v == "0" || v == "no" || v == "f" || v == "n")
        return false;
    return std::nullopt;
}

std::vector<std::string> split_fields(std::string_view line, char delimiter) {
    std::vector<std::string> fields;
    std::string current;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    current.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                current.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == delimiter) {
            fields.emplace_back(trim(current));
            current.clear();
        } else {
            current.push_back(c);
        }
    }
    fields.emplace_back(trim(current));
    return fields;
}

std::string csv_escape(std::string_view field) {
    if (field.find_first_of(",\t\"\n") == std::string_view::npos)
        return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"')
            out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

std::string format_double(double value) {
    if (std::isinf(value))
        return value > 0 ? "inf" : "-inf";
    if (std::isnan(value))
        return "nan";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, res.ptr);
}

double parse_double(std::string_view s) {
    s = trim(s);
    const std::string lower = to_lower(s);
    if (lower == "inf" || lower == "+inf")
        return std::numeric_limits<double>::infinity();
    if (lower == "-inf")
        return -std::numeric_limits<double>::infinity();
    double value = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), value);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw Error("not a number: '" + std::string(s) + "'");
    return value;
}

CsvReader::CsvReader(const std::filesystem::path& path) : path_(path.string()), in_(path) {
    if (!in_)
        throw Error("cannot open " + path_);
    std::string line;
    if (!read_line(line))
        return;
    header_line_ = line_;
    delimiter_ = line.find('\t') != std::string::npos && line.find(',') == std::string::npos ? '\t' : ',';
    header_ = split_fields(line, delimiter_);
    for (auto& h : header_)
        h = to_lower(h);
}

bool CsvReader::read_line(std::string& out) {
    while (std::getline(in_, out)) {
        ++line_;
        if (!out.empty() && out.back() == '\r')
            out.pop_back();
        // UTF-8 byte order mark on the first line
        if (line_ == 1 && out.rfind("\xEF\xBB\xBF", 0) == 0)
            out.erase(0, 3);
        const auto t = trim(out);
        if (t.empty() || t.front() == '#')
            continue;
        return true;
    }
    return false;
}

std::optional<std::size_t> CsvReader::column(std::string_view name) const {
    const auto it = std::find(header_.begin(), header_.end(), name);
    if (it == header_.end())
        return std::nullopt;
    return static_cast<std::size_t>(it - header_.begin());
}

std::size_t CsvReader::require_column(std::string_view name) const {
    if (auto c = column(name))
        return *c;
    throw ParseError(path_, header_line_ == 0 ? 1 : header_line_,
                     "missing column '" + std::string(name) + "'");
}

bool CsvReader::next(std::vector<std::string>& fields) {
    if (header_.empty())
        return false;
    std::string line;
    if (!read_line(line))
        return false;
    fields = split_fields(line, delimiter_);
    if (fields.size() > header_.size())
        fail("expected at most " + std::to_string(header_.size()) + " fields, got " +
             std::to_string(fields.size()));
    fields.resize(header_.size());
    return true;
}

void CsvReader::fail(const std::string& what) const {
    throw ParseError(path_, line_, what);
}

}  // namespace infoflow
