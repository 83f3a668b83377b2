#pragma once

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace infoflow {

/// Line-oriented reader for delimiter-separated files with a header row.
/// The delimiter (comma or tab) is taken from the header. Fields may be
/// double-quoted; blank lines and lines starting with '#' are skipped.
class CsvReader {
public:
    explicit CsvReader(const std::filesystem::path& path);

    /// False when the file has no header at all (zero non-blank lines).
    bool has_header() const noexcept { return !header_.empty(); }
    const std::vector<std::string>& header() const noexcept { return header_; }

    /// Column index by name, or nullopt.
    std::optional<std::size_t> column(std::string_view name) const;
    /// Column index by name; throws ParseError on the header line if absent.
    std::size_t require_column(std::string_view name) const;

    /// Reads the next record into `fields`; false at end of file.
    bool next(std::vector<std::string>& fields);

    /// 1-based line number of the record last returned by next().
    std::size_t line() const noexcept { return line_; }
    const std::string& path() const noexcept { return path_; }

    [[noreturn]] void fail(const std::string& what) const;

private:
    bool read_line(std::string& out);

    std::string path_;
    std::ifstream in_;
    char delimiter_ = ',';
    std::vector<std::string> header_;
    std::size_t header_line_ = 0;
    std::size_t line_ = 0;
};

std::vector<std::string> split_fields(std::string_view line, char delimiter);

/// Quotes a field when it contains the delimiter, a quote, or a newline.
std::string csv_escape(std::string_view field);

std::string_view trim(std::string_view s);

/// Accepts true/false, 1/0, yes/no, t/f (case-insensitive).
std::optional<bool> parse_bool(std::string_view s);

std::string to_lower(std::string_view s);

/// Shortest round-trip representation of a double ("inf"/"-inf" for infinities).
std::string format_double(double value);
double parse_double(std::string_view s);

}  // namespace infoflow
