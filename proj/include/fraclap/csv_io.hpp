#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace fraclap {

/// Float text with 17 significant digits (%.17g), enough to round-trip any double.
[[nodiscard]] std::string format_double(double v);

/// Numeric table written as '#'-prefixed "key = value" metadata lines, a header
/// line of column names and comma-separated rows.
struct CsvTable {
    std::vector<std::pair<std::string, std::string>> meta;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    void add_meta(std::string key, std::string value);
    void add_meta(std::string key, double value);
    /// Value of a metadata key; throws std::out_of_range when absent.
    [[nodiscard]] const std::string& meta_value(std::string_view key) const;
    /// Index of a column; throws std::out_of_range naming the missing column.
    [[nodiscard]] std::size_t column(std::string_view name) const;
};

void write_csv(std::ostream& out, const CsvTable& table);
/// Creates parent directories as needed.
void write_csv(const std::filesystem::path& path, const CsvTable& table);

[[nodiscard]] CsvTable read_csv(std::istream& in);
[[nodiscard]] CsvTable read_csv(const std::filesystem::path& path);

/// Git blob hash: SHA-1 of "blob <size>\0" followed by the content, as 40 hex digits.
[[nodiscard]] std::string content_hash(std::string_view content);

}  // namespace fraclap
