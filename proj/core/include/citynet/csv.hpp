#ifndef CITYNET_CSV_HPP
#define CITYNET_CSV_HPP

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace citynet::csv {

/// Shortest round-trip decimal representation (std::to_chars); parses back to
/// the identical double, so CSV artifacts are byte-stable.
std::string format_double(double value);

/// Strict double parse of a full field. Throws std::invalid_argument.
double parse_double(std::string_view field, std::string_view context);
std::uint64_t parse_u64(std::string_view field, std::string_view context);

/// Splits one CSV record on commas. Fields are trimmed of surrounding
/// whitespace; quoting is not interpreted (the artifact formats never need
/// it: ids, numbers, plain names).
std::vector<std::string> split_record(std::string_view line);

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t column(std::string_view name) const;  // throws if absent
};

/// Reads a whole CSV file; requires a header row. Skips blank lines.
Table read_file(const std::string& path);

/// Writes rows joined by commas with a trailing newline per record.
void write_file(const std::string& path, const Table& table);

}  // namespace citynet::csv

#endif
