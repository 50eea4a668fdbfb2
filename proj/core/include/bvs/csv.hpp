#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace bvs::csv {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::optional<std::size_t> column(std::string_view name) const;
};

// RFC 4180 subset: comma separated, double-quote escaping, CRLF or LF line
// endings, optional UTF-8 BOM. Every row must have the header's width.
Table parse(std::string_view text);
Table read(const std::filesystem::path& path);

// Shortest decimal representation that parses back to the same double.
std::string format_double(double x);
std::optional<double> parse_double(std::string_view s);

std::string escape(std::string_view field);
void write_row(std::ostream& os, std::span<const std::string> fields);
void write_row(std::ostream& os, std::initializer_list<std::string> fields);

}  // namespace bvs::csv
