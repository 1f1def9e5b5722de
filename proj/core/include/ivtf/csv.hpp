#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

// Minimal comma-separated text handling shared by every file format in the
// toolkit. Numbers are written in shortest round-trip form so that export
// followed by import reproduces every double bit for bit.
namespace ivtf::csv {

std::string format(double value);

/// Parses a whole field as a double (surrounding blanks allowed, "+" and
/// "inf" accepted). nullopt on any trailing garbage.
std::optional<double> parse_double(std::string_view field);

std::string_view trim(std::string_view s);

/// Splits one record. Double-quoted fields may contain commas and "" escapes.
std::vector<std::string> split(std::string_view line);

/// Quotes a field when it contains a comma, quote, or newline.
std::string escape(std::string_view field);

std::string join(const std::vector<std::string>& fields);

struct Row
{
    std::size_t line_number = 0;  // 1-based line in the source
    std::vector<std::string> fields;
};

struct Document
{
    std::vector<std::string> header;
    std::vector<Row> rows;
};

/// Reads a header line plus records. Blank lines and lines starting with '#'
/// are skipped. An empty stream yields an empty header.
Document read(std::istream& in);

}  // namespace ivtf::csv
