#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace eventalpha {

struct CsvRecord {
    std::vector<std::string> fields;
    std::size_t line = 0; // 1-based line where the record starts
};

// RFC-4180 reader: quoted fields may contain commas, doubled quotes, and
// newlines; bare CR/LF and CRLF line endings are both accepted.
class CsvReader {
public:
    explicit CsvReader(std::istream& in) : in_(in) {}

    std::optional<CsvRecord> next();

private:
    std::istream& in_;
    std::size_t line_ = 1;
    bool eof_ = false;
};

// Quotes a field if it contains a separator, quote, newline, or any
// character listed in force_quote_chars.
std::string csv_escape(std::string_view field, std::string_view force_quote_chars = "");

void write_csv_row(std::ostream& out, std::span<const std::string> fields,
                   std::string_view force_quote_chars = "");

// Shortest round-trip decimal representation (std::to_chars).
std::string fmt_double(double v);

// Fixed-point with the given number of decimals; "-0.0000" is normalized
// to "0.0000".
std::string fmt_fixed(double v, int decimals);

// Strict finite-double parse of the whole string.
double parse_double_strict(std::string_view s, const std::string& context, std::size_t line);

long long parse_int_strict(std::string_view s, const std::string& context, std::size_t line);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view contents);

std::string_view trim(std::string_view s);
std::string to_lower(std::string_view s);
std::string to_upper(std::string_view s);

} // namespace eventalpha
