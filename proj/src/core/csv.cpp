#include "core/csv.hpp"

#include "core/errors.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace eventalpha {

std::optional<CsvRecord> CsvReader::next() {
    if (eof_) return std::nullopt;
    int c = in_.get();
    if (c == EOF) {
        eof_ = true;
        return std::nullopt;
    }
    in_.unget();

    CsvRecord rec;
    rec.line = line_;
    std::string field;
    bool quoted = false;
    for (;;) {
        c = in_.get();
        if (quoted) {
            if (c == EOF) fail_validation("UnterminatedQuote", "unterminated quoted field starting near line " + std::to_string(rec.line));
            if (c == '"') {
                int peek = in_.get();
                if (peek == '"') {
                    field.push_back('"');
                } else {
                    quoted = false;
                    if (peek != EOF) in_.unget();
                }
            } else {
                if (c == '\n') ++line_;
                field.push_back(static_cast<char>(c));
            }
            continue;
        }
        if (c == '"' && field.empty()) {
            quoted = true;
        } else if (c == ',') {
            rec.fields.push_back(std::move(field));
            field.clear();
        } else if (c == '\r') {
            int peek = in_.get();
            if (peek != '\n' && peek != EOF) in_.unget();
            ++line_;
            break;
        } else if (c == '\n') {
            ++line_;
            break;
        } else if (c == EOF) {
            eof_ = true;
            break;
        } else {
            field.push_back(static_cast<char>(c));
        }
    }
    rec.fields.push_back(std::move(field));
    return rec;
}

std::string csv_escape(std::string_view field, std::string_view force_quote_chars) {
    bool needs_quote = field.find_first_of(",\"\r\n") != std::string_view::npos;
    if (!needs_quote && !force_quote_chars.empty())
        needs_quote = field.find_first_of(force_quote_chars) != std::string_view::npos;
    if (!needs_quote) return std::string(field);
    std::string out;
    out.reserve(field.size() + 2);
    out.push_back('"');
    for (char c : field) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

void write_csv_row(std::ostream& out, std::span<const std::string> fields,
                   std::string_view force_quote_chars) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out.put(',');
        out << csv_escape(fields[i], force_quote_chars);
    }
    out.put('\n');
}

std::string fmt_double(double v) {
    char buf[64];
    auto r = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, r.ptr);
}

std::string fmt_fixed(double v, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
    std::string s(buf);
    // "-0.0000" carries no information; keep tables tidy.
    if (s.size() > 1 && s[0] == '-' && s.find_first_not_of("0.", 1) == std::string::npos)
        s.erase(0, 1);
    return s;
}

double parse_double_strict(std::string_view s, const std::string& context, std::size_t line) {
    auto t = trim(s);
    double v = 0;
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc{} || ptr != t.data() + t.size() || !std::isfinite(v))
        fail_validation("BadNumber", context + ": invalid number '" + std::string(s) +
                                         "' at line " + std::to_string(line));
    return v;
}

long long parse_int_strict(std::string_view s, const std::string& context, std::size_t line) {
    auto t = trim(s);
    long long v = 0;
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc{} || ptr != t.data() + t.size())
        fail_validation("BadNumber", context + ": invalid integer '" + std::string(s) +
                                         "' at line " + std::to_string(line));
    return v;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail_io("IoError", "cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, std::string_view contents) {
    auto parent = std::filesystem::path(path).parent_path();
    if (!parent.empty()) {
        std::error_code ec;
        std::filesystem::create_directories(parent, ec);
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail_io("IoError", "cannot write file: " + path);
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) fail_io("IoError", "write failed: " + path);
}

std::string_view trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::string to_lower(std::string_view s) {
    std::string out(s);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

std::string to_upper(std::string_view s) {
    std::string out(s);
    for (char& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return out;
}

} // namespace eventalpha
