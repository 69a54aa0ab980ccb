#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace fp {

// Error categories surfaced through the C API as status codes.
class Error : public std::runtime_error {
  public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class IoError : public Error {
  public:
    explicit IoError(const std::string& msg) : Error(msg) {}
};

class ParseError : public Error {
  public:
    explicit ParseError(const std::string& msg) : Error(msg) {}
};

class ValidationError : public Error {
  public:
    explicit ValidationError(const std::string& msg) : Error(msg) {}
};

// Calendar date stored as days since the civil epoch.
using Date = std::chrono::sys_days;

// Parses "YYYY-MM-DD"; throws ParseError on malformed or impossible dates.
Date parse_date(std::string_view text);

std::string format_date(Date d);

inline long days_between(Date from, Date to) { return (to - from).count(); }

// 64-bit FNV-1a, used for data fingerprints in manifests and model files.
inline std::uint64_t fnv1a(std::string_view bytes, std::uint64_t seed = 14695981039346656037ull) {
    std::uint64_t h = seed;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::uint64_t fnv1a_file(const std::string& path);

std::string to_hex(std::uint64_t v);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, std::string_view content);

std::vector<std::string> split(std::string_view text, char sep);
std::string_view trim(std::string_view text);

// Locale-independent numeric rendering helpers.
std::string format_double(double v, int decimals);
// Shortest representation that round-trips through strtod bit-exactly.
std::string format_double_exact(double v);

}  // namespace fp
