#ifndef ITCLASS_COMMON_HPP
#define ITCLASS_COMMON_HPP

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace itclass {

// Input data failed validation (bad row, bad label, schema mismatch).
// Maps to CLI exit code 1.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

// File could not be opened/read/written. Maps to CLI exit code 2.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

std::string to_lower_ascii(std::string_view s);

// Number of unicode codepoints in a UTF-8 string.
std::size_t utf8_length(std::string_view s);

// Replaces U+2019 (right single quote) with ASCII apostrophe.
std::string normalize_apostrophe(std::string_view s);

std::vector<std::string> split(std::string_view s, char sep);

std::string trim(std::string_view s);

bool parse_double(std::string_view s, double& out);
bool parse_long(std::string_view s, long& out);

std::string read_text_file(const std::string& path);

// FNV-1a 64-bit, used for schema hashes and output directory names.
std::uint64_t fnv1a64(std::string_view s, std::uint64_t seed = 14695981039346656037ULL);

}  // namespace itclass

#endif
