#pragma once

#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace anyplace {

/// Raised for malformed input files and bad user-supplied values.
class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Shortest text that parses back to exactly the same double.
std::string format_double(double v);
std::string format_float(float v);

std::vector<std::string_view> split_ws(std::string_view s);
std::vector<std::string_view> split(std::string_view s, char sep);
std::string_view trim(std::string_view s);
double parse_double(std::string_view s);
long long parse_int(std::string_view s);
std::vector<double> parse_doubles(std::string_view s);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

/// Ordered `key = value` text file. Lines starting with '#' are comments.
/// Keys may repeat (e.g. several `object` lines in a scene).
class KeyValueFile {
public:
    struct Entry {
        std::string key;
        std::string value;
        int line = 0;
    };

    static KeyValueFile parse(std::string_view text, std::string source = "<string>");
    static KeyValueFile load(const std::filesystem::path& path);

    const std::vector<Entry>& entries() const { return entries_; }
    bool has(std::string_view key) const;
    /// The single value for key; throws if missing or repeated.
    const std::string& get(std::string_view key) const;
    std::string get_or(std::string_view key, std::string_view fallback) const;
    std::vector<const Entry*> all(std::string_view key) const;
    std::vector<double> numbers(std::string_view key, std::size_t expected) const;
    const std::string& source() const { return source_; }

private:
    std::string source_;
    std::vector<Entry> entries_;
};

}  // namespace anyplace
