#include "anyplace/text_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace anyplace {

std::string format_double(double v)
{
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string format_float(float v)
{
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string_view trim(std::string_view s)
{
    const char* ws = " \t\r\n";
    auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) {
        return {};
    }
    auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split_ws(std::string_view s)
{
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r' || s[i] == '\n')) {
            ++i;
        }
        std::size_t j = i;
        while (j < s.size() && !(s[j] == ' ' || s[j] == '\t' || s[j] == '\r' || s[j] == '\n')) {
            ++j;
        }
        if (j > i) {
            out.push_back(s.substr(i, j - i));
        }
        i = j;
    }
    return out;
}

std::vector<std::string_view> split(std::string_view s, char sep)
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        auto pos = s.find(sep, start);
        if (pos == std::string_view::npos) {
            out.push_back(s.substr(start));
            return out;
        }
        out.push_back(s.substr(start, pos - start));
        start = pos + 1;
    }
}

double parse_double(std::string_view s)
{
    s = trim(s);
    if (!s.empty() && s.front() == '+') {
        s.remove_prefix(1);
    }
    double v = 0.0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        throw FormatError("not a number: '" + std::string(s) + "'");
    }
    return v;
}

long long parse_int(std::string_view s)
{
    s = trim(s);
    long long v = 0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        throw FormatError("not an integer: '" + std::string(s) + "'");
    }
    return v;
}

std::vector<double> parse_doubles(std::string_view s)
{
    std::vector<double> out;
    for (auto tok : split_ws(s)) {
        out.push_back(parse_double(tok));
    }
    return out;
}

std::string read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw FormatError("cannot open " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view contents)
{
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw FormatError("cannot write " + path.string());
    }
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) {
        throw FormatError("write failed: " + path.string());
    }
}

KeyValueFile KeyValueFile::parse(std::string_view text, std::string source)
{
    KeyValueFile kv;
    kv.source_ = std::move(source);
    int lineno = 0;
    for (auto raw : split(text, '\n')) {
        ++lineno;
        auto line = trim(raw);
        if (line.empty() || line.front() == '#') {
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw FormatError(kv.source_ + ":" + std::to_string(lineno) + ": expected 'key = value'");
        }
        Entry e;
        e.key = std::string(trim(line.substr(0, eq)));
        e.value = std::string(trim(line.substr(eq + 1)));
        e.line = lineno;
        if (e.key.empty()) {
            throw FormatError(kv.source_ + ":" + std::to_string(lineno) + ": empty key");
        }
        kv.entries_.push_back(std::move(e));
    }
    return kv;
}

KeyValueFile KeyValueFile::load(const std::filesystem::path& path)
{
    return parse(read_file(path), path.string());
}

bool KeyValueFile::has(std::string_view key) const
{
    for (const auto& e : entries_) {
        if (e.key == key) {
            return true;
        }
    }
    return false;
}

const std::string& KeyValueFile::get(std::string_view key) const
{
    const Entry* found = nullptr;
    for (const auto& e : entries_) {
        if (e.key == key) {
            if (found) {
                throw FormatError(source_ + ":" + std::to_string(e.line) + ": duplicate key '" +
                                  std::string(key) + "'");
            }
            found = &e;
        }
    }
    if (!found) {
        throw FormatError(source_ + ": missing key '" + std::string(key) + "'");
    }
    return found->value;
}

std::string KeyValueFile::get_or(std::string_view key, std::string_view fallback) const
{
    return has(key) ? get(key) : std::string(fallback);
}

std::vector<const KeyValueFile::Entry*> KeyValueFile::all(std::string_view key) const
{
    std::vector<const Entry*> out;
    for (const auto& e : entries_) {
        if (e.key == key) {
            out.push_back(&e);
        }
    }
    return out;
}

std::vector<double> KeyValueFile::numbers(std::string_view key, std::size_t expected) const
{
    auto v = parse_doubles(get(key));
    if (v.size() != expected) {
        throw FormatError(source_ + ": key '" + std::string(key) + "' expects " +
                          std::to_string(expected) + " numbers, got " + std::to_string(v.size()));
    }
    return v;
}

}  // namespace anyplace
