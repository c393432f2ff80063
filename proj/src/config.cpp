#include "nbodylab/config.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace nbodylab::io {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

} // namespace

Config Config::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_string(ss.str(), path);
}

Config Config::parse_string(const std::string& text, const std::string& name) {
    Config cfg;
    cfg.name_ = name;
    cfg.text_ = text;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(name + ":" + std::to_string(lineno) +
                              ": expected 'key = value', got '" + line + "'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw ConfigError(name + ":" + std::to_string(lineno) + ": empty key");
        if (cfg.entries_.count(key))
            throw ConfigError(name + ":" + std::to_string(lineno) + ": duplicate key '" + key +
                              "' (first set on line " +
                              std::to_string(cfg.entries_[key].line) + ")");
        cfg.entries_[key] = {value, lineno};
    }
    return cfg;
}

bool Config::has(const std::string& key) const { return entries_.count(key) > 0; }

const Config::Entry& Config::lookup(const std::string& key) const {
    auto it = entries_.find(key);
    if (it == entries_.end())
        throw ConfigError(name_ + ": missing required key '" + key + "'");
    return it->second;
}

std::string Config::get_string(const std::string& key) const { return lookup(key).value; }

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
    return has(key) ? get_string(key) : fallback;
}

double Config::get_double(const std::string& key) const {
    const Entry& e = lookup(key);
    try {
        std::size_t used = 0;
        const double v = std::stod(e.value, &used);
        if (used != e.value.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw ConfigError(name_ + ":" + std::to_string(e.line) + ": field '" + key +
                          "' is not a number: '" + e.value + "'");
    }
}

double Config::get_double(const std::string& key, double fallback) const {
    return has(key) ? get_double(key) : fallback;
}

std::uint64_t Config::get_u64(const std::string& key) const {
    const Entry& e = lookup(key);
    try {
        std::size_t used = 0;
        const unsigned long long v = std::stoull(e.value, &used);
        if (used != e.value.size()) throw std::invalid_argument("trailing characters");
        return static_cast<std::uint64_t>(v);
    } catch (const std::exception&) {
        throw ConfigError(name_ + ":" + std::to_string(e.line) + ": field '" + key +
                          "' is not an unsigned integer: '" + e.value + "'");
    }
}

std::uint64_t Config::get_u64(const std::string& key, std::uint64_t fallback) const {
    return has(key) ? get_u64(key) : fallback;
}

long Config::get_long(const std::string& key, long fallback) const {
    if (!has(key)) return fallback;
    return static_cast<long>(get_u64(key));
}

std::vector<double> Config::get_doubles(const std::string& key) const {
    const Entry& e = lookup(key);
    std::vector<double> out;
    std::string item;
    std::istringstream ss(e.value);
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        try {
            out.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw ConfigError(name_ + ":" + std::to_string(e.line) + ": field '" + key +
                              "' has a non-numeric entry '" + item + "'");
        }
    }
    if (out.empty())
        throw ConfigError(name_ + ":" + std::to_string(e.line) + ": field '" + key +
                          "' is an empty list");
    return out;
}

namespace {

bool pattern_matches(const std::string& pattern, const std::string& key) {
    const std::size_t mark = pattern.find("<k>");
    if (mark == std::string::npos) return pattern == key;
    const std::string pre = pattern.substr(0, mark);
    const std::string post = pattern.substr(mark + 3);
    if (key.size() < pre.size() + post.size() + 1) return false;
    if (key.compare(0, pre.size(), pre) != 0) return false;
    if (key.compare(key.size() - post.size(), post.size(), post) != 0) return false;
    const std::string mid = key.substr(pre.size(), key.size() - pre.size() - post.size());
    if (mid.empty()) return false;
    for (char c : mid)
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    return true;
}

} // namespace

void Config::require_keys_among(const std::vector<std::string>& patterns) const {
    for (const auto& [key, entry] : entries_) {
        bool ok = false;
        for (const std::string& p : patterns)
            if (pattern_matches(p, key)) {
                ok = true;
                break;
            }
        if (!ok)
            throw ConfigError(name_ + ":" + std::to_string(entry.line) + ": unknown key '" + key +
                              "' for this experiment");
    }
}

std::vector<std::string> Config::keys_with_prefix(const std::string& prefix) const {
    std::vector<std::string> out;
    for (const auto& [key, entry] : entries_)
        if (key.compare(0, prefix.size(), prefix) == 0) out.push_back(key);
    return out;
}

std::uint64_t fnv1a_hash(const std::string& text) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string hash_hex(std::uint64_t h) {
    char buf[24];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

} // namespace nbodylab::io
