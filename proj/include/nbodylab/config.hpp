#ifndef NBODYLAB_CONFIG_HPP
#define NBODYLAB_CONFIG_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "nbodylab/errors.hpp"

namespace nbodylab::io {

/// Line-oriented key = value configuration with dotted keys for nesting and
/// '#' comments. Numbers are 64-bit floats, seeds 64-bit unsigned integers,
/// lists comma-separated. Unknown keys are rejected during validation with
/// the offending line in the message.
class Config {
public:
    static Config parse_file(const std::string& path);
    static Config parse_string(const std::string& text, const std::string& name = "<config>");

    bool has(const std::string& key) const;

    std::string get_string(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key) const;
    double get_double(const std::string& key, double fallback) const;
    std::uint64_t get_u64(const std::string& key) const;
    std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
    long get_long(const std::string& key, long fallback) const;
    std::vector<double> get_doubles(const std::string& key) const;

    /// Every key must match one of the patterns; a pattern containing "<k>"
    /// matches any integer in that position (state.body<k>.position).
    void require_keys_among(const std::vector<std::string>& patterns) const;

    std::vector<std::string> keys_with_prefix(const std::string& prefix) const;

    const std::string& source_name() const { return name_; }
    const std::string& source_text() const { return text_; }

private:
    struct Entry {
        std::string value;
        int line;
    };
    std::map<std::string, Entry> entries_;
    std::string name_;
    std::string text_;

    const Entry& lookup(const std::string& key) const;
};

/// FNV-1a hash of the raw config text; embedded in outputs as provenance.
std::uint64_t fnv1a_hash(const std::string& text);
std::string hash_hex(std::uint64_t h);

} // namespace nbodylab::io

#endif
