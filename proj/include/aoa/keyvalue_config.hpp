#pragma once

#include <map>
#include <string>
#include <vector>

namespace aoa {

// Declarative "key = value" config files; '#' starts a comment.
class KeyValueConfig {
public:
    static KeyValueConfig parse_file(const std::string& path);
    static KeyValueConfig parse_string(const std::string& text);

    bool has(const std::string& key) const { return values_.count(key) != 0; }

    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    long long get_int(const std::string& key, long long fallback) const;
    unsigned long long get_u64(const std::string& key, unsigned long long fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    // comma-separated numbers
    std::vector<double> get_double_list(const std::string& key,
                                        const std::vector<double>& fallback) const;

    const std::map<std::string, std::string>& values() const { return values_; }

private:
    std::map<std::string, std::string> values_;
};

} // namespace aoa
