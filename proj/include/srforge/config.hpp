#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace srforge {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Flat `[section]` / `key = value` text configuration. Lists and ranges are
/// comma-separated (`blur_sigma = 0.2, 3`). Unknown keys are reported by
/// `unused_keys()` so callers can reject typos.
class IniConfig {
public:
    IniConfig() = default;

    static IniConfig load(const std::filesystem::path& path);
    static IniConfig parse(const std::string& text);

    [[nodiscard]] bool has_section(const std::string& section) const;
    [[nodiscard]] std::optional<std::string> raw(const std::string& section,
                                                 const std::string& key) const;

    [[nodiscard]] double get_double(const std::string& section, const std::string& key,
                                    double fallback) const;
    [[nodiscard]] int get_int(const std::string& section, const std::string& key, int fallback) const;
    [[nodiscard]] std::string get_string(const std::string& section, const std::string& key,
                                         const std::string& fallback) const;
    [[nodiscard]] bool get_bool(const std::string& section, const std::string& key, bool fallback) const;
    [[nodiscard]] std::pair<double, double> get_range(const std::string& section,
                                                      const std::string& key,
                                                      std::pair<double, double> fallback) const;
    [[nodiscard]] std::vector<int> get_int_list(const std::string& section, const std::string& key,
                                                const std::vector<int>& fallback) const;

    /// `section.key` entries never read through a getter.
    [[nodiscard]] std::vector<std::string> unused_keys() const;

private:
    std::map<std::string, std::map<std::string, std::string>> values_;
    mutable std::map<std::string, bool> used_;
};

std::vector<double> parse_double_list(const std::string& text);

}  // namespace srforge
