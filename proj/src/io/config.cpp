#include "srforge/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fstream>
#include <sstream>

namespace srforge {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_commas(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

double to_double(const std::string& text, const std::string& where) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(text, &pos);
        if (pos != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw ConfigError(where + ": expected a number, got '" + text + "'");
    }
}

}  // namespace

std::vector<double> parse_double_list(const std::string& text) {
    std::vector<double> out;
    for (const auto& item : split_commas(text)) out.push_back(to_double(item, "list"));
    return out;
}

IniConfig IniConfig::parse(const std::string& text) {
    boost::property_tree::ptree tree;
    std::istringstream in(text);
    try {
        boost::property_tree::ini_parser::read_ini(in, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    IniConfig cfg;
    for (const auto& [section, body] : tree) {
        if (!body.data().empty()) {
            throw ConfigError("config key '" + section + "' must live inside a [section]");
        }
        for (const auto& [key, value] : body) {
            cfg.values_[section][key] = trim(value.get_value<std::string>());
        }
    }
    return cfg;
}

IniConfig IniConfig::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

bool IniConfig::has_section(const std::string& section) const {
    return values_.count(section) != 0;
}

std::optional<std::string> IniConfig::raw(const std::string& section, const std::string& key) const {
    const auto s = values_.find(section);
    if (s == values_.end()) return std::nullopt;
    const auto k = s->second.find(key);
    if (k == s->second.end()) return std::nullopt;
    used_[section + "." + key] = true;
    return k->second;
}

double IniConfig::get_double(const std::string& section, const std::string& key,
                             double fallback) const {
    const auto v = raw(section, key);
    return v ? to_double(*v, section + "." + key) : fallback;
}

int IniConfig::get_int(const std::string& section, const std::string& key, int fallback) const {
    const auto v = raw(section, key);
    if (!v) return fallback;
    const double d = to_double(*v, section + "." + key);
    if (d != static_cast<double>(static_cast<long long>(d))) {
        throw ConfigError(section + "." + key + ": expected an integer, got '" + *v + "'");
    }
    return static_cast<int>(d);
}

std::string IniConfig::get_string(const std::string& section, const std::string& key,
                                  const std::string& fallback) const {
    return raw(section, key).value_or(fallback);
}

bool IniConfig::get_bool(const std::string& section, const std::string& key, bool fallback) const {
    const auto v = raw(section, key);
    if (!v) return fallback;
    if (*v == "true" || *v == "1" || *v == "yes" || *v == "on") return true;
    if (*v == "false" || *v == "0" || *v == "no" || *v == "off") return false;
    throw ConfigError(section + "." + key + ": expected a boolean, got '" + *v + "'");
}

std::pair<double, double> IniConfig::get_range(const std::string& section, const std::string& key,
                                               std::pair<double, double> fallback) const {
    const auto v = raw(section, key);
    if (!v) return fallback;
    const auto items = split_commas(*v);
    if (items.size() == 1) {
        const double x = to_double(items[0], section + "." + key);
        return {x, x};
    }
    if (items.size() != 2) {
        throw ConfigError(section + "." + key + ": expected 'lo, hi', got '" + *v + "'");
    }
    return {to_double(items[0], section + "." + key), to_double(items[1], section + "." + key)};
}

std::vector<int> IniConfig::get_int_list(const std::string& section, const std::string& key,
                                         const std::vector<int>& fallback) const {
    const auto v = raw(section, key);
    if (!v) return fallback;
    std::vector<int> out;
    for (const auto& item : split_commas(*v)) {
        out.push_back(static_cast<int>(to_double(item, section + "." + key)));
    }
    return out;
}

std::vector<std::string> IniConfig::unused_keys() const {
    std::vector<std::string> out;
    for (const auto& [section, body] : values_) {
        for (const auto& [key, value] : body) {
            const std::string full = section + "." + key;
            if (!used_.count(full)) out.push_back(full);
        }
    }
    return out;
}

}  // namespace srforge
