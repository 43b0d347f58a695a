#ifndef MAPPRED_CONFIG_HPP
#define MAPPRED_CONFIG_HPP

#include "mappred/errors.hpp"

#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace mappred {

/// Flat `key = value` text config with `#` comments and blank lines.
class Config {
  public:
    Config() = default;

    static Config parse(std::istream &in) {
        Config cfg;
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            std::size_t hash = line.find('#');
            if (hash != std::string::npos)
                line.erase(hash);
            std::string trimmed = trim(line);
            if (trimmed.empty())
                continue;
            std::size_t eq = trimmed.find('=');
            if (eq == std::string::npos)
                throw ConfigError("config line " + std::to_string(lineno) +
                                  ": expected key = value");
            std::string key = trim(trimmed.substr(0, eq));
            std::string value = trim(trimmed.substr(eq + 1));
            if (key.empty())
                throw ConfigError("config line " + std::to_string(lineno) +
                                  ": empty key");
            cfg.values_[key] = value;
        }
        return cfg;
    }

    static Config load(const std::string &path) {
        std::ifstream in(path);
        if (!in)
            throw ConfigError("cannot open config file " + path);
        return parse(in);
    }

    bool has(const std::string &key) const { return values_.count(key) > 0; }

    std::string get_string(const std::string &key) const {
        auto it = values_.find(key);
        if (it == values_.end())
            throw ConfigError("missing config key: " + key);
        return it->second;
    }
    std::string get_string(const std::string &key, const std::string &dflt) const {
        auto it = values_.find(key);
        return it == values_.end() ? dflt : it->second;
    }

    double get_double(const std::string &key) const { return to_double(key, get_string(key)); }
    double get_double(const std::string &key, double dflt) const {
        return has(key) ? get_double(key) : dflt;
    }

    long long get_int(const std::string &key) const {
        const std::string v = get_string(key);
        std::size_t pos = 0;
        long long r = 0;
        try {
            r = std::stoll(v, &pos);
        } catch (const std::exception &) {
            throw ConfigError("config key " + key + ": not an integer: " + v);
        }
        if (pos != v.size())
            throw ConfigError("config key " + key + ": not an integer: " + v);
        return r;
    }
    long long get_int(const std::string &key, long long dflt) const {
        return has(key) ? get_int(key) : dflt;
    }

    /// Comma-separated list of doubles, e.g. "1, 2.5, 4".
    std::vector<double> get_double_list(const std::string &key) const {
        std::vector<double> out;
        std::stringstream ss(get_string(key));
        std::string item;
        while (std::getline(ss, item, ','))
            out.push_back(to_double(key, trim(item)));
        if (out.empty())
            throw ConfigError("config key " + key + ": empty list");
        return out;
    }

    /// Comma-separated list of strings.
    std::vector<std::string> get_string_list(const std::string &key) const {
        std::vector<std::string> out;
        std::stringstream ss(get_string(key));
        std::string item;
        while (std::getline(ss, item, ',')) {
            std::string t = trim(item);
            if (!t.empty())
                out.push_back(t);
        }
        if (out.empty())
            throw ConfigError("config key " + key + ": empty list");
        return out;
    }

    void set(const std::string &key, const std::string &value) { values_[key] = value; }

  private:
    static std::string trim(const std::string &s) {
        std::size_t a = s.find_first_not_of(" \t\r\n");
        if (a == std::string::npos)
            return "";
        std::size_t b = s.find_last_not_of(" \t\r\n");
        return s.substr(a, b - a + 1);
    }
    static double to_double(const std::string &key, const std::string &v) {
        std::size_t pos = 0;
        double r = 0.0;
        try {
            r = std::stod(v, &pos);
        } catch (const std::exception &) {
            throw ConfigError("config key " + key + ": not a number: " + v);
        }
        if (pos != v.size())
            throw ConfigError("config key " + key + ": not a number: " + v);
        return r;
    }

    std::map<std::string, std::string> values_;
};

} // namespace mappred

#endif
