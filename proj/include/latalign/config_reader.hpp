#pragma once

#include <set>
#include <string>

#include <json.hpp>

#include "latalign/error.hpp"

namespace latalign {

/// Reads optional keys of one JSON object section and rejects unknown keys on finish().
class ConfigReader {
public:
    ConfigReader(const nlohmann::json& j, std::string section) : j_(j), section_(std::move(section)) {
        if (!j_.is_object()) throw ConfigError("config section '" + section_ + "' must be an object");
    }

    template <class T>
    bool read(const std::string& key, T& out) const {
        seen_.insert(key);
        auto it = j_.find(key);
        if (it == j_.end()) return false;
        try {
            out = it->template get<T>();
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError("config key '" + section_ + "." + key + "': " + e.what());
        }
        return true;
    }

    const nlohmann::json* child(const std::string& key) const {
        seen_.insert(key);
        auto it = j_.find(key);
        return it == j_.end() ? nullptr : &*it;
    }

    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (!seen_.count(it.key())) throw ConfigError("unknown config key '" + section_ + "." + it.key() + "'");
    }

private:
    const nlohmann::json& j_;
    std::string section_;
    mutable std::set<std::string> seen_;
};

}  // namespace latalign
