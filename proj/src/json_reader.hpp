#pragma once

// Path-tracking accessors over nlohmann::json used by the document parsers.

#include "idcais/dynamics.hpp"

#include <json.hpp>

#include <initializer_list>
#include <string>

namespace idcais::detail {

class JsonObject {
public:
    JsonObject(const nlohmann::json& j, std::string path) : j_(j), path_(std::move(path))
    {
        if (!j_.is_object())
            fail("expected an object");
    }

    /// Rejects keys outside `allowed`.
    void allow(std::initializer_list<const char*> allowed) const
    {
        for (auto it = j_.begin(); it != j_.end(); ++it) {
            bool ok = false;
            for (const char* k : allowed)
                ok = ok || it.key() == k;
            if (!ok)
                throw ValidationError(path_ + "/" + it.key() + ": unknown field");
        }
    }

    bool has(const char* key) const { return j_.contains(key) && !j_.at(key).is_null(); }
    const nlohmann::json& raw(const char* key) const { return j_.at(key); }
    std::string child(const char* key) const { return path_ + "/" + key; }
    const std::string& path() const { return path_; }

    double number(const char* key, double fallback) const { return has(key) ? number(key) : fallback; }
    double number(const char* key) const
    {
        require(key);
        const auto& v = j_.at(key);
        if (!v.is_number())
            throw ValidationError(child(key) + ": expected a number");
        return v.get<double>();
    }

    bool boolean(const char* key, bool fallback) const
    {
        if (!has(key))
            return fallback;
        const auto& v = j_.at(key);
        if (!v.is_boolean())
            throw ValidationError(child(key) + ": expected a boolean");
        return v.get<bool>();
    }

    std::string string(const char* key, const std::string& fallback) const
    {
        if (!has(key))
            return fallback;
        const auto& v = j_.at(key);
        if (!v.is_string())
            throw ValidationError(child(key) + ": expected a string");
        return v.get<std::string>();
    }

    Vec2 vec2(const char* key, const Vec2& fallback) const { return has(key) ? vec2(key) : fallback; }
    Vec2 vec2(const char* key) const
    {
        require(key);
        const auto& v = j_.at(key);
        if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
            throw ValidationError(child(key) + ": expected a pair of numbers");
        return {v[0].get<double>(), v[1].get<double>()};
    }

    const nlohmann::json& array(const char* key) const
    {
        require(key);
        const auto& v = j_.at(key);
        if (!v.is_array())
            throw ValidationError(child(key) + ": expected an array");
        return v;
    }

    void require(const char* key) const
    {
        if (!has(key))
            throw ValidationError(child(key) + ": missing required field");
    }

    [[noreturn]] void fail(const std::string& what) const { throw ValidationError((path_.empty() ? "/" : path_) + ": " + what); }

private:
    const nlohmann::json& j_;
    std::string path_;
};

inline nlohmann::json parse_document(const std::string& text)
{
    try {
        return nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError(std::string("malformed JSON: ") + e.what());
    }
}

inline nlohmann::ordered_json to_json(const Vec2& v) { return nlohmann::ordered_json::array({v.x(), v.y()}); }

}  // namespace idcais::detail
