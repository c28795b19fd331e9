#pragma once

// Internal helpers for reading nlohmann::json with field-path diagnostics.

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <fmt/format.h>
#include <json.hpp>

#include "gridsched/errors.hpp"

namespace gridsched::detail {

using Json = nlohmann::json;

inline std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError(fmt::format("cannot open '{}'", path.string()));
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError(fmt::format("cannot write '{}'", path.string()));
    out << text;
}

inline Json parse_json(const std::string& text, const std::string& origin) {
    try {
        return Json::parse(text, nullptr, true, true);
    } catch (const Json::parse_error& e) {
        throw ParseError(fmt::format("{}: {}", origin, e.what()));
    }
}

inline const Json& require(const Json& obj, const char* key, const std::string& path) {
    if (!obj.is_object()) throw ParseError(fmt::format("{}: expected an object", path));
    auto it = obj.find(key);
    if (it == obj.end()) throw ParseError(fmt::format("{}.{}: missing field", path, key));
    return *it;
}

template <class T>
T get_as(const Json& value, const std::string& path) {
    try {
        return value.get<T>();
    } catch (const Json::exception& e) {
        throw ParseError(fmt::format("{}: {}", path, e.what()));
    }
}

template <class T>
T field(const Json& obj, const char* key, const std::string& path) {
    return get_as<T>(require(obj, key, path), path + "." + key);
}

template <class T>
T field_or(const Json& obj, const char* key, T fallback, const std::string& path) {
    if (!obj.is_object()) throw ParseError(fmt::format("{}: expected an object", path));
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return fallback;
    return get_as<T>(*it, path + "." + key);
}

inline const Json& require_array(const Json& obj, const char* key, const std::string& path) {
    const auto& v = require(obj, key, path);
    if (!v.is_array()) throw ParseError(fmt::format("{}.{}: expected an array", path, key));
    return v;
}

inline std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace gridsched::detail
