#pragma once

#include "cqed/params.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

namespace cqed::cli {

/// Flat "section.key" settings. Only declared keys may be set; values are kept
/// as the strings they were given so manifests echo them verbatim.
class Settings {
public:
    void declare(const std::string& key, const std::string& value);
    void set(const std::string& key, const std::string& value);
    bool has(const std::string& key) const { return values_.count(key) > 0; }

    const std::string& str(const std::string& key) const;
    double num(const std::string& key) const;
    int integer(const std::string& key) const;
    std::uint64_t uint(const std::string& key) const;
    bool flag(const std::string& key) const;
    std::vector<double> list(const std::string& key) const;
    std::vector<std::string> words(const std::string& key) const;

    /// INI file with one [section] per module; keys outside a section are rejected.
    void load_ini(const std::filesystem::path& path);
    /// Object of "section.key" to string, as written into manifests.
    void load_json(const nlohmann::json& j);
    nlohmann::json to_json() const;

    SystemParams params() const;

private:
    std::map<std::string, std::string> values_;
};

}  // namespace cqed::cli
