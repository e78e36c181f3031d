#include "settings.hpp"

#include "cqed/errors.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <sstream>

namespace cqed::cli {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

template <class T>
T parse_number(const std::string& key, const std::string& text) {
    T v{};
    const std::string t = trim(text);
    const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || p != t.data() + t.size() || t.empty())
        throw InvalidArgument("setting " + key + ": '" + text + "' is not a valid number");
    return v;
}

}  // namespace

void Settings::declare(const std::string& key, const std::string& value) { values_[key] = value; }

void Settings::set(const std::string& key, const std::string& value) {
    auto it = values_.find(key);
    if (it == values_.end()) throw InvalidArgument("unknown setting '" + key + "'");
    it->second = trim(value);
}

const std::string& Settings::str(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) throw InvalidArgument("unknown setting '" + key + "'");
    return it->second;
}

double Settings::num(const std::string& key) const { return parse_number<double>(key, str(key)); }
int Settings::integer(const std::string& key) const { return parse_number<int>(key, str(key)); }
std::uint64_t Settings::uint(const std::string& key) const { return parse_number<std::uint64_t>(key, str(key)); }

bool Settings::flag(const std::string& key) const {
    const std::string& v = str(key);
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw InvalidArgument("setting " + key + ": '" + v + "' is not a boolean");
}

std::vector<std::string> Settings::words(const std::string& key) const {
    std::vector<std::string> out;
    std::stringstream ss(str(key));
    for (std::string w; std::getline(ss, w, ',');)
        if (!trim(w).empty()) out.push_back(trim(w));
    return out;
}

std::vector<double> Settings::list(const std::string& key) const {
    std::vector<double> out;
    for (const std::string& w : words(key)) out.push_back(parse_number<double>(key, w));
    return out;
}

void Settings::load_ini(const std::filesystem::path& path) {
    boost::property_tree::ptree tree;
    try {
        boost::property_tree::read_ini(path.string(), tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw InvalidArgument(std::string("config file: ") + e.what());
    }
    for (const auto& [section, body] : tree) {
        if (body.empty()) throw InvalidArgument("config file: key '" + section + "' is outside a section");
        for (const auto& [key, value] : body) set(section + "." + key, value.get_value<std::string>());
    }
}

void Settings::load_json(const nlohmann::json& j) {
    if (!j.is_object()) throw InvalidArgument("manifest settings must be an object");
    for (const auto& [k, v] : j.items()) {
        if (!v.is_string()) throw InvalidArgument("manifest setting " + k + " must be a string");
        set(k, v.get<std::string>());
    }
}

nlohmann::json Settings::to_json() const {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [k, v] : values_) j[k] = v;
    return j;
}

SystemParams Settings::params() const {
    SystemParams p;
    p.g = num("params.g");
    p.kappa = num("params.kappa");
    p.gamma = num("params.gamma");
    p.gamma_s = num("params.gamma_s");
    p.eps_d = num("params.eps_d");
    p.focusing = num("params.focusing");
    p.eta = num("params.eta");
    p.theta = num("params.theta");
    p.validate();
    return p;
}

}  // namespace cqed::cli
