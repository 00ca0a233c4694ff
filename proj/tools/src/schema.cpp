#include "resodyn/cli/schema.hpp"

#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace resodyn::cli {

namespace {

const KeySpec* find_key(const Schema& schema, const std::string& name) {
    for (const auto& k : schema) {
        if (k.name == name) return &k;
    }
    return nullptr;
}

std::string type_name(KeyType t) {
    switch (t) {
        case KeyType::real:
            return "a number";
        case KeyType::integer:
            return "a nonnegative integer";
        case KeyType::text:
            return "a string";
    }
    return "?";
}

// Normalizes a JSON value to the key's type, or throws.
nlohmann::json check_type(const KeySpec& spec, const nlohmann::json& value, const std::string& origin) {
    auto fail = [&] {
        throw UsageError(origin + ": '" + spec.name + "' must be " + type_name(spec.type) + ", got " + value.dump());
    };
    switch (spec.type) {
        case KeyType::real:
            if (!value.is_number()) fail();
            if (!std::isfinite(value.get<double>())) fail();
            return value.get<double>();
        case KeyType::integer:
            if (value.is_number_unsigned()) return value;
            if (value.is_number_integer() && value.get<std::int64_t>() >= 0) return value.get<std::uint64_t>();
            fail();
            break;
        case KeyType::text:
            if (!value.is_string()) fail();
            return value;
    }
    return value;
}

}  // namespace

nlohmann::json parse_flag_value(const KeySpec& spec, const std::string& text) {
    auto fail = [&] { throw UsageError("--" + spec.name + ": expected " + type_name(spec.type) + ", got '" + text + "'"); };
    switch (spec.type) {
        case KeyType::real: {
            if (text.empty()) fail();
            char* end = nullptr;
            errno = 0;
            const double x = std::strtod(text.c_str(), &end);
            if (errno != 0 || end != text.c_str() + text.size() || !std::isfinite(x)) fail();
            return x;
        }
        case KeyType::integer: {
            std::uint64_t x = 0;
            const auto res = std::from_chars(text.data(), text.data() + text.size(), x);
            if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) fail();
            return x;
        }
        case KeyType::text:
            return text;
    }
    return nullptr;
}

nlohmann::json load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot read config file '" + path + "'");
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw UsageError("config file '" + path + "' is not valid JSON: " + e.what());
    }
    if (!j.is_object()) throw UsageError("config file '" + path + "' must contain a JSON object");
    return j;
}

nlohmann::json resolve(const Schema& schema, const nlohmann::json& file_values,
                       const std::map<std::string, std::string>& flag_values) {
    nlohmann::json out = nlohmann::json::object();
    if (!file_values.is_null()) {
        for (const auto& [key, value] : file_values.items()) {
            const KeySpec* spec = find_key(schema, key);
            if (spec == nullptr) throw UsageError("config file: unknown key '" + key + "'");
            if (value.is_null() && spec->optional) continue;
            out[key] = check_type(*spec, value, "config file");
        }
    }
    for (const auto& [key, text] : flag_values) {
        const KeySpec* spec = find_key(schema, key);
        if (spec == nullptr) throw UsageError("unknown option '--" + key + "'");
        out[key] = parse_flag_value(*spec, text);
    }
    std::vector<std::string> missing;
    for (const auto& spec : schema) {
        if (out.contains(spec.name)) continue;
        if (!spec.default_value.is_null()) {
            out[spec.name] = spec.default_value;
        } else if (!spec.optional) {
            missing.push_back("--" + spec.name);
        }
    }
    if (!missing.empty()) {
        std::ostringstream os;
        os << "missing required parameter" << (missing.size() > 1 ? "s" : "") << ":";
        for (const auto& m : missing) os << ' ' << m;
        throw UsageError(os.str());
    }
    return out;
}

nlohmann::json provenance_config(const Schema& schema, const nlohmann::json& resolved) {
    nlohmann::json out = nlohmann::json::object();
    for (const auto& spec : schema) {
        if (spec.provenance && resolved.contains(spec.name)) out[spec.name] = resolved[spec.name];
    }
    return out;
}

}  // namespace resodyn::cli
