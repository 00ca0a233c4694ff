#pragma once

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

namespace resodyn::cli {

enum class KeyType { real, integer, text };

/// One configuration key. The same name is used as the long flag
/// (--name) and as the JSON key in --config files.
struct KeySpec {
    std::string name;
    KeyType type = KeyType::real;
    std::string help;
    /// Null: the key is required (unless `optional` is set).
    nlohmann::json default_value;
    bool optional = false;
    /// Echoed in the provenance header. Runtime-only knobs (threads, memory
    /// caps) are excluded so they cannot change output bytes.
    bool provenance = true;
};

using Schema = std::vector<KeySpec>;

/// Thrown for malformed flags or config files (exit code 1).
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Converts a flag string to the JSON value for `spec`; throws UsageError.
nlohmann::json parse_flag_value(const KeySpec& spec, const std::string& text);

/// Reads a JSON config file; throws UsageError on parse errors or non-object roots.
nlohmann::json load_config_file(const std::string& path);

/**
 * Merges config-file values with explicitly given flags (flags win), rejects
 * unknown keys and type mismatches, applies defaults and checks required
 * keys. Returns the fully resolved object.
 */
nlohmann::json resolve(const Schema& schema, const nlohmann::json& file_values,
                       const std::map<std::string, std::string>& flag_values);

/// Resolved values restricted to provenance keys.
nlohmann::json provenance_config(const Schema& schema, const nlohmann::json& resolved);

}  // namespace resodyn::cli
