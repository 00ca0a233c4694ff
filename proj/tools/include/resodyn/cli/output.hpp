#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

namespace resodyn::cli {

inline constexpr std::string_view kToolName = "resodyn";
std::string_view tool_version() noexcept;

/// Shortest round-trip representation; "nan", "inf", "-inf" for non-finite values.
std::string format_double(double x);

/// Everything needed to reproduce an output file.
struct Provenance {
    std::string command;
    nlohmann::json config;
    std::optional<std::uint64_t> seed;
};

/// Comment block that opens every output file:
///   # resodyn <version>
///   # command: <subcommand>
///   # config: <canonical JSON>
///   # seed: <seed | none>
std::string provenance_header(const Provenance& p);

/// Same information as a JSON object, for JSON outputs.
nlohmann::json provenance_json(const Provenance& p);

/**
 * Writes `content` to `path` through a temporary file in the same directory
 * followed by a rename, so readers never see a partial file. An empty path
 * or "-" writes to stdout. Throws std::runtime_error on I/O failure.
 */
void write_output(const std::string& path, std::string_view content);

}  // namespace resodyn::cli
