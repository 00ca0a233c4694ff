#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

namespace resodyn::cli {

enum class VerifyLevel { fast, full };
VerifyLevel parse_verify_level(const std::string& text);

struct VerifyOptions {
    VerifyLevel level = VerifyLevel::fast;
    std::uint64_t seed = 7;
    unsigned threads = 0;
    /// Test fixture: "phi-pf-constant" swaps pi for 3 in the picket-fence
    /// density used by the checks, which must then fail.
    std::string fault;
};

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
    double seconds = 0.0;
};

/// Runs every check of the requested level. A failing or throwing check is
/// recorded and the remaining checks still run. `progress` is called after
/// each check.
std::vector<CheckResult> run_verify(const VerifyOptions& options,
                                    const std::function<void(const CheckResult&)>& progress = {});

nlohmann::json verify_report(const VerifyOptions& options, const std::vector<CheckResult>& results);

}  // namespace resodyn::cli
