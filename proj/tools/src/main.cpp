#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <map>
#include <random>
#include <string>

#include <unistd.h>

#include <CLI11.hpp>
#include <json.hpp>

#include "resodyn/cli/commands.hpp"
#include "resodyn/cli/output.hpp"
#include "resodyn/cli/schema.hpp"
#include "resodyn/cli/verify.hpp"
#include "resodyn/errors.hpp"

namespace {

using namespace resodyn::cli;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitNumerical = 2;
constexpr int kExitVerify = 3;

// Flags generated from a schema, kept as raw strings until resolve().
struct SchemaFlags {
    const Schema* schema = nullptr;
    std::map<std::string, std::string> raw;
    std::map<std::string, CLI::Option*> options;
    std::string config_path;

    void attach(CLI::App* app, const Schema& s) {
        schema = &s;
        for (const auto& key : s) {
            std::string help = key.help;
            if (!key.default_value.is_null()) help += " [default: " + key.default_value.dump() + "]";
            options[key.name] = app->add_option("--" + key.name, raw[key.name], help);
        }
        app->add_option("--config", config_path, "JSON file with the same keys as the flags; flags win");
    }

    json resolved() const {
        std::map<std::string, std::string> given;
        for (const auto& [name, opt] : options) {
            if (opt->count() > 0) given[name] = raw.at(name);
        }
        const json file = config_path.empty() ? json::object() : load_config_file(config_path);
        return resolve(*schema, file, given);
    }
};

bool use_color() {
    const char* no_color = std::getenv("NO_COLOR");
    return (no_color == nullptr || *no_color == '\0') && isatty(fileno(stdout));
}

int run_verify_command(const VerifyOptions& options, const std::string& report_path) {
    const bool color = use_color();
    const char* green = color ? "\033[32m" : "";
    const char* red = color ? "\033[31m" : "";
    const char* reset = color ? "\033[0m" : "";
    const auto results = run_verify(options, [&](const CheckResult& r) {
        std::printf("%s[%s]%s %s (%.2f s): %s\n", r.passed ? green : red, r.passed ? "PASS" : "FAIL", reset,
                    r.name.c_str(), r.seconds, r.detail.c_str());
        std::fflush(stdout);
    });
    std::size_t failed = 0;
    for (const auto& r : results) failed += r.passed ? 0 : 1;
    std::printf("%zu/%zu checks passed\n", results.size() - failed, results.size());
    if (!report_path.empty()) write_output(report_path, verify_report(options, results).dump(2) + "\n");
    return failed == 0 ? kExitOk : kExitVerify;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Parametric motion of resonances in open quantum systems"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(tool_version()));

    std::string output_path;
    std::string format_text = "csv";

    auto* two_level = app.add_subcommand("two-level", "Two-level model");
    two_level->require_subcommand(1);

    auto* sweep = two_level->add_subcommand("sweep", "Resonance trajectory over a range of alpha");
    SchemaFlags sweep_flags;
    sweep_flags.attach(sweep, sweep_schema());
    sweep->add_option("-o,--output", output_path, "Output file (default: stdout)");
    sweep->add_option("--format", format_text, "csv or json")->check(CLI::IsMember({"csv", "json"}));

    auto* critical = two_level->add_subcommand("critical-points", "Locate alpha* and alpha_circ");
    SchemaFlags critical_flags;
    critical_flags.attach(critical, critical_schema());
    critical->add_option("-o,--output", output_path, "JSON report (default: stdout)");

    auto* ensemble = app.add_subcommand("ensemble", "Monte-Carlo width-velocity ensemble");
    SchemaFlags ensemble_flags;
    ensemble_flags.attach(ensemble, ensemble_schema());
    std::string samples_path;
    std::string report_path;
    ensemble->add_option("-o,--output", output_path, "Histogram CSV (default: stdout)");
    ensemble->add_option("--samples", samples_path, "Also write every sample to this CSV");
    ensemble->add_option("--report", report_path, "Also write a JSON summary");

    auto* dist = app.add_subcommand("dist", "Tabulate the width-velocity density");
    SchemaFlags dist_flags;
    dist_flags.attach(dist, dist_schema());
    dist->add_option("-o,--output", output_path, "Output file (default: stdout)");
    dist->add_option("--format", format_text, "csv or json")->check(CLI::IsMember({"csv", "json"}));

    auto* verify = app.add_subcommand("verify", "Run the built-in self checks");
    std::string level_text = "fast";
    VerifyOptions verify_options;
    std::string verify_report_path;
    verify->add_option("level", level_text, "fast or full")->check(CLI::IsMember({"fast", "full"}));
    verify->add_option("--seed", verify_options.seed, "Seed for the randomized checks");
    verify->add_option("--threads", verify_options.threads, "Worker threads (0 = all cores)");
    verify->add_option("--report", verify_report_path, "Write a JSON report");
    verify->add_option("--inject-fault", verify_options.fault)->group("");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (sweep->parsed()) {
            const json resolved = sweep_flags.resolved();
            const Provenance prov{"two-level sweep", provenance_config(sweep_schema(), resolved), std::nullopt};
            write_output(output_path, sweep_output(sweep_request(resolved), prov, parse_format(format_text)));
        } else if (critical->parsed()) {
            const json resolved = critical_flags.resolved();
            const Provenance prov{"two-level critical-points", provenance_config(critical_schema(), resolved), std::nullopt};
            const auto result = critical_points(critical_request(resolved), prov);
            write_output(output_path, result.report.dump(2) + "\n");
            for (const auto& e : result.errors) std::cerr << "resodyn: " << e << "\n";
            if (!result.errors.empty()) return kExitNumerical;
        } else if (ensemble->parsed()) {
            const json resolved = ensemble_flags.resolved();
            const std::uint64_t generated = (std::uint64_t{std::random_device{}()} << 32) | std::random_device{}();
            const auto request = ensemble_request(resolved, generated);
            if (!request.seed_given) std::cerr << "resodyn: using generated seed " << request.config.seed << "\n";
            const Provenance prov{"ensemble", provenance_config(ensemble_schema(), resolved), request.config.seed};
            const auto out = run_ensemble(request, prov);
            for (const auto& w : out.samples.warnings) std::cerr << "resodyn: warning: " << w << "\n";
            write_output(output_path, out.histogram_csv);
            if (!samples_path.empty()) write_output(samples_path, out.samples_csv);
            if (!report_path.empty()) write_output(report_path, out.report.dump(2) + "\n");
        } else if (dist->parsed()) {
            const json resolved = dist_flags.resolved();
            const Provenance prov{"dist", provenance_config(dist_schema(), resolved), std::nullopt};
            write_output(output_path, dist_output(dist_request(resolved), prov, parse_format(format_text)));
        } else if (verify->parsed()) {
            verify_options.level = parse_verify_level(level_text);
            return run_verify_command(verify_options, verify_report_path);
        }
    } catch (const UsageError& e) {
        std::cerr << "resodyn: " << e.what() << "\n";
        return kExitUsage;
    } catch (const resodyn::InvalidArgument& e) {
        std::cerr << "resodyn: invalid argument: " << e.what() << "\n";
        return kExitUsage;
    } catch (const resodyn::NumericalError& e) {
        std::cerr << "resodyn: numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "resodyn: " << e.what() << "\n";
        return kExitNumerical;
    }
    return kExitOk;
}
