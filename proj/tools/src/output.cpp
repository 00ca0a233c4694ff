#include "resodyn/cli/output.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <stdexcept>

#include <unistd.h>

namespace resodyn::cli {

std::string_view tool_version() noexcept { return RESODYN_VERSION; }

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return {buf, res.ptr};
}

std::string provenance_header(const Provenance& p) {
    std::string out;
    out += "# ";
    out += kToolName;
    out += ' ';
    out += tool_version();
    out += "\n# command: " + p.command;
    out += "\n# config: " + p.config.dump();
    out += "\n# seed: " + (p.seed ? std::to_string(*p.seed) : std::string("none"));
    out += '\n';
    return out;
}

nlohmann::json provenance_json(const Provenance& p) {
    nlohmann::json j;
    j["tool"] = std::string(kToolName);
    j["version"] = std::string(tool_version());
    j["command"] = p.command;
    j["config"] = p.config;
    j["seed"] = p.seed ? nlohmann::json(*p.seed) : nlohmann::json(nullptr);
    return j;
}

void write_output(const std::string& path, std::string_view content) {
    if (path.empty() || path == "-") {
        std::cout << content;
        std::cout.flush();
        if (!std::cout) throw std::runtime_error("failed to write to stdout");
        return;
    }
    namespace fs = std::filesystem;
    const fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open '" + tmp.string() + "' for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) {
            std::error_code ec;
            fs::remove(tmp, ec);
            throw std::runtime_error("failed writing '" + tmp.string() + "'");
        }
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw std::runtime_error("cannot move output into place at '" + path + "'");
    }
}

}  // namespace resodyn::cli
