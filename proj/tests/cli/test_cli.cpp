#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "resodyn/cli/commands.hpp"
#include "resodyn/cli/output.hpp"
#include "resodyn/cli/schema.hpp"

using namespace resodyn;
using namespace resodyn::cli;
using nlohmann::json;

namespace {

std::map<std::string, std::string> reference_flags() {
    return {{"delta", "1"}, {"gamma1", "0.5"}, {"gamma2", "0.5"}, {"theta", "0.3141592653589793"}, {"d", "1"}, {"v", "0.75"}};
}

std::vector<std::string> data_lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line[0] != '#') out.push_back(line);
    }
    return out;
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream in(line);
    std::string cell;
    while (std::getline(in, cell, ',')) out.push_back(cell);
    return out;
}

}  // namespace

TEST_CASE("format_double round-trips and spells non-finite values") {
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(-2.0) == "-2");
    CHECK(format_double(1e-300) == "1e-300");
    CHECK(format_double(std::numeric_limits<double>::quiet_NaN()) == "nan");
    CHECK(format_double(std::numeric_limits<double>::infinity()) == "inf");
    CHECK(format_double(-std::numeric_limits<double>::infinity()) == "-inf");
    const double x = 0.25298087203958360827;
    CHECK(std::stod(format_double(x)) == x);
}

TEST_CASE("provenance header layout") {
    const Provenance p{"dist", json{{"m", 2}}, std::nullopt};
    const std::string h = provenance_header(p);
    CHECK(h.rfind("# resodyn ", 0) == 0);
    CHECK(h.find("# command: dist\n") != std::string::npos);
    CHECK(h.find("# config: {\"m\":2}\n") != std::string::npos);
    CHECK(h.find("# seed: none\n") != std::string::npos);
    CHECK(provenance_header({"ensemble", json::object(), 42}).find("# seed: 42\n") != std::string::npos);
    CHECK(provenance_json(p)["config"]["m"] == 2);
}

TEST_CASE("flag values are typed strictly") {
    const KeySpec real{"x", KeyType::real, "", nullptr};
    const KeySpec integer{"n", KeyType::integer, "", nullptr};
    CHECK(parse_flag_value(real, "-0.5").get<double>() == -0.5);
    CHECK(parse_flag_value(integer, "12").get<std::uint64_t>() == 12);
    CHECK_THROWS_AS(parse_flag_value(real, "1.5x"), UsageError);
    CHECK_THROWS_AS(parse_flag_value(real, "inf"), UsageError);
    CHECK_THROWS_AS(parse_flag_value(real, ""), UsageError);
    CHECK_THROWS_AS(parse_flag_value(integer, "-3"), UsageError);
    CHECK_THROWS_AS(parse_flag_value(integer, "2.5"), UsageError);
}

TEST_CASE("resolve merges file and flags") {
    const Schema& s = sweep_schema();
    json file = {{"delta", 2.0}, {"gamma1", 0.5}, {"gamma2", 0.5}, {"theta", 0.1}, {"d", 1}, {"v", 0.75}};

    SUBCASE("defaults fill unset keys and flags win over the file") {
        const json r = resolve(s, file, {{"delta", "3"}});
        CHECK(r["delta"].get<double>() == 3.0);
        CHECK(r["steps"].get<std::size_t>() == 201);
        CHECK(r["alpha-min"].get<double>() == -1.0);
        CHECK(r["d"].is_number_float());
    }
    SUBCASE("unknown keys are rejected") {
        file["colour"] = 1;
        CHECK_THROWS_AS(resolve(s, file, {}), UsageError);
    }
    SUBCASE("type mismatches are rejected") {
        file["steps"] = "many";
        CHECK_THROWS_AS(resolve(s, file, {}), UsageError);
        file["steps"] = -4;
        CHECK_THROWS_AS(resolve(s, file, {}), UsageError);
    }
    SUBCASE("missing required keys are all listed") {
        try {
            resolve(s, json::object(), {{"delta", "1"}});
            FAIL("expected UsageError");
        } catch (const UsageError& e) {
            const std::string what = e.what();
            CHECK(what.find("--gamma1") != std::string::npos);
            CHECK(what.find("--v") != std::string::npos);
            CHECK(what.find("--delta") == std::string::npos);
        }
    }
}

TEST_CASE("runtime knobs stay out of the provenance config") {
    const json r = resolve(ensemble_schema(), json::object(), {{"threads", "4"}, {"seed", "9"}});
    const json p = provenance_config(ensemble_schema(), r);
    CHECK_FALSE(p.contains("threads"));
    CHECK_FALSE(p.contains("max-memory-mb"));
    CHECK(p["seed"] == 9);
    CHECK(p["n"] == 250);
}

TEST_CASE("config files must hold a JSON object") {
    const auto dir = std::filesystem::temp_directory_path() / "resodyn_cli_test";
    std::filesystem::create_directories(dir);
    std::ofstream(dir / "array.json") << "[1, 2]";
    std::ofstream(dir / "broken.json") << "{\"delta\": ";
    CHECK_THROWS_AS(load_config_file((dir / "array.json").string()), UsageError);
    CHECK_THROWS_AS(load_config_file((dir / "broken.json").string()), UsageError);
    CHECK_THROWS_AS(load_config_file((dir / "absent.json").string()), UsageError);
    std::filesystem::remove_all(dir);
}

TEST_CASE("sweep table: columns, row count and reference-point values") {
    const json r = resolve(sweep_schema(), json::object(), [] {
        auto f = reference_flags();
        f["alpha-min"] = "-2";
        f["alpha-max"] = "2";
        f["steps"] = "401";
        return f;
    }());
    const auto text = sweep_output(sweep_request(r), {"two-level sweep", provenance_config(sweep_schema(), r), std::nullopt},
                                   Format::csv);
    const auto lines = data_lines(text);
    REQUIRE(lines.size() == 402);
    const auto header = split(lines[0]);
    CHECK(header == sweep_columns());
    CHECK(header.front() == "alpha");
    const auto mid = split(lines[201]);
    CHECK(std::stod(mid[0]) == 0.0);
    CHECK(std::stod(mid[5]) == doctest::Approx(0.25298087203958360827).epsilon(1e-13));
    CHECK(std::stod(mid[7]) == doctest::Approx(0.8108355406650006654).epsilon(1e-12));

    const json j = json::parse(sweep_output(sweep_request(r), {"two-level sweep", json::object(), std::nullopt}, Format::json));
    CHECK(j["rows"].size() == 401);
    CHECK(j["columns"].size() == sweep_columns().size());
    CHECK(j["provenance"]["command"] == "two-level sweep");
}

TEST_CASE("sweep request validation") {
    auto f = reference_flags();
    f["alpha-min"] = "1";
    f["alpha-max"] = "0";
    CHECK_THROWS_AS(sweep_request(resolve(sweep_schema(), json::object(), f)), UsageError);
    CHECK_THROWS_AS(parse_format("xml"), UsageError);
}

TEST_CASE("critical points report and bracket failures") {
    auto r = resolve(critical_schema(), json::object(), reference_flags());
    auto result = critical_points(critical_request(r), {"two-level critical-points", json::object(), std::nullopt});
    CHECK(result.errors.empty());
    CHECK(result.report["alpha_star"].get<double>() == doctest::Approx(-0.17473961078862046798).epsilon(1e-8));
    CHECK(result.report["alpha_circ"].get<double>() == doctest::Approx(-0.5).epsilon(1e-10));

    auto flat = reference_flags();
    flat["theta"] = "1.5707963267948966";
    flat["v"] = "0";
    r = resolve(critical_schema(), json::object(), flat);
    result = critical_points(critical_request(r), {"two-level critical-points", json::object(), std::nullopt});
    CHECK(result.errors.size() == 2);
    CHECK(result.report.contains("errors"));
}

TEST_CASE("dist marks the M=1 origin as singular") {
    const json r = resolve(dist_schema(), json::object(), {{"m", "1"}, {"y", "0"}});
    const auto lines = data_lines(dist_output(dist_request(r), {"dist", json::object(), std::nullopt}, Format::csv));
    REQUIRE(lines.size() == 2);
    CHECK(split(lines[0]) == dist_columns());
    const auto row = split(lines[1]);
    CHECK(row[2] == "0.7853981633974483");
    CHECK(row[3] == "nan");
    CHECK(row.back() == "1");

    const json r2 = resolve(dist_schema(), json::object(), {{"m", "2"}, {"model", "goe"}, {"steps", "5"}});
    CHECK(data_lines(dist_output(dist_request(r2), {"dist", json::object(), std::nullopt}, Format::csv)).size() == 6);
    CHECK_THROWS_AS(dist_request(resolve(dist_schema(), json::object(), {{"m", "0"}})), UsageError);
    CHECK_THROWS_AS(dist_request(resolve(dist_schema(), json::object(), {{"model", "poisson"}})), UsageError);
}

TEST_CASE("ensemble run: outputs, determinism and memory guard") {
    json r = resolve(ensemble_schema(), json::object(), {{"n", "60"}, {"m", "2"}, {"realizations", "40"}, {"window", "8"}});
    auto request = ensemble_request(r, 1234);
    CHECK_FALSE(request.seed_given);
    CHECK(request.config.seed == 1234);
    const Provenance prov{"ensemble", provenance_config(ensemble_schema(), r), request.config.seed};
    const auto a = run_ensemble(request, prov);
    CHECK(a.samples.values.size() == 320);
    CHECK(data_lines(a.samples_csv).size() == 321);
    CHECK(data_lines(a.histogram_csv).size() == 62);
    CHECK(a.report["samples"] == 320);
    CHECK(a.report["goodness_of_fit"].is_null());

    request.config.threads = 3;
    const auto b = run_ensemble(request, prov);
    CHECK(a.samples_csv == b.samples_csv);
    CHECK(a.histogram_csv == b.histogram_csv);

    request.max_memory_mb = 1e-3;
    CHECK_THROWS_AS(run_ensemble(request, prov), UsageError);
    CHECK(projected_memory_mb(request.config) > 0.0);
}

TEST_CASE("outputs are written atomically") {
    const auto dir = std::filesystem::temp_directory_path() / "resodyn_write_test";
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    const auto path = (dir / "out.csv").string();
    write_output(path, "a,b\n1,2\n");
    write_output(path, "a,b\n3,4\n");
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    CHECK(ss.str() == "a,b\n3,4\n");
    CHECK(std::distance(std::filesystem::directory_iterator(dir), std::filesystem::directory_iterator{}) == 1);
    CHECK_THROWS(write_output((dir / "missing" / "out.csv").string(), "x"));
    std::filesystem::remove_all(dir);
}
