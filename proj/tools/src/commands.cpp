#include "resodyn/cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "resodyn/distributions.hpp"
#include "resodyn/errors.hpp"
#include "resodyn/parallel.hpp"

namespace resodyn::cli {

namespace {

using nlohmann::json;

std::string join_row(const std::vector<std::string>& cells) {
    std::string line;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i > 0) line += ',';
        line += cells[i];
    }
    line += '\n';
    return line;
}

std::string table_csv(const Provenance& provenance, const std::vector<std::string>& columns,
                      const std::vector<std::vector<std::string>>& rows) {
    std::string out = provenance_header(provenance);
    out += join_row(columns);
    for (const auto& r : rows) out += join_row(r);
    return out;
}

// Non-finite cells become null in JSON.
json cell_json(const std::string& cell) {
    if (cell == "nan" || cell == "inf" || cell == "-inf") return nullptr;
    return json::parse(cell);
}

std::string table_json(const Provenance& provenance, const std::vector<std::string>& columns,
                       const std::vector<std::vector<std::string>>& rows) {
    json j;
    j["provenance"] = provenance_json(provenance);
    j["columns"] = columns;
    j["rows"] = json::array();
    for (const auto& r : rows) {
        json row = json::array();
        for (const auto& c : r) row.push_back(cell_json(c));
        j["rows"].push_back(row);
    }
    return j.dump(2) + "\n";
}

std::string table(const Provenance& provenance, const std::vector<std::string>& columns,
                  const std::vector<std::vector<std::string>>& rows, Format format) {
    return format == Format::csv ? table_csv(provenance, columns, rows) : table_json(provenance, columns, rows);
}

std::string fmt(double x) { return format_double(x); }

const std::vector<KeySpec>& two_level_keys() {
    static const std::vector<KeySpec> keys{
        {"delta", KeyType::real, "level splitting of the closed system", nullptr},
        {"gamma1", KeyType::real, "partial width of level 1", nullptr},
        {"gamma2", KeyType::real, "partial width of level 2", nullptr},
        {"theta", KeyType::real, "angle between the decay vectors (radians)", nullptr},
        {"d", KeyType::real, "diagonal element of the perturbation", nullptr},
        {"v", KeyType::real, "off-diagonal element of the perturbation", nullptr},
    };
    return keys;
}

two_level::Params two_level_params(const json& r) {
    two_level::Params p;
    p.delta = r.at("delta").get<double>();
    p.gamma1 = r.at("gamma1").get<double>();
    p.gamma2 = r.at("gamma2").get<double>();
    p.theta = r.at("theta").get<double>();
    p.d = r.at("d").get<double>();
    p.v = r.at("v").get<double>();
    try {
        p.validate();
    } catch (const InvalidArgument& e) {
        throw UsageError(e.what());
    }
    return p;
}

Schema with_two_level(std::vector<KeySpec> extra) {
    Schema s = two_level_keys();
    s.insert(s.end(), extra.begin(), extra.end());
    return s;
}

json complex_json(Complex z) { return {{"re", z.real()}, {"im", z.imag()}}; }

}  // namespace

Format parse_format(const std::string& text) {
    if (text == "csv") return Format::csv;
    if (text == "json") return Format::json;
    throw UsageError("unknown format '" + text + "' (expected csv or json)");
}

// ---- two-level sweep -------------------------------------------------------

const Schema& sweep_schema() {
    static const Schema s = with_two_level({
        {"alpha-min", KeyType::real, "first perturbation strength", -1.0},
        {"alpha-max", KeyType::real, "last perturbation strength", 1.0},
        {"steps", KeyType::integer, "number of grid points", 201},
    });
    return s;
}

SweepRequest sweep_request(const json& r) {
    SweepRequest q;
    q.params = two_level_params(r);
    q.alpha_min = r.at("alpha-min").get<double>();
    q.alpha_max = r.at("alpha-max").get<double>();
    q.steps = r.at("steps").get<std::size_t>();
    if (q.steps == 0) throw UsageError("--steps must be at least 1");
    if (q.steps == 1 && q.alpha_min != q.alpha_max) throw UsageError("--steps 1 needs --alpha-min == --alpha-max");
    if (q.steps > 1 && !(q.alpha_max > q.alpha_min)) throw UsageError("--alpha-max must exceed --alpha-min");
    return q;
}

const std::vector<std::string>& sweep_columns() {
    static const std::vector<std::string> c{"alpha",   "E1",     "E2",     "Gamma1",      "Gamma2",
                                            "Re_f",    "Im_f",   "dGamma1", "dE1",        "U11_re",
                                            "U12_im",  "ep_distance", "exceptional", "segment", "swapped"};
    return c;
}

std::string sweep_output(const SweepRequest& q, const Provenance& provenance, Format format) {
    const auto grid = two_level::linear_grid(q.alpha_min, q.alpha_max, q.steps);
    const auto traj = two_level::sweep(q.params, grid);
    std::vector<std::vector<std::string>> rows;
    rows.reserve(traj.rows.size());
    for (const auto& r : traj.rows) {
        rows.push_back({fmt(r.alpha), fmt(r.e1), fmt(r.e2), fmt(r.gamma1), fmt(r.gamma2), fmt(r.f.real()),
                        fmt(r.f.imag()), fmt(r.width_velocity), fmt(r.energy_velocity), fmt(r.u11), fmt(r.u12_imag),
                        fmt(r.ep_distance), r.exceptional ? "1" : "0", std::to_string(r.segment),
                        r.swapped ? "1" : "0"});
    }
    return table(provenance, sweep_columns(), rows, format);
}

// ---- two-level critical-points ----------------------------------------------

const Schema& critical_schema() {
    static const Schema s = with_two_level({
        {"alpha-min", KeyType::real, "lower end of the search bracket", -2.0},
        {"alpha-max", KeyType::real, "upper end of the search bracket", 2.0},
        {"scan-points", KeyType::integer, "dense-scan resolution", 2001},
    });
    return s;
}

CriticalRequest critical_request(const json& r) {
    CriticalRequest q;
    q.params = two_level_params(r);
    q.alpha_min = r.at("alpha-min").get<double>();
    q.alpha_max = r.at("alpha-max").get<double>();
    q.scan_points = r.at("scan-points").get<std::size_t>();
    if (!(q.alpha_max > q.alpha_min)) throw UsageError("--alpha-max must exceed --alpha-min");
    if (q.scan_points < 3) throw UsageError("--scan-points must be at least 3");
    return q;
}

namespace {

json state_at(const two_level::Params& p, double alpha) {
    const auto q = p.at(alpha);
    const auto s = two_level::mixing_state(q);
    json j;
    j["alpha"] = alpha;
    j["f"] = complex_json(s.f);
    j["exceptional"] = s.exceptional;
    j["ep_distance"] = two_level::exceptional_point_distance(q);
    if (!s.exceptional) {
        const auto u = two_level::nonorthogonality(s.f);
        j["U"] = {{"u11", u(0, 0).real()}, {"u12_imag", u(0, 1).imag()}};
        j["dGamma1"] = two_level::width_velocity(s.f, q.d, q.v).first;
        j["dE1"] = two_level::energy_velocity(s.f, q.d, q.v).first;
    }
    return j;
}

}  // namespace

CriticalResult critical_points(const CriticalRequest& q, const Provenance& provenance) {
    CriticalResult out;
    json& j = out.report;
    j["provenance"] = provenance_json(provenance);
    two_level::SearchOptions star_opts;
    star_opts.scan_points = q.scan_points;
    try {
        const double star = two_level::find_alpha_star(q.params, q.alpha_min, q.alpha_max, star_opts);
        j["alpha_star"] = star;
        j["at_star"] = state_at(q.params, star);
        double scan_max = 0.0;
        for (double a : two_level::linear_grid(q.alpha_min, q.alpha_max, q.scan_points)) {
            const auto s = two_level::mixing_state(q.params.at(a));
            if (s.exceptional) continue;
            try {
                scan_max = std::max(scan_max, std::abs(two_level::width_velocity(s.f, q.params.d, q.params.v).first));
            } catch (const ExceptionalPointError&) {
            }
        }
        j["scan_max_abs_dGamma1"] = scan_max;
    } catch (const NumericalError& e) {
        j["alpha_star"] = nullptr;
        out.errors.push_back(std::string("alpha_star: ") + e.what());
    }
    two_level::SearchOptions circ_opts{q.scan_points, 1e-12};
    try {
        const double circ = two_level::find_alpha_circ(q.params, q.alpha_min, q.alpha_max, circ_opts);
        j["alpha_circ"] = circ;
        j["at_circ"] = state_at(q.params, circ);
    } catch (const NumericalError& e) {
        j["alpha_circ"] = nullptr;
        out.errors.push_back(std::string("alpha_circ: ") + e.what());
    }
    j["errors"] = out.errors;
    return out;
}

// ---- ensemble ---------------------------------------------------------------

const Schema& ensemble_schema() {
    static const Schema s{
        {"model", KeyType::text, "spectrum model: picket-fence or goe", "picket-fence"},
        {"route", KeyType::text, "sampling route: direct or representation", "direct"},
        {"n", KeyType::integer, "number of levels N", 250},
        {"m", KeyType::integer, "number of open channels M", 1},
        {"realizations", KeyType::integer, "number of random matrices R", 2000},
        {"window", KeyType::integer, "levels kept around E = 0 per realization", 25},
        {"seed", KeyType::integer, "64-bit seed (generated and echoed when omitted)", nullptr, true},
        {"gamma-bar", KeyType::real, "mean partial width in units of the spacing", 1e-3},
        {"spacing", KeyType::real, "mean level spacing", 1.0},
        {"bins", KeyType::integer, "histogram bins", 61},
        {"y-min", KeyType::real, "histogram lower edge (default -3 sqrt(M) or -10)", nullptr, true},
        {"y-max", KeyType::real, "histogram upper edge (default 3 sqrt(M) or 10)", nullptr, true},
        {"threads", KeyType::integer, "worker threads, 0 = all cores", 0, false, false},
        {"max-memory-mb", KeyType::real, "refuse runs projected to need more memory", 4096.0, false, false},
    };
    return s;
}

EnsembleRequest ensemble_request(const json& r, std::uint64_t generated_seed) {
    EnsembleRequest q;
    EnsembleConfig& c = q.config;
    try {
        c.model.kind = parse_spectrum_kind(r.at("model").get<std::string>());
        c.route = parse_sampling_route(r.at("route").get<std::string>());
    } catch (const InvalidArgument& e) {
        throw UsageError(e.what());
    }
    c.model.levels = r.at("n").get<std::size_t>();
    c.model.spacing = r.at("spacing").get<double>();
    c.channels = r.at("m").get<std::size_t>();
    c.realizations = r.at("realizations").get<std::size_t>();
    c.central_window = r.at("window").get<std::size_t>();
    c.mean_partial_width = r.at("gamma-bar").get<double>();
    c.threads = static_cast<unsigned>(r.at("threads").get<std::uint64_t>());
    q.seed_given = r.contains("seed");
    c.seed = q.seed_given ? r.at("seed").get<std::uint64_t>() : generated_seed;
    q.bins = r.at("bins").get<std::size_t>();
    q.max_memory_mb = r.at("max-memory-mb").get<double>();
    const double half = c.model.kind == SpectrumKind::picket_fence ? 3.0 * std::sqrt(static_cast<double>(c.channels)) : 10.0;
    q.y_min = r.contains("y-min") ? r.at("y-min").get<double>() : -half;
    q.y_max = r.contains("y-max") ? r.at("y-max").get<double>() : half;
    try {
        c.validate();
    } catch (const InvalidArgument& e) {
        throw UsageError(e.what());
    }
    if (q.bins == 0) throw UsageError("--bins must be positive");
    if (!(q.y_max > q.y_min)) throw UsageError("--y-max must exceed --y-min");
    return q;
}

double projected_memory_mb(const EnsembleConfig& c) {
    const double samples = static_cast<double>(c.realizations) * static_cast<double>(c.central_window);
    const double n = static_cast<double>(c.model.levels);
    const double threads = static_cast<double>(c.threads == 0 ? default_thread_count() : c.threads);
    // Staging plus output arrays and CSV text per sample; H, eigenvectors, V
    // and solver workspace per worker.
    const double bytes = samples * (4 * 8 + 4 * 8 + 64) + threads * n * n * 8.0 * 6.0;
    return bytes / (1024.0 * 1024.0);
}

std::string samples_csv(const VelocitySampleSet& s, const Provenance& provenance) {
    std::string out = provenance_header(provenance);
    out += "realization,slot,y,kappa\n";
    for (std::size_t i = 0; i < s.values.size(); ++i) {
        out += std::to_string(s.realization[i]);
        out += ',';
        out += std::to_string(s.slot[i]);
        out += ',';
        out += format_double(s.values[i]);
        out += ',';
        out += format_double(s.kappas[i]);
        out += '\n';
    }
    return out;
}

EnsembleOutputs run_ensemble(const EnsembleRequest& q, const Provenance& provenance) {
    const double need = projected_memory_mb(q.config);
    if (need > q.max_memory_mb) {
        std::ostringstream os;
        os << "refusing run: projected memory " << need << " MiB exceeds --max-memory-mb " << q.max_memory_mb;
        throw UsageError(os.str());
    }
    EnsembleOutputs out;
    out.samples = sample_velocities(q.config);
    const auto& s = out.samples;
    const int channels = static_cast<int>(q.config.channels);
    const SpectrumKind kind = q.config.model.kind;

    const auto hist = equal_width_histogram(s.values, q.y_min, q.y_max, q.bins);
    std::vector<std::vector<std::string>> rows;
    rows.reserve(q.bins);
    for (std::size_t i = 0; i < q.bins; ++i) {
        const double lo = q.y_min + static_cast<double>(i) * hist.width();
        const double hi = i + 1 == q.bins ? q.y_max : lo + hist.width();
        const double center = hist.center(i);
        double pdf = std::numeric_limits<double>::quiet_NaN();
        bool singular = false;
        try {
            pdf = velocity_pdf(center, channels, kind);
        } catch (const SingularPointError&) {
            singular = true;
        }
        const double mass = velocity_cdf(hi, channels, kind) - velocity_cdf(lo, channels, kind);
        rows.push_back({fmt(lo), fmt(hi), fmt(center), std::to_string(hist.counts[i]),
                        s.values.empty() ? "nan" : fmt(hist.density(i)), fmt(pdf), fmt(mass / (hi - lo)),
                        singular ? "1" : "0"});
    }
    out.histogram_csv = table_csv(
        provenance, {"bin_lo", "bin_hi", "center", "count", "density", "model_pdf", "model_bin_average", "singular"},
        rows);
    out.samples_csv = samples_csv(s, provenance);

    json& r = out.report;
    r["provenance"] = provenance_json(provenance);
    r["samples"] = s.values.size();
    r["skipped_levels"] = s.skipped_levels;
    r["below_range"] = hist.below;
    r["above_range"] = hist.above;
    r["truncation_deficit"] = s.truncation_deficit;
    r["warnings"] = s.warnings;
    const auto m = sample_moments(s.values);
    r["moments"] = {{"mean", m.mean}, {"variance", m.variance}, {"skewness", m.skewness},
                    {"excess_kurtosis", m.excess_kurtosis}};
    r["expected_variance"] = kind == SpectrumKind::picket_fence ? json(static_cast<double>(channels) / 3.0) : json(nullptr);
    if (s.values.size() >= 1000) {
        const auto fit = compare_histogram(s.values, velocity_curve(kind, channels));
        r["goodness_of_fit"] = {{"chi_square", fit.chi_square},
                                {"degrees_of_freedom", fit.degrees_of_freedom},
                                {"p_value", fit.p_value},
                                {"sup_norm", fit.sup_norm},
                                {"notes", fit.notes}};
    } else {
        r["goodness_of_fit"] = nullptr;
    }
    return out;
}

// ---- dist -------------------------------------------------------------------

const Schema& dist_schema() {
    static const Schema s{
        {"model", KeyType::text, "spectrum model for P_M: picket-fence (pf) or goe", "picket-fence"},
        {"m", KeyType::integer, "number of open channels M", 1},
        {"y", KeyType::real, "single evaluation point (overrides the grid)", nullptr, true},
        {"y-min", KeyType::real, "grid start", -10.0},
        {"y-max", KeyType::real, "grid end", 10.0},
        {"steps", KeyType::integer, "grid points", 2001},
    };
    return s;
}

DistRequest dist_request(const json& r) {
    DistRequest q;
    try {
        q.kind = parse_spectrum_kind(r.at("model").get<std::string>());
    } catch (const InvalidArgument& e) {
        throw UsageError(e.what());
    }
    const auto m = r.at("m").get<std::uint64_t>();
    if (m < 1 || m > 10000) throw UsageError("--m must lie in [1, 10000]");
    q.channels = static_cast<int>(m);
    if (r.contains("y")) {
        q.grid = {r.at("y").get<double>()};
        return q;
    }
    const double lo = r.at("y-min").get<double>();
    const double hi = r.at("y-max").get<double>();
    const auto steps = r.at("steps").get<std::size_t>();
    if (steps == 0) throw UsageError("--steps must be at least 1");
    if (steps > 1 && !(hi > lo)) throw UsageError("--y-max must exceed --y-min");
    q.grid = two_level::linear_grid(lo, hi, steps);
    return q;
}

const std::vector<std::string>& dist_columns() {
    static const std::vector<std::string> c{"y", "phi_goe", "phi_pf", "P_M", "cdf_M", "large_m_pf", "singular"};
    return c;
}

std::string dist_output(const DistRequest& q, const Provenance& provenance, Format format) {
    std::vector<std::vector<std::string>> rows(q.grid.size());
    parallel_for(q.grid.size(), 0, [&](std::size_t i) {
        const double y = q.grid[i];
        double pdf = std::numeric_limits<double>::quiet_NaN();
        bool singular = false;
        try {
            pdf = velocity_pdf(y, q.channels, q.kind);
        } catch (const SingularPointError&) {
            singular = true;
        }
        rows[i] = {fmt(y), fmt(phi_goe(y)), fmt(phi_pf(y)), fmt(pdf), fmt(velocity_cdf(y, q.channels, q.kind)),
                   fmt(large_m_limit_pf(y, q.channels)), singular ? "1" : "0"};
    });
    return table(provenance, dist_columns(), rows, format);
}

}  // namespace resodyn::cli
