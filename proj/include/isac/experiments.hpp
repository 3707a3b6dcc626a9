#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "isac/air.hpp"
#include "isac/constellation.hpp"
#include "isac/ofdm.hpp"
#include "isac/pas.hpp"
#include "isac/shaping.hpp"

namespace isac::exp {

/// Toolkit version string written into every CSV.
std::string version();

/// Shortest round-trippable decimal form of a double.
std::string fmt(double v);

/**
 * In-memory CSV: a version comment line, then column names carrying units
 * in brackets, then data rows.
 */
struct CsvTable {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    std::string to_string() const;
    static CsvTable parse(const std::string& text);
    std::size_t column(const std::string& name) const;  ///< matches with or without the unit suffix
};

/// Runs fn(0..n-1) on at most jobs threads (0 = hardware concurrency).
void parallel_for(std::size_t n, std::size_t jobs, const std::function<void(std::size_t)>& fn);

/// Throws std::invalid_argument naming the first key of j not in allowed.
void check_keys(const nlohmann::json& j, const std::vector<std::string>& allowed, const std::string& what);

// ---- bounds ----

CsvTable bounds_table(double snr_db, const std::vector<double>& kappas, double es = 1.0);

// ---- trade-off sweep ----

struct SweepConfig {
    std::vector<shaping::Family> families{shaping::Family::geometric, shaping::Family::probabilistic,
                                          shaping::Family::joint, shaping::Family::cpas,
                                          shaping::Family::gpas};
    std::vector<double> kappas{1.0, 1.2, 1.6, 2.0};
    std::vector<std::uint64_t> seeds{0};
    double snr_db = 10.0;
    air::Metric metric = air::Metric::gmi;
    int bits = 6;
    int epochs = 400;
    int train_order = 24;
    std::size_t jobs = 0;
    std::string constellation_dir;  ///< empty: constellations are not written
};

struct SweepRow {
    shaping::Family family = shaping::Family::joint;
    double kappa_tilde = 0.0;
    std::uint64_t seed = 0;
    std::string path;
    double kappa = 0.0;
    double mi = 0.0;
    double gmi = 0.0;
    double lower = 0.0;
    double upper = 0.0;
    Constellation constellation;
};

/// Optimizes every (family, kappa_tilde, seed) point; rows ordered family-major, then kappa, then seed.
std::vector<SweepRow> run_tradeoff_sweep(const SweepConfig& cfg);
CsvTable sweep_table(const std::vector<SweepRow>& rows);

// ---- AIR curves ----

struct NamedConstellation {
    std::string name;
    Constellation constellation;
};

struct AirCurveConfig {
    std::vector<NamedConstellation> constellations;
    std::vector<double> snr_db;
    air::Method method = air::Quadrature{};
    bool mi = true;
    bool gmi = true;
    std::size_t jobs = 0;
};

struct AirPoint {
    std::string name;
    double snr_db = 0.0;
    double kappa = 0.0;
    double mi = 0.0;
    double gmi = 0.0;
    double mi_se = 0.0;
    double gmi_se = 0.0;
};

std::vector<AirPoint> run_air_curve(const AirCurveConfig& cfg);
CsvTable air_table(const std::vector<AirPoint>& pts, const AirCurveConfig& cfg);

// ---- sensing ----

/// Targets given by radar cross-section and range; |a|^2 = snr * sigma_s2.
struct RadarTarget {
    double rcs_m2 = 1.0;
    double range_m = 0.0;
    ofdm::Fluctuation model = ofdm::Fluctuation::swerling1;
};

struct RadarBlock {
    ofdm::RadarLink link;
    double sample_rate_hz = 100e6;
    double toi_rcs_m2 = 0.1;
    ofdm::Fluctuation toi_model = ofdm::Fluctuation::swerling1;
    std::vector<double> toi_ranges_m;
    std::vector<RadarTarget> interferers;
};

struct SenseConfig {
    ofdm::OfdmConfig ofdm;
    ofdm::SensingScenario scenario;
    std::vector<std::size_t> toi_delays;  ///< sweep of the TOI delay; empty keeps the scenario's delay
    std::optional<RadarBlock> radar;      ///< replaces scenario targets when present
};

/**
 * {"n", "cp_len", "seed", "sigma_s2", "pfa", "n_win", "n_guard",
 *  "targets": [{"delay", "model": "fixed"|"swerling0"|"swerling1", "power", "amplitude": [re, im], "toi"}],
 *  "toi_delays": [...], "radar": {...}}
 */
SenseConfig sense_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SenseConfig& cfg);

struct SenseRow {
    double range_or_delay = 0.0;
    std::size_t delay = 0;
    double gamma = 0.0;
    double pd_analytic = 0.0;
    double pd_sim = 0.0;
    double ci_lo = 0.0;
    double ci_hi = 0.0;
    double kappa = 0.0;
};

/// One row per TOI delay (or range); the scenario of each row is what simulate_pd receives.
std::vector<ofdm::SensingScenario> sense_scenarios(const SenseConfig& cfg, std::vector<double>* x = nullptr);
std::vector<SenseRow> run_sense(const Constellation& c, const SenseConfig& cfg, std::size_t trials,
                                std::size_t jobs = 0);
CsvTable sense_table(const std::vector<SenseRow>& rows, bool ranges);

// ---- PAS ----

/// {"family", "U", "amp_bits", "phase_bits", "counts" | "probs", "bypass", "code_seed"}
pas::PasConfig pas_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const pas::PasConfig& cfg);

nlohmann::json to_json(const pas::LlrLutSet& luts);
pas::LlrLutSet luts_from_json(const nlohmann::json& j);

struct LutGmiPoint {
    double snr_db = 0.0;
    double gmi_exact = 0.0;
    double gmi_lut = 0.0;
    double gmi_lut_unscaled = 0.0;
    double scale = 1.0;
};
std::vector<LutGmiPoint> run_lut_gmi(const Constellation& c, const std::vector<double>& snr_db, std::size_t V,
                                     double g, std::size_t jobs = 0);
CsvTable lut_gmi_table(const std::vector<LutGmiPoint>& pts);

// ---- plot data ----

/// Wide to long: one row (group, x, series, value) per y column and input row.
CsvTable reshape_long(const CsvTable& in, const std::string& x, const std::vector<std::string>& ys,
                      const std::vector<std::string>& group_by);

}  // namespace isac::exp
