#include "isac/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "isac/bounds.hpp"
#include "isac/io.hpp"

namespace isac::exp {

using nlohmann::json;

std::string version() { return ISAC_VERSION; }

std::string fmt(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    for (int prec = 6; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

namespace {

std::string quote(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + "\"";
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char ch = line[i];
        if (quoted) {
            if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (ch == '"') {
                quoted = false;
            } else {
                cur += ch;
            }
        } else if (ch == '"') {
            quoted = true;
        } else if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    out.push_back(cur);
    return out;
}

double sigma_from_snr(double snr_db, double es = 1.0) { return es / std::pow(10.0, snr_db / 10.0); }

}  // namespace

std::string CsvTable::to_string() const {
    std::ostringstream os;
    os << "# isac " << version() << "\n";
    for (std::size_t i = 0; i < columns.size(); ++i) os << (i ? "," : "") << quote(columns[i]);
    os << "\n";
    for (const auto& r : rows) {
        if (r.size() != columns.size()) throw std::logic_error("CSV row width mismatch");
        for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << quote(r[i]);
        os << "\n";
    }
    return os.str();
}

CsvTable CsvTable::parse(const std::string& text) {
    CsvTable t;
    std::istringstream is(text);
    std::string line;
    bool header = false;
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        auto cells = split_csv_line(line);
        if (!header) {
            t.columns = std::move(cells);
            header = true;
        } else {
            if (cells.size() != t.columns.size())
                throw std::invalid_argument("CSV row has " + std::to_string(cells.size()) + " cells, expected " +
                                            std::to_string(t.columns.size()));
            t.rows.push_back(std::move(cells));
        }
    }
    if (!header) throw std::invalid_argument("CSV without header");
    return t;
}

std::size_t CsvTable::column(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i) {
        const auto& c = columns[i];
        if (c == name) return i;
        const auto b = c.find('[');
        if (b != std::string::npos && c.substr(0, b) == name) return i;
    }
    throw std::invalid_argument("no column " + name);
}

void parallel_for(std::size_t n, std::size_t jobs, const std::function<void(std::size_t)>& fn) {
    if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
    jobs = std::min(jobs, n);
    if (jobs <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr err;
    std::mutex mu;
    auto work = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(mu);
                if (!err) err = std::current_exception();
                next = n;
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < jobs; ++t) pool.emplace_back(work);
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
}

void check_keys(const json& j, const std::vector<std::string>& allowed, const std::string& what) {
    if (!j.is_object()) throw std::invalid_argument(what + " must be a JSON object");
    for (const auto& [key, _] : j.items())
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
            throw std::invalid_argument("unknown key in " + what + ": " + key);
}

// ---- bounds ----

CsvTable bounds_table(double snr_db, const std::vector<double>& kappas, double es) {
    CsvTable t;
    t.columns = {"kappa_tilde[-]",        "snr_db[dB]",           "lower_bits[bit/symbol]",
                 "upper_bits[bit/symbol]", "lower_gamma0[-]",      "lower_gamma2[-]",
                 "lower_gamma4[-]",        "upper_gamma0[-]",      "upper_gamma2[-]",
                 "upper_gamma4[-]",        "lower_clamped[bool]"};
    const double s2 = sigma_from_snr(snr_db, es);
    for (double k : kappas) {
        const auto d = bounds::mi_bounds_detail(es, s2, k);
        t.rows.push_back({fmt(k), fmt(snr_db), fmt(d.bits.lower), fmt(d.bits.upper), fmt(d.lower_params.gamma0),
                          fmt(d.lower_params.gamma2), fmt(d.lower_params.gamma4), fmt(d.upper_params.gamma0),
                          fmt(d.upper_params.gamma2), fmt(d.upper_params.gamma4), d.lower_clamped ? "1" : "0"});
    }
    return t;
}

// ---- trade-off sweep ----

std::vector<SweepRow> run_tradeoff_sweep(const SweepConfig& cfg) {
    if (cfg.families.empty() || cfg.kappas.empty() || cfg.seeds.empty())
        throw std::invalid_argument("sweep needs families, kappas and seeds");
    struct Point {
        shaping::Family f;
        double k;
        std::uint64_t s;
    };
    std::vector<Point> pts;
    for (auto f : cfg.families)
        for (double k : cfg.kappas)
            for (auto s : cfg.seeds) pts.push_back({f, k, s});
    if (!cfg.constellation_dir.empty()) std::filesystem::create_directories(cfg.constellation_dir);

    const double s2 = sigma_from_snr(cfg.snr_db);
    std::vector<SweepRow> rows(pts.size());
    parallel_for(pts.size(), cfg.jobs, [&](std::size_t i) {
        const auto& p = pts[i];
        shaping::InitOptions init;
        init.bits = cfg.bits;
        init.seed = p.s;
        shaping::OptConfig oc;
        oc.kappa_tilde = p.k;
        oc.snr_db = cfg.snr_db;
        oc.metric = cfg.metric;
        oc.epochs = cfg.epochs;
        oc.train_order = cfg.train_order;
        oc.seed = p.s;
        auto res = shaping::optimize(shaping::initial_params(p.f, init), oc);
        SweepRow& r = rows[i];
        r.family = p.f;
        r.kappa_tilde = p.k;
        r.seed = p.s;
        r.constellation = res.constellation;
        r.kappa = moments(res.constellation).kurtosis;
        const air::AwgnChannel ch(s2);
        r.mi = air::mi_estimate(res.constellation, ch).bits;
        r.gmi = air::gmi_estimate(res.constellation, ch).bits;
        const auto b = bounds::mi_bounds(1.0, s2, p.k);
        r.lower = b.lower;
        r.upper = b.upper;
        if (!cfg.constellation_dir.empty()) {
            r.path = (std::filesystem::path(cfg.constellation_dir) /
                      (shaping::to_string(p.f) + "_k" + fmt(p.k) + "_s" + std::to_string(p.s) + ".json"))
                         .string();
            save_constellation(res.constellation, r.path);
        }
    });
    return rows;
}

CsvTable sweep_table(const std::vector<SweepRow>& rows) {
    CsvTable t;
    t.columns = {"family",           "kappa_tilde[-]",         "seed",
                 "constellation",    "kappa[-]",               "mi_bits[bit/symbol]",
                 "gmi_bits[bit/symbol]", "lower_bits[bit/symbol]", "upper_bits[bit/symbol]"};
    for (const auto& r : rows)
        t.rows.push_back({shaping::to_string(r.family), fmt(r.kappa_tilde), std::to_string(r.seed), r.path,
                          fmt(r.kappa), fmt(r.mi), fmt(r.gmi), fmt(r.lower), fmt(r.upper)});
    return t;
}

// ---- AIR curves ----

std::vector<AirPoint> run_air_curve(const AirCurveConfig& cfg) {
    if (cfg.constellations.empty() || cfg.snr_db.empty())
        throw std::invalid_argument("AIR curve needs constellations and SNR points");
    const std::size_t ns = cfg.snr_db.size();
    std::vector<AirPoint> out(cfg.constellations.size() * ns);
    parallel_for(out.size(), cfg.jobs, [&](std::size_t i) {
        const auto& nc = cfg.constellations[i / ns];
        const double snr = cfg.snr_db[i % ns];
        const air::AwgnChannel ch = air::AwgnChannel::from_snr_db(snr);
        air::Method m = cfg.method;
        if (auto* mc = std::get_if<air::MonteCarlo>(&m)) mc->seed = derive_seed(mc->seed, i);
        AirPoint& p = out[i];
        p.name = nc.name;
        p.snr_db = snr;
        p.kappa = moments(nc.constellation).kurtosis;
        if (cfg.mi) {
            const auto e = air::mi_estimate(nc.constellation, ch, m);
            p.mi = e.bits;
            p.mi_se = e.std_error;
        }
        if (cfg.gmi) {
            const auto e = air::gmi_estimate(nc.constellation, ch, m);
            p.gmi = e.bits;
            p.gmi_se = e.std_error;
        }
    });
    return out;
}

CsvTable air_table(const std::vector<AirPoint>& pts, const AirCurveConfig& cfg) {
    const bool mc = std::holds_alternative<air::MonteCarlo>(cfg.method);
    CsvTable t;
    t.columns = {"constellation", "snr_db[dB]", "kappa[-]"};
    if (cfg.mi) t.columns.push_back("mi_bits[bit/symbol]");
    if (cfg.gmi) t.columns.push_back("gmi_bits[bit/symbol]");
    if (mc && cfg.mi) t.columns.push_back("mi_stderr[bit/symbol]");
    if (mc && cfg.gmi) t.columns.push_back("gmi_stderr[bit/symbol]");
    for (const auto& p : pts) {
        std::vector<std::string> r{p.name, fmt(p.snr_db), fmt(p.kappa)};
        if (cfg.mi) r.push_back(fmt(p.mi));
        if (cfg.gmi) r.push_back(fmt(p.gmi));
        if (mc && cfg.mi) r.push_back(fmt(p.mi_se));
        if (mc && cfg.gmi) r.push_back(fmt(p.gmi_se));
        t.rows.push_back(std::move(r));
    }
    return t;
}

// ---- sensing ----

namespace {

ofdm::Fluctuation fluctuation_from_string(const std::string& s) {
    if (s == "fixed") return ofdm::Fluctuation::fixed;
    if (s == "swerling0") return ofdm::Fluctuation::swerling0;
    if (s == "swerling1") return ofdm::Fluctuation::swerling1;
    throw std::invalid_argument("unknown target model: " + s);
}

std::string to_string(ofdm::Fluctuation f) {
    switch (f) {
        case ofdm::Fluctuation::fixed: return "fixed";
        case ofdm::Fluctuation::swerling0: return "swerling0";
        case ofdm::Fluctuation::swerling1: return "swerling1";
    }
    return "?";
}

template <class T>
void get_if_present(const json& j, const char* key, T& v) {
    if (j.contains(key)) v = j.at(key).get<T>();
}

}  // namespace

SenseConfig sense_config_from_json(const json& j) {
    check_keys(j, {"n", "cp_len", "seed", "sigma_s2", "pfa", "n_win", "n_guard", "targets", "toi_delays", "radar"},
               "scenario");
    SenseConfig cfg;
    get_if_present(j, "n", cfg.ofdm.n);
    get_if_present(j, "cp_len", cfg.ofdm.cp_len);
    get_if_present(j, "seed", cfg.ofdm.seed);
    auto& sc = cfg.scenario;
    get_if_present(j, "sigma_s2", sc.sigma_s2);
    get_if_present(j, "pfa", sc.pfa);
    get_if_present(j, "n_win", sc.n_win);
    get_if_present(j, "n_guard", sc.n_guard);
    get_if_present(j, "toi_delays", cfg.toi_delays);
    if (j.contains("targets")) {
        for (const auto& tj : j.at("targets")) {
            check_keys(tj, {"delay", "model", "power", "amplitude", "toi"}, "target");
            ofdm::Target t;
            get_if_present(tj, "delay", t.delay);
            if (tj.contains("model")) t.model = fluctuation_from_string(tj.at("model"));
            get_if_present(tj, "toi", t.is_toi);
            if (tj.contains("amplitude")) {
                if (t.model != ofdm::Fluctuation::fixed)
                    throw std::invalid_argument("amplitude is only valid for fixed targets");
                const auto& a = tj.at("amplitude");
                if (!a.is_array() || a.size() != 2) throw std::invalid_argument("amplitude must be [re, im]");
                t.amplitude = {a[0].get<double>(), a[1].get<double>()};
                t.power = std::norm(t.amplitude);
                if (tj.contains("power")) throw std::invalid_argument("give either amplitude or power");
            } else {
                get_if_present(tj, "power", t.power);
                if (t.model == ofdm::Fluctuation::fixed) t.amplitude = std::sqrt(t.power);
            }
            sc.targets.push_back(t);
        }
    }
    if (j.contains("radar")) {
        const auto& rj = j.at("radar");
        check_keys(rj,
                   {"tx_power_w", "gain_tx", "gain_rx", "carrier_hz", "bandwidth_hz", "noise_figure_db",
                    "temperature_k", "losses_db", "sample_rate_hz", "toi_rcs_m2", "toi_model", "toi_ranges_m",
                    "interferers"},
                   "radar");
        RadarBlock rb;
        get_if_present(rj, "tx_power_w", rb.link.tx_power_w);
        get_if_present(rj, "gain_tx", rb.link.gain_tx);
        get_if_present(rj, "gain_rx", rb.link.gain_rx);
        get_if_present(rj, "carrier_hz", rb.link.carrier_hz);
        get_if_present(rj, "bandwidth_hz", rb.link.bandwidth_hz);
        get_if_present(rj, "noise_figure_db", rb.link.noise_figure_db);
        get_if_present(rj, "temperature_k", rb.link.temperature_k);
        get_if_present(rj, "losses_db", rb.link.losses_db);
        get_if_present(rj, "sample_rate_hz", rb.sample_rate_hz);
        get_if_present(rj, "toi_rcs_m2", rb.toi_rcs_m2);
        if (rj.contains("toi_model")) rb.toi_model = fluctuation_from_string(rj.at("toi_model"));
        get_if_present(rj, "toi_ranges_m", rb.toi_ranges_m);
        if (rj.contains("interferers")) {
            for (const auto& ij : rj.at("interferers")) {
                check_keys(ij, {"rcs_m2", "range_m", "model"}, "interferer");
                RadarTarget t;
                get_if_present(ij, "rcs_m2", t.rcs_m2);
                get_if_present(ij, "range_m", t.range_m);
                if (ij.contains("model")) t.model = fluctuation_from_string(ij.at("model"));
                rb.interferers.push_back(t);
            }
        }
        if (rb.toi_ranges_m.empty()) throw std::invalid_argument("radar block needs toi_ranges_m");
        cfg.radar = rb;
    }
    cfg.ofdm.validate();
    sense_scenarios(cfg);
    return cfg;
}

json to_json(const SenseConfig& cfg) {
    json j;
    j["n"] = cfg.ofdm.n;
    j["cp_len"] = cfg.ofdm.cp_len;
    j["seed"] = cfg.ofdm.seed;
    j["sigma_s2"] = cfg.scenario.sigma_s2;
    j["pfa"] = cfg.scenario.pfa;
    j["n_win"] = cfg.scenario.n_win;
    j["n_guard"] = cfg.scenario.n_guard;
    json ts = json::array();
    for (const auto& t : cfg.scenario.targets) {
        json tj{{"delay", t.delay}, {"model", to_string(t.model)}, {"toi", t.is_toi}};
        if (t.model == ofdm::Fluctuation::fixed)
            tj["amplitude"] = {t.amplitude.real(), t.amplitude.imag()};
        else
            tj["power"] = t.power;
        ts.push_back(tj);
    }
    j["targets"] = ts;
    if (!cfg.toi_delays.empty()) j["toi_delays"] = cfg.toi_delays;
    if (cfg.radar) {
        const auto& rb = *cfg.radar;
        json rj{{"tx_power_w", rb.link.tx_power_w},
                {"gain_tx", rb.link.gain_tx},
                {"gain_rx", rb.link.gain_rx},
                {"carrier_hz", rb.link.carrier_hz},
                {"bandwidth_hz", rb.link.bandwidth_hz},
                {"noise_figure_db", rb.link.noise_figure_db},
                {"temperature_k", rb.link.temperature_k},
                {"losses_db", rb.link.losses_db},
                {"sample_rate_hz", rb.sample_rate_hz},
                {"toi_rcs_m2", rb.toi_rcs_m2},
                {"toi_model", to_string(rb.toi_model)},
                {"toi_ranges_m", rb.toi_ranges_m}};
        json is = json::array();
        for (const auto& t : rb.interferers)
            is.push_back({{"rcs_m2", t.rcs_m2}, {"range_m", t.range_m}, {"model", to_string(t.model)}});
        rj["interferers"] = is;
        j["radar"] = rj;
    }
    return j;
}

std::vector<ofdm::SensingScenario> sense_scenarios(const SenseConfig& cfg, std::vector<double>* x) {
    std::vector<ofdm::SensingScenario> out;
    std::vector<double> xs;
    if (cfg.radar) {
        const auto& rb = *cfg.radar;
        auto make = [&](double rcs, double range, ofdm::Fluctuation model, bool toi) {
            ofdm::Target t;
            const double d = std::round(ofdm::range_to_delay(range, rb.sample_rate_hz));
            if (d < 0.0) throw std::invalid_argument("negative range");
            t.delay = static_cast<std::size_t>(d);
            t.model = model;
            t.power = ofdm::radar_snr(rb.link, rcs, range) * cfg.scenario.sigma_s2;
            t.amplitude = std::sqrt(t.power);
            t.is_toi = toi;
            return t;
        };
        for (double r : rb.toi_ranges_m) {
            auto sc = cfg.scenario;
            sc.targets.clear();
            sc.targets.push_back(make(rb.toi_rcs_m2, r, rb.toi_model, true));
            for (const auto& it : rb.interferers) sc.targets.push_back(make(it.rcs_m2, it.range_m, it.model, false));
            out.push_back(std::move(sc));
            xs.push_back(r);
        }
    } else if (!cfg.toi_delays.empty()) {
        const std::size_t toi_idx = static_cast<std::size_t>(&cfg.scenario.toi() - cfg.scenario.targets.data());
        for (auto d : cfg.toi_delays) {
            auto sc = cfg.scenario;
            sc.targets[toi_idx].delay = d;
            out.push_back(std::move(sc));
            xs.push_back(static_cast<double>(d));
        }
    } else {
        out.push_back(cfg.scenario);
        xs.push_back(static_cast<double>(cfg.scenario.toi().delay));
    }
    for (const auto& sc : out) sc.validate(cfg.ofdm);
    if (x) *x = std::move(xs);
    return out;
}

std::vector<SenseRow> run_sense(const Constellation& c, const SenseConfig& cfg, std::size_t trials,
                                std::size_t jobs) {
    std::vector<double> xs;
    const auto scs = sense_scenarios(cfg, &xs);
    const Constellation cn = normalize(c);
    const double kappa = moments(cn).kurtosis;
    std::vector<SenseRow> rows(scs.size());
    parallel_for(scs.size(), jobs, [&](std::size_t i) {
        auto oc = cfg.ofdm;
        oc.seed = derive_seed(cfg.ofdm.seed, i);
        const auto est = ofdm::simulate_pd(cn, scs[i], oc, trials);
        SenseRow& r = rows[i];
        r.range_or_delay = xs[i];
        r.delay = scs[i].toi().delay;
        r.kappa = kappa;
        r.gamma = ofdm::analytic_sinr(scs[i], kappa, cfg.ofdm.n);
        r.pd_analytic = ofdm::analytic_pd(r.gamma, scs[i].pfa);
        r.pd_sim = est.pd;
        r.ci_lo = est.ci_lo;
        r.ci_hi = est.ci_hi;
    });
    return rows;
}

CsvTable sense_table(const std::vector<SenseRow>& rows, bool ranges) {
    CsvTable t;
    t.columns = {ranges ? "range_or_delay[m]" : "range_or_delay[samples]",
                 "delay[samples]",
                 "gamma[-]",
                 "pd_analytic[-]",
                 "pd_sim[-]",
                 "ci_lo[-]",
                 "ci_hi[-]",
                 "kappa[-]"};
    for (const auto& r : rows)
        t.rows.push_back({fmt(r.range_or_delay), std::to_string(r.delay), fmt(r.gamma), fmt(r.pd_analytic),
                          fmt(r.pd_sim), fmt(r.ci_lo), fmt(r.ci_hi), fmt(r.kappa)});
    return t;
}

// ---- PAS ----

pas::PasConfig pas_config_from_json(const json& j) {
    check_keys(j, {"family", "U", "amp_bits", "phase_bits", "counts", "probs", "bypass", "code_seed"}, "frame");
    pas::PasConfig cfg;
    const std::string fam = j.value("family", std::string("gpas"));
    if (fam == "gpas") {
        cfg.family = pas::PasFamily::gpas;
    } else if (fam == "cpas") {
        cfg.family = pas::PasFamily::cpas;
        cfg.phase_bits = 1;
    } else {
        throw std::invalid_argument("unknown PAS family: " + fam);
    }
    get_if_present(j, "U", cfg.U);
    get_if_present(j, "amp_bits", cfg.amp_bits);
    get_if_present(j, "phase_bits", cfg.phase_bits);
    get_if_present(j, "bypass", cfg.bypass);
    get_if_present(j, "code_seed", cfg.code_seed);
    if (j.contains("counts") == j.contains("probs"))
        throw std::invalid_argument("frame needs exactly one of counts or probs");
    if (j.contains("counts")) {
        cfg.comp.counts = j.at("counts").get<std::vector<std::uint32_t>>();
    } else {
        const auto p = j.at("probs").get<std::vector<double>>();
        cfg.comp = pas::quantize_composition(p, cfg.U);
    }
    cfg.validate();
    return cfg;
}

json to_json(const pas::PasConfig& cfg) {
    return json{{"family", pas::to_string(cfg.family)},
                {"U", cfg.U},
                {"amp_bits", cfg.amp_bits},
                {"phase_bits", cfg.phase_bits},
                {"counts", cfg.comp.counts},
                {"bypass", cfg.bypass},
                {"code_seed", cfg.code_seed}};
}

namespace {
const char* const kLutNames[pas::LlrLutSet::kTables] = {"radius1", "radius2", "real3",  "imag4",
                                                        "radius56", "phase5", "phase6"};
}

json to_json(const pas::LlrLutSet& luts) {
    json tables = json::object();
    for (std::size_t i = 0; i < pas::LlrLutSet::kTables; ++i) tables[kLutNames[i]] = luts.tables[i];
    return json{{"V", luts.V}, {"g", luts.g}, {"r_max", luts.r_max}, {"axis_max", luts.axis_max}, {"tables", tables}};
}

pas::LlrLutSet luts_from_json(const json& j) {
    check_keys(j, {"V", "g", "r_max", "axis_max", "tables"}, "LUT set");
    pas::LlrLutSet l;
    l.V = j.at("V").get<std::size_t>();
    l.g = j.at("g").get<double>();
    l.r_max = j.at("r_max").get<double>();
    l.axis_max = j.at("axis_max").get<double>();
    const auto& t = j.at("tables");
    check_keys(t, std::vector<std::string>(std::begin(kLutNames), std::end(kLutNames)), "LUT tables");
    for (std::size_t i = 0; i < pas::LlrLutSet::kTables; ++i) {
        l.tables[i] = t.at(kLutNames[i]).get<std::vector<double>>();
        if (l.tables[i].size() != l.V) throw std::invalid_argument(std::string("table size mismatch: ") + kLutNames[i]);
    }
    return l;
}

std::vector<LutGmiPoint> run_lut_gmi(const Constellation& c, const std::vector<double>& snr_db, std::size_t V,
                                     double g, std::size_t jobs) {
    const Constellation cn = normalize(c);
    std::vector<LutGmiPoint> out(snr_db.size());
    parallel_for(out.size(), jobs, [&](std::size_t i) {
        const auto ch = air::AwgnChannel::from_snr_db(snr_db[i]);
        const auto luts = pas::build_llr_luts(cn, ch.sigma_c2, V, g);
        const auto m = air::gmi_with_demapper(cn, ch, [&](cplx y, std::span<double> l) { pas::lut_demap(y, luts, l); });
        auto& p = out[i];
        p.snr_db = snr_db[i];
        p.gmi_exact = air::gmi_estimate(cn, ch, air::Quadrature{32, false}).bits;
        p.gmi_lut = m.bits;
        p.gmi_lut_unscaled = m.bits_unscaled;
        p.scale = m.best_scale;
    });
    return out;
}

CsvTable lut_gmi_table(const std::vector<LutGmiPoint>& pts) {
    CsvTable t;
    t.columns = {"snr_db[dB]", "gmi_exact[bit/symbol]", "gmi_lut[bit/symbol]", "gmi_lut_unscaled[bit/symbol]",
                 "llr_scale[-]"};
    for (const auto& p : pts)
        t.rows.push_back({fmt(p.snr_db), fmt(p.gmi_exact), fmt(p.gmi_lut), fmt(p.gmi_lut_unscaled), fmt(p.scale)});
    return t;
}

// ---- plot data ----

CsvTable reshape_long(const CsvTable& in, const std::string& x, const std::vector<std::string>& ys,
                      const std::vector<std::string>& group_by) {
    if (ys.empty()) throw std::invalid_argument("no y columns");
    std::vector<std::size_t> gi;
    for (const auto& g : group_by) gi.push_back(in.column(g));
    const std::size_t xi = in.column(x);
    std::vector<std::size_t> yi;
    for (const auto& y : ys) yi.push_back(in.column(y));
    CsvTable t;
    for (auto i : gi) t.columns.push_back(in.columns[i]);
    t.columns.push_back(in.columns[xi]);
    t.columns.push_back("series");
    t.columns.push_back("value");
    for (const auto& row : in.rows) {
        for (auto y : yi) {
            std::vector<std::string> r;
            for (auto i : gi) r.push_back(row[i]);
            r.push_back(row[xi]);
            r.push_back(in.columns[y]);
            r.push_back(row[y]);
            t.rows.push_back(std::move(r));
        }
    }
    return t;
}

}  // namespace isac::exp
