#include "cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "isac/bounds.hpp"
#include "isac/constellation.hpp"
#include "isac/experiments.hpp"
#include "isac/io.hpp"
#include "isac/pas.hpp"
#include "isac/random.hpp"
#include "isac/shaping.hpp"

namespace isac::cli {

namespace fs = std::filesystem;
using nlohmann::json;

// ---- config file ----

namespace {

json scalar_to_json(const std::string& s) {
    if (s == "true") return true;
    if (s == "false") return false;
    try {
        auto v = json::parse(s);
        if (v.is_number()) return v;
    } catch (const json::parse_error&) {
    }
    return s;
}

std::vector<std::string> split_default_list(std::string s) {
    if (s.size() >= 2 && s.front() == '[' && s.back() == ']') s = s.substr(1, s.size() - 2);
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

bool skip_option(const CLI::Option* opt) {
    if (!opt->get_configurable() || opt->get_lnames().empty()) return true;
    const auto& n = opt->get_lnames().front();
    return n == "help" || n == "help-all" || n == "config" || n == "dump-config";
}

json options_json(const CLI::App* app, bool default_also) {
    json j = json::object();
    for (const CLI::Option* opt : app->get_options()) {
        if (skip_option(opt)) continue;
        const std::string name = opt->get_lnames().front();
        const bool list = opt->get_items_expected_max() > 1;
        if (opt->get_type_size() == 0) {
            if (opt->count() > 0 || default_also) j[name] = opt->count() > 0;
            continue;
        }
        std::vector<std::string> vals;
        if (opt->count() > 0)
            vals = opt->results();
        else if (default_also && !opt->get_default_str().empty())
            vals = list ? split_default_list(opt->get_default_str()) : std::vector<std::string>{opt->get_default_str()};
        else
            continue;
        if (list) {
            if (vals.empty()) continue;
            json arr = json::array();
            for (const auto& v : vals) arr.push_back(scalar_to_json(v));
            j[name] = arr;
        } else if (!vals.empty()) {
            j[name] = scalar_to_json(vals.back());
        }
    }
    for (const CLI::App* sub : app->get_subcommands()) j[sub->get_name()] = options_json(sub, default_also);
    return j;
}

void json_items(const json& j, std::vector<std::string> path, const std::string& selected, bool active,
                std::vector<CLI::ConfigItem>& out) {
    for (const auto& [key, val] : j.items()) {
        if (val.is_object()) {
            auto sub = path;
            sub.push_back(key);
            const bool act = active && (path.size() > 0 || selected.empty() || selected == key);
            if (act) out.push_back({sub, "++", {}});
            json_items(val, sub, selected, act, out);
            if (act) out.push_back({sub, "--", {}});
            continue;
        }
        CLI::ConfigItem item;
        item.parents = path;
        item.name = key;
        auto text = [&](const json& v) -> std::string {
            if (v.is_string()) return v.get<std::string>();
            if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
            if (v.is_number()) return v.dump();
            throw CLI::ConversionError("unsupported value for " + key);
        };
        if (val.is_array()) {
            for (const auto& v : val) item.inputs.push_back(text(v));
        } else {
            item.inputs.push_back(text(val));
        }
        out.push_back(std::move(item));
    }
}

}  // namespace

std::string JsonOrTomlConfig::to_config(const CLI::App* app, bool default_also, bool, std::string) const {
    return options_json(app, default_also).dump(2) + "\n";
}

std::vector<CLI::ConfigItem> JsonOrTomlConfig::from_config(std::istream& input) const {
    std::string text((std::istreambuf_iterator<char>(input)), std::istreambuf_iterator<char>());
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first == std::string::npos || text[first] != '{') {
        std::istringstream is(text);
        auto items = CLI::ConfigTOML().from_config(is);
        if (selected.empty()) return items;
        // drop section activation for subcommands other than the selected one
        std::vector<CLI::ConfigItem> kept;
        for (auto& it : items) {
            const bool marker = it.name == "++" || it.name == "--";
            if (marker && !it.parents.empty() && it.parents.front() != selected) continue;
            kept.push_back(std::move(it));
        }
        return kept;
    }
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw CLI::ConversionError(std::string("invalid JSON config: ") + e.what());
    }
    if (!j.is_object()) throw CLI::ConversionError("JSON config must be an object");
    std::vector<CLI::ConfigItem> out;
    json_items(j, {}, selected, true, out);
    return out;
}

// ---- subcommands ----

namespace {

struct Global {
    std::uint64_t seed = 0;
    std::string out_dir;
    std::size_t jobs = 0;
    std::string dump_config;
};

bool is_stdout(const std::string& p) { return p.empty() || p == "-" || p == "csv" || p == "json"; }

std::string resolve_out(const Global& g, const std::string& p) {
    if (is_stdout(p)) return "-";
    fs::path path(p);
    if (path.is_relative() && !g.out_dir.empty()) path = fs::path(g.out_dir) / path;
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    return path.string();
}

void emit(const Global& g, const std::string& p, const std::string& text, std::ostream& out) {
    const auto path = resolve_out(g, p);
    if (path == "-")
        out << text;
    else
        write_text_file(path, text);
}

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

air::Metric metric_from_string(const std::string& s) { return s == "mi" ? air::Metric::mi : air::Metric::gmi; }

const std::vector<std::string> kFamilies{"geometric", "probabilistic", "joint", "cpas", "gpas"};

struct BoundsOpts {
    double snr_db = 10.0;
    std::vector<double> kappas;
    double es = 1.0;
    std::string out = "-";
};

struct GenOpts {
    std::string kind = "qam";
    int bits = 6;
    int amp_bits = 2;
    int phase_bits = 4;
    std::vector<double> radii;
    std::vector<double> ring_probs;
    std::string out = "-";
};

struct OptimizeOpts {
    std::string family;
    double kappa = 2.0;
    double snr_db = 10.0;
    std::string metric = "gmi";
    int epochs = 400;
    int bits = 6;
    int amp_bits = 2;
    int train_order = 24;
    double lr = 0.0;
    std::string out = "constellation.json";
    std::string trace;
};

struct AirOpts {
    std::vector<std::string> constellations;
    std::vector<double> snr_db;
    std::string metric = "both";
    std::string method = "quad";
    std::size_t samples = 100000;
    int order = 32;
    std::string out = "-";
};

struct SenseOpts {
    std::string constellation;
    std::string scenario;
    std::size_t trials = 20000;
    std::string out = "-";
};

struct PasOpts {
    std::string frame;
    std::string constellation;
    std::string info;
    std::string wire;
    std::string symbols;
    std::string reference;
    double snr_db = 10.0;
    std::vector<double> snr_list;
    std::size_t table_size = 256;
    double g = 2.0;
    std::string out = "-";
};

struct SweepOpts {
    std::vector<std::string> families = kFamilies;
    std::vector<double> kappas{1.0, 1.2, 1.6, 2.0};
    std::vector<std::uint64_t> seeds;
    double snr_db = 10.0;
    std::string metric = "gmi";
    int epochs = 400;
    int bits = 6;
    int train_order = 24;
    std::string constellation_dir = "constellations";
    std::string out = "sweep.csv";
};

struct PlotOpts {
    std::string in;
    std::string x;
    std::vector<std::string> ys;
    std::vector<std::string> group;
    std::string out = "-";
};

int run_bounds(const Global& g, const BoundsOpts& o, std::ostream& out) {
    emit(g, o.out, exp::bounds_table(o.snr_db, o.kappas, o.es).to_string(), out);
    return 0;
}

int run_gen(const Global& g, const GenOpts& o, std::ostream& out) {
    Constellation c;
    if (o.kind == "qam") {
        c = make_qam(o.bits);
    } else if (o.kind == "psk") {
        c = make_psk(o.bits);
    } else {
        std::vector<double> radii = o.radii;
        if (radii.empty())
            for (int i = 1; i <= (1 << o.amp_bits); ++i) radii.push_back(i);
        c = make_gpas_grid(o.amp_bits, o.phase_bits, radii, o.ring_probs);
    }
    c.meta().family = o.kind;
    emit(g, o.out, to_json(c).dump(2) + "\n", out);
    return 0;
}

int run_optimize(const Global& g, const OptimizeOpts& o, std::ostream& out, std::ostream& err) {
    const auto fam = shaping::family_from_string(o.family);
    shaping::InitOptions init;
    init.bits = o.bits;
    init.amp_bits = o.amp_bits;
    init.seed = g.seed;
    shaping::OptConfig cfg;
    cfg.kappa_tilde = o.kappa;
    cfg.snr_db = o.snr_db;
    cfg.metric = metric_from_string(o.metric);
    cfg.epochs = o.epochs;
    cfg.train_order = o.train_order;
    cfg.seed = g.seed;
    if (o.lr > 0.0) cfg.lr = o.lr;
    const auto res = shaping::optimize(shaping::initial_params(fam, init), cfg);
    emit(g, o.out, to_json(res.constellation).dump(2) + "\n", out);
    if (!o.trace.empty()) {
        exp::CsvTable t;
        t.columns = {"epoch",      "loss[-]",        "metric_bits[bit/symbol]", "kurtosis[-]",
                     "violated[bool]", "best_loss[-]", "penalty_d[-]",            "lr[-]"};
        for (const auto& e : res.trace)
            t.rows.push_back({std::to_string(e.epoch), exp::fmt(e.loss), exp::fmt(e.metric_bits),
                              exp::fmt(e.kurtosis), e.violated ? "1" : "0", exp::fmt(e.best_loss), exp::fmt(e.d),
                              exp::fmt(e.lr)});
        emit(g, o.trace, t.to_string(), out);
    }
    err << o.family << " kappa_tilde=" << o.kappa << " kappa=" << res.kurtosis << " " << o.metric << "="
        << res.metric_bits << "\n";
    return 0;
}

int run_air(const Global& g, const AirOpts& o, std::ostream& out) {
    exp::AirCurveConfig cfg;
    for (const auto& p : o.constellations) cfg.constellations.push_back({fs::path(p).stem().string(), load_constellation(p)});
    cfg.snr_db = o.snr_db;
    cfg.mi = o.metric != "gmi";
    cfg.gmi = o.metric != "mi";
    cfg.jobs = g.jobs;
    if (o.method == "mc")
        cfg.method = air::MonteCarlo{o.samples, g.seed};
    else
        cfg.method = air::Quadrature{o.order, true};
    emit(g, o.out, exp::air_table(exp::run_air_curve(cfg), cfg).to_string(), out);
    return 0;
}

int run_sense(const Global& g, const SenseOpts& o, std::ostream& out) {
    const auto c = load_constellation(o.constellation);
    const auto sj = read_json_file(o.scenario);
    auto cfg = exp::sense_config_from_json(sj);
    if (!sj.contains("seed")) cfg.ofdm.seed = g.seed;
    const auto rows = exp::run_sense(c, cfg, o.trials, g.jobs);
    emit(g, o.out, exp::sense_table(rows, cfg.radar.has_value()).to_string(), out);
    return 0;
}

pas::Bits parse_bits(const std::string& text) {
    pas::Bits b;
    for (char ch : text) {
        if (ch == '0' || ch == '1')
            b.push_back(static_cast<std::uint8_t>(ch - '0'));
        else if (!std::isspace(static_cast<unsigned char>(ch)))
            throw std::invalid_argument("bit files hold only 0, 1 and whitespace");
    }
    return b;
}

std::string bits_text(const pas::Bits& b) {
    std::string s;
    for (auto v : b) s += static_cast<char>('0' + v);
    return s + "\n";
}

int run_pas_encode(const Global& g, const PasOpts& o, std::ostream& out, std::ostream& err) {
    const auto cfg = exp::pas_config_from_json(read_json_file(o.frame));
    const auto c = load_constellation(o.constellation);
    pas::Bits info;
    if (!o.info.empty()) {
        info = parse_bits(read_text(o.info));
    } else {
        Rng rng(derive_seed(g.seed, 0xb175));
        std::bernoulli_distribution coin(0.5);
        info.resize(cfg.info_bits());
        for (auto& b : info) b = coin(rng) ? 1 : 0;
    }
    const auto frame = pas::pas_encode(cfg, info, c);
    const auto bytes = pas::write_frame(cfg, info);
    const auto wire = resolve_out(g, o.wire);
    if (wire == "-") throw std::invalid_argument("--wire needs a file path");
    {
        std::ofstream f(wire, std::ios::binary);
        if (!f) throw std::runtime_error("cannot write " + wire);
        f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    }
    exp::CsvTable t;
    t.columns = {"index", "label", "re[-]", "im[-]"};
    for (std::size_t i = 0; i < frame.symbols.size(); ++i)
        t.rows.push_back({std::to_string(i), std::to_string(frame.labels[i]), exp::fmt(frame.symbols[i].real()),
                          exp::fmt(frame.symbols[i].imag())});
    emit(g, o.out, t.to_string(), out);
    err << "frame: " << cfg.info_bits() << " info bits, " << frame.symbols.size() << " symbols, FEC rate "
        << cfg.fec_rate() << "\n";
    return 0;
}

int run_pas_decode(const Global& g, const PasOpts& o, std::ostream& out, std::ostream& err) {
    const auto cfg = exp::pas_config_from_json(read_json_file(o.frame));
    const auto c = load_constellation(o.constellation);
    const auto t = exp::CsvTable::parse(read_text(o.symbols));
    const auto re = t.column("re"), im = t.column("im");
    std::vector<cplx> sym;
    for (const auto& r : t.rows) sym.emplace_back(std::stod(r[re]), std::stod(r[im]));
    const auto info = pas::pas_decode(cfg, sym, c);
    emit(g, o.out, bits_text(info), out);
    if (!o.reference.empty()) {
        const auto text = read_text(o.reference);
        const std::vector<std::uint8_t> bytes(text.begin(), text.end());
        const auto [rcfg, ref] = pas::read_frame(bytes, cfg.bypass, cfg.code_seed);
        std::size_t errors = ref.size() == info.size() ? 0 : std::max(ref.size(), info.size());
        if (ref.size() == info.size())
            for (std::size_t i = 0; i < ref.size(); ++i) errors += ref[i] != info[i];
        err << "bit errors against reference frame: " << errors << "\n";
        return errors == 0 ? 0 : 2;
    }
    return 0;
}

int run_pas_luts(const Global& g, const PasOpts& o, std::ostream& out) {
    const auto c = normalize(load_constellation(o.constellation));
    const auto ch = air::AwgnChannel::from_snr_db(o.snr_db);
    const auto luts = pas::build_llr_luts(c, ch.sigma_c2, o.table_size, o.g);
    emit(g, o.out, exp::to_json(luts).dump(2) + "\n", out);
    return 0;
}

int run_pas_gmi(const Global& g, const PasOpts& o, std::ostream& out) {
    const auto c = load_constellation(o.constellation);
    const auto pts = exp::run_lut_gmi(c, o.snr_list, o.table_size, o.g, g.jobs);
    emit(g, o.out, exp::lut_gmi_table(pts).to_string(), out);
    return 0;
}

int run_sweep(const Global& g, const SweepOpts& o, std::ostream& out) {
    exp::SweepConfig cfg;
    cfg.families.clear();
    for (const auto& f : o.families) cfg.families.push_back(shaping::family_from_string(f));
    cfg.kappas = o.kappas;
    cfg.seeds = o.seeds.empty() ? std::vector<std::uint64_t>{g.seed} : o.seeds;
    cfg.snr_db = o.snr_db;
    cfg.metric = metric_from_string(o.metric);
    cfg.bits = o.bits;
    cfg.epochs = o.epochs;
    cfg.train_order = o.train_order;
    cfg.jobs = g.jobs;
    if (!o.constellation_dir.empty()) {
        fs::path d(o.constellation_dir);
        if (d.is_relative() && !g.out_dir.empty()) d = fs::path(g.out_dir) / d;
        cfg.constellation_dir = d.string();
    }
    emit(g, o.out, exp::sweep_table(exp::run_tradeoff_sweep(cfg)).to_string(), out);
    return 0;
}

int run_plot(const Global& g, const PlotOpts& o, std::ostream& out) {
    const auto t = exp::CsvTable::parse(read_text(o.in));
    emit(g, o.out, exp::reshape_long(t, o.x, o.ys, o.group).to_string(), out);
    return 0;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"OFDM ISAC constellation shaping toolkit", "isac"};
    app.set_version_flag("--version", std::string(ISAC_VERSION));
    app.option_defaults()->always_capture_default();
    app.require_subcommand(1);
    app.fallthrough();
    auto fmt = std::make_shared<JsonOrTomlConfig>();
    app.config_formatter(fmt);
    app.set_config("--config", "", "JSON or TOML configuration file");
    app.allow_config_extras(CLI::config_extras_mode::error);

    Global g;
    app.add_option("--seed", g.seed, "Global seed");
    app.add_option("--out-dir", g.out_dir, "Directory for relative output paths")->envname("ISAC_OUT_DIR");
    app.add_option("--jobs", g.jobs, "Parallel workers (0: all cores)");
    app.add_option("--dump-config", g.dump_config, "Write the effective configuration as JSON and exit")
        ->configurable(false);

    BoundsOpts bo;
    auto* bounds = app.add_subcommand("bounds", "Max-entropy MI bounds versus kurtosis");
    bounds->add_option("--snr-db", bo.snr_db, "SNR in dB");
    bounds->add_option("--kappa", bo.kappas, "Kurtosis targets")->required()->delimiter(',');
    bounds->add_option("--es", bo.es, "Symbol energy");
    bounds->add_option("--out", bo.out, "Output CSV path ('-' or 'csv': stdout)");

    GenOpts go;
    auto* gen = app.add_subcommand("gen", "Generate a reference constellation");
    gen->add_option("--kind", go.kind)->check(CLI::IsMember({"qam", "psk", "gpas"}));
    gen->add_option("--bits", go.bits, "Bits per symbol (qam, psk)");
    gen->add_option("--amp-bits", go.amp_bits, "Amplitude bits (gpas)");
    gen->add_option("--phase-bits", go.phase_bits, "Phase bits (gpas)");
    gen->add_option("--radii", go.radii, "Ring radii (gpas)")->delimiter(',');
    gen->add_option("--ring-probs", go.ring_probs, "Ring probabilities (gpas)")->delimiter(',');
    gen->add_option("--out", go.out, "Output JSON path");

    OptimizeOpts oo;
    auto* opt = app.add_subcommand("optimize", "Optimize a constellation under a kurtosis limit");
    opt->add_option("--family", oo.family)->required()->check(CLI::IsMember(kFamilies));
    opt->add_option("--kappa", oo.kappa, "Kurtosis limit in [1, 2]");
    opt->add_option("--snr-db", oo.snr_db, "Training SNR in dB");
    opt->add_option("--metric", oo.metric)->check(CLI::IsMember({"mi", "gmi"}));
    opt->add_option("--epochs", oo.epochs);
    opt->add_option("--bits", oo.bits, "Bits per symbol");
    opt->add_option("--amp-bits", oo.amp_bits, "Amplitude bits (gpas)");
    opt->add_option("--train-order", oo.train_order, "Quadrature order during training");
    opt->add_option("--lr", oo.lr, "Learning rate (0: family default)");
    opt->add_option("--out", oo.out, "Constellation JSON path");
    opt->add_option("--trace", oo.trace, "Training trace CSV path");

    AirOpts ao;
    auto* airc = app.add_subcommand("air", "MI and GMI versus SNR");
    airc->add_option("--constellation", ao.constellations, "Constellation JSON files")->required()->delimiter(',');
    airc->add_option("--snr-db", ao.snr_db, "SNR points in dB")->required()->delimiter(',');
    airc->add_option("--metric", ao.metric)->check(CLI::IsMember({"mi", "gmi", "both"}));
    airc->add_option("--method", ao.method)->check(CLI::IsMember({"quad", "mc"}));
    airc->add_option("--samples", ao.samples, "Monte Carlo samples");
    airc->add_option("--order", ao.order, "Initial quadrature order");
    airc->add_option("--out", ao.out, "Output CSV path");

    SenseOpts so;
    auto* sense = app.add_subcommand("sense", "Monte Carlo detection probability");
    sense->add_option("--constellation", so.constellation)->required();
    sense->add_option("--scenario", so.scenario, "Scenario JSON")->required();
    sense->add_option("--trials", so.trials);
    sense->add_option("--out", so.out, "Output CSV path");

    PasOpts po;
    auto* pasc = app.add_subcommand("pas", "Probabilistic amplitude shaping frames and LUT demapping");
    pasc->require_subcommand(1);
    auto* enc = pasc->add_subcommand("encode", "Encode information bits into a frame");
    enc->add_option("--frame", po.frame, "Frame config JSON")->required();
    enc->add_option("--constellation", po.constellation)->required();
    enc->add_option("--info", po.info, "Information bits file (default: random from the seed)");
    enc->add_option("--wire", po.wire, "Binary frame output path")->required();
    enc->add_option("--out", po.out, "Symbol CSV path");
    auto* dec = pasc->add_subcommand("decode", "Recover information bits from symbols");
    dec->add_option("--frame", po.frame, "Frame config JSON")->required();
    dec->add_option("--constellation", po.constellation)->required();
    dec->add_option("--symbols", po.symbols, "Symbol CSV")->required();
    dec->add_option("--reference", po.reference, "Binary frame to compare against");
    dec->add_option("--out", po.out, "Bits output path");
    auto* luts = pasc->add_subcommand("build-luts", "Build the seven LLR tables");
    luts->add_option("--constellation", po.constellation)->required();
    luts->add_option("--snr-db", po.snr_db);
    luts->add_option("--table-size", po.table_size);
    luts->add_option("--g", po.g, "Averaging width in bins");
    luts->add_option("--out", po.out, "LUT JSON path");
    auto* egmi = pasc->add_subcommand("eval-gmi", "GMI of the LUT demapper against exact LLRs");
    egmi->add_option("--constellation", po.constellation)->required();
    egmi->add_option("--snr-db", po.snr_list)->required()->delimiter(',');
    egmi->add_option("--table-size", po.table_size);
    egmi->add_option("--g", po.g, "Averaging width in bins");
    egmi->add_option("--out", po.out, "Output CSV path");

    SweepOpts wo;
    auto* sweep = app.add_subcommand("sweep", "Kurtosis versus AIR trade-off sweep");
    sweep->add_option("--families", wo.families)->delimiter(',')->check(CLI::IsMember(kFamilies));
    sweep->add_option("--kappa", wo.kappas, "Kurtosis limits")->delimiter(',');
    sweep->add_option("--seeds", wo.seeds, "Seeds (default: the global seed)")->delimiter(',');
    sweep->add_option("--snr-db", wo.snr_db);
    sweep->add_option("--metric", wo.metric)->check(CLI::IsMember({"mi", "gmi"}));
    sweep->add_option("--epochs", wo.epochs);
    sweep->add_option("--bits", wo.bits);
    sweep->add_option("--train-order", wo.train_order);
    sweep->add_option("--constellation-dir", wo.constellation_dir, "Directory for optimized constellations");
    sweep->add_option("--out", wo.out, "Output CSV path");

    PlotOpts lo;
    auto* plot = app.add_subcommand("plot-data", "Reshape a CSV to long format for plotting");
    plot->add_option("--in", lo.in, "Input CSV")->required();
    plot->add_option("--x", lo.x, "x column")->required();
    plot->add_option("--y", lo.ys, "y columns")->required()->delimiter(',');
    plot->add_option("--group", lo.group, "Grouping columns")->delimiter(',');
    plot->add_option("--out", lo.out, "Output CSV path");

    for (auto* s : app.get_subcommands({})) {
        s->configurable();
        for (auto* ss : s->get_subcommands({})) ss->configurable();
    }

    for (int i = 1; i < argc; ++i) {
        if (app.get_subcommand_no_throw(argv[i]) != nullptr) {
            fmt->selected = argv[i];
            break;
        }
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err);
    }

    auto unique = [](std::vector<CLI::App*> v) {
        std::vector<CLI::App*> out;
        for (auto* a : v)
            if (std::find(out.begin(), out.end(), a) == out.end()) out.push_back(a);
        return out;
    };
    try {
        const auto subs = unique(app.get_subcommands());
        if (subs.size() != 1) throw std::invalid_argument("exactly one subcommand must be selected");
        if (!g.dump_config.empty()) {
            emit(g, g.dump_config, app.config_to_str(true, false), out);
            return 0;
        }
        const CLI::App* s = subs.front();
        if (s == bounds) return run_bounds(g, bo, out);
        if (s == gen) return run_gen(g, go, out);
        if (s == opt) return run_optimize(g, oo, out, err);
        if (s == airc) return run_air(g, ao, out);
        if (s == sense) return run_sense(g, so, out);
        if (s == sweep) return run_sweep(g, wo, out);
        if (s == plot) return run_plot(g, lo, out);
        if (s == pasc) {
            const auto ps = unique(pasc->get_subcommands());
            if (ps.size() != 1) throw std::invalid_argument("exactly one pas subcommand must be selected");
            if (ps.front() == enc) return run_pas_encode(g, po, out, err);
            if (ps.front() == dec) return run_pas_decode(g, po, out, err);
            if (ps.front() == luts) return run_pas_luts(g, po, out);
            if (ps.front() == egmi) return run_pas_gmi(g, po, out);
        }
        throw std::logic_error("unhandled subcommand");
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace isac::cli
