#include "isac/io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace isac {

using nlohmann::json;

json to_json(const Constellation& c) {
    json pts = json::array();
    for (const auto& x : c.points()) pts.push_back({x.real(), x.imag()});
    json meta = json::object();
    meta["family"] = c.meta().family;
    meta["kappa_tilde"] = c.meta().kappa_tilde ? json(*c.meta().kappa_tilde) : json(nullptr);
    meta["snr_db"] = c.meta().snr_db ? json(*c.meta().snr_db) : json(nullptr);
    return json{{"points", pts}, {"probs", c.probs()}, {"labels", c.labels()}, {"meta", meta}};
}

Constellation constellation_from_json(const json& j) {
    for (const auto& [key, _] : j.items())
        if (key != "points" && key != "probs" && key != "labels" && key != "meta")
            throw std::invalid_argument("unknown constellation key: " + key);
    std::vector<cplx> pts;
    for (const auto& p : j.at("points")) {
        if (!p.is_array() || p.size() != 2)
            throw std::invalid_argument("points must be [re, im] pairs");
        pts.emplace_back(p[0].get<double>(), p[1].get<double>());
    }
    auto probs = j.at("probs").get<std::vector<double>>();
    auto labels = j.at("labels").get<std::vector<std::uint32_t>>();
    ConstellationMeta meta;
    if (j.contains("meta")) {
        const auto& m = j.at("meta");
        if (m.contains("family") && m["family"].is_string()) meta.family = m["family"];
        if (m.contains("kappa_tilde") && m["kappa_tilde"].is_number())
            meta.kappa_tilde = m["kappa_tilde"].get<double>();
        if (m.contains("snr_db") && m["snr_db"].is_number()) meta.snr_db = m["snr_db"].get<double>();
    }
    return Constellation(std::move(pts), std::move(probs), std::move(labels), std::move(meta));
}

void save_constellation(const Constellation& c, const std::string& path) {
    write_text_file(path, to_json(c).dump(2) + "\n");
}

Constellation load_constellation(const std::string& path) {
    return constellation_from_json(read_json_file(path));
}

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
    if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace isac
