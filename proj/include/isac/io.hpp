#pragma once

#include <string>

#include <json.hpp>

#include "isac/constellation.hpp"

namespace isac {

/// {"points": [[re, im], ...], "probs": [...], "labels": [...], "meta": {...}}
nlohmann::json to_json(const Constellation& c);
Constellation constellation_from_json(const nlohmann::json& j);

void save_constellation(const Constellation& c, const std::string& path);
Constellation load_constellation(const std::string& path);

nlohmann::json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace isac
