#pragma once

#include <filesystem>
#include <string>

#include "drf/forest.hpp"
#include "json.hpp"

namespace drf {

inline constexpr int kModelFormatVersion = 1;

// Self-describing model document: format_version, variant, config, label
// mapping, feature names and the flat node array of every tree.
nlohmann::json model_to_json(const Forest& forest);
// Throws ModelError on a malformed or incompatible document.
Forest model_from_json(const nlohmann::json& doc);

std::string serialize_model(const Forest& forest);
Forest deserialize_model(const std::string& text);

void save_model(const std::filesystem::path& path, const Forest& forest);
Forest load_model(const std::filesystem::path& path);

std::string_view routing_name(Routing r);
Routing parse_routing(std::string_view name);
std::string_view fallback_name(FallbackScope f);
FallbackScope parse_fallback(std::string_view name);

}  // namespace drf
