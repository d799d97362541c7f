#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "hrafl/scenario.hpp"

namespace hrafl {

// JSON scenario documents.
//
// Every key is validated: unknown keys, type mismatches and constraint
// violations raise ConfigError naming the dotted key. Overrides are
// "dotted.key=value" strings applied after the file is read; the value is
// parsed as a JSON literal when possible and as a plain string otherwise.
//
// A run manifest (see results_io.hpp) is accepted in place of a scenario
// document; its embedded "config" object is used.
ScenarioConfig parse_config(const std::filesystem::path& path,
                            const std::vector<std::string>& overrides = {});
ScenarioConfig parse_config_text(const std::string& text,
                                 const std::vector<std::string>& overrides = {});

// Fully resolved scenario document, every default written out.
std::string config_to_json(const ScenarioConfig& cfg, int indent = 2);

}  // namespace hrafl
