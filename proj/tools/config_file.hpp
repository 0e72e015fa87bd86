#pragma once

#include <map>
#include <string>

namespace eqsat::cli {

/// Flat key -> raw-string view of a config file. Section headers are folded
/// into dotted keys ("[evaluator]" + "command" -> "evaluator.command").
using ConfigValues = std::map<std::string, std::string>;

/// Reads a minimal TOML subset: [sections], key = value with string, number
/// or boolean values, and # comments. Files ending in .json are parsed as a
/// flat JSON object (nested one level for the evaluator block).
ConfigValues load_config_file(const std::string& path);

} // namespace eqsat::cli
