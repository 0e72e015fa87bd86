#include "config_file.hpp"

#include <nlohmann/json.hpp>

#include "eqsat/errors.hpp"
#include "eqsat/pipeline.hpp"

namespace eqsat::cli {
namespace {

std::string trim(std::string_view s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  std::size_t e = s.find_last_not_of(" \t\r");
  if (b == std::string_view::npos)
    return {};
  return std::string(s.substr(b, e - b + 1));
}

std::string strip_quotes(const std::string& v) {
  if (v.size() >= 2 &&
      ((v.front() == '"' && v.back() == '"') || (v.front() == '\'' && v.back() == '\'')))
    return v.substr(1, v.size() - 2);
  return v;
}

ConfigValues parse_toml_subset(const std::string& text, const std::string& path) {
  ConfigValues values;
  std::string section;
  std::size_t pos = 0;
  int line_no = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    std::string line = trim(std::string_view(text).substr(
        pos, eol == std::string::npos ? std::string::npos : eol - pos));
    ++line_no;
    pos = eol == std::string::npos ? text.size() + 1 : eol + 1;

    if (std::size_t hash = line.find('#'); hash != std::string::npos) {
      // keep # inside quoted strings
      bool quoted = false;
      for (std::size_t i = 0; i < hash; ++i)
        if (line[i] == '"')
          quoted = !quoted;
      if (!quoted)
        line = trim(line.substr(0, hash));
    }
    if (line.empty())
      continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw Error(path + ":" + std::to_string(line_no) + ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw Error(path + ":" + std::to_string(line_no) + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string value = strip_quotes(trim(line.substr(eq + 1)));
    if (key.empty())
      throw Error(path + ":" + std::to_string(line_no) + ": empty key");
    values[section.empty() ? key : section + "." + key] = value;
  }
  return values;
}

ConfigValues parse_json_config(const std::string& text, const std::string& path) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(path + ": " + e.what());
  }
  if (!doc.is_object())
    throw Error(path + ": config must be a JSON object");
  ConfigValues values;
  auto flatten = [&](const std::string& prefix, const nlohmann::json& obj,
                     auto&& self) -> void {
    for (const auto& [key, v] : obj.items()) {
      std::string full = prefix.empty() ? key : prefix + "." + key;
      if (v.is_object()) {
        self(full, v, self);
      } else if (v.is_string()) {
        std::string text = v;
        values[full] = text;
      } else {
        values[full] = v.dump();
      }
    }
  };
  flatten("", doc, flatten);
  return values;
}

} // namespace

ConfigValues load_config_file(const std::string& path) {
  std::string text = read_file(path);
  if (path.size() >= 5 && path.substr(path.size() - 5) == ".json")
    return parse_json_config(text, path);
  return parse_toml_subset(text, path);
}

} // namespace eqsat::cli
