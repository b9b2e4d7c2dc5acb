#include <charconv>
#include <fstream>
#include <sstream>

#include "cli_internal.hpp"
#include "stein_gauge/errors.hpp"

namespace stein_gauge::cli {
namespace {

std::string scalar_text(const std::string& key, const Json& value) {
  if (value.is_string()) return value.get<std::string>();
  if (value.is_boolean()) return value.get<bool>() ? "true" : "false";
  if (value.is_number()) return value.dump();
  if (value.is_array()) {
    std::string joined;
    for (const auto& item : value) {
      if (!item.is_number() && !item.is_string())
        throw InputError("config: array '" + key + "' may only hold numbers or strings");
      if (!joined.empty()) joined += ',';
      joined += item.is_string() ? item.get<std::string>() : item.dump();
    }
    return joined;
  }
  throw InputError("config: unsupported value for '" + key + "'");
}

}  // namespace

std::vector<std::string> expand_config(const std::vector<std::string>& args) {
  std::vector<std::string> rest;
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw InputError("--config needs a file");
      path = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
    } else {
      rest.push_back(args[i]);
    }
  }
  if (path.empty()) return rest;

  std::ifstream in(path);
  if (!in) throw InputError("config: cannot open '" + path + "'");
  Json file;
  try {
    file = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw InputError("config: " + path + ": " + e.what());
  }
  if (!file.is_object()) throw InputError("config: top level must be an object");

  std::vector<std::string> out;
  std::size_t first_flag = 0;
  if (!rest.empty() && rest.front().rfind("-", 0) != 0) {
    out.push_back(rest.front());
    first_flag = 1;
  } else if (file.contains("command")) {
    if (!file["command"].is_string()) throw InputError("config: 'command' must be a string");
    out.push_back(file["command"].get<std::string>());
  }
  for (const auto& [key, value] : file.items()) {
    if (key == "command" || value.is_null()) continue;
    out.push_back("--" + key + "=" + scalar_text(key, value));
  }
  out.insert(out.end(), rest.begin() + static_cast<std::ptrdiff_t>(first_flag), rest.end());
  return out;
}

std::vector<double> parse_doubles(const std::string& text, const char* what) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    const auto b = cell.find_first_not_of(" \t");
    const auto e = cell.find_last_not_of(" \t");
    const std::string t = b == std::string::npos ? std::string() : cell.substr(b, e - b + 1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || ec != std::errc() || ptr != t.data() + t.size())
      throw InputError(std::string(what) + ": not a number list: '" + text + "'");
    values.push_back(v);
  }
  if (values.empty()) throw InputError(std::string(what) + ": empty list");
  return values;
}

Vector parse_vector(const std::string& text, const char* what) {
  const auto values = parse_doubles(text, what);
  return Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
}

}  // namespace stein_gauge::cli
