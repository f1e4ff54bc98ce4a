#include "rotmul/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "rotmul/errors.hpp"

namespace rotmul {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool names_flag(const std::string& arg, const std::string& key) {
  const std::string flag = "--" + key;
  return arg == flag || arg.rfind(flag + "=", 0) == 0;
}

}  // namespace

FlatConfig parse_flat_config(const std::string& text) {
  FlatConfig out;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line.front() == '#' || line.front() == ';') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw InputError("config line " + std::to_string(lineno) + ": expected key=value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw InputError("config line " + std::to_string(lineno) + ": empty key");
    std::replace(key.begin(), key.end(), '_', '-');
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
    out.emplace_back(std::move(key), std::move(value));
  }
  return out;
}

FlatConfig load_flat_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_flat_config(buf.str());
}

std::vector<std::string> merge_config_args(const std::vector<std::string>& args, const FlatConfig& config,
                                           const std::vector<std::string>& switches) {
  if (args.size() < 2) return args;
  std::vector<std::string> merged(args.begin(), args.begin() + 2);
  for (const auto& [key, value] : config) {
    if (key == "config") continue;
    const bool given =
        std::any_of(args.begin() + 2, args.end(), [&](const std::string& a) { return names_flag(a, key); });
    if (given) continue;
    if (std::find(switches.begin(), switches.end(), key) != switches.end()) {
      if (value == "true" || value == "1" || value == "yes" || value == "on") {
        merged.push_back("--" + key);
      } else if (value != "false" && value != "0" && value != "no" && value != "off") {
        throw InputError("config key " + key + " expects a boolean");
      }
      continue;
    }
    merged.push_back("--" + key + "=" + value);
  }
  merged.insert(merged.end(), args.begin() + 2, args.end());
  return merged;
}

}  // namespace rotmul
