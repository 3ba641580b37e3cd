#pragma once

#include <cstddef>
#include <map>
#include <string>

#include "pilinv/errors.hpp"

namespace pilinv {

/// `name:key=value,key=value` strings used on the command line.
struct KeyValueSpec {
  std::string name;
  std::map<std::string, std::string> args;

  bool has(const std::string& key) const { return args.count(key) != 0; }

  double number(const std::string& key) const {
    auto it = args.find(key);
    if (it == args.end()) throw ParameterError("missing '" + key + "' in '" + name + "' spec");
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(it->second, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != it->second.size()) throw ParameterError("bad number for '" + key + "': " + it->second);
    return v;
  }

  double number_or(const std::string& key, double fallback) const { return has(key) ? number(key) : fallback; }
};

inline KeyValueSpec parse_key_values(const std::string& text) {
  KeyValueSpec out;
  auto colon = text.find(':');
  out.name = text.substr(0, colon);
  if (out.name.empty()) throw ParameterError("empty spec string");
  if (colon == std::string::npos) return out;
  std::string rest = text.substr(colon + 1);
  std::size_t pos = 0;
  while (pos <= rest.size()) {
    auto comma = rest.find(',', pos);
    std::string item = rest.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    if (!item.empty()) {
      auto eq = item.find('=');
      if (eq == std::string::npos || eq == 0) throw ParameterError("expected key=value in '" + text + "'");
      out.args[item.substr(0, eq)] = item.substr(eq + 1);
    }
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

}  // namespace pilinv
