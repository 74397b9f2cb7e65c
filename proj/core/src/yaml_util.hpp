#pragma once

#include <yaml-cpp/yaml.h>

#include <fmt/format.h>

#include <string>
#include <vector>

#include "asv/common.hpp"

namespace asv::detail {

inline std::string where(const std::string& source, const YAML::Node& node) {
  const auto m = node.Mark();
  if (m.line < 0) return source;
  return fmt::format("{}:{}", source, m.line + 1);
}

inline YAML::Node parse_yaml(const std::string& document, const std::string& source) {
  try {
    return YAML::Load(document);
  } catch (const YAML::Exception& e) {
    throw ParseError(fmt::format("{}:{}: {}", source, e.mark.line + 1, e.msg));
  }
}

inline YAML::Node require(const YAML::Node& parent, const std::string& key,
                          const std::string& source) {
  if (!parent.IsMap()) {
    throw ParseError(fmt::format("{}: expected a mapping containing '{}'", where(source, parent), key));
  }
  YAML::Node n = parent[key];
  if (!n) throw ParseError(fmt::format("{}: missing field '{}'", where(source, parent), key));
  return n;
}

template <typename T>
T as(const YAML::Node& node, const std::string& field, const std::string& source) {
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    throw ParseError(fmt::format("{}: field '{}' has the wrong type", where(source, node), field));
  }
}

template <typename T>
T get(const YAML::Node& parent, const std::string& key, const std::string& source) {
  return as<T>(require(parent, key, source), key, source);
}

template <typename T>
T get_or(const YAML::Node& parent, const std::string& key, T fallback, const std::string& source) {
  if (!parent.IsMap() || !parent[key]) return fallback;
  return as<T>(parent[key], key, source);
}

inline std::vector<double> numbers(const YAML::Node& node, std::size_t n, const std::string& field,
                                   const std::string& source) {
  auto v = as<std::vector<double>>(node, field, source);
  if (n != 0 && v.size() != n) {
    throw ParseError(fmt::format("{}: field '{}' needs {} numbers, got {}", where(source, node), field,
                                 n, v.size()));
  }
  return v;
}

}  // namespace asv::detail
