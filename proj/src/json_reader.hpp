#pragma once

#include "feedersim/errors.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <cstdint>
#include <set>
#include <string>

namespace feedersim::detail {

using nlohmann::json;

// Strict view of one JSON object: every key must be consumed, or finish() fails.
class ObjectReader {
public:
  ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path))
  {
    if (!j_.is_object())
      throw ConfigError(where() + ": expected an object");
  }

  /// Reject keys outside `known` before any required-key check runs.
  void expect_keys(std::initializer_list<std::string_view> known) const
  {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (std::find(known.begin(), known.end(), it.key()) == known.end())
        throw ConfigError(child(it.key()) + ": unknown key");
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  const json& at(const std::string& key)
  {
    seen_.insert(key);
    if (!j_.contains(key))
      throw ConfigError(child(key) + ": required key missing");
    return j_.at(key);
  }

  const json* find(const std::string& key)
  {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  double number(const std::string& key, double fallback)
  {
    const json* v = find(key);
    return v ? as_number(*v, child(key)) : fallback;
  }

  std::uint64_t uint(const std::string& key, std::uint64_t fallback)
  {
    const json* v = find(key);
    return v ? as_uint(*v, child(key)) : fallback;
  }

  bool boolean(const std::string& key, bool fallback)
  {
    const json* v = find(key);
    if (!v)
      return fallback;
    if (!v->is_boolean())
      throw ConfigError(child(key) + ": expected true or false");
    return v->get<bool>();
  }

  std::string string(const std::string& key, const std::string& fallback)
  {
    const json* v = find(key);
    if (!v)
      return fallback;
    if (!v->is_string())
      throw ConfigError(child(key) + ": expected a string");
    return v->get<std::string>();
  }

  void finish() const
  {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key()))
        throw ConfigError(child(it.key()) + ": unknown key");
  }

  std::string child(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
  std::string where() const { return path_.empty() ? "<root>" : path_; }

  static double as_number(const json& v, const std::string& path)
  {
    if (!v.is_number())
      throw ConfigError(path + ": expected a number");
    double d = v.get<double>();
    if (!std::isfinite(d))
      throw ConfigError(path + ": must be finite");
    return d;
  }

  static std::string as_string(const json& v, const std::string& path)
  {
    if (!v.is_string())
      throw ConfigError(path + ": expected a string");
    return v.get<std::string>();
  }

  static std::uint64_t as_uint(const json& v, const std::string& path)
  {
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
      throw ConfigError(path + ": expected a non-negative integer");
    return v.get<std::uint64_t>();
  }

private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

} // namespace feedersim::detail
