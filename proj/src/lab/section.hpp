#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "blowup/lab.hpp"

namespace blowup::lab {

/// Typed reader over one JSON object of the config. Every accessor takes the
/// default used when the key is absent; finish() rejects keys nobody asked for.
class Section {
 public:
  Section(const nlohmann::json* j, std::string path);

  bool has(const char* key) const;
  double real(const char* key, double fallback);
  double positive(const char* key, double fallback);
  int integer(const char* key, int fallback, int lo, int hi);
  std::string text(const char* key, const std::string& fallback);
  std::vector<double> reals(const char* key, const std::vector<double>& fallback);
  std::vector<std::vector<double>> points(const char* key, const std::vector<std::vector<double>>& fallback);
  std::optional<std::uint64_t> seed(const char* key);
  /// Raw value (absent -> nullptr); marks the key as used.
  const nlohmann::json* raw(const char* key);

  std::string where(const char* key) const;
  [[noreturn]] void fail(const char* key, const std::string& message) const;
  void finish() const;

 private:
  const nlohmann::json* get(const char* key);

  const nlohmann::json* j_;
  std::string path_;
  std::set<std::string> used_;
};

}  // namespace blowup::lab
