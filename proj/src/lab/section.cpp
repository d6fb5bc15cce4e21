#include "section.hpp"

#include <cmath>
#include <limits>

namespace blowup::lab {

Section::Section(const nlohmann::json* j, std::string path) : j_(j), path_(std::move(path)) {
  if (j_ != nullptr && !j_->is_object()) throw ConfigError(path_ + ": expected an object");
}

std::string Section::where(const char* key) const { return path_.empty() ? key : path_ + "." + key; }

void Section::fail(const char* key, const std::string& message) const {
  throw ConfigError("field " + where(key) + ": " + message);
}

bool Section::has(const char* key) const { return j_ != nullptr && j_->contains(key); }

const nlohmann::json* Section::get(const char* key) {
  used_.insert(key);
  if (!has(key)) return nullptr;
  return &(*j_)[key];
}

const nlohmann::json* Section::raw(const char* key) { return get(key); }

double Section::real(const char* key, double fallback) {
  const auto* v = get(key);
  if (v == nullptr) return fallback;
  if (!v->is_number()) fail(key, "expected a number");
  const double x = v->get<double>();
  if (!std::isfinite(x)) fail(key, "expected a finite number");
  return x;
}

double Section::positive(const char* key, double fallback) {
  const double x = real(key, fallback);
  if (!(x > 0.0)) fail(key, "expected a positive number");
  return x;
}

int Section::integer(const char* key, int fallback, int lo, int hi) {
  const auto* v = get(key);
  if (v == nullptr) return fallback;
  if (!v->is_number_integer()) fail(key, "expected an integer");
  const auto x = v->get<long long>();
  if (x < lo || x > hi) {
    fail(key, "expected an integer in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }
  return static_cast<int>(x);
}

std::string Section::text(const char* key, const std::string& fallback) {
  const auto* v = get(key);
  if (v == nullptr) return fallback;
  if (!v->is_string()) fail(key, "expected a string");
  return v->get<std::string>();
}

std::vector<double> Section::reals(const char* key, const std::vector<double>& fallback) {
  const auto* v = get(key);
  if (v == nullptr) return fallback;
  if (!v->is_array()) fail(key, "expected an array of numbers");
  std::vector<double> out;
  for (const auto& e : *v) {
    if (!e.is_number()) fail(key, "expected an array of numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

std::vector<std::vector<double>> Section::points(const char* key,
                                                 const std::vector<std::vector<double>>& fallback) {
  const auto* v = get(key);
  if (v == nullptr) return fallback;
  if (!v->is_array()) fail(key, "expected an array of coordinate arrays");
  std::vector<std::vector<double>> out;
  for (const auto& row : *v) {
    if (!row.is_array()) fail(key, "expected an array of coordinate arrays");
    std::vector<double> p;
    for (const auto& e : row) {
      if (!e.is_number()) fail(key, "coordinates must be numbers");
      p.push_back(e.get<double>());
    }
    out.push_back(std::move(p));
  }
  return out;
}

std::optional<std::uint64_t> Section::seed(const char* key) {
  const auto* v = get(key);
  if (v == nullptr || v->is_null()) return std::nullopt;
  if (!v->is_number_unsigned() && !(v->is_number_integer() && v->get<long long>() >= 0)) {
    fail(key, "expected a nonnegative integer or null");
  }
  return v->get<std::uint64_t>();
}

void Section::finish() const {
  if (j_ == nullptr) return;
  for (const auto& [k, _] : j_->items()) {
    if (!used_.contains(k)) throw ConfigError("field " + where(k.c_str()) + ": unknown key");
  }
}

}  // namespace blowup::lab
