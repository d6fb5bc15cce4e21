#include <openssl/evp.h>

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "blowup/lab.hpp"

namespace blowup::lab {

std::string format_real(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string csv_text(const CsvTable& table) {
  std::set<std::string> seen;
  for (const auto& c : table.columns) {
    if (c.empty()) throw ContractError("CSV column names must be nonempty");
    if (!seen.insert(c).second) throw ContractError("duplicate CSV column name '" + c + "'");
  }
  std::string out;
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    if (i > 0) out += ',';
    const auto& c = table.columns[i];
    if (c.find_first_of(",\"\n\r") != std::string::npos) {
      out += '"';
      for (char ch : c) {
        if (ch == '"') out += '"';
        out += ch;
      }
      out += '"';
    } else {
      out += c;
    }
  }
  out += '\n';
  for (const auto& row : table.rows) {
    if (row.size() != table.columns.size()) throw ContractError("CSV row width does not match the header");
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i > 0) out += ',';
      out += format_real(row[i]);
    }
    out += '\n';
  }
  return out;
}

void emit_csv(const CsvTable& table, const std::filesystem::path& path) {
  const std::string text = csv_text(table);
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error("cannot open " + path.string() + " for writing");
  f.write(text.data(), static_cast<std::streamsize>(text.size()));
  f.close();
  if (!f) throw Error("failed writing " + path.string());
}

std::string git_blob_sha1(std::string_view bytes) {
  const std::string header = "blob " + std::to_string(bytes.size()) + '\0';
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (ctx == nullptr) throw Error("cannot allocate a digest context");
  const bool ok = EVP_DigestInit_ex(ctx, EVP_sha1(), nullptr) == 1 &&
                  EVP_DigestUpdate(ctx, header.data(), header.size()) == 1 &&
                  EVP_DigestUpdate(ctx, bytes.data(), bytes.size()) == 1 &&
                  EVP_DigestFinal_ex(ctx, md, &len) == 1;
  EVP_MD_CTX_free(ctx);
  if (!ok) throw Error("SHA-1 digest failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

bool ExperimentResult::passed() const {
  for (const auto& c : checks) {
    if (!c.pass) return false;
  }
  return true;
}

std::string summary_text(const ExperimentResult& r) {
  std::ostringstream s;
  s << "experiment: " << r.kind << '\n';
  s << "model: " << r.model << '\n';
  for (const auto& [name, v] : r.values) s << name << " = " << format_real(v) << '\n';
  for (const auto& c : r.checks) {
    s << (c.pass ? "PASS " : "FAIL ") << c.name << " = " << format_real(c.value) << "  (required " << c.bound
      << ")\n";
  }
  for (const auto& n : r.notes) s << "note: " << n << '\n';
  s << "result: " << (r.passed() ? "PASS" : "FAIL") << '\n';
  return s.str();
}

}  // namespace blowup::lab
