#pragma once
// CSV output and run manifests (flat `key = value` text).

#include <cstdio>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include "mlbie/errors.hpp"

namespace mlbie {

/// Round-trip decimal form of a double.
inline std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string to_field(const std::string& s) { return s; }
inline std::string to_field(const char* s) { return s; }
inline std::string to_field(double v) { return format_number(v); }
inline std::string to_field(int v) { return std::to_string(v); }
inline std::string to_field(long v) { return std::to_string(v); }
inline std::string to_field(std::size_t v) { return std::to_string(v); }
inline std::string to_field(bool v) { return v ? "1" : "0"; }

template <typename T>
std::string join(const std::vector<T>& values, const std::string& sep = " ") {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) out += sep;
    out += to_field(values[i]);
  }
  return out;
}

class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header) : out_(path) {
    if (!out_) throw Error("cannot open " + path + " for writing");
    write_line(header);
  }

  template <typename... Ts>
  void row(const Ts&... fields) {
    write_line({to_field(fields)...});
  }

  void write_line(const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i > 0) out_ << ',';
      out_ << fields[i];
    }
    out_ << '\n';
    if (!out_) throw Error("write failed");
  }

 private:
  std::ofstream out_;
};

/// Ordered key/value record of a run, readable back as a CLI config file.
class RunManifest {
 public:
  void set(const std::string& key, const std::string& value) {
    for (auto& [k, v] : entries_) {
      if (k == key) {
        v = value;
        return;
      }
    }
    entries_.emplace_back(key, value);
  }
  void set_string(const std::string& key, const std::string& value) { set(key, "\"" + value + "\""); }
  void set_number(const std::string& key, double value) { set(key, format_number(value)); }

  template <typename T>
  void set_list(const std::string& key, const std::vector<T>& values) {
    set(key, "[" + join(values, ", ") + "]");
  }

  [[nodiscard]] const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }

  void write(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw Error("cannot open " + path + " for writing");
    for (const auto& [k, v] : entries_) out << k << " = " << v << '\n';
  }

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

}  // namespace mlbie
