#pragma once

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "eitnoise/common.hpp"
#include "eitnoise/variables.hpp"

namespace eitnoise::io {

inline constexpr const char* kToolVersion = "0.1.0";

/// Fixed %.12e formatting; missing values print as "nan".
inline std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12e", v);
  return buf;
}

inline std::string format_number(const std::optional<double>& v) { return v ? format_number(*v) : "nan"; }

inline double parse_number(const std::string& s) {
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) throw InputError("not a number: '" + s + "'");
  return v;
}

class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header) : columns_(header.size()) { line(header); }

  void row(const std::vector<std::string>& cells) {
    if (cells.size() != columns_) throw Error("CsvWriter: row width does not match the header");
    line(cells);
  }

  const std::string& text() const { return out_; }

  void save(const std::filesystem::path& path) const {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw InputError("cannot write " + path.string());
    f << out_;
    if (!f) throw InputError("write failed for " + path.string());
  }

 private:
  void line(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out_ += ',';
      out_ += cells[i];
    }
    out_ += '\n';
  }

  std::size_t columns_;
  std::string out_;
};

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

inline CsvTable parse_csv(const std::string& text) {
  CsvTable t;
  std::istringstream in(text);
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (first) {
      t.header = std::move(cells);
      first = false;
    } else {
      t.rows.push_back(std::move(cells));
    }
  }
  return t;
}

inline std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct RunManifest {
  std::string version = kToolVersion;
  std::string scenario_hash;
  std::string timestamp = utc_timestamp();
  std::string command;
  std::vector<std::string> outputs;

  nlohmann::json to_json() const {
    return {{"version", version}, {"scenario_hash", scenario_hash}, {"timestamp", timestamp},
            {"command", command}, {"outputs", outputs}};
  }

  void save(const std::filesystem::path& path) const {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw InputError("cannot write " + path.string());
    f << to_json().dump(2) << '\n';
  }
};

/// Row-major dump, one row per variable, re/im column pairs.
inline CsvWriter matrix_csv(const Matrix12& m) {
  std::vector<std::string> header{"row"};
  for (Var v : kOrdering) {
    header.push_back(std::string(name(v)) + "_re");
    header.push_back(std::string(name(v)) + "_im");
  }
  CsvWriter w(header);
  for (Var r : kOrdering) {
    std::vector<std::string> cells{std::string(name(r))};
    for (Var c : kOrdering) {
      cells.push_back(format_number(m(idx(r), idx(c)).real()));
      cells.push_back(format_number(m(idx(r), idx(c)).imag()));
    }
    w.row(cells);
  }
  return w;
}

inline std::filesystem::path prepare_output_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) throw InputError("cannot create output directory " + dir);
  return dir;
}

}  // namespace eitnoise::io
