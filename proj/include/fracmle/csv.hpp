#pragma once

#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace fracmle::io {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

inline void write_csv(const std::string& path, const Table& t) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  for (std::size_t i = 0; i < t.header.size(); ++i)
    out << (i ? "," : "") << t.header[i];
  out << "\n";
  out.precision(17);
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
    out << "\n";
  }
}

inline Table read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  Table t;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    if (first) {
      while (std::getline(ss, cell, ',')) t.header.push_back(cell);
      first = false;
      continue;
    }
    std::vector<double> row;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    t.rows.push_back(std::move(row));
  }
  return t;
}

inline void write_doubles(const std::string& path, const std::vector<double>& v) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path);
  std::uint64_t n = v.size();
  out.write(reinterpret_cast<const char*>(&n), sizeof(n));
  out.write(reinterpret_cast<const char*>(v.data()),
            static_cast<std::streamsize>(n * sizeof(double)));
}

inline std::vector<double> read_doubles(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::uint64_t n = 0;
  in.read(reinterpret_cast<char*>(&n), sizeof(n));
  std::vector<double> v(n);
  in.read(reinterpret_cast<char*>(v.data()),
          static_cast<std::streamsize>(n * sizeof(double)));
  if (!in) throw std::runtime_error("truncated file " + path);
  return v;
}

}  // namespace fracmle::io
