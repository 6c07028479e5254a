#pragma once

// CSV ingestion and emission for the command-line front end. Ingestion
// reports parse failures by row and column, rejects rows with missing
// cells (with a count), and can peel off a label column (string labels
// are mapped to integer codes) and an identifier column. Emission uses
// 17 significant digits so finite doubles round-trip bit-exactly.

#include <Eigen/Dense>
#include <charconv>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace ghdgls::io {

struct Dataset {
  Eigen::MatrixXd matrix;
  std::vector<std::string> column_names;
  std::optional<std::vector<int>> labels;
  std::vector<std::string> label_names;  // code -> original label text
  std::optional<std::vector<std::string>> ids;
  int rows_rejected = 0;
};

struct IngestOptions {
  bool header = true;
  int label_column = -1;  // index in the raw file, -1 = none
  int id_column = -1;
};

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.push_back("");
  return cells;
}

inline std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

inline bool parse_double(const std::string& raw, double& out) {
  const std::string s = trim(raw);
  if (s.empty()) return false;
  const char* begin = s.data();
  const char* end = begin + s.size();
  const auto res = std::from_chars(begin, end, out);
  return res.ec == std::errc() && res.ptr == end;
}

}  // namespace detail

inline Dataset ingest_csv(const std::string& path,
                          const IngestOptions& options = {}) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("ingest_csv: cannot open " + path);

  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!detail::trim(line).empty()) lines.push_back(line);
  }
  if (lines.empty()) throw std::runtime_error("ingest_csv: empty file " + path);

  Dataset ds;
  std::size_t first_row = 0;
  std::size_t width = detail::split_csv_line(lines[0]).size();
  if (options.header) {
    const auto cells = detail::split_csv_line(lines[0]);
    for (std::size_t j = 0; j < cells.size(); ++j) {
      const int jj = int(j);
      if (jj == options.label_column || jj == options.id_column) continue;
      ds.column_names.push_back(detail::trim(cells[j]));
    }
    first_row = 1;
  }
  if (first_row >= lines.size()) {
    throw std::runtime_error("ingest_csv: no data rows in " + path);
  }

  std::vector<std::vector<double>> numeric_rows;
  std::vector<std::string> raw_labels;
  std::vector<std::string> raw_ids;
  for (std::size_t r = first_row; r < lines.size(); ++r) {
    const auto cells = detail::split_csv_line(lines[r]);
    if (cells.size() != width) {
      ++ds.rows_rejected;  // missing or extra cells: reject the row
      continue;
    }
    std::vector<double> row;
    std::string label, id;
    bool missing = false;
    for (std::size_t j = 0; j < cells.size(); ++j) {
      const int jj = int(j);
      if (jj == options.label_column) {
        label = detail::trim(cells[j]);
        if (label.empty()) missing = true;
        continue;
      }
      if (jj == options.id_column) {
        id = detail::trim(cells[j]);
        continue;
      }
      if (detail::trim(cells[j]).empty()) {
        missing = true;
        continue;
      }
      double value;
      if (!detail::parse_double(cells[j], value)) {
        throw std::runtime_error("ingest_csv: unparseable cell at row " +
                                 std::to_string(r + 1) + ", column " +
                                 std::to_string(j + 1) + " of " + path);
      }
      row.push_back(value);
    }
    if (missing) {
      ++ds.rows_rejected;
      continue;
    }
    numeric_rows.push_back(std::move(row));
    if (options.label_column >= 0) raw_labels.push_back(label);
    if (options.id_column >= 0) raw_ids.push_back(id);
  }
  if (numeric_rows.empty()) {
    throw std::runtime_error("ingest_csv: all " +
                             std::to_string(ds.rows_rejected) +
                             " rows rejected in " + path);
  }

  const std::size_t p = numeric_rows.front().size();
  ds.matrix.resize(Eigen::Index(numeric_rows.size()), Eigen::Index(p));
  for (std::size_t i = 0; i < numeric_rows.size(); ++i) {
    for (std::size_t j = 0; j < p; ++j) ds.matrix(i, j) = numeric_rows[i][j];
  }
  if (ds.column_names.empty()) {
    for (std::size_t j = 0; j < p; ++j) {
      ds.column_names.push_back("V" + std::to_string(j + 1));
    }
  }
  if (options.label_column >= 0) {
    std::map<std::string, int> codes;
    std::vector<int> labs;
    for (const auto& s : raw_labels) {
      auto [it, inserted] = codes.emplace(s, int(codes.size()));
      if (inserted) ds.label_names.push_back(s);
      labs.push_back(it->second);
    }
    ds.labels = std::move(labs);
  }
  if (options.id_column >= 0) ds.ids = std::move(raw_ids);
  return ds;
}

inline std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v,
                                 std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

inline void emit_csv(const std::string& path, const Eigen::MatrixXd& matrix,
                     const std::vector<std::string>& column_names = {}) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("emit_csv: cannot write " + path);
  if (!column_names.empty()) {
    if (Eigen::Index(column_names.size()) != matrix.cols()) {
      throw std::invalid_argument("emit_csv: header width mismatch");
    }
    for (std::size_t j = 0; j < column_names.size(); ++j) {
      out << (j ? "," : "") << column_names[j];
    }
    out << "\n";
  }
  for (Eigen::Index i = 0; i < matrix.rows(); ++i) {
    for (Eigen::Index j = 0; j < matrix.cols(); ++j) {
      out << (j ? "," : "") << format_double(matrix(i, j));
    }
    out << "\n";
  }
  if (!out) throw std::runtime_error("emit_csv: write failed for " + path);
}

}  // namespace ghdgls::io
