#include "arsgs/io.hpp"

#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "arsgs/errors.hpp"

namespace arsgs {

namespace {

std::vector<Vec> read_rows(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::vector<Vec> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    Vec row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t pos = 0;
        const double v = std::stod(cell, &pos);
        while (pos < cell.size() && std::isspace(static_cast<unsigned char>(cell[pos]))) ++pos;
        if (pos != cell.size()) throw std::invalid_argument(cell);
        row.push_back(v);
      } catch (const std::exception&) {
        throw IoError("non-numeric cell '" + cell + "' in " + path);
      }
    }
    if (!row.empty()) rows.push_back(std::move(row));
  }
  if (rows.empty()) throw IoError("no data rows in " + path);
  for (const Vec& r : rows)
    if (r.size() != rows[0].size())
      throw IoError("ragged rows in " + path);
  return rows;
}

}  // namespace

Matrix read_matrix_csv(const std::string& path) {
  const std::vector<Vec> rows = read_rows(path);
  Matrix m(static_cast<int>(rows.size()), static_cast<int>(rows[0].size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      m(static_cast<int>(i), static_cast<int>(j)) = rows[i][j];
  return m;
}

SymMatrix read_sym_matrix_csv(const std::string& path) {
  const Matrix m = read_matrix_csv(path);
  if (m.rows() != m.cols()) throw IoError("matrix in " + path + " is not square");
  Vec entries(static_cast<std::size_t>(m.rows()) * m.cols());
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j)
      entries[static_cast<std::size_t>(i) * m.cols() + j] = m(i, j);
  try {
    return SymMatrix::from_entries(m.rows(), std::move(entries));
  } catch (const std::invalid_argument& e) {
    throw IoError(std::string(e.what()) + " in " + path);
  }
}

Vec read_vector_csv(const std::string& path) {
  const std::vector<Vec> rows = read_rows(path);
  Vec v;
  for (const Vec& r : rows)
    for (double x : r) v.push_back(x);
  return v;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_matrix_csv(const std::string& path, const SymMatrix& m) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  for (int i = 0; i < m.dim(); ++i) {
    for (int j = 0; j < m.dim(); ++j) {
      if (j) out << ',';
      out << format_double(m(i, j));
    }
    out << '\n';
  }
}

void write_chain_csv(const std::string& path, const std::string& comment,
                     int d, int n_regimes, const std::vector<ChainRecord>& records) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << "# " << comment << '\n';
  out << "step";
  for (int i = 1; i <= d; ++i) out << ",x_" << i;
  for (int i = 1; i <= n_regimes; ++i) out << ",r_" << i;
  out << '\n';
  for (const ChainRecord& rec : records) {
    out << rec.step;
    for (double x : rec.x) out << ',' << format_double(x);
    for (int r : rec.regimes) out << ',' << r;
    out << '\n';
  }
}

void write_trace_csv(const std::string& path, const std::string& comment,
                     int s, const std::vector<TraceRow>& trace) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << "# " << comment << '\n';
  out << "epoch,n";
  for (int i = 1; i <= s; ++i) out << ",w_" << i;
  for (int i = 1; i <= s; ++i) out << ",p_" << i;
  out << ",pg_estimate\n";
  for (const TraceRow& row : trace) {
    out << row.epoch << ',' << row.n;
    for (double w : row.w) out << ',' << format_double(w);
    for (double p : row.p) out << ',' << format_double(p);
    out << ',' << format_double(row.pg) << '\n';
  }
}

ChainTable read_chain_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::string line;
  std::string header;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    header = line;
    break;
  }
  if (header.empty()) throw IoError("missing header in " + path);

  ChainTable table;
  {
    std::stringstream ss(header);
    std::string cell;
    bool first = true;
    while (std::getline(ss, cell, ',')) {
      if (first) {
        if (cell != "step") throw IoError("first column must be 'step' in " + path);
        first = false;
      } else {
        table.names.push_back(cell);
      }
    }
  }
  if (table.names.empty()) throw IoError("no data columns in " + path);
  table.columns.assign(table.names.size(), Vec{});

  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::stringstream ss(line);
    std::string cell;
    std::size_t col = 0;
    bool first = true;
    while (std::getline(ss, cell, ',')) {
      try {
        if (first) {
          table.steps.push_back(std::stol(cell));
          first = false;
        } else {
          if (col >= table.columns.size()) throw std::invalid_argument("extra");
          table.columns[col++].push_back(std::stod(cell));
        }
      } catch (const std::exception&) {
        throw IoError("malformed row in " + path);
      }
    }
    if (col != table.columns.size()) throw IoError("ragged row in " + path);
  }
  if (table.steps.empty()) throw IoError("no data rows in " + path);
  return table;
}

void JsonWriter::comma() {
  if (!first_.empty()) {
    if (!first_.back()) out_ += ',';
    first_.back() = false;
  }
}

void JsonWriter::begin_object() {
  comma();
  out_ += '{';
  first_.push_back(true);
}

void JsonWriter::end_object() {
  out_ += '}';
  first_.pop_back();
}

void JsonWriter::begin_array(const std::string& key) {
  comma();
  out_ += '"' + key + "\":[";
  first_.push_back(true);
}

void JsonWriter::end_array() {
  out_ += ']';
  first_.pop_back();
}

void JsonWriter::key_value(const std::string& key, const std::string& v) {
  comma();
  out_ += '"' + key + "\":\"" + v + '"';
}

void JsonWriter::key_value(const std::string& key, double v) {
  comma();
  if (std::isnan(v))
    out_ += '"' + key + "\":null";
  else
    out_ += '"' + key + "\":" + format_double(v);
}

void JsonWriter::key_value(const std::string& key, long v) {
  comma();
  out_ += '"' + key + "\":" + std::to_string(v);
}

void JsonWriter::key_value(const std::string& key, bool v) {
  comma();
  out_ += '"' + key + "\":" + (v ? "true" : "false");
}

void JsonWriter::key_array(const std::string& key, const Vec& v) {
  begin_array(key);
  for (double x : v) array_number(x);
  end_array();
}

void JsonWriter::key_array(const std::string& key, const std::vector<long>& v) {
  begin_array(key);
  for (long x : v) {
    comma();
    out_ += std::to_string(x);
  }
  end_array();
}

void JsonWriter::key_object(const std::string& key) {
  comma();
  out_ += '"' + key + "\":{";
  first_.push_back(true);
}

void JsonWriter::array_number(double v) {
  comma();
  out_ += std::isnan(v) ? "null" : format_double(v);
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << content;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace arsgs
