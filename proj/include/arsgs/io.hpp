#pragma once

#include <string>
#include <vector>

#include "arsgs/linalg.hpp"
#include "arsgs/samplers.hpp"

namespace arsgs {

// Plain numeric CSV, one matrix row per line, no header. Lines starting with
// '#' are skipped on read.
Matrix read_matrix_csv(const std::string& path);
SymMatrix read_sym_matrix_csv(const std::string& path);
Vec read_vector_csv(const std::string& path);  // one value per row or one row
void write_matrix_csv(const std::string& path, const SymMatrix& m);

// "%.17g" formatting used for every floating-point field we emit, so reruns
// are byte-identical.
std::string format_double(double v);

// Chain CSV: comment line, then `step,x_1,..,x_d[,r_1,..,r_n]`.
void write_chain_csv(const std::string& path, const std::string& comment,
                     int d, int n_regimes, const std::vector<ChainRecord>& records);

// Trace CSV: comment line, then `epoch,n,w_1..w_s,p_1..p_s,pg_estimate`.
void write_trace_csv(const std::string& path, const std::string& comment,
                     int s, const std::vector<TraceRow>& trace);

struct ChainTable {
  std::vector<std::string> names;  // column names after `step`
  std::vector<Vec> columns;        // one series per named column
  std::vector<long> steps;
};

ChainTable read_chain_csv(const std::string& path);

// Minimal JSON writer for the summary/report documents (objects, arrays,
// strings, numbers); keys are emitted in insertion order.
class JsonWriter {
 public:
  std::string str() const { return out_; }

  void begin_object();
  void end_object();
  void begin_array(const std::string& key);
  void end_array();
  void key_value(const std::string& key, const std::string& v);
  void key_value(const std::string& key, double v);
  void key_value(const std::string& key, long v);
  void key_value(const std::string& key, bool v);
  void key_array(const std::string& key, const Vec& v);
  void key_array(const std::string& key, const std::vector<long>& v);
  void key_object(const std::string& key);  // begin nested object
  void array_number(double v);

 private:
  void comma();
  std::string out_;
  std::vector<bool> first_;  // per nesting level
};

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

// FNV-1a 64 over bytes, hex-encoded; used for the config hash stamped into
// output headers.
std::string fnv1a_hex(const std::string& bytes);

}  // namespace arsgs
