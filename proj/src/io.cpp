#include "bflow/io.hpp"

#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>
#include <utility>

#include "json.hpp"

#include "bflow/errors.hpp"

namespace bflow {

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string iso_timestamp() {
  const std::time_t t = std::time(nullptr);
  std::tm tm_utc{};
  gmtime_r(&t, &tm_utc);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open for reading: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw InputError("read failure: " + path);
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot open for writing: " + path);
  out << content;
  out.flush();
  if (!out.good()) throw InputError("write failure: " + path);
}

SectionBasis read_basis(const std::string& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_text_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw InputError("basis file " + path + ": " + e.what());
  }
  int k = 0;
  Matrix coeffs;
  try {
    k = j.at("k").get<int>();
    if (k < 1) throw InputError("basis file " + path + ": k must be >= 1");
    const auto& rows = j.at("coeffs");
    const int n = k + 1;
    if (!rows.is_array() || static_cast<int>(rows.size()) != n) {
      throw InputError("basis file " + path + ": coeffs must hold " +
                       std::to_string(n) + " rows");
    }
    coeffs.resize(n, n);
    for (int r = 0; r < n; ++r) {
      const auto& row = rows.at(static_cast<std::size_t>(r));
      if (!row.is_array() || static_cast<int>(row.size()) != n) {
        throw InputError("basis file " + path + ": row " + std::to_string(r) +
                         " must hold " + std::to_string(n) + " entries");
      }
      for (int c = 0; c < n; ++c) {
        const auto& cell = row.at(static_cast<std::size_t>(c));
        coeffs(r, c) = Complex(cell.at("re").get<double>(),
                               cell.at("im").get<double>());
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw InputError("basis file " + path + ": " + e.what());
  }
  return SectionBasis::make(k, std::move(coeffs));
}

void write_basis(const std::string& path, const SectionBasis& b) {
  nlohmann::json rows = nlohmann::json::array();
  const Matrix& m = b.coeffs();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      row.push_back({{"re", m(r, c).real()}, {"im", m(r, c).imag()}});
    }
    rows.push_back(std::move(row));
  }
  const nlohmann::json j = {{"k", b.k()}, {"coeffs", std::move(rows)}};
  write_text_file(path, j.dump(2) + "\n");
}

}  // namespace bflow
