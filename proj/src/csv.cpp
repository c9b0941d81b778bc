#include "rao/io/csv.hpp"

#include <Eigen/Cholesky>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "rao/errors.hpp"

namespace rao::io {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(trim(field));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

bool parse_double(const std::string& s, double& v) {
  if (s.empty()) return false;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (*first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  return ec == std::errc() && ptr == last && std::isfinite(v);
}

std::string location(const std::string& source, std::size_t line) {
  std::ostringstream os;
  os << source << ":" << line;
  return os.str();
}

}  // namespace

CsvTable parse_csv(std::istream& in, const std::string& source) {
  CsvTable table;
  std::vector<std::vector<double>> rows;
  std::size_t width = 0;
  std::size_t line_no = 0;
  bool first = true;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 && line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0)
      line.erase(0, 3);
    if (trim(line).empty()) continue;
    const std::vector<std::string> fields = split(line);
    std::vector<double> values(fields.size());
    bool numeric = true;
    for (std::size_t j = 0; j < fields.size(); ++j)
      if (!parse_double(fields[j], values[j])) numeric = false;

    if (first) {
      first = false;
      width = fields.size();
      if (!numeric) {
        table.header = fields;
        continue;
      }
    }
    if (fields.size() != width) {
      std::ostringstream os;
      os << location(source, line_no) << ": expected " << width << " fields, found "
         << fields.size();
      throw DataError(os.str());
    }
    if (!numeric) {
      for (std::size_t j = 0; j < fields.size(); ++j) {
        double v = 0.0;
        if (!parse_double(fields[j], v)) {
          std::ostringstream os;
          os << location(source, line_no) << ": field " << j + 1;
          if (fields[j].empty())
            os << " is missing";
          else
            os << " ('" << fields[j] << "') is not a finite number";
          throw DataError(os.str());
        }
      }
    }
    rows.push_back(std::move(values));
  }
  if (rows.empty()) throw DataError(source + ": no data rows");
  table.data.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(width));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < width; ++j) table.data(i, j) = rows[i][j];
  return table;
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  return parse_csv(in, path);
}

SymMatrix read_correlation_csv(const std::string& path, int expected_p) {
  const CsvTable t = read_csv(path);
  const Matrix& a = t.data;
  if (a.rows() != a.cols()) {
    std::ostringstream os;
    os << path << ": correlation matrix must be square, got " << a.rows() << "x" << a.cols();
    throw DataError(os.str());
  }
  if (expected_p > 0 && a.rows() != expected_p) {
    std::ostringstream os;
    os << "dimension mismatch: R0 in '" << path << "' is " << a.rows() << "x" << a.cols()
       << " but the data have p = " << expected_p << " columns";
    throw DataError(os.str());
  }
  SymMatrix r;
  try {
    r = SymMatrix(a);
  } catch (const StructuralError& e) {
    throw DataError(path + ": " + e.what());
  }
  for (int j = 0; j < r.dim(); ++j) {
    if (std::abs(r(j, j) - 1.0) > 1e-10) {
      std::ostringstream os;
      os << path << ": diagonal entry " << j + 1 << " is " << r(j, j) << ", expected 1";
      throw DataError(os.str());
    }
  }
  const Eigen::LLT<Matrix> llt(r.matrix());
  if (llt.info() != Eigen::Success)
    throw DataError(path + ": correlation matrix is not positive definite");
  return r;
}

}  // namespace rao::io
