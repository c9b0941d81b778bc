#include "rao/io/scenario.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "rao/errors.hpp"

namespace rao::io {

namespace {

struct Entry {
  std::string value;
  std::size_t line = 0;
};

const std::set<std::string> kKeys = {
    "n",        "p",           "replications",          "alpha",
    "seed",     "beta",        "tests",                 "generator",
    "mean",     "variances",   "correlation",           "contamination.epsilon",
    "contamination.kind",      "contamination.point",   "contamination.shift",
    "contamination.scale",     "heavy_tail.dof",        "null.rho0",
    "null.r0",  "tolerance",   "max_iterations",        "damping",
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

class Reader {
 public:
  Reader(std::map<std::string, Entry> entries, std::string source)
      : e_(std::move(entries)), source_(std::move(source)) {}

  bool has(const std::string& key) const { return e_.count(key) != 0; }

  [[noreturn]] void fail(const std::string& key, const std::string& msg) const {
    std::ostringstream os;
    os << source_;
    if (auto it = e_.find(key); it != e_.end()) os << ":" << it->second.line;
    os << ": " << key << ": " << msg;
    throw DataError(os.str());
  }

  const std::string& raw(const std::string& key) const {
    auto it = e_.find(key);
    if (it == e_.end()) fail(key, "required key is missing");
    return it->second.value;
  }

  double number(const std::string& key, const std::string& text) const {
    double v = 0.0;
    const std::string t = trim(text);
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || ec != std::errc() || ptr != t.data() + t.size() || !std::isfinite(v))
      fail(key, "'" + t + "' is not a number");
    return v;
  }

  double number(const std::string& key) const { return number(key, raw(key)); }

  double number_or(const std::string& key, double fallback) const {
    return has(key) ? number(key) : fallback;
  }

  long long integer(const std::string& key) const {
    const double v = number(key);
    if (v != std::floor(v) || std::abs(v) > 9.0e15) fail(key, "expected an integer");
    return static_cast<long long>(v);
  }

  std::vector<std::string> list(const std::string& key) const {
    std::vector<std::string> out;
    std::istringstream ss(raw(key));
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      if (item.empty()) fail(key, "empty list element");
      out.push_back(item);
    }
    if (out.empty()) fail(key, "empty list");
    return out;
  }

  std::vector<double> numbers(const std::string& key) const {
    std::vector<double> out;
    for (const std::string& s : list(key)) out.push_back(number(key, s));
    return out;
  }

  Vector vector_of(const std::string& key, int p, double fallback) const {
    if (!has(key)) return Vector::Constant(p, fallback);
    const std::vector<double> v = numbers(key);
    if (v.size() == 1) return Vector::Constant(p, v[0]);
    if (static_cast<int>(v.size()) != p) {
      std::ostringstream os;
      os << "expected 1 or " << p << " values, got " << v.size();
      fail(key, os.str());
    }
    return Eigen::Map<const Vector>(v.data(), p);
  }

  Matrix correlation(const std::string& key, int p) const {
    const std::string v = trim(raw(key));
    std::istringstream ss(v);
    std::string word;
    ss >> word;
    Matrix r;
    if (word == "identity") {
      r = Matrix::Identity(p, p);
    } else if (word == "equicorr" || word == "toeplitz") {
      std::string rest;
      std::getline(ss, rest);
      const double rho = number(key, rest);
      if (word == "equicorr") {
        r = equicorrelation(rho, p);
      } else {
        r.resize(p, p);
        for (int i = 0; i < p; ++i)
          for (int j = 0; j < p; ++j) r(i, j) = std::pow(rho, std::abs(i - j));
      }
    } else {
      const std::vector<double> vals = numbers(key);
      if (static_cast<long long>(vals.size()) != static_cast<long long>(p) * p) {
        std::ostringstream os;
        os << "expected identity, equicorr <rho>, toeplitz <rho> or " << p * p
           << " values, got " << vals.size() << " values";
        fail(key, os.str());
      }
      r = Eigen::Map<const Matrix>(vals.data(), p, p);
    }
    try {
      const SymMatrix s(r);
      const Eigen::LLT<Matrix> llt(s.matrix());
      if (llt.info() != Eigen::Success) fail(key, "correlation matrix is not positive definite");
      for (int j = 0; j < p; ++j)
        if (std::abs(s(j, j) - 1.0) > 1e-10) fail(key, "correlation diagonal must be 1");
      return s.matrix();
    } catch (const StructuralError& e) {
      fail(key, e.what());
    }
  }

 private:
  std::map<std::string, Entry> e_;
  std::string source_;
};

}  // namespace

ScenarioSpec parse_scenario(std::istream& in, const std::string& source) {
  std::map<std::string, Entry> entries;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    std::ostringstream where;
    where << source << ":" << line_no << ": ";
    if (eq == std::string::npos) throw DataError(where.str() + "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (kKeys.count(key) == 0) throw DataError(where.str() + "unknown key '" + key + "'");
    if (entries.count(key) != 0) throw DataError(where.str() + "duplicate key '" + key + "'");
    if (value.empty()) throw DataError(where.str() + "key '" + key + "' has no value");
    entries[key] = {value, line_no};
  }

  const Reader r(std::move(entries), source);
  ScenarioSpec spec;
  spec.n = static_cast<int>(r.integer("n"));
  spec.p = static_cast<int>(r.integer("p"));
  if (spec.p < 1) r.fail("p", "must be >= 1");
  if (spec.n < 2) r.fail("n", "must be >= 2");
  spec.replications = static_cast<int>(r.integer("replications"));
  if (spec.replications < 1) r.fail("replications", "must be >= 1");
  spec.alpha = r.number_or("alpha", 0.05);
  if (!(spec.alpha > 0.0 && spec.alpha < 1.0)) r.fail("alpha", "must lie in (0, 1)");
  if (r.has("seed")) {
    const long long s = r.integer("seed");
    if (s < 0) r.fail("seed", "must be nonnegative");
    spec.seed = static_cast<std::uint64_t>(s);
  }
  if (r.has("beta")) {
    spec.betas = r.numbers("beta");
    for (double b : spec.betas)
      if (b < 0.0) r.fail("beta", "values must be nonnegative");
  }

  const Vector mean = r.vector_of("mean", spec.p, 0.0);
  const Vector var = r.vector_of("variances", spec.p, 1.0);
  for (int j = 0; j < spec.p; ++j)
    if (!(var[j] > 0.0)) r.fail("variances", "must be positive");
  const Matrix corr = r.has("correlation") ? r.correlation("correlation", spec.p)
                                           : Matrix(Matrix::Identity(spec.p, spec.p));
  spec.model = GaussianParams(mean, var, corr);

  const std::string gen = r.has("generator") ? r.raw("generator") : "pure";
  if (gen == "pure") {
    spec.generator = GeneratorKind::Pure;
  } else if (gen == "contaminated") {
    spec.generator = GeneratorKind::Contaminated;
    Contamination& c = spec.contamination;
    c.epsilon = r.number("contamination.epsilon");
    const std::string kind = r.raw("contamination.kind");
    if (kind == "point-mass") {
      c.kind = ContaminantKind::PointMass;
      c.point = r.vector_of("contamination.point", spec.p, 0.0);
      if (!r.has("contamination.point")) r.fail("contamination.point", "required for point-mass");
    } else if (kind == "location-shift") {
      c.kind = ContaminantKind::LocationShift;
      if (!r.has("contamination.shift")) r.fail("contamination.shift", "required for location-shift");
      c.shift = r.vector_of("contamination.shift", spec.p, 0.0);
    } else if (kind == "scale-inflation") {
      c.kind = ContaminantKind::ScaleInflation;
      c.scale = r.number("contamination.scale");
    } else {
      r.fail("contamination.kind", "expected point-mass, location-shift or scale-inflation");
    }
    if (!(c.epsilon >= 0.0 && c.epsilon < 1.0))
      r.fail("contamination.epsilon", "must lie in [0, 1)");
  } else if (gen == "heavy-tailed") {
    spec.generator = GeneratorKind::HeavyTailed;
    spec.dof = r.number("heavy_tail.dof");
    if (!(spec.dof > 0.0)) r.fail("heavy_tail.dof", "must be positive");
  } else {
    r.fail("generator", "expected pure, contaminated or heavy-tailed");
  }

  for (const std::string& name : r.list("tests")) {
    NullSpec t;
    try {
      t.kind = test_kind_from_string(name);
    } catch (const DomainError& e) {
      r.fail("tests", e.what());
    }
    if (t.kind == TestKind::EquicorrFixed || t.kind == TestKind::Bivariate)
      t.rho0 = r.number("null.rho0");
    if (t.kind == TestKind::SpecifiedR) t.r0 = r.correlation("null.r0", spec.p);
    spec.tests.push_back(std::move(t));
  }

  spec.fit.tolerance = r.number_or("tolerance", spec.fit.tolerance);
  spec.fit.max_iterations =
      r.has("max_iterations") ? static_cast<int>(r.integer("max_iterations")) : 500;
  spec.fit.damping = r.number_or("damping", 1.0);
  try {
    spec.validate();
  } catch (const Error& e) {
    throw DataError(source + ": " + e.what());
  }
  return spec;
}

ScenarioSpec read_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  return parse_scenario(in, path);
}

}  // namespace rao::io
