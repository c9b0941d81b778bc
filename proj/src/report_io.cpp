#include "rao/io/report_io.hpp"

#include <iomanip>
#include <limits>
#include <sstream>

#include "rao/errors.hpp"

namespace rao::io {

using nlohmann::json;

namespace {

json vec_json(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Vector vec_from(const json& j) {
  const std::vector<double> v = j.get<std::vector<double>>();
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

// NaN has no JSON literal; it is written as null.
json num(double v) { return std::isnan(v) ? json(nullptr) : json(v); }

std::string csv_num(double v) {
  if (std::isnan(v)) return "";
  std::ostringstream os;
  os << std::setprecision(std::numeric_limits<double>::max_digits10) << v;
  return os.str();
}

}  // namespace

json to_json(const TestReport& r) {
  json j;
  j["kind"] = std::string(to_string(r.kind));
  j["beta"] = r.beta;
  j["statistic"] = r.statistic;
  j["df"] = r.df;
  j["p_value"] = r.p_value;
  j["n"] = r.n;
  j["p"] = r.p;
  j["rho0"] = r.rho0 ? json(*r.rho0) : json(nullptr);
  if (r.fit) {
    const FitSummary& f = *r.fit;
    j["fit"] = {{"iterations", f.iterations},
                {"converged", f.converged},
                {"residual", f.residual},
                {"kappa0_tilde", f.kappa0_tilde},
                {"mu_tilde", vec_json(f.mu_tilde)},
                {"sigma2_tilde", vec_json(f.sigma2_tilde)},
                {"rho_tilde", f.rho_tilde ? json(*f.rho_tilde) : json(nullptr)}};
  } else {
    j["fit"] = nullptr;
  }
  return j;
}

TestReport report_from_json(const json& j) {
  TestReport r;
  r.kind = test_kind_from_string(j.at("kind").get<std::string>());
  r.beta = j.at("beta").get<double>();
  r.statistic = j.at("statistic").get<double>();
  r.df = j.at("df").get<int>();
  r.p_value = j.at("p_value").get<double>();
  r.n = j.at("n").get<int>();
  r.p = j.at("p").get<int>();
  if (j.contains("rho0") && !j["rho0"].is_null()) r.rho0 = j["rho0"].get<double>();
  if (j.contains("fit") && !j["fit"].is_null()) {
    const json& f = j["fit"];
    FitSummary s;
    s.iterations = f.at("iterations").get<int>();
    s.converged = f.at("converged").get<bool>();
    s.residual = f.at("residual").get<double>();
    s.kappa0_tilde = f.at("kappa0_tilde").get<double>();
    s.mu_tilde = vec_from(f.at("mu_tilde"));
    s.sigma2_tilde = vec_from(f.at("sigma2_tilde"));
    if (f.contains("rho_tilde") && !f["rho_tilde"].is_null())
      s.rho_tilde = f["rho_tilde"].get<double>();
    r.fit = std::move(s);
  }
  return r;
}

std::string reports_to_json(const std::vector<TestOutcome>& outcomes) {
  json reports = json::array();
  json errors = json::array();
  for (const TestOutcome& o : outcomes) {
    if (o.report) {
      reports.push_back(to_json(*o.report));
    } else {
      errors.push_back({{"kind", std::string(to_string(o.kind))},
                        {"beta", o.beta},
                        {"error_class", o.error_class},
                        {"message", o.error}});
    }
  }
  json doc = {{"schema", kReportSchema}, {"reports", reports}, {"errors", errors}};
  return doc.dump(2) + "\n";
}

std::vector<TestReport> reports_from_json(const std::string& text) {
  const json doc = json::parse(text);
  if (doc.at("schema").get<std::string>() != kReportSchema)
    throw DataError("unsupported report schema");
  std::vector<TestReport> out;
  for (const json& j : doc.at("reports")) out.push_back(report_from_json(j));
  return out;
}

std::string reports_to_csv(const std::vector<TestOutcome>& outcomes) {
  std::ostringstream os;
  os << "kind,beta,statistic,df,p_value,n,p,rho0,converged,iterations,kappa0_tilde,error\n";
  for (const TestOutcome& o : outcomes) {
    os << to_string(o.kind) << "," << csv_num(o.beta) << ",";
    if (o.report) {
      const TestReport& r = *o.report;
      os << csv_num(r.statistic) << "," << r.df << "," << csv_num(r.p_value) << "," << r.n
         << "," << r.p << "," << (r.rho0 ? csv_num(*r.rho0) : "") << ",";
      if (r.fit) {
        os << (r.fit->converged ? "true" : "false") << "," << r.fit->iterations << ","
           << csv_num(r.fit->kappa0_tilde);
      } else {
        os << ",,";
      }
      os << ",\n";
    } else {
      os << ",,,,,,,,," << o.error_class << "\n";
    }
  }
  return os.str();
}

std::string summary_to_json(const MonteCarloSummary& s) {
  json cells = json::array();
  for (const CellSummary& c : s.cells) {
    cells.push_back({{"test", std::string(to_string(c.kind))},
                     {"beta", c.beta},
                     {"df", c.df},
                     {"valid", c.valid},
                     {"failures", c.failures},
                     {"nonconvergence", c.nonconvergence},
                     {"rejections", c.rejections},
                     {"rejection_rate", num(c.rejection_rate)},
                     {"std_error", num(c.std_error)},
                     {"mean_statistic", num(c.mean_statistic)},
                     {"var_statistic", num(c.var_statistic)},
                     {"ks_distance", num(c.ks_distance)}});
  }
  json doc = {{"schema", kSummarySchema},
              {"n", s.n},
              {"p", s.p},
              {"replications", s.replications},
              {"alpha", s.alpha},
              {"seed", s.seed},
              {"cells", cells}};
  return doc.dump(2) + "\n";
}

std::string summary_to_csv(const MonteCarloSummary& s) {
  std::ostringstream os;
  os << "test,beta,df,replications,valid,failures,nonconvergence,rejections,rejection_rate,"
        "std_error,mean_statistic,var_statistic,ks_distance\n";
  for (const CellSummary& c : s.cells) {
    os << to_string(c.kind) << "," << csv_num(c.beta) << "," << c.df << "," << s.replications
       << "," << c.valid << "," << c.failures << "," << c.nonconvergence << "," << c.rejections
       << "," << csv_num(c.rejection_rate) << "," << csv_num(c.std_error) << ","
       << csv_num(c.mean_statistic) << "," << csv_num(c.var_statistic) << ","
       << csv_num(c.ks_distance) << "\n";
  }
  return os.str();
}

std::string error_class(const std::exception& e) {
  if (dynamic_cast<const ConvergenceError*>(&e)) return "convergence";
  if (dynamic_cast<const FactorizationError*>(&e)) return "factorization";
  if (dynamic_cast<const DegeneracyError*>(&e)) return "degeneracy";
  if (dynamic_cast<const ValidityError*>(&e)) return "validity";
  if (dynamic_cast<const RankError*>(&e)) return "rank";
  if (dynamic_cast<const NumericalError*>(&e)) return "numerical";
  if (dynamic_cast<const DataError*>(&e)) return "data";
  if (dynamic_cast<const DomainError*>(&e)) return "domain";
  if (dynamic_cast<const StructuralError*>(&e)) return "structural";
  return "error";
}

}  // namespace rao::io
