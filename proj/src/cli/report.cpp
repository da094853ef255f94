#include "robustiv/cli/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iomanip>
#include <sstream>

#include <boost/math/distributions/students_t.hpp>

#include "robustiv/stats.hpp"

namespace robustiv::cli {

using nlohmann::json;

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

json to_json(const Report& r) {
  json j;
  j["method"] = r.method;
  j["alpha"] = r.alpha;
  j["headline"] = r.headline;
  j["estimates"] = json::array();
  for (const auto& e : r.estimates)
    j["estimates"].push_back({{"label", e.label}, {"estimate", e.estimate}, {"se", e.se},
                              {"lower", e.lower}, {"upper", e.upper}, {"valid", e.valid}});
  j["coefficients"] = json::array();
  for (const auto& c : r.coefficients)
    j["coefficients"].push_back({{"name", c.name}, {"estimate", c.estimate}, {"se", c.se}, {"t", c.t}, {"p", c.p}});
  j["interval"] = r.interval ? json{{"lower", r.interval->lower}, {"upper", r.interval->upper}} : json(nullptr);
  j["report_invalid"] = r.report_invalid;
  j["invalid"] = r.invalid;
  j["diagnostics"] = r.diagnostics;
  j["warnings"] = r.warnings;
  return j;
}

Report report_from_json(const json& j) {
  Report r;
  try {
    r.method = j.at("method").get<std::string>();
    r.alpha = j.at("alpha").get<double>();
    r.headline = j.at("headline").get<std::vector<std::string>>();
    for (const auto& e : j.at("estimates"))
      r.estimates.push_back({e.at("label").get<std::string>(), e.at("estimate").get<double>(),
                             e.at("se").get<double>(), e.at("lower").get<double>(),
                             e.at("upper").get<double>(), e.at("valid").get<std::vector<std::string>>()});
    for (const auto& c : j.at("coefficients"))
      r.coefficients.push_back({c.at("name").get<std::string>(), c.at("estimate").get<double>(),
                                c.at("se").get<double>(), c.at("t").get<double>(), c.at("p").get<double>()});
    if (!j.at("interval").is_null())
      r.interval = IntervalRow{j["interval"].at("lower").get<double>(), j["interval"].at("upper").get<double>()};
    r.report_invalid = j.at("report_invalid").get<bool>();
    r.invalid = j.at("invalid").get<std::vector<std::string>>();
    r.diagnostics = j.at("diagnostics");
    r.warnings = j.at("warnings").get<std::vector<std::string>>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("malformed report: ") + e.what());
  }
  return r;
}

void check_report(const Report& r) {
  auto finite = [](double v, const std::string& what) {
    if (!std::isfinite(v)) throw Error(ErrorCode::InvalidArgument, "non-finite " + what + " in report");
  };
  finite(r.alpha, "alpha");
  for (const auto& e : r.estimates) {
    for (double v : {e.estimate, e.se, e.lower, e.upper}) finite(v, e.label);
    if (e.lower > e.upper) throw Error(ErrorCode::InvalidArgument, "unordered interval for " + e.label);
  }
  for (const auto& c : r.coefficients)
    for (double v : {c.estimate, c.se, c.t, c.p}) finite(v, c.name);
  if (r.interval) {
    finite(r.interval->lower, "interval");
    finite(r.interval->upper, "interval");
    if (r.interval->lower > r.interval->upper) throw Error(ErrorCode::InvalidArgument, "unordered interval");
  }
}

namespace {

std::string join(const std::vector<std::string>& v) {
  std::string s;
  for (const auto& x : v) s += (s.empty() ? "" : " ") + x;
  return s;
}

std::string percent(double p) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g%%", 100.0 * p);
  return buf;
}

std::string pad(const std::string& s, std::size_t w) { return s.size() >= w ? s + " " : s + std::string(w - s.size(), ' '); }

std::string lpad(const std::string& s, std::size_t w) { return s.size() >= w ? s : std::string(w - s.size(), ' ') + s; }

const char* signif(double p) {
  if (p < 0.001) return "***";
  if (p < 0.01) return "**";
  if (p < 0.05) return "*";
  if (p < 0.1) return ".";
  return "";
}

std::vector<std::string> names_of(const Dataset& ds, const IndexSet& idx) {
  std::vector<std::string> out;
  for (int j : idx) out.push_back(ds.z_names[static_cast<std::size_t>(j)]);
  return out;
}

EstimateRow row_from(const std::string& label, const EffectEstimate& e, std::vector<std::string> valid = {}) {
  return {label, e.beta_hat, e.se, e.lower, e.upper, std::move(valid)};
}

std::vector<CoefRow> coef_rows(const std::vector<std::string>& names, const VectorXd& coef, const MatrixXd& cov,
                               std::ptrdiff_t count, double df) {
  boost::math::students_t dist(df);
  std::vector<CoefRow> rows;
  for (std::ptrdiff_t k = 0; k < count; ++k) {
    CoefRow r;
    r.name = names[static_cast<std::size_t>(k)];
    r.estimate = coef(k);
    r.se = std::sqrt(cov(k, k));
    r.t = r.estimate / r.se;
    r.p = boost::math::cdf(boost::math::complement(dist, std::abs(r.t)));
    rows.push_back(r);
  }
  return rows;
}

}  // namespace

std::string render_text(const Report& r) {
  std::ostringstream os;
  for (const auto& h : r.headline) os << h << '\n';

  if (!r.coefficients.empty()) {
    std::size_t lw = 11;
    for (const auto& c : r.coefficients) lw = std::max(lw, c.name.size());
    os << pad("", lw + 1) << lpad("Estimate", 13) << lpad("Std.Error", 13) << lpad("t value", 10)
       << lpad("Pr(>|t|)", 13) << '\n';
    for (const auto& c : r.coefficients)
      os << pad(c.name, lw + 1) << lpad(format_number(c.estimate), 13) << lpad(format_number(c.se), 13)
         << lpad(format_number(std::abs(c.t)), 10) << lpad(format_number(c.p), 13) << ' ' << signif(c.p) << '\n';
    os << "---\nSignif. codes: 0 '***' 0.001 '**' 0.01 '*' 0.05 '.' 0.1 ' ' 1\n";
    if (!r.estimates.empty()) os << '\n';
  }

  if (!r.estimates.empty()) {
    std::size_t lw = 0;
    for (const auto& e : r.estimates) lw = std::max(lw, e.label.size());
    os << pad("", lw + 1) << pad("Estimate", 12) << pad("Std.Error", 12) << pad("CI(" + percent(r.alpha / 2) + ")", 12)
       << pad("CI(" + percent(1 - r.alpha / 2) + ")", 12) << "Valid IVs\n";
    for (const auto& e : r.estimates)
      os << pad(e.label, lw + 1) << pad(format_number(e.estimate), 12) << pad(format_number(e.se), 12)
         << pad(format_number(e.lower), 12) << pad(format_number(e.upper), 12) << join(e.valid) << '\n';
  }

  if (r.interval)
    os << "Confidence Interval for Causal Effect: [" << format_number(r.interval->lower) << ","
       << format_number(r.interval->upper) << "]\n";

  if (r.report_invalid) {
    os << "_ _ _ _ _ _ _ _ _ _ _ _ _ _ _ _ _ _ _ _ _ _ _ _ _ _ _ _ _ _\n";
    if (r.invalid.empty())
      os << "No invalid IV is detected\n";
    else
      os << "Detected invalid IVs: " << join(r.invalid) << '\n';
  }
  for (const auto& w : r.warnings) os << "Warning: " << w << '\n';
  return os.str();
}

Report make_report(const TshtReport& t, const Dataset& ds, double alpha) {
  Report r;
  r.method = "tsht";
  r.alpha = alpha;
  r.report_invalid = true;
  const bool several = t.estimates.size() > 1;
  json per_clique = json::array();
  for (std::size_t k = 0; k < t.estimates.size(); ++k) {
    const auto& e = t.estimates[k];
    r.estimates.push_back(row_from(several ? "betaHat" + std::to_string(k + 1) : "betaHat", e.estimate, e.valid_names));
    per_clique.push_back(e.invalid_names);
  }
  if (several) r.headline.push_back(std::to_string(t.estimates.size()) + " maximum cliques; one estimate per clique");
  r.invalid = t.estimates.front().invalid_names;
  if (several) {
    std::vector<std::string> all;
    for (const auto& e : t.estimates)
      for (const auto& s : e.invalid_names)
        if (std::find(all.begin(), all.end(), s) == all.end()) all.push_back(s);
    r.invalid = all;
  }

  json d;
  d["n"] = ds.n();
  d["voting"] = t.voting == Voting::MP ? "MP" : "MaxClique";
  d["lambda1"] = t.lambda1;
  d["lambda2"] = t.lambda2;
  d["relevant"] = t.relevant_names;
  d["weak"] = t.weak_names;
  d["vote_counts"] = t.selection.VM;
  d["majority_rule_holds"] = t.selection.majority_ok;
  d["n_valid_sets"] = t.estimates.size();
  d["invalid_by_estimate"] = per_clique;
  json pi = json::array();
  for (const auto& row : t.selection.Pi_hat) {
    std::vector<int> v;
    for (bool b : row) v.push_back(b ? 1 : 0);
    pi.push_back(v);
  }
  d["voting_matrix"] = pi;
  r.diagnostics = d;
  return r;
}

Report make_report(const IntervalResult& ci, const IndexSet& S_hat, const Dataset& ds, double alpha) {
  Report r;
  r.method = ci.method == IntervalMethod::Searching ? "search" : "sample";
  r.alpha = alpha;
  r.interval = IntervalRow{ci.lower, ci.upper};
  r.warnings = ci.warnings;
  json d;
  d["n"] = ds.n();
  d["relevant"] = names_of(ds, S_hat);
  d["grid"] = {{"lo", ci.grid.lo}, {"hi", ci.grid.hi}, {"n_points", ci.grid.n_points}};
  d["hit_grid_boundary"] = ci.hit_grid_boundary;
  if (ci.method == IntervalMethod::Sampling) {
    d["M"] = ci.M;
    d["lambda"] = ci.lambda;
    d["nonempty_count"] = ci.nonempty_count;
    d["fallback_to_searching"] = ci.fallback_to_searching;
  }
  r.diagnostics = d;
  return r;
}

Report make_report(const EndoTestResult& e, const Dataset& ds) {
  Report r;
  r.method = "endotest";
  r.alpha = e.alpha;
  r.report_invalid = true;
  r.invalid = e.invalid_names;
  r.headline.push_back("P-value  Test         Valid IVs");
  r.headline.push_back(pad(format_number(e.p_value), 9) + pad(e.rejected ? "H0 rejected" : "H0 retained", 13) +
                       join(e.valid_names));
  const double z = stats::normal_quantile(1.0 - e.alpha / 2.0);
  r.estimates.push_back({"sigma12", e.sigma12_hat, e.se, e.sigma12_hat - z * e.se, e.sigma12_hat + z * e.se, e.valid_names});
  json d;
  d["n"] = ds.n();
  d["p_value"] = e.p_value;
  d["z_stat"] = e.z_stat;
  d["rejected"] = e.rejected;
  d["beta_hat"] = e.beta_hat;
  d["Theta11"] = e.Theta11;
  d["Theta22"] = e.Theta22;
  d["Theta12"] = e.Theta12;
  d["relevant"] = names_of(ds, e.S_hat);
  d["se_method"] = e.se_method == EndoSeMethod::Influence ? "influence" : "bootstrap";
  r.diagnostics = d;
  return r;
}

Report make_report(const CfFit& fit, double alpha, const std::vector<EffectEstimate>& effects) {
  Report r;
  r.method = "cf";
  r.alpha = alpha;
  r.headline.push_back("Coefficients of the control function estimators:");
  const auto k = fit.coef.size() - 1;
  r.coefficients = coef_rows(fit.names, fit.coef, fit.cov, k, double(fit.n - fit.coef.size()));
  for (std::size_t i = 0; i < effects.size(); ++i) r.estimates.push_back(row_from(effects.size() > 1 ? "CE" + std::to_string(i + 1) : "CE", effects[i]));
  r.warnings = fit.warnings;
  json d;
  d["n"] = fit.n;
  d["sigma2"] = fit.sigma2;
  d["v_hat_coef"] = fit.coef(k);
  d["v_hat_se"] = std::sqrt(fit.cov(k, k));
  d["augmented_tsls_check"] = fit.augmented_tsls_check;
  d["d_powers"] = fit.d_powers;
  r.diagnostics = d;
  return r;
}

Report make_report(const TslsFit& fit, double alpha, const std::vector<EffectEstimate>& effects) {
  Report r;
  r.method = "tsls";
  r.alpha = alpha;
  r.headline.push_back("Coefficients of the two-stage least squares estimators:");
  r.coefficients = coef_rows(fit.names, fit.coef, fit.cov, fit.coef.size(), double(fit.n - fit.coef.size()));
  for (std::size_t i = 0; i < effects.size(); ++i) r.estimates.push_back(row_from(effects.size() > 1 ? "CE" + std::to_string(i + 1) : "CE", effects[i]));
  json d;
  d["n"] = fit.n;
  d["sigma2"] = fit.sigma2;
  d["d_powers"] = fit.d_powers;
  r.diagnostics = d;
  return r;
}

Report make_report(const PretestResult& p, const std::vector<EffectEstimate>& effects) {
  const bool cf = p.chosen == PretestChoice::ControlFunction;
  Report r = cf ? make_report(p.cf, p.alpha, effects) : make_report(p.tsls, p.alpha, effects);
  r.method = "pretest";
  r.headline = {"Level " + format_number(p.alpha) + " pretest estimator is " +
                    (cf ? "control function estimator." : "two-stage least squares estimator."),
                "Coefficients of the pretest estimators:"};
  r.diagnostics["hausman_stat"] = p.hausman_stat;
  r.diagnostics["hausman_p_value"] = p.p_value;
  r.diagnostics["chosen"] = cf ? "cf" : "tsls";
  return r;
}

Report make_report(const CateResult& c, const Dataset& ds, double alpha) {
  Report r;
  r.method = "probitcf";
  r.alpha = alpha;
  r.report_invalid = true;
  const auto valid = names_of(ds, c.fit.valid_set);
  r.estimates.push_back({"Beta", c.beta_hat, c.beta_se, c.beta_lower, c.beta_upper, valid});
  r.estimates.push_back({"CATE", c.estimate, c.se, c.lower, c.upper, valid});
  r.invalid = names_of(ds, c.fit.invalid_detected);
  json d;
  d["n"] = ds.n();
  d["d1"] = c.d1;
  d["d2"] = c.d2;
  d["w0"] = std::vector<double>(c.w0.data(), c.w0.data() + c.w0.size());
  d["B"] = c.B;
  d["failures"] = c.failures;
  d["relevant"] = names_of(ds, c.fit.S_hat);
  d["rho_hat"] = c.fit.rho_hat;
  d["sigma_v_hat"] = c.fit.sigma_v_hat;
  r.diagnostics = d;
  return r;
}

}  // namespace robustiv::cli
