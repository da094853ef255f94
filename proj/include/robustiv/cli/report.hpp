#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "robustiv/control_function.hpp"
#include "robustiv/endogeneity.hpp"
#include "robustiv/probit_cf.hpp"
#include "robustiv/tsht.hpp"
#include "robustiv/uniform_ci.hpp"

namespace robustiv::cli {

struct EstimateRow {
  std::string label;
  double estimate = 0.0;
  double se = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  std::vector<std::string> valid;
};

struct IntervalRow {
  double lower = 0.0;
  double upper = 0.0;
};

struct CoefRow {
  std::string name;
  double estimate = 0.0;
  double se = 0.0;
  double t = 0.0;
  double p = 0.0;  // one-sided P(T > |t|) on the residual degrees of freedom
};

/// Serializable result of one subcommand. The JSON schema is documented in
/// README.md.
struct Report {
  std::string method;
  double alpha = 0.05;
  std::vector<std::string> headline;
  std::vector<EstimateRow> estimates;
  std::vector<CoefRow> coefficients;
  std::optional<IntervalRow> interval;
  bool report_invalid = false;
  std::vector<std::string> invalid;
  nlohmann::json diagnostics = nlohmann::json::object();
  std::vector<std::string> warnings;
};

nlohmann::json to_json(const Report& r);
Report report_from_json(const nlohmann::json& j);

/// Throws InvalidArgument if any numeric field is non-finite or a CI is
/// unordered.
void check_report(const Report& r);

/// Human-readable layout; numbers printed to 6 significant digits.
std::string render_text(const Report& r);

std::string format_number(double v);

Report make_report(const TshtReport& t, const Dataset& ds, double alpha);
Report make_report(const IntervalResult& ci, const IndexSet& S_hat, const Dataset& ds,
                   double alpha);
Report make_report(const EndoTestResult& e, const Dataset& ds);
Report make_report(const CfFit& fit, double alpha, const std::vector<EffectEstimate>& effects);
Report make_report(const TslsFit& fit, double alpha, const std::vector<EffectEstimate>& effects);
Report make_report(const PretestResult& p, const std::vector<EffectEstimate>& effects);
Report make_report(const CateResult& c, const Dataset& ds, double alpha);

}  // namespace robustiv::cli
