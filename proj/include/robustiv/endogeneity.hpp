#pragma once

#include <string>
#include <vector>

#include "robustiv/dataset.hpp"
#include "robustiv/tsht.hpp"

namespace robustiv {

enum class EndoSeMethod { Influence, Bootstrap };

struct EndoOptions {
  bool invalid = true;
  EndoSeMethod se_method = EndoSeMethod::Influence;
  int bootstrap_reps = 500;
};

struct EndoTestResult {
  double sigma12_hat = 0.0;
  double se = 0.0;
  double z_stat = 0.0;
  double p_value = 1.0;
  bool rejected = false;
  double alpha = 0.05;
  double beta_hat = 0.0;
  double Theta11 = 0.0;
  double Theta22 = 0.0;
  double Theta12 = 0.0;
  IndexSet S_hat;
  IndexSet valid_set;
  std::vector<std::string> valid_names;
  std::vector<std::string> invalid_names;
  EndoSeMethod se_method = EndoSeMethod::Influence;
};

/// Pieces of the sigma12 statistic for a fixed valid set.
struct Sigma12Estimate {
  double beta_hat = 0.0;
  double Theta11 = 0.0;
  double Theta22 = 0.0;
  double Theta12 = 0.0;
  double sigma12 = 0.0;
  double influence_se = 0.0;
};

Sigma12Estimate sigma12_estimate(const Dataset& ds, const ReducedForm& rf, const IndexSet& valid);

EndoTestResult endo_test(const Dataset& ds, const EndoOptions& eopts, const AnalysisOptions& opts);

}  // namespace robustiv
