#pragma once

#include <string>
#include <utility>
#include <vector>

#include "robustiv/dataset.hpp"
#include "robustiv/regression.hpp"

namespace robustiv {

using IndexSet = std::vector<int>;
using BoolMatrix = std::vector<std::vector<bool>>;

struct VoteMatrices {
  BoolMatrix Pi_tilde;  // row j: IV j's view of the others
  BoolMatrix Pi_hat;    // elementwise min(Pi_tilde, Pi_tilde')
};

/// Outcome of the two thresholding stages. Indices in S_hat and V_hats are
/// instrument columns of the dataset; the matrices are indexed by position
/// within S_hat.
struct SelectionResult {
  IndexSet S_hat;
  BoolMatrix Pi_tilde;
  BoolMatrix Pi_hat;
  std::vector<int> VM;  // votes received, self-vote included
  std::vector<IndexSet> V_hats;
  bool majority_ok = false;
};

enum class EstimateMethod { TSHT, ControlFunction, TSLS };

struct EffectEstimate {
  double beta_hat = 0.0;
  double se = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  double alpha = 0.05;
  IndexSet valid_set;
  EstimateMethod method = EstimateMethod::TSHT;
};

/// beta_hat -/+ z_{1-alpha/2} se.
EffectEstimate normal_interval(double beta_hat, double se, double alpha, EstimateMethod method);

/// First stage: { j : |gamma_j| >= lambda1 sqrt(V^gamma_jj / n) }. Throws
/// NoRelevantIV when empty.
IndexSet select_relevant(const ReducedForm& rf, double lambda1);

VoteMatrices vote_matrix(const ReducedForm& rf, const IndexSet& S_hat, double lambda2);

/// Delta-method standard error of pi^[j]_k = Gamma_k - (Gamma_j / gamma_j) gamma_k,
/// using the 4x4 block of the joint covariance over (Gamma_k, gamma_k, Gamma_j, gamma_j).
double pi_jk_se(const ReducedForm& rf, const MatrixXd& joint, int j, int k);

/// Column sums of Pi_hat (diagonal included).
std::vector<int> vote_counts(const BoolMatrix& Pi_hat);

/// Majority-and-plurality rule. Returns positions within S_hat.
IndexSet select_valid_mp(const BoolMatrix& Pi_hat);

/// Maximum-clique rule. Returns positions within S_hat, one set per clique.
std::vector<IndexSet> select_valid_mc(const BoolMatrix& Pi_hat);

/// One-step efficient estimator over the valid set (instrument indices).
EffectEstimate tsht_estimate(const ReducedForm& rf, const IndexSet& V_hat, double alpha);

struct TshtEstimate {
  EffectEstimate estimate;
  std::vector<std::string> valid_names;
  std::vector<std::string> invalid_names;  // S_hat \ V_hat
};

struct TshtReport {
  ReducedForm rf;
  SelectionResult selection;
  std::vector<TshtEstimate> estimates;  // one per valid set
  std::vector<std::string> relevant_names;
  std::vector<std::string> weak_names;  // screened out at the first stage
  Voting voting = Voting::MaxClique;
  double lambda1 = 0.0;
  double lambda2 = 0.0;
};

/// Runs both thresholding stages and the voting rule on a fitted reduced form.
SelectionResult tsht_select(const ReducedForm& rf, double lambda1, double lambda2, Voting voting);

TshtReport tsht(const Dataset& ds, const AnalysisOptions& opts);

}  // namespace robustiv
