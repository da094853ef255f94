#include "robustiv/tsht.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "robustiv/clique.hpp"
#include "robustiv/stats.hpp"

namespace robustiv {

EffectEstimate normal_interval(double beta_hat, double se, double alpha, EstimateMethod method) {
  const double z = stats::normal_quantile(1.0 - alpha / 2.0);
  EffectEstimate e;
  e.beta_hat = beta_hat;
  e.se = se;
  e.lower = beta_hat - z * se;
  e.upper = beta_hat + z * se;
  e.alpha = alpha;
  e.method = method;
  return e;
}

IndexSet select_relevant(const ReducedForm& rf, double lambda1) {
  if (!(lambda1 > 0.0)) throw Error(ErrorCode::InvalidArgument, "tuning.1st must be positive");
  IndexSet s;
  const double n = double(rf.n);
  for (int j = 0; j < rf.pz(); ++j)
    if (std::abs(rf.gamma_hat(j)) >= lambda1 * std::sqrt(rf.V_gamma(j, j) / n)) s.push_back(j);
  if (s.empty()) throw Error(ErrorCode::NoRelevantIV, "no instrument passed the first-stage threshold");
  return s;
}

double pi_jk_se(const ReducedForm& rf, const MatrixXd& joint, int j, int k) {
  const int p = static_cast<int>(rf.pz());
  const double gj = rf.gamma_hat(j);
  const double gk = rf.gamma_hat(k);
  const double beta_j = rf.Gamma_hat(j) / gj;
  const int idx[4] = {k, p + k, j, p + j};
  const double grad[4] = {1.0, -beta_j, -gk / gj, beta_j * gk / gj};
  double var = 0.0;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) var += grad[a] * joint(idx[a], idx[b]) * grad[b];
  return std::sqrt(std::max(var, 0.0) / double(rf.n));
}

VoteMatrices vote_matrix(const ReducedForm& rf, const IndexSet& S_hat, double lambda2) {
  if (S_hat.empty()) throw Error(ErrorCode::InvalidArgument, "relevant set is empty");
  if (!(lambda2 > 0.0)) throw Error(ErrorCode::InvalidArgument, "tuning.2nd must be positive");
  for (int j : S_hat)
    if (std::abs(rf.gamma_hat(j)) < 1e-12)
      throw Error(ErrorCode::DivisionGuard, "first-stage coefficient of a relevant IV is numerically zero");

  const MatrixXd joint = rf.joint_cov();
  const auto s = S_hat.size();
  VoteMatrices out;
  out.Pi_tilde.assign(s, std::vector<bool>(s, false));
  for (std::size_t a = 0; a < s; ++a) {
    const int j = S_hat[a];
    const double beta_j = rf.Gamma_hat(j) / rf.gamma_hat(j);
    out.Pi_tilde[a][a] = true;
    for (std::size_t b = 0; b < s; ++b) {
      if (a == b) continue;
      const int k = S_hat[b];
      const double pi = rf.Gamma_hat(k) - beta_j * rf.gamma_hat(k);
      out.Pi_tilde[a][b] = std::abs(pi) <= lambda2 * pi_jk_se(rf, joint, j, k);
    }
  }
  out.Pi_hat = out.Pi_tilde;
  for (std::size_t a = 0; a < s; ++a)
    for (std::size_t b = 0; b < s; ++b) out.Pi_hat[a][b] = out.Pi_tilde[a][b] && out.Pi_tilde[b][a];
  return out;
}

std::vector<int> vote_counts(const BoolMatrix& Pi_hat) {
  std::vector<int> vm(Pi_hat.size(), 0);
  for (const auto& row : Pi_hat)
    for (std::size_t k = 0; k < row.size(); ++k) vm[k] += row[k] ? 1 : 0;
  return vm;
}

IndexSet select_valid_mp(const BoolMatrix& Pi_hat) {
  const auto vm = vote_counts(Pi_hat);
  const int top = *std::max_element(vm.begin(), vm.end());
  const double half = double(Pi_hat.size()) / 2.0;
  IndexSet v;
  for (std::size_t k = 0; k < vm.size(); ++k)
    if (double(vm[k]) > half || vm[k] == top) v.push_back(static_cast<int>(k));
  return v;
}

std::vector<IndexSet> select_valid_mc(const BoolMatrix& Pi_hat) {
  return max_cliques(VoteGraph(Pi_hat));
}

namespace {

MatrixXd take(const MatrixXd& m, const IndexSet& rows, const IndexSet& cols) {
  MatrixXd out(rows.size(), cols.size());
  for (std::size_t a = 0; a < rows.size(); ++a)
    for (std::size_t b = 0; b < cols.size(); ++b) out(a, b) = m(rows[a], cols[b]);
  return out;
}

VectorXd take(const VectorXd& v, const IndexSet& idx) {
  VectorXd out(idx.size());
  for (std::size_t a = 0; a < idx.size(); ++a) out(a) = v(idx[a]);
  return out;
}

}  // namespace

EffectEstimate tsht_estimate(const ReducedForm& rf, const IndexSet& V_hat, double alpha) {
  if (V_hat.empty()) throw Error(ErrorCode::InvalidArgument, "valid set is empty");
  const int q = static_cast<int>(rf.Sigma_W.rows());
  IndexSet comp;
  for (int c = 0; c < q; ++c)
    if (std::find(V_hat.begin(), V_hat.end(), c) == V_hat.end()) comp.push_back(c);

  const MatrixXd s_vv = take(rf.Sigma_W, V_hat, V_hat);
  const MatrixXd s_vc = take(rf.Sigma_W, V_hat, comp);
  const MatrixXd s_cc = take(rf.Sigma_W, comp, comp);
  Eigen::LDLT<MatrixXd> cc(s_cc);
  if (cc.info() != Eigen::Success)
    throw Error(ErrorCode::SingularWeight, "second-moment block of the remaining columns is singular");
  const MatrixXd a_tilde = s_vv - s_vc * cc.solve(s_vc.transpose());

  const VectorXd g = take(rf.gamma_hat, V_hat);
  const VectorXd G = take(rf.Gamma_hat, V_hat);
  const double beta_tilde = g.dot(a_tilde * G) / g.dot(a_tilde * g);

  auto v_at = [&](double b) {
    return MatrixXd(take(rf.V_Gamma, V_hat, V_hat) - 2.0 * b * take(rf.C, V_hat, V_hat) +
                    b * b * take(rf.V_gamma, V_hat, V_hat));
  };
  const MatrixXd v_tilde = v_at(beta_tilde);
  Eigen::LDLT<MatrixXd> vt(v_tilde);
  if (vt.info() != Eigen::Success || !(vt.vectorD().array() > 0.0).all())
    throw Error(ErrorCode::SingularWeight, "weight matrix is not invertible");
  MatrixXd a_hat = vt.solve(MatrixXd::Identity(v_tilde.rows(), v_tilde.cols()));
  a_hat = 0.5 * (a_hat + a_hat.transpose());

  const double denom = g.dot(a_hat * g);
  const double beta_hat = g.dot(a_hat * G) / denom;
  const VectorXd ag = a_hat * g;
  const double var = ag.dot(v_at(beta_hat) * ag) / (double(rf.n) * denom * denom);

  EffectEstimate e = normal_interval(beta_hat, std::sqrt(std::max(var, 0.0)), alpha, EstimateMethod::TSHT);
  e.valid_set = V_hat;
  return e;
}

SelectionResult tsht_select(const ReducedForm& rf, double lambda1, double lambda2, Voting voting) {
  SelectionResult sel;
  sel.S_hat = select_relevant(rf, lambda1);
  auto votes = vote_matrix(rf, sel.S_hat, lambda2);
  sel.Pi_tilde = std::move(votes.Pi_tilde);
  sel.Pi_hat = std::move(votes.Pi_hat);
  sel.VM = vote_counts(sel.Pi_hat);

  std::vector<IndexSet> positions;
  if (voting == Voting::MP)
    positions.push_back(select_valid_mp(sel.Pi_hat));
  else
    positions = select_valid_mc(sel.Pi_hat);
  for (const auto& pos : positions) {
    IndexSet v;
    for (int a : pos) v.push_back(sel.S_hat[a]);
    sel.V_hats.push_back(std::move(v));
  }
  sel.majority_ok = double(sel.V_hats.front().size()) > double(sel.S_hat.size()) / 2.0;
  return sel;
}

TshtReport tsht(const Dataset& ds, const AnalysisOptions& opts) {
  opts.validate();
  TshtReport rep;
  rep.rf = reduced_form_fit(ds);
  rep.voting = opts.voting;
  rep.lambda1 = opts.lambda1(ds.n());
  rep.lambda2 = opts.lambda2(ds.n());
  rep.selection = tsht_select(rep.rf, rep.lambda1, rep.lambda2, opts.voting);

  const auto& s = rep.selection.S_hat;
  for (int j = 0; j < ds.pz(); ++j) {
    if (std::find(s.begin(), s.end(), j) != s.end())
      rep.relevant_names.push_back(ds.z_names[j]);
    else
      rep.weak_names.push_back(ds.z_names[j]);
  }
  for (const auto& v : rep.selection.V_hats) {
    TshtEstimate est;
    est.estimate = tsht_estimate(rep.rf, v, opts.alpha);
    for (int j : s) {
      if (std::find(v.begin(), v.end(), j) != v.end())
        est.valid_names.push_back(ds.z_names[j]);
      else
        est.invalid_names.push_back(ds.z_names[j]);
    }
    rep.estimates.push_back(std::move(est));
  }
  return rep;
}

}  // namespace robustiv
