#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "robustiv/error.hpp"

namespace robustiv {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using Eigen::ArrayXd;

/// Outcome, treatment, candidate instruments and covariates for n units.
///
/// Construct through validate_dataset(); a Dataset obtained that way always
/// satisfies the documented invariants (equal lengths, n > p_z + p_x + 1,
/// finite entries, no constant instrument or covariate column). The intercept
/// is never stored here; estimators append it to their designs.
struct Dataset {
  VectorXd y;
  VectorXd d;
  MatrixXd z;
  MatrixXd x;  // may have zero columns
  std::vector<std::string> z_names;
  std::vector<std::string> x_names;

  std::ptrdiff_t n() const { return y.size(); }
  std::ptrdiff_t pz() const { return z.cols(); }
  std::ptrdiff_t px() const { return x.cols(); }

  /// W = (Z, X, 1), the reduced-form design.
  MatrixXd w_design() const;

  /// Rows selected by index (with repetition), used by the pairs bootstrap.
  Dataset take_rows(const std::vector<std::ptrdiff_t>& rows) const;
};

/// A raw, column-oriented numeric table. Missing cells are stored as NaN.
struct ColumnTable {
  std::vector<std::string> names;
  std::vector<std::vector<double>> columns;

  std::size_t rows() const { return columns.empty() ? 0 : columns.front().size(); }
  std::optional<std::size_t> find(const std::string& name) const;
};

struct ColumnSpec {
  std::string outcome;
  std::string treatment;
  std::vector<std::string> instruments;
  std::vector<std::string> covariates;
  bool drop_na = true;
};

struct ValidationSummary {
  std::ptrdiff_t n = 0;
  std::ptrdiff_t pz = 0;
  std::ptrdiff_t px = 0;
  std::size_t dropped_rows = 0;
};

Dataset validate_dataset(const ColumnTable& table, const ColumnSpec& spec,
                         ValidationSummary* summary = nullptr);

/// Checks the invariants of an already-assembled dataset and fills in default
/// instrument names (Z1..Zp) and covariate names (X1..Xp) when absent.
Dataset validate_dataset(Dataset ds);

enum class Voting { MaxClique, MP };

struct AnalysisOptions {
  double alpha = 0.05;
  std::optional<double> tuning_1st;  // default sqrt(log n)
  std::optional<double> tuning_2nd;  // default sqrt(log n)
  Voting voting = Voting::MaxClique;
  std::uint64_t seed = 0;

  double lambda1(std::ptrdiff_t n) const { return tuning_1st.value_or(std::sqrt(std::log(double(n)))); }
  double lambda2(std::ptrdiff_t n) const { return tuning_2nd.value_or(std::sqrt(std::log(double(n)))); }

  void validate() const;
};

}  // namespace robustiv
