#include "robustiv/dataset.hpp"

#include <algorithm>
#include <cmath>

namespace robustiv {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::MissingColumn: return "MissingColumn";
    case ErrorCode::TooFewObservations: return "TooFewObservations";
    case ErrorCode::ConstantColumn: return "ConstantColumn";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::NotConverged: return "NotConverged";
    case ErrorCode::OneClassOnly: return "OneClassOnly";
    case ErrorCode::NoRelevantIV: return "NoRelevantIV";
    case ErrorCode::DivisionGuard: return "DivisionGuard";
    case ErrorCode::SingularWeight: return "SingularWeight";
    case ErrorCode::EmptyGraph: return "EmptyGraph";
    case ErrorCode::EmptySearchSet: return "EmptySearchSet";
    case ErrorCode::UnderIdentified: return "UnderIdentified";
    case ErrorCode::TooManyFailures: return "TooManyFailures";
  }
  return "Unknown";
}

bool is_statistical(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::RankDeficient:
    case ErrorCode::NotConverged:
    case ErrorCode::OneClassOnly:
    case ErrorCode::NoRelevantIV:
    case ErrorCode::DivisionGuard:
    case ErrorCode::SingularWeight:
    case ErrorCode::EmptySearchSet:
    case ErrorCode::UnderIdentified:
    case ErrorCode::TooManyFailures:
      return true;
    default:
      return false;
  }
}

MatrixXd Dataset::w_design() const {
  MatrixXd w(n(), pz() + px() + 1);
  w.leftCols(pz()) = z;
  w.middleCols(pz(), px()) = x;
  w.col(pz() + px()).setOnes();
  return w;
}

Dataset Dataset::take_rows(const std::vector<std::ptrdiff_t>& rows) const {
  Dataset out;
  const auto m = static_cast<std::ptrdiff_t>(rows.size());
  out.y.resize(m);
  out.d.resize(m);
  out.z.resize(m, pz());
  out.x.resize(m, px());
  for (std::ptrdiff_t i = 0; i < m; ++i) {
    const auto r = rows[static_cast<std::size_t>(i)];
    out.y(i) = y(r);
    out.d(i) = d(r);
    out.z.row(i) = z.row(r);
    out.x.row(i) = x.row(r);
  }
  out.z_names = z_names;
  out.x_names = x_names;
  return out;
}

std::optional<std::size_t> ColumnTable::find(const std::string& name) const {
  auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) return std::nullopt;
  return static_cast<std::size_t>(it - names.begin());
}

namespace {

bool is_constant(const Eigen::Ref<const VectorXd>& col) {
  if (col.size() == 0) return true;
  const double first = col(0);
  return (col.array() == first).all();
}

void check_dataset(const Dataset& ds) {
  const auto n = ds.n();
  if (ds.d.size() != n || ds.z.rows() != n || ds.x.rows() != n)
    throw Error(ErrorCode::DimensionMismatch, "y, d, z and x must have the same number of rows");
  if (static_cast<std::ptrdiff_t>(ds.z_names.size()) != ds.pz() ||
      static_cast<std::ptrdiff_t>(ds.x_names.size()) != ds.px())
    throw Error(ErrorCode::DimensionMismatch, "column name count does not match column count");
  if (ds.pz() < 1) throw Error(ErrorCode::InvalidArgument, "at least one instrument is required");
  if (n <= ds.pz() + ds.px() + 1)
    throw Error(ErrorCode::TooFewObservations,
                "n = " + std::to_string(n) + " must exceed p_z + p_x + 1 = " +
                    std::to_string(ds.pz() + ds.px() + 1));
  if (!ds.y.allFinite() || !ds.d.allFinite() || !ds.z.allFinite() || !ds.x.allFinite())
    throw Error(ErrorCode::NonFinite, "dataset contains non-finite values");
  for (std::ptrdiff_t j = 0; j < ds.pz(); ++j)
    if (is_constant(ds.z.col(j)))
      throw Error(ErrorCode::ConstantColumn, "instrument '" + ds.z_names[j] + "' is constant");
  for (std::ptrdiff_t j = 0; j < ds.px(); ++j)
    if (is_constant(ds.x.col(j)))
      throw Error(ErrorCode::ConstantColumn, "covariate '" + ds.x_names[j] + "' is constant");
}

}  // namespace

Dataset validate_dataset(Dataset ds) {
  if (ds.z_names.empty())
    for (std::ptrdiff_t j = 0; j < ds.pz(); ++j) ds.z_names.push_back("Z" + std::to_string(j + 1));
  if (ds.x_names.empty())
    for (std::ptrdiff_t j = 0; j < ds.px(); ++j) ds.x_names.push_back("X" + std::to_string(j + 1));
  if (ds.x.cols() == 0) ds.x.resize(ds.y.size(), 0);
  check_dataset(ds);
  return ds;
}

Dataset validate_dataset(const ColumnTable& table, const ColumnSpec& spec,
                         ValidationSummary* summary) {
  auto column = [&](const std::string& name) -> const std::vector<double>& {
    auto idx = table.find(name);
    if (!idx) throw Error(ErrorCode::MissingColumn, "column '" + name + "' not found");
    return table.columns[*idx];
  };

  std::vector<const std::vector<double>*> selected;
  selected.push_back(&column(spec.outcome));
  selected.push_back(&column(spec.treatment));
  for (const auto& name : spec.instruments) selected.push_back(&column(name));
  for (const auto& name : spec.covariates) selected.push_back(&column(name));

  const std::size_t rows = table.rows();
  std::vector<std::ptrdiff_t> keep;
  keep.reserve(rows);
  for (std::size_t i = 0; i < rows; ++i) {
    bool missing = false;
    for (const auto* col : selected) missing = missing || std::isnan((*col)[i]);
    if (missing && spec.drop_na) continue;
    keep.push_back(static_cast<std::ptrdiff_t>(i));
  }

  const auto n = static_cast<std::ptrdiff_t>(keep.size());
  const auto pz = static_cast<std::ptrdiff_t>(spec.instruments.size());
  const auto px = static_cast<std::ptrdiff_t>(spec.covariates.size());
  Dataset ds;
  ds.y.resize(n);
  ds.d.resize(n);
  ds.z.resize(n, pz);
  ds.x.resize(n, px);
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto r = static_cast<std::size_t>(keep[static_cast<std::size_t>(i)]);
    ds.y(i) = (*selected[0])[r];
    ds.d(i) = (*selected[1])[r];
    for (std::ptrdiff_t j = 0; j < pz; ++j) ds.z(i, j) = (*selected[2 + j])[r];
    for (std::ptrdiff_t j = 0; j < px; ++j) ds.x(i, j) = (*selected[2 + pz + j])[r];
  }
  ds.z_names = spec.instruments;
  ds.x_names = spec.covariates;
  check_dataset(ds);

  if (summary) {
    summary->n = n;
    summary->pz = pz;
    summary->px = px;
    summary->dropped_rows = rows - keep.size();
  }
  return ds;
}

void AnalysisOptions::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw Error(ErrorCode::InvalidArgument, "alpha must lie in (0, 1)");
  if (tuning_1st && !(*tuning_1st > 0.0))
    throw Error(ErrorCode::InvalidArgument, "tuning.1st must be positive");
  if (tuning_2nd && !(*tuning_2nd > 0.0))
    throw Error(ErrorCode::InvalidArgument, "tuning.2nd must be positive");
}

}  // namespace robustiv
