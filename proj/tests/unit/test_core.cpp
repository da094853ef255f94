#include <cmath>
#include <limits>

#include "doctest.h"
#include "oracle.hpp"
#include "robustiv/dataset.hpp"

using namespace robustiv;

namespace {

ColumnTable small_table(std::size_t rows) {
  ColumnTable t;
  t.names = {"y", "d", "z1", "z2", "x1"};
  t.columns.assign(5, {});
  for (std::size_t i = 0; i < rows; ++i) {
    const double u = double(i);
    t.columns[0].push_back(std::sin(u));
    t.columns[1].push_back(std::cos(1.3 * u));
    t.columns[2].push_back(u * u * 0.1);
    t.columns[3].push_back(std::sin(2.7 * u + 1.0));
    t.columns[4].push_back(std::cos(0.4 * u) + 0.01 * u);
  }
  return t;
}

ColumnSpec small_spec() { return {"y", "d", {"z1", "z2"}, {"x1"}, true}; }

}  // namespace

TEST_CASE("Mroz complete cases give n = 428 with three instruments and three covariates") {
  ValidationSummary s;
  ColumnSpec spec{"lwage", "educ", {"motheduc", "fatheduc", "huseduc"}, {"exper", "expersq", "age"}, true};
  const Dataset ds = cli::read_csv(oracle::data_path("mroz.csv"), spec, &s);
  CHECK(ds.n() == 428);
  CHECK(ds.pz() == 3);
  CHECK(ds.px() == 3);
  CHECK(s.n == 428);
  CHECK(s.dropped_rows == 753 - 428);
}

TEST_CASE("constant instrument is rejected") {
  ColumnTable t = small_table(20);
  std::fill(t.columns[3].begin(), t.columns[3].end(), 2.0);
  try {
    validate_dataset(t, small_spec());
    FAIL("expected ConstantColumn");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ConstantColumn);
  }
}

TEST_CASE("one missing row out of ten is dropped") {
  ColumnTable t = small_table(10);
  t.columns[2][4] = std::numeric_limits<double>::quiet_NaN();
  ValidationSummary s;
  const Dataset ds = validate_dataset(t, small_spec(), &s);
  CHECK(ds.n() == 9);
  CHECK(s.dropped_rows == 1);
  // Row order is preserved after filtering.
  CHECK(ds.y(3) == t.columns[0][3]);
  CHECK(ds.y(4) == t.columns[0][5]);
  CHECK(ds.y(8) == t.columns[0][9]);
}

TEST_CASE("missing values without drop-na are an error") {
  ColumnTable t = small_table(10);
  t.columns[1][2] = std::numeric_limits<double>::quiet_NaN();
  ColumnSpec spec = small_spec();
  spec.drop_na = false;
  CHECK_THROWS_AS(validate_dataset(t, spec), Error);
}

TEST_CASE("validation errors") {
  ColumnTable t = small_table(10);
  ColumnSpec spec = small_spec();
  spec.instruments.push_back("nope");
  try {
    validate_dataset(t, spec);
    FAIL("expected MissingColumn");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::MissingColumn);
  }
  try {
    validate_dataset(small_table(4), small_spec());
    FAIL("expected TooFewObservations");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::TooFewObservations);
  }
  ColumnTable inf = small_table(10);
  inf.columns[0][1] = std::numeric_limits<double>::infinity();
  try {
    validate_dataset(inf, small_spec());
    FAIL("expected NonFinite");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NonFinite);
  }
}

TEST_CASE("validation is idempotent") {
  const Dataset a = validate_dataset(small_table(15), small_spec());
  const Dataset b = validate_dataset(a);
  CHECK(a.y == b.y);
  CHECK(a.d == b.d);
  CHECK(a.z == b.z);
  CHECK(a.x == b.x);
  CHECK(a.z_names == b.z_names);
  CHECK(a.x_names == b.x_names);
}

TEST_CASE("unnamed instruments are named Z1..Zp") {
  Dataset ds;
  ds.y = VectorXd::LinSpaced(8, 0.0, 1.0);
  ds.d = VectorXd::LinSpaced(8, 1.0, 3.0).array().sin();
  ds.z = MatrixXd(8, 2);
  ds.z.col(0) = VectorXd::LinSpaced(8, -1.0, 1.0).array().square();
  ds.z.col(1) = VectorXd::LinSpaced(8, 0.0, 2.0).array().exp();
  const Dataset v = validate_dataset(ds);
  CHECK(v.z_names == std::vector<std::string>{"Z1", "Z2"});
  CHECK(v.px() == 0);
  const MatrixXd w = v.w_design();
  CHECK(w.cols() == 3);
  CHECK(w.col(2).isOnes());
}

TEST_CASE("analysis options") {
  AnalysisOptions o;
  CHECK(o.lambda1(100) == doctest::Approx(std::sqrt(std::log(100.0))));
  o.tuning_2nd = 2.5;
  CHECK(o.lambda2(100) == 2.5);
  o.alpha = 1.0;
  CHECK_THROWS_AS(o.validate(), Error);
  o.alpha = 0.05;
  o.tuning_1st = 0.0;
  CHECK_THROWS_AS(o.validate(), Error);
}
