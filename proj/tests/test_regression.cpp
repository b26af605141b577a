#include <doctest.h>

#include "netid/error.hpp"
#include "netid/regression.hpp"

using namespace netid;

TEST_CASE("lag matrix rows hold past values with zero padding") {
  Eigen::VectorXd w(5);
  w << 1, 2, 3, 4, 5;
  const auto a = lag_matrix(w, 2);
  Eigen::MatrixXd expected(5, 2);
  expected << 0, 0, 1, 0, 2, 1, 3, 2, 4, 3;
  CHECK(a == expected);
  CHECK_THROWS_AS((void)lag_matrix(w, 6), Error);
}

TEST_CASE("stacked regressors concatenate per source") {
  Eigen::MatrixXd data(2, 4);
  data << 1, 2, 3, 4, 10, 20, 30, 40;
  const TimeSeriesDataset ds(data);
  const std::vector<std::size_t> sources{1, 0};
  const auto x = stacked_regressors(ds, sources, 1);
  CHECK(x.col(0) == lag_matrix(ds.signal(1), 1).col(0));
  CHECK(x.col(1) == lag_matrix(ds.signal(0), 1).col(0));
  CHECK(build_regressors(ds, 0, 1) == lag_matrix(ds.signal(0), 1));
}

TEST_CASE("least squares needs more samples than regressors") {
  const TimeSeriesDataset ds(Eigen::MatrixXd::Random(2, 6));
  try {
    (void)ols_fit(ds, 3, full_parent_sets(2));
    FAIL("expected insufficient data");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::insufficient_data);
  }
}

TEST_CASE("least-squares residuals are orthogonal to the regressors") {
  const TimeSeriesDataset ds(Eigen::MatrixXd::Random(3, 60));
  const auto fit = ols_fit(ds, 2, full_parent_sets(3));
  for (std::size_t j = 0; j < 3; ++j) {
    const auto x = stacked_regressors(ds, fit.parent_sets[j], 2);
    const Eigen::VectorXd e = fit.residuals.row(static_cast<Eigen::Index>(j)).transpose();
    CHECK((x.transpose() * e).cwiseAbs().maxCoeff() < 1e-10);
  }
}
