#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <sstream>
#include <vector>

#include "afs/regression.hpp"
#include "afs/stats.hpp"
#include "oracles.hpp"

using namespace afs;

namespace {

Dataset make_dataset(const std::vector<std::vector<double>>& x,
                     const std::vector<double>& y) {
  Dataset data;
  const std::size_t p = x.empty() ? 0 : x[0].size();
  for (std::size_t j = 0; j < p; ++j) {
    data.feature_order.push_back("f" + std::to_string(j));
  }
  data.features.resize(static_cast<Eigen::Index>(x.size()),
                       static_cast<Eigen::Index>(p));
  data.gold.resize(static_cast<Eigen::Index>(y.size()));
  for (std::size_t i = 0; i < x.size(); ++i) {
    data.row_ids.push_back("row" + std::to_string(i));
    for (std::size_t j = 0; j < p; ++j) {
      data.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = x[i][j];
    }
    data.gold(static_cast<Eigen::Index>(i)) = y[i];
  }
  return data;
}

Dataset random_dataset(std::mt19937& rng, int rows, int cols) {
  std::uniform_real_distribution<double> unit(-2.0, 2.0);
  std::vector<std::vector<double>> x(static_cast<std::size_t>(rows),
                                     std::vector<double>(static_cast<std::size_t>(cols)));
  std::vector<double> y(static_cast<std::size_t>(rows));
  for (auto& row : x) {
    for (double& v : row) v = unit(rng);
  }
  for (double& v : y) v = unit(rng);
  return make_dataset(x, y);
}

std::string report_fingerprint(const CvReport& report) {
  std::ostringstream out;
  out.precision(17);
  out << report.k << '|' << report.seed << '|' << report.r << '|' << report.mae
      << '|' << report.rms << '|';
  for (const FoldMetrics& fold : report.per_fold) {
    out << fold.fold << ',' << fold.rows << ',' << fold.mae << ',' << fold.rms
        << ',' << (fold.r.has_value() ? *fold.r : -99.0) << ';';
  }
  for (const auto& [row_id, value] : report.pooled_predictions) {
    out << row_id << '=' << value << ';';
  }
  return out.str();
}

}  // namespace

TEST_CASE("fit_linear recovers an exact linear relation") {
  std::vector<std::vector<double>> x;
  std::vector<double> y;
  for (int i = 0; i < 12; ++i) {
    const double v = static_cast<double>(i) - 4.0;
    x.push_back({v});
    y.push_back(3.0 * v + 1.0);
  }
  const AfsModel model = fit_linear(make_dataset(x, y));
  CHECK(model.coefficients(0) == doctest::Approx(3.0).epsilon(1e-9));
  CHECK(model.intercept == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("fit_linear on constant targets") {
  std::mt19937 rng(11);
  Dataset data = random_dataset(rng, 15, 3);
  data.gold.setConstant(2.5);
  const AfsModel model = fit_linear(data);
  for (Eigen::Index j = 0; j < 3; ++j) {
    CHECK(model.coefficients(j) == doctest::Approx(0.0).epsilon(1e-12));
  }
  CHECK(model.intercept == doctest::Approx(2.5).epsilon(1e-12));
}

TEST_CASE("fit_linear matches the independent normal-equation solver") {
  std::mt19937 rng(42);
  for (int trial = 0; trial < 25; ++trial) {
    const int rows = 20 + static_cast<int>(rng() % 81);
    const int cols = 1 + static_cast<int>(rng() % 8);
    const Dataset data = random_dataset(rng, rows, cols);
    const double ridge = (trial % 3 == 0) ? 0.0 : 1e-8;
    const AfsModel model = fit_linear(data, ridge);

    std::vector<std::vector<double>> x;
    std::vector<double> y;
    for (Eigen::Index i = 0; i < data.rows(); ++i) {
      std::vector<double> row;
      for (Eigen::Index j = 0; j < data.cols(); ++j) row.push_back(data.features(i, j));
      x.push_back(row);
      y.push_back(data.gold(i));
    }
    const oracle::OlsSolution reference = oracle::solve_normal_equations(x, y, ridge);
    REQUIRE(reference.coefficients.size() == static_cast<std::size_t>(cols));
    for (int j = 0; j < cols; ++j) {
      CHECK(model.coefficients(j) ==
            doctest::Approx(reference.coefficients[static_cast<std::size_t>(j)])
                .epsilon(1e-8));
    }
    CHECK(model.intercept == doctest::Approx(reference.intercept).epsilon(1e-8));
  }
}

TEST_CASE("fit_linear residuals are orthogonal to the design at ridge zero") {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    const Dataset data = random_dataset(rng, 40, 4);
    const AfsModel model = fit_linear(data, 0.0);
    const Eigen::VectorXd residuals =
        data.gold - predict(model, data.features);
    const double scale = data.gold.norm();
    for (Eigen::Index j = 0; j < data.cols(); ++j) {
      CHECK(std::abs(data.features.col(j).dot(residuals)) <= 1e-6 * scale);
    }
    CHECK(std::abs(residuals.sum()) <= 1e-6 * scale);
  }
}

TEST_CASE("ridge shrinkage is monotone") {
  std::mt19937 rng(23);
  const Dataset data = random_dataset(rng, 30, 5);
  double previous = std::numeric_limits<double>::infinity();
  for (double ridge : {0.0, 1e-6, 1e-3, 1e-1, 1.0, 10.0, 1e3}) {
    const AfsModel model = fit_linear(data, ridge);
    const double norm = model.coefficients.squaredNorm();
    CHECK(norm <= previous + 1e-12);
    previous = norm;
  }
}

TEST_CASE("fit_linear error conditions") {
  // Rank-deficient: duplicated column with ridge 0.
  std::vector<std::vector<double>> x;
  std::vector<double> y;
  for (int i = 0; i < 10; ++i) {
    const double v = static_cast<double>(i);
    x.push_back({v, 2.0 * v});
    y.push_back(v);
  }
  CHECK_THROWS_AS(fit_linear(make_dataset(x, y), 0.0), DataError);
  CHECK_NOTHROW(fit_linear(make_dataset(x, y), 1e-8));

  std::mt19937 rng(5);
  const Dataset tiny = random_dataset(rng, 3, 5);
  CHECK_THROWS_AS(fit_linear(tiny, 0.0), DataError);
  CHECK_THROWS_AS(fit_linear(random_dataset(rng, 10, 2), -1.0), ConfigError);
}

TEST_CASE("predict") {
  AfsModel model;
  model.feature_order = {"f"};
  model.coefficients = Eigen::VectorXd::Constant(1, 2.0);
  model.intercept = 1.0;

  FeatureVector fv;
  fv.names = {"f"};
  fv.families = {'N'};
  fv.values = Eigen::VectorXd::Constant(1, 3.0);
  CHECK(predict(model, fv) == doctest::Approx(7.0));

  SUBCASE("zero vector yields the intercept") {
    fv.values.setZero();
    CHECK(predict(model, fv) == doctest::Approx(1.0));
  }
  SUBCASE("feature name mismatch is an error") {
    fv.names = {"g"};
    CHECK_THROWS_AS(predict(model, fv), DataError);
  }
  SUBCASE("predict is linear up to the intercept") {
    std::mt19937 rng(1);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    AfsModel wide;
    wide.feature_order = {"a", "b", "c"};
    wide.coefficients = Eigen::Vector3d(0.5, -1.5, 2.0);
    wide.intercept = 0.7;
    for (int trial = 0; trial < 20; ++trial) {
      Eigen::MatrixXd u(1, 3), v(1, 3);
      for (int j = 0; j < 3; ++j) {
        u(0, j) = unit(rng);
        v(0, j) = unit(rng);
      }
      const double alpha = unit(rng);
      const double beta = unit(rng);
      const Eigen::MatrixXd combo = alpha * u + beta * v;
      const double lhs = predict(wide, combo)(0) - wide.intercept;
      const double rhs = alpha * (predict(wide, u)(0) - wide.intercept) +
                         beta * (predict(wide, v)(0) - wide.intercept);
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    }
  }
}

TEST_CASE("cross_validate on an exactly linear relation") {
  std::mt19937 rng(77);
  std::uniform_real_distribution<double> unit(-3.0, 3.0);
  std::vector<std::vector<double>> x;
  std::vector<double> y;
  for (int i = 0; i < 60; ++i) {
    const double a = unit(rng);
    const double b = unit(rng);
    x.push_back({a, b});
    y.push_back(1.5 * a - 0.5 * b + 2.0);
  }
  const Dataset data = make_dataset(x, y);
  const CvReport report = cross_validate(data, 10, 4242, 0.0);
  CHECK(report.r == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(report.mae < 1e-9);
  CHECK(report.rms < 1e-9);
  CHECK(report.per_fold.size() == 10);
  CHECK(report.pooled_predictions.size() == 60);
}

TEST_CASE("cross_validate fold sizes differ by at most one") {
  std::mt19937 rng(13);
  const Dataset data = random_dataset(rng, 47, 2);
  const CvReport report = cross_validate(data, 10, 1, 1e-8);
  int total = 0;
  for (const FoldMetrics& fold : report.per_fold) {
    CHECK(fold.rows >= 4);
    CHECK(fold.rows <= 5);
    total += fold.rows;
  }
  CHECK(total == 47);

  // Every row predicted exactly once, in dataset order.
  REQUIRE(report.pooled_predictions.size() == 47);
  for (std::size_t i = 0; i < report.pooled_predictions.size(); ++i) {
    CHECK(report.pooled_predictions[i].first == data.row_ids[i]);
  }
}

TEST_CASE("cross_validate is deterministic for a fixed seed") {
  std::mt19937 rng(31);
  const Dataset data = random_dataset(rng, 35, 3);
  const CvReport first = cross_validate(data, 7, 2024, 1e-8);
  const CvReport second = cross_validate(data, 7, 2024, 1e-8);
  CHECK(report_fingerprint(first) == report_fingerprint(second));

  const CvReport other_seed = cross_validate(data, 7, 2025, 1e-8);
  CHECK(report_fingerprint(first) != report_fingerprint(other_seed));
}

TEST_CASE("cross_validate rejects undersized datasets") {
  std::mt19937 rng(3);
  const Dataset data = random_dataset(rng, 5, 1);
  CHECK_THROWS_AS(cross_validate(data, 10, 1, 1e-8), DataError);
  CHECK_THROWS_AS(cross_validate(data, 1, 1, 1e-8), ConfigError);
}

TEST_CASE("absolute_errors aligns with the dataset") {
  std::mt19937 rng(8);
  const Dataset data = random_dataset(rng, 20, 2);
  const CvReport report = cross_validate(data, 5, 9, 1e-8);
  const std::vector<double> errors = absolute_errors(report, data);
  REQUIRE(errors.size() == 20);
  for (std::size_t i = 0; i < errors.size(); ++i) {
    const double expected =
        std::abs(report.pooled_predictions[i].second -
                 data.gold(static_cast<Eigen::Index>(i)));
    CHECK(errors[i] == doctest::Approx(expected).epsilon(1e-15));
  }
}
