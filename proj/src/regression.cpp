#include "afs/regression.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <Eigen/Dense>

#include "afs/errors.hpp"
#include "afs/stats.hpp"

namespace afs {
namespace {

// Portable Fisher-Yates; std::shuffle's draw sequence is implementation
// defined, this one is pinned by the seed on every platform.
std::vector<Eigen::Index> shuffled_indices(Eigen::Index n, std::uint64_t seed) {
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  std::mt19937_64 rng(seed);
  for (Eigen::Index i = n - 1; i > 0; --i) {
    const std::uint64_t bound = static_cast<std::uint64_t>(i) + 1;
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t draw;
    do {
      draw = rng();
    } while (draw >= limit);
    std::swap(idx[static_cast<std::size_t>(i)],
              idx[static_cast<std::size_t>(draw % bound)]);
  }
  return idx;
}

AfsModel fit_centered(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                      const std::vector<std::string>& feature_order, double ridge) {
  const Eigen::Index p = x.cols();
  const Eigen::RowVectorXd x_mean = x.colwise().mean();
  const double y_mean = y.mean();
  const Eigen::MatrixXd xc = x.rowwise() - x_mean;
  const Eigen::VectorXd yc = y.array() - y_mean;

  AfsModel model;
  model.feature_order = feature_order;
  model.ridge = ridge;
  if (ridge == 0.0) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(xc);
    if (qr.rank() < p) {
      throw DataError("fit_linear: singular system; centered features are "
                      "rank deficient and ridge is 0");
    }
    model.coefficients = qr.solve(yc);
  } else {
    const Eigen::MatrixXd gram =
        xc.transpose() * xc + ridge * Eigen::MatrixXd::Identity(p, p);
    model.coefficients = Eigen::LDLT<Eigen::MatrixXd>(gram).solve(xc.transpose() * yc);
  }
  model.intercept = y_mean - x_mean * model.coefficients;
  return model;
}

}  // namespace

AfsModel fit_linear(const Dataset& data, double ridge) {
  if (ridge < 0.0) {
    throw ConfigError("fit_linear: ridge must be nonnegative");
  }
  if (data.cols() == 0) {
    throw DataError("fit_linear: dataset has no features");
  }
  if (data.rows() < 2 ||
      (ridge == 0.0 && data.rows() < data.cols() + 1)) {
    throw DataError("fit_linear: too few rows for the number of features");
  }
  return fit_centered(data.features, data.gold, data.feature_order, ridge);
}

double predict(const AfsModel& model, const FeatureVector& fv) {
  if (fv.names != model.feature_order) {
    throw DataError("predict: feature vector does not match the model's "
                    "feature order");
  }
  return model.intercept + model.coefficients.dot(fv.values);
}

Eigen::VectorXd predict(const AfsModel& model, const Eigen::MatrixXd& features) {
  if (features.cols() != model.coefficients.size()) {
    throw DataError("predict: feature count mismatch");
  }
  return (features * model.coefficients).array() + model.intercept;
}

CvReport cross_validate(const Dataset& data, int k, std::uint64_t seed,
                        double ridge) {
  const Eigen::Index n = data.rows();
  if (k < 2) {
    throw ConfigError("cross_validate: k must be >= 2");
  }
  if (n < k) {
    throw DataError("cross_validate: fewer rows than folds");
  }

  const std::vector<Eigen::Index> order = shuffled_indices(n, seed);

  CvReport report;
  report.seed = seed;
  report.k = k;
  Eigen::VectorXd pooled(n);

  // Fold sizes differ by at most one: the first n % k folds get the extra row.
  Eigen::Index fold_start = 0;
  for (int fold = 0; fold < k; ++fold) {
    const Eigen::Index fold_size = n / k + (fold < static_cast<int>(n % k) ? 1 : 0);
    const Eigen::Index fold_end = fold_start + fold_size;

    Eigen::MatrixXd train_x(n - fold_size, data.cols());
    Eigen::VectorXd train_y(n - fold_size);
    Eigen::Index in_row = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (i >= fold_start && i < fold_end) continue;
      train_x.row(in_row) = data.features.row(order[static_cast<std::size_t>(i)]);
      train_y(in_row) = data.gold(order[static_cast<std::size_t>(i)]);
      ++in_row;
    }
    const AfsModel model =
        fit_centered(train_x, train_y, data.feature_order, ridge);

    FoldMetrics metrics;
    metrics.fold = fold;
    metrics.rows = static_cast<int>(fold_size);
    Eigen::VectorXd fold_pred(fold_size);
    Eigen::VectorXd fold_gold(fold_size);
    for (Eigen::Index i = fold_start; i < fold_end; ++i) {
      const Eigen::Index row = order[static_cast<std::size_t>(i)];
      const double value =
          model.intercept + model.coefficients.dot(data.features.row(row));
      pooled(row) = value;
      fold_pred(i - fold_start) = value;
      fold_gold(i - fold_start) = data.gold(row);
    }
    const Eigen::VectorXd errors = fold_pred - fold_gold;
    metrics.mae = errors.array().abs().mean();
    metrics.rms = std::sqrt(errors.array().square().mean());
    try {
      metrics.r = pearson(fold_pred, fold_gold);
    } catch (const DataError&) {
      metrics.r = std::nullopt;
    }
    report.per_fold.push_back(metrics);
    fold_start = fold_end;
  }

  const Eigen::VectorXd errors = pooled - data.gold;
  report.mae = errors.array().abs().mean();
  report.rms = std::sqrt(errors.array().square().mean());
  report.r = pearson(pooled, data.gold);
  report.pooled_predictions.reserve(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    report.pooled_predictions.emplace_back(data.row_ids[static_cast<std::size_t>(i)],
                                           pooled(i));
  }
  return report;
}

std::vector<double> absolute_errors(const CvReport& report, const Dataset& data) {
  if (report.pooled_predictions.size() != static_cast<std::size_t>(data.rows())) {
    throw DataError("absolute_errors: report does not cover the dataset");
  }
  std::vector<double> errors;
  errors.reserve(report.pooled_predictions.size());
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    const auto& [row_id, value] = report.pooled_predictions[static_cast<std::size_t>(i)];
    if (row_id != data.row_ids[static_cast<std::size_t>(i)]) {
      throw DataError("absolute_errors: row order mismatch at " + row_id);
    }
    errors.push_back(std::abs(value - data.gold(i)));
  }
  return errors;
}

}  // namespace afs
