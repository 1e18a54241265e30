#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "afs/features.hpp"

namespace afs {

// Regression rows: one feature vector and gold score per pair.
struct Dataset {
  std::vector<std::string> row_ids;
  std::vector<std::string> feature_order;
  Eigen::MatrixXd features;  // row_ids.size() x feature_order.size()
  Eigen::VectorXd gold;      // in [0,5]

  Eigen::Index rows() const { return features.rows(); }
  Eigen::Index cols() const { return features.cols(); }
};

struct AfsModel {
  std::vector<std::string> feature_order;
  Eigen::VectorXd coefficients;
  double intercept = 0.0;
  double ridge = 0.0;
};

// Least squares with an optional ridge penalty on the coefficients (the
// intercept is never penalized), solved via the normal equations on
// mean-centered data. ridge = 0 requires full-rank features.
AfsModel fit_linear(const Dataset& data, double ridge = 1e-8);

// Raw linear response; predictions are not clamped to the score range.
double predict(const AfsModel& model, const FeatureVector& fv);
Eigen::VectorXd predict(const AfsModel& model, const Eigen::MatrixXd& features);

struct FoldMetrics {
  int fold = 0;
  int rows = 0;
  double mae = 0.0;
  double rms = 0.0;
  std::optional<double> r;  // undefined for constant folds
};

struct CvReport {
  double r = 0.0;
  double mae = 0.0;
  double rms = 0.0;
  std::vector<FoldMetrics> per_fold;
  // Out-of-fold prediction for every row, in dataset row order.
  std::vector<std::pair<std::string, double>> pooled_predictions;
  std::uint64_t seed = 0;
  int k = 0;
};

// Seeded k-fold cross-validation. Rows are shuffled with a portable
// Fisher-Yates using the given seed and split into folds whose sizes differ
// by at most one; metrics are computed over the pooled out-of-fold
// predictions.
CvReport cross_validate(const Dataset& data, int k, std::uint64_t seed,
                        double ridge = 1e-8);

// Per-row absolute errors of the pooled predictions, in dataset row order.
// Input rows must match the report's predictions one to one.
std::vector<double> absolute_errors(const CvReport& report, const Dataset& data);

}  // namespace afs
