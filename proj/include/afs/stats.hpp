#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include <Eigen/Core>

#include "afs/errors.hpp"

namespace afs {

// Regularized incomplete beta function I_x(a, b), a,b > 0, x in [0,1].
// Continued-fraction evaluation (Lentz), accurate to ~1e-12.
double regularized_incomplete_beta(double a, double b, double x);

// Two-sided tail probability of Student's t distribution with df degrees
// of freedom: P(|T| >= |t|) = I_{df/(df+t^2)}(df/2, 1/2).
double student_t_two_sided_p(double t, int df);

// Sample Pearson correlation. Throws DataError if the sequences differ in
// length, are shorter than 2, or either one is constant.
template <typename DerivedX, typename DerivedY>
double pearson(const Eigen::MatrixBase<DerivedX>& x,
               const Eigen::MatrixBase<DerivedY>& y) {
  if (x.size() != y.size()) {
    throw DataError("pearson: length mismatch");
  }
  if (x.size() < 2) {
    throw DataError("pearson: need at least 2 observations");
  }
  const double mx = x.template cast<double>().mean();
  const double my = y.template cast<double>().mean();
  const auto dx = x.template cast<double>().array() - mx;
  const auto dy = y.template cast<double>().array() - my;
  const double sxx = (dx * dx).sum();
  const double syy = (dy * dy).sum();
  if (sxx == 0.0 || syy == 0.0) {
    throw DataError("pearson: constant sequence, correlation undefined");
  }
  return (dx * dy).sum() / std::sqrt(sxx * syy);
}

double pearson(const std::vector<double>& x, const std::vector<double>& y);

struct TTestResult {
  double t = 0.0;
  double p = 1.0;
  int df = 0;
  // Zero variance in the differences. t/p follow the limiting values:
  // all-zero differences give (0, 1), nonzero mean gives (+-inf, 0).
  bool degenerate_variance = false;
};

// Two-sided paired t-test over per-row error sequences from two models
// evaluated on the same rows in the same order.
template <typename DerivedA, typename DerivedB>
TTestResult paired_ttest(const Eigen::MatrixBase<DerivedA>& errors_a,
                         const Eigen::MatrixBase<DerivedB>& errors_b) {
  if (errors_a.size() != errors_b.size()) {
    throw DataError("paired_ttest: length mismatch");
  }
  const auto n = errors_a.size();
  if (n < 2) {
    throw DataError("paired_ttest: need at least 2 paired observations");
  }
  const Eigen::VectorXd d = errors_a.template cast<double>() -
                            errors_b.template cast<double>();
  const double mean = d.mean();
  const double ss = (d.array() - mean).square().sum();
  TTestResult result;
  result.df = static_cast<int>(n) - 1;
  if (ss == 0.0) {
    result.degenerate_variance = true;
    if (mean == 0.0) {
      result.t = 0.0;
      result.p = 1.0;
    } else {
      result.t = mean > 0 ? std::numeric_limits<double>::infinity()
                          : -std::numeric_limits<double>::infinity();
      result.p = 0.0;
    }
    return result;
  }
  const double stderr_mean =
      std::sqrt(ss / static_cast<double>(result.df)) / std::sqrt(static_cast<double>(n));
  result.t = mean / stderr_mean;
  result.p = student_t_two_sided_p(result.t, result.df);
  return result;
}

TTestResult paired_ttest(const std::vector<double>& errors_a,
                         const std::vector<double>& errors_b);

}  // namespace afs
