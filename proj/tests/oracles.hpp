// Test-only reference implementations, kept deliberately independent of the
// library code paths they check: explicit scans instead of count maps, full
// DP tables instead of rolling rows, quadrature instead of special
// functions, Gauss-Jordan instead of factorizations.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace oracle {

// ---------------------------------------------------------------------------
// Student t two-sided tail by adaptive Simpson quadrature of the density.
// ---------------------------------------------------------------------------

inline double t_density(double u, double df) {
  const double c = std::exp(std::lgamma((df + 1.0) / 2.0) - std::lgamma(df / 2.0)) /
                   std::sqrt(df * M_PI);
  return c * std::pow(1.0 + u * u / df, -(df + 1.0) / 2.0);
}

inline double simpson(const std::function<double(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b);
  return (b - a) / 6.0 * (f(a) + 4.0 * f(c) + f(b));
}

inline double adaptive_simpson(const std::function<double(double)>& f, double a,
                               double b, double whole, double tol, int depth) {
  const double c = 0.5 * (a + b);
  const double left = simpson(f, a, c);
  const double right = simpson(f, c, b);
  if (depth <= 0 || std::fabs(left + right - whole) < 15.0 * tol) {
    return left + right + (left + right - whole) / 15.0;
  }
  return adaptive_simpson(f, a, c, left, tol / 2.0, depth - 1) +
         adaptive_simpson(f, c, b, right, tol / 2.0, depth - 1);
}

inline double tdist_two_sided_p(double t, int df) {
  const double limit = std::fabs(t);
  if (limit == 0.0) return 1.0;
  auto f = [df](double u) { return t_density(u, static_cast<double>(df)); };
  const double central =
      adaptive_simpson(f, 0.0, limit, simpson(f, 0.0, limit), 1e-13, 48);
  return std::max(0.0, 1.0 - 2.0 * central);
}

// ---------------------------------------------------------------------------
// ROUGE by explicit enumeration (no count maps): clipped overlap via
// scan-and-mark matching.
// ---------------------------------------------------------------------------

using TokenSeq = std::vector<std::string>;

inline std::vector<TokenSeq> windows(const TokenSeq& tokens, std::size_t n) {
  std::vector<TokenSeq> grams;
  if (tokens.size() < n) return grams;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    grams.emplace_back(tokens.begin() + static_cast<std::ptrdiff_t>(i),
                       tokens.begin() + static_cast<std::ptrdiff_t>(i + n));
  }
  return grams;
}

inline int clipped_matches(const std::vector<TokenSeq>& a,
                           const std::vector<TokenSeq>& b) {
  std::vector<bool> used(b.size(), false);
  int matches = 0;
  for (const TokenSeq& gram : a) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      if (!used[j] && b[j] == gram) {
        used[j] = true;
        ++matches;
        break;
      }
    }
  }
  return matches;
}

inline double f1(double overlap, double total_a, double total_b) {
  if (overlap <= 0.0 || total_a <= 0.0 || total_b <= 0.0) return 0.0;
  const double recall = overlap / total_a;
  const double precision = overlap / total_b;
  return 2.0 * precision * recall / (precision + recall);
}

inline double rouge_n_f1(const TokenSeq& a, const TokenSeq& b, std::size_t n) {
  const auto grams_a = windows(a, n);
  const auto grams_b = windows(b, n);
  return f1(clipped_matches(grams_a, grams_b),
            static_cast<double>(grams_a.size()),
            static_cast<double>(grams_b.size()));
}

// Full-table LCS.
inline std::size_t lcs_length(const TokenSeq& a, const TokenSeq& b) {
  std::vector<std::vector<std::size_t>> table(
      a.size() + 1, std::vector<std::size_t>(b.size() + 1, 0));
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      table[i][j] = a[i - 1] == b[j - 1]
                        ? table[i - 1][j - 1] + 1
                        : std::max(table[i - 1][j], table[i][j - 1]);
    }
  }
  return table[a.size()][b.size()];
}

inline double rouge_l_f1(const TokenSeq& a, const TokenSeq& b) {
  return f1(static_cast<double>(lcs_length(a, b)), static_cast<double>(a.size()),
            static_cast<double>(b.size()));
}

// ---------------------------------------------------------------------------
// Least squares via Gauss-Jordan elimination on the raw normal equations of
// the design [X | 1], ridge added to the non-intercept diagonal.
// ---------------------------------------------------------------------------

struct OlsSolution {
  std::vector<double> coefficients;
  double intercept = 0.0;
};

inline OlsSolution solve_normal_equations(const std::vector<std::vector<double>>& x,
                                          const std::vector<double>& y,
                                          double ridge) {
  const std::size_t n = x.size();
  const std::size_t p = n == 0 ? 0 : x[0].size();
  const std::size_t dim = p + 1;

  // G = A^T A (+ ridge on feature diagonal), rhs = A^T y, A = [X | 1].
  std::vector<std::vector<double>> g(dim, std::vector<double>(dim + 1, 0.0));
  auto design = [&](std::size_t row, std::size_t col) {
    return col < p ? x[row][col] : 1.0;
  };
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t j = 0; j < dim; ++j) {
      double sum = 0.0;
      for (std::size_t r = 0; r < n; ++r) sum += design(r, i) * design(r, j);
      g[i][j] = sum;
    }
    double rhs = 0.0;
    for (std::size_t r = 0; r < n; ++r) rhs += design(r, i) * y[r];
    g[i][dim] = rhs;
    if (i < p) g[i][i] += ridge;
  }

  for (std::size_t col = 0; col < dim; ++col) {
    std::size_t pivot = col;
    for (std::size_t row = col + 1; row < dim; ++row) {
      if (std::fabs(g[row][col]) > std::fabs(g[pivot][col])) pivot = row;
    }
    if (std::fabs(g[pivot][col]) < 1e-12) {
      throw std::runtime_error("oracle OLS: singular normal equations");
    }
    std::swap(g[col], g[pivot]);
    const double lead = g[col][col];
    for (std::size_t j = col; j <= dim; ++j) g[col][j] /= lead;
    for (std::size_t row = 0; row < dim; ++row) {
      if (row == col) continue;
      const double factor = g[row][col];
      if (factor == 0.0) continue;
      for (std::size_t j = col; j <= dim; ++j) g[row][j] -= factor * g[col][j];
    }
  }

  OlsSolution solution;
  for (std::size_t j = 0; j < p; ++j) solution.coefficients.push_back(g[j][dim]);
  solution.intercept = g[p][dim];
  return solution;
}

// ---------------------------------------------------------------------------
// Reference UPGMA: cluster distances recomputed from the original matrix at
// every step (mean over all cross pairs), no incremental updates.
// ---------------------------------------------------------------------------

struct UpgmaMerge {
  int a = 0;
  int b = 0;
  double distance = 0.0;
};

inline std::vector<UpgmaMerge> upgma_reference(
    const std::vector<std::vector<double>>& dist, int target_clusters) {
  const int n = static_cast<int>(dist.size());
  std::vector<std::vector<int>> clusters;
  for (int i = 0; i < n; ++i) clusters.push_back({i});

  std::vector<UpgmaMerge> merges;
  while (static_cast<int>(clusters.size()) > target_clusters) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_i = 0;
    std::size_t best_j = 0;
    int best_rep_a = 0;
    int best_rep_b = 0;
    for (std::size_t i = 0; i < clusters.size(); ++i) {
      for (std::size_t j = i + 1; j < clusters.size(); ++j) {
        double sum = 0.0;
        for (int a : clusters[i]) {
          for (int b : clusters[j]) sum += dist[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
        }
        const double mean =
            sum / (static_cast<double>(clusters[i].size()) * clusters[j].size());
        const int rep_a = std::min(*std::min_element(clusters[i].begin(), clusters[i].end()),
                                   *std::min_element(clusters[j].begin(), clusters[j].end()));
        const int rep_b = std::max(*std::min_element(clusters[i].begin(), clusters[i].end()),
                                   *std::min_element(clusters[j].begin(), clusters[j].end()));
        const bool better =
            mean < best ||
            (mean == best && std::make_pair(rep_a, rep_b) <
                                 std::make_pair(best_rep_a, best_rep_b));
        if (better) {
          best = mean;
          best_i = i;
          best_j = j;
          best_rep_a = rep_a;
          best_rep_b = rep_b;
        }
      }
    }
    merges.push_back(UpgmaMerge{best_rep_a, best_rep_b, best});
    for (int m : clusters[best_j]) clusters[best_i].push_back(m);
    clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(best_j));
  }
  return merges;
}

}  // namespace oracle
