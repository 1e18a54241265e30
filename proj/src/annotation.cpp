#include "afs/annotation.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "afs/errors.hpp"
#include "afs/stats.hpp"

namespace afs {

FilterResult filter_workers(const std::vector<AfsJudgment>& judgments,
                            const GoldStandard& gold,
                            const FilterPolicy& policy) {
  if (policy.min_hits < 1 || policy.hit_size < 1) {
    throw ConfigError("filter_workers: min_hits and hit_size must be >= 1");
  }
  std::map<std::string, std::vector<const AfsJudgment*>> by_worker;
  std::set<std::pair<std::string, std::string>> seen;
  for (const AfsJudgment& j : judgments) {
    if (j.score < 0 || j.score > 5) {
      throw DataError("filter_workers: score " + std::to_string(j.score) +
                      " outside 0..5 for pair '" + j.pair_id + "'");
    }
    if (!gold.scores.count(j.pair_id)) {
      throw DataError("filter_workers: gold standard does not cover pair '" +
                      j.pair_id + "'");
    }
    if (!seen.insert({j.worker_id, j.pair_id}).second) {
      throw DataError("filter_workers: duplicate judgment by worker '" +
                      j.worker_id + "' on pair '" + j.pair_id + "'");
    }
    by_worker[j.worker_id].push_back(&j);
  }

  const int volume_floor = policy.min_hits * policy.hit_size;
  std::set<std::string> dropped;
  FilterResult result;
  for (const auto& [worker_id, rows] : by_worker) {
    const int judged = static_cast<int>(rows.size());
    std::optional<double> correlation;
    {
      std::vector<double> own;
      std::vector<double> reference;
      own.reserve(rows.size());
      reference.reserve(rows.size());
      for (const AfsJudgment* j : rows) {
        own.push_back(static_cast<double>(j->score));
        reference.push_back(gold.scores.at(j->pair_id));
      }
      try {
        correlation = pearson(own, reference);
      } catch (const DataError&) {
        correlation = std::nullopt;  // constant scores or too few pairs
      }
    }
    const bool low_volume = judged < volume_floor;
    const bool low_correlation =
        !correlation.has_value() || *correlation < policy.correlation_floor;
    if (low_volume && low_correlation) {
      dropped.insert(worker_id);
      result.removed.push_back(RemovedWorker{worker_id, judged, correlation});
    }
  }

  result.kept.reserve(judgments.size());
  for (const AfsJudgment& j : judgments) {
    if (!dropped.count(j.worker_id)) {
      result.kept.push_back(j);
    }
  }
  return result;
}

std::map<std::string, double> aggregate_afs(
    const std::vector<AfsJudgment>& judgments,
    const std::vector<std::string>& required_pairs) {
  std::map<std::string, std::pair<double, int>> sums;
  for (const AfsJudgment& j : judgments) {
    auto& [sum, count] = sums[j.pair_id];
    sum += static_cast<double>(j.score);
    ++count;
  }
  for (const std::string& pair_id : required_pairs) {
    if (!sums.count(pair_id)) {
      throw DataError("aggregate_afs: pair '" + pair_id +
                      "' has no surviving judgments");
    }
  }
  std::map<std::string, double> means;
  for (const auto& [pair_id, acc] : sums) {
    means[pair_id] = acc.first / acc.second;
  }
  return means;
}

}  // namespace afs
