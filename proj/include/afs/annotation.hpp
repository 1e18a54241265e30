#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace afs {

// One worker's similarity judgment on the 0-5 scale.
struct AfsJudgment {
  std::string worker_id;
  std::string pair_id;
  int score = 0;  // integer in {0..5}
};

struct GoldStandard {
  enum class Source { kExpert, kAggregate };

  std::map<std::string, double> scores;  // pair_id -> score in [0,5]
  Source source = Source::kExpert;
};

struct FilterPolicy {
  int min_hits = 4;
  int hit_size = 5;  // pairs per hit
  double correlation_floor = 0.0;
};

struct RemovedWorker {
  std::string worker_id;
  int judged_pairs = 0;
  std::optional<double> correlation;  // empty when undefined
};

struct FilterResult {
  std::vector<AfsJudgment> kept;
  std::vector<RemovedWorker> removed;
};

// Drops every judgment from workers that judged fewer than
// min_hits * hit_size pairs AND correlate with the gold standard below the
// floor. Workers whose correlation is undefined (constant scores, or fewer
// than two gold-covered pairs) count as below the floor. Gold must cover
// every judged pair.
FilterResult filter_workers(const std::vector<AfsJudgment>& judgments,
                            const GoldStandard& gold,
                            const FilterPolicy& policy);

// Arithmetic mean per pair. With required_pairs given, any required pair
// left without a judgment raises DataError naming the pair.
std::map<std::string, double> aggregate_afs(
    const std::vector<AfsJudgment>& judgments,
    const std::vector<std::string>& required_pairs = {});

}  // namespace afs
