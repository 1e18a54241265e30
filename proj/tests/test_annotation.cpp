#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "afs/annotation.hpp"
#include "afs/errors.hpp"

using namespace afs;

namespace {

GoldStandard make_gold(int n_pairs) {
  GoldStandard gold;
  gold.source = GoldStandard::Source::kExpert;
  for (int i = 0; i < n_pairs; ++i) {
    gold.scores["p" + std::to_string(i)] = static_cast<double>(i % 6);
  }
  return gold;
}

// worker judges pairs p0..p{n-1}; score = gold + flip * noise pattern.
std::vector<AfsJudgment> judge(const std::string& worker, int n_pairs,
                               bool inverted) {
  std::vector<AfsJudgment> out;
  for (int i = 0; i < n_pairs; ++i) {
    const int gold = i % 6;
    const int score = inverted ? 5 - gold : gold;
    out.push_back(AfsJudgment{worker, "p" + std::to_string(i), score});
  }
  return out;
}

}  // namespace

TEST_CASE("filter_workers keeps high-volume workers regardless of correlation") {
  const GoldStandard gold = make_gold(30);
  // 25 judged pairs >= 4 hits x 5 pairs, inverted scores: volume clause unmet.
  const auto judgments = judge("w-prolific", 25, true);
  const FilterResult result = filter_workers(judgments, gold, FilterPolicy{});
  CHECK(result.removed.empty());
  CHECK(result.kept.size() == judgments.size());
}

TEST_CASE("filter_workers removes low-volume low-correlation workers") {
  const GoldStandard gold = make_gold(30);
  std::vector<AfsJudgment> judgments = judge("w-good", 25, false);
  const auto bad = judge("w-bad", 10, true);  // negative correlation, 10 pairs
  judgments.insert(judgments.end(), bad.begin(), bad.end());

  FilterPolicy policy;
  policy.correlation_floor = 0.0;
  const FilterResult result = filter_workers(judgments, gold, policy);
  REQUIRE(result.removed.size() == 1);
  CHECK(result.removed[0].worker_id == "w-bad");
  CHECK(result.removed[0].judged_pairs == 10);
  REQUIRE(result.removed[0].correlation.has_value());
  CHECK(*result.removed[0].correlation < 0.0);
  for (const AfsJudgment& j : result.kept) {
    CHECK(j.worker_id == "w-good");
  }
}

TEST_CASE("filter_workers on a vacuous filter returns the input") {
  const GoldStandard gold = make_gold(30);
  std::vector<AfsJudgment> judgments = judge("w1", 25, false);
  const auto w2 = judge("w2", 8, false);  // low volume but well correlated
  judgments.insert(judgments.end(), w2.begin(), w2.end());
  const FilterResult result = filter_workers(judgments, gold, FilterPolicy{});
  CHECK(result.removed.empty());
  CHECK(result.kept.size() == judgments.size());
}

TEST_CASE("filter_workers treats undefined correlations as below the floor") {
  const GoldStandard gold = make_gold(30);
  // Constant responses carry no signal.
  std::vector<AfsJudgment> judgments;
  for (int i = 0; i < 6; ++i) {
    judgments.push_back(AfsJudgment{"w-const", "p" + std::to_string(i), 3});
  }
  // A single judgment cannot define a correlation either.
  judgments.push_back(AfsJudgment{"w-once", "p0", 4});
  FilterPolicy policy;
  policy.correlation_floor = -1.0;  // even the loosest floor removes undefined
  const FilterResult result = filter_workers(judgments, gold, policy);
  REQUIRE(result.removed.size() == 2);
  std::set<std::string> removed;
  for (const RemovedWorker& worker : result.removed) {
    removed.insert(worker.worker_id);
    CHECK(!worker.correlation.has_value());
  }
  CHECK(removed == std::set<std::string>{"w-const", "w-once"});
}

TEST_CASE("filter_workers is idempotent under a fixed floor") {
  const GoldStandard gold = make_gold(30);
  std::vector<AfsJudgment> judgments = judge("keep", 25, false);
  const auto bad = judge("drop", 7, true);
  judgments.insert(judgments.end(), bad.begin(), bad.end());
  const FilterResult once = filter_workers(judgments, gold, FilterPolicy{});
  const FilterResult twice = filter_workers(once.kept, gold, FilterPolicy{});
  CHECK(twice.removed.empty());
  CHECK(twice.kept.size() == once.kept.size());
}

TEST_CASE("filter_workers validates inputs") {
  const GoldStandard gold = make_gold(2);
  SUBCASE("gold must cover judged pairs") {
    const std::vector<AfsJudgment> judgments = {{"w", "p99", 3}};
    CHECK_THROWS_AS(filter_workers(judgments, gold, FilterPolicy{}), DataError);
  }
  SUBCASE("duplicate (worker, pair) is rejected") {
    const std::vector<AfsJudgment> judgments = {{"w", "p0", 3}, {"w", "p0", 4}};
    CHECK_THROWS_AS(filter_workers(judgments, gold, FilterPolicy{}), DataError);
  }
  SUBCASE("scores outside the scale are rejected") {
    const std::vector<AfsJudgment> judgments = {{"w", "p0", 6}};
    CHECK_THROWS_AS(filter_workers(judgments, gold, FilterPolicy{}), DataError);
  }
}

TEST_CASE("aggregate_afs means") {
  std::vector<AfsJudgment> judgments;
  const std::vector<int> scores = {3, 4, 5, 4, 4};
  for (std::size_t i = 0; i < scores.size(); ++i) {
    judgments.push_back(AfsJudgment{"w" + std::to_string(i), "pair", scores[i]});
  }
  judgments.push_back(AfsJudgment{"w0", "lonely", 2});

  const auto means = aggregate_afs(judgments);
  CHECK(means.at("pair") == doctest::Approx(4.0));
  CHECK(means.at("lonely") == doctest::Approx(2.0));
}

TEST_CASE("aggregate_afs stays within the judgment range") {
  std::mt19937 rng(17);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<AfsJudgment> judgments;
    int lo = 5;
    int hi = 0;
    const int n = 1 + static_cast<int>(rng() % 7);
    for (int i = 0; i < n; ++i) {
      const int score = static_cast<int>(rng() % 6);
      lo = std::min(lo, score);
      hi = std::max(hi, score);
      judgments.push_back(AfsJudgment{"w" + std::to_string(i), "p", score});
    }
    const auto means = aggregate_afs(judgments);
    CHECK(means.at("p") >= lo);
    CHECK(means.at("p") <= hi);
  }
}

TEST_CASE("aggregate_afs reports pairs with no surviving judgments") {
  const std::vector<AfsJudgment> judgments = {{"w", "p0", 3}};
  CHECK_THROWS_WITH_AS(aggregate_afs(judgments, {"p0", "p1"}),
                       doctest::Contains("p1"), DataError);
}
