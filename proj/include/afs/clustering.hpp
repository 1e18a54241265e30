#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "afs/features.hpp"
#include "afs/textproc.hpp"

namespace afs {

// Sparse stemmed-term counts over a label's content words (nouns, verbs,
// adjectives only).
struct TermVector {
  std::map<std::string, int> weights;  // no zero entries
  std::string source_label;

  bool empty() const { return weights.empty(); }
};

struct ClusterCut {
  enum class Mode { kNClusters, kDistanceThreshold };

  Mode mode = Mode::kNClusters;
  double value = 1.0;

  static ClusterCut n_clusters(int n);
  static ClusterCut distance_threshold(double threshold);  // in [0,1]
};

// One agglomerative merge; a and b are the smallest original label indices
// of the two clusters merged, a < b.
struct Merge {
  int a = 0;
  int b = 0;
  double distance = 0.0;
};

// tokenize -> tag -> keep content words -> stem -> count.
TermVector vectorize_label(const std::string& label, const Tagger& tagger);

// 1 - cosine similarity; 1 if either vector is empty.
double cosine_distance(const TermVector& u, const TermVector& v);

// Bottom-up average-linkage (UPGMA) clustering over cosine distances.
// Inter-cluster distance is the mean of all member-pair distances; ties
// break on the lexicographically smallest (min index, max index). Labels
// with no content words never merge and end up as singletons. Returns
// clusters as sorted lists of input indices, ordered by smallest member.
std::vector<std::vector<int>> agglomerate(const std::vector<TermVector>& vectors,
                                          const ClusterCut& cut,
                                          std::vector<Merge>* trace = nullptr);

// A candidate same-facet pair of central propositions.
struct PropositionPair {
  std::string pair_id;
  std::string label_a;
  std::string label_b;
  int source_cluster = 0;
  std::optional<double> gold_afs;        // in [0,5] once annotated
  std::optional<FeatureVector> features;
};

// Deterministic id for an unordered pair of labels.
std::string make_pair_id(const std::string& id_a, const std::string& id_b);

// All unordered within-cluster combinations: sum of k*(k-1)/2 pairs.
// label_ids/label_texts are indexed by the cluster member indices.
std::vector<PropositionPair> within_cluster_pairs(
    const std::vector<std::vector<int>>& clusters,
    const std::vector<std::string>& label_ids,
    const std::vector<std::string>& label_texts);

}  // namespace afs
