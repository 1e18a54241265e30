#include "afs/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Core>

#include "afs/errors.hpp"

namespace afs {

ClusterCut ClusterCut::n_clusters(int n) {
  if (n < 1) {
    throw ConfigError("cluster cut: n_clusters must be >= 1");
  }
  return ClusterCut{Mode::kNClusters, static_cast<double>(n)};
}

ClusterCut ClusterCut::distance_threshold(double threshold) {
  if (threshold < 0.0 || threshold > 1.0) {
    throw ConfigError("cluster cut: distance threshold must lie in [0,1]");
  }
  return ClusterCut{Mode::kDistanceThreshold, threshold};
}

TermVector vectorize_label(const std::string& label, const Tagger& tagger) {
  TermVector vec;
  vec.source_label = label;
  for (const TaggedToken& tagged : pos_tag(tokenize(label), tagger)) {
    if (tagged.pos == Pos::kOther) continue;
    ++vec.weights[porter_stem(tagged.token.surface)];
  }
  return vec;
}

double cosine_distance(const TermVector& u, const TermVector& v) {
  if (u.empty() || v.empty()) return 1.0;
  double dot = 0.0;
  double norm_u = 0.0;
  double norm_v = 0.0;
  for (const auto& [term, weight] : u.weights) {
    norm_u += static_cast<double>(weight) * weight;
    auto it = v.weights.find(term);
    if (it != v.weights.end()) {
      dot += static_cast<double>(weight) * it->second;
    }
  }
  for (const auto& [term, weight] : v.weights) {
    norm_v += static_cast<double>(weight) * weight;
  }
  // sqrt rounding can push the similarity an ulp past 1; keep d in [0,1].
  return std::clamp(1.0 - dot / (std::sqrt(norm_u) * std::sqrt(norm_v)), 0.0, 1.0);
}

std::vector<std::vector<int>> agglomerate(const std::vector<TermVector>& vectors,
                                          const ClusterCut& cut,
                                          std::vector<Merge>* trace) {
  const int n = static_cast<int>(vectors.size());
  if (n == 0) {
    throw DataError("agglomerate: no vectors");
  }
  if (cut.mode == ClusterCut::Mode::kNClusters &&
      (cut.value < 1.0 || cut.value != std::floor(cut.value))) {
    throw ConfigError("agglomerate: n_clusters must be a positive integer");
  }
  if (cut.mode == ClusterCut::Mode::kDistanceThreshold &&
      (cut.value < 0.0 || cut.value > 1.0)) {
    throw ConfigError("agglomerate: distance threshold must lie in [0,1]");
  }

  // Pairwise distances between active clusters; Lance-Williams update keeps
  // entries equal to the mean over all member-pair distances (UPGMA).
  Eigen::MatrixXd dist(n, n);
  dist.setZero();
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double d = cosine_distance(vectors[i], vectors[j]);
      dist(i, j) = d;
      dist(j, i) = d;
    }
  }

  std::vector<std::vector<int>> members(vectors.size());
  std::vector<bool> active(vectors.size(), true);
  std::vector<int> sizes(vectors.size(), 1);
  // Labels with no content words stay singletons.
  std::vector<bool> mergeable(vectors.size());
  int candidates = 0;
  for (int i = 0; i < n; ++i) {
    members[static_cast<std::size_t>(i)] = {i};
    mergeable[static_cast<std::size_t>(i)] = !vectors[static_cast<std::size_t>(i)].empty();
    if (mergeable[static_cast<std::size_t>(i)]) ++candidates;
  }

  int n_clusters = n;
  const int target_clusters =
      cut.mode == ClusterCut::Mode::kNClusters ? static_cast<int>(cut.value) : 1;

  while (n_clusters > target_clusters && candidates >= 2) {
    int best_i = -1;
    int best_j = -1;
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
      if (!active[static_cast<std::size_t>(i)] || !mergeable[static_cast<std::size_t>(i)]) continue;
      for (int j = i + 1; j < n; ++j) {
        if (!active[static_cast<std::size_t>(j)] || !mergeable[static_cast<std::size_t>(j)]) continue;
        // Strict < keeps the lexicographically smallest (i, j) on ties.
        if (dist(i, j) < best) {
          best = dist(i, j);
          best_i = i;
          best_j = j;
        }
      }
    }
    if (cut.mode == ClusterCut::Mode::kDistanceThreshold && best > cut.value) {
      break;
    }
    if (trace != nullptr) {
      trace->push_back(Merge{best_i, best_j, best});
    }
    // Merge j into i; i keeps the smaller representative index.
    for (int m : members[static_cast<std::size_t>(best_j)]) {
      members[static_cast<std::size_t>(best_i)].push_back(m);
    }
    active[static_cast<std::size_t>(best_j)] = false;
    const double size_i = sizes[static_cast<std::size_t>(best_i)];
    const double size_j = sizes[static_cast<std::size_t>(best_j)];
    for (int m = 0; m < n; ++m) {
      if (!active[static_cast<std::size_t>(m)] || m == best_i) continue;
      const double updated =
          (size_i * dist(best_i, m) + size_j * dist(best_j, m)) / (size_i + size_j);
      dist(best_i, m) = updated;
      dist(m, best_i) = updated;
    }
    sizes[static_cast<std::size_t>(best_i)] += sizes[static_cast<std::size_t>(best_j)];
    --n_clusters;
    --candidates;
  }

  std::vector<std::vector<int>> clusters;
  for (int i = 0; i < n; ++i) {
    if (!active[static_cast<std::size_t>(i)]) continue;
    std::vector<int> cluster = members[static_cast<std::size_t>(i)];
    std::sort(cluster.begin(), cluster.end());
    clusters.push_back(std::move(cluster));
  }
  std::sort(clusters.begin(), clusters.end(),
            [](const std::vector<int>& lhs, const std::vector<int>& rhs) {
              return lhs.front() < rhs.front();
            });
  return clusters;
}

std::string make_pair_id(const std::string& id_a, const std::string& id_b) {
  return id_a <= id_b ? id_a + "+" + id_b : id_b + "+" + id_a;
}

std::vector<PropositionPair> within_cluster_pairs(
    const std::vector<std::vector<int>>& clusters,
    const std::vector<std::string>& label_ids,
    const std::vector<std::string>& label_texts) {
  if (label_ids.size() != label_texts.size()) {
    throw DataError("within_cluster_pairs: ids and texts differ in length");
  }
  std::vector<PropositionPair> pairs;
  for (std::size_t c = 0; c < clusters.size(); ++c) {
    const std::vector<int>& cluster = clusters[c];
    for (std::size_t i = 0; i < cluster.size(); ++i) {
      for (std::size_t j = i + 1; j < cluster.size(); ++j) {
        const std::size_t a = static_cast<std::size_t>(cluster[i]);
        const std::size_t b = static_cast<std::size_t>(cluster[j]);
        PropositionPair pair;
        // Sort member ids so the pair id does not depend on cluster order.
        if (label_ids[a] <= label_ids[b]) {
          pair.pair_id = make_pair_id(label_ids[a], label_ids[b]);
          pair.label_a = label_texts[a];
          pair.label_b = label_texts[b];
        } else {
          pair.pair_id = make_pair_id(label_ids[b], label_ids[a]);
          pair.label_a = label_texts[b];
          pair.label_b = label_texts[a];
        }
        pair.source_cluster = static_cast<int>(c);
        pairs.push_back(std::move(pair));
      }
    }
  }
  return pairs;
}

}  // namespace afs
