#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "afs/corpus.hpp"

namespace afs {

struct PyramidEntry {
  ScuAnnotation scu;
  int tier = 0;  // number of summaries using the SCU
};

// SCUs of one dialog ranked by how many summaries contributed to each.
struct Pyramid {
  std::string dialog_id;
  int n_summaries = 0;
  std::vector<PyramidEntry> entries;  // descending tier, then scu_id
};

// Tier = |used_by|. Throws DataError on mixed dialog ids, empty used_by,
// or writer indices outside 1..n_summaries.
Pyramid build_pyramid(const std::vector<ScuAnnotation>& scus, int n_summaries);

// Labels of entries at or above min_tier, in pyramid order.
std::vector<std::string> central_propositions(const Pyramid& pyramid,
                                              int min_tier = 3);

// Fixed-width table: label, one check-mark column per summary, tier.
void write_pyramid_report(std::ostream& out, const Pyramid& pyramid);

}  // namespace afs
