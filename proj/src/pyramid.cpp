#include "afs/pyramid.hpp"

#include <algorithm>
#include <iomanip>

#include "afs/errors.hpp"

namespace afs {

Pyramid build_pyramid(const std::vector<ScuAnnotation>& scus, int n_summaries) {
  if (n_summaries < 1) {
    throw DataError("build_pyramid: n_summaries must be >= 1");
  }
  Pyramid pyramid;
  pyramid.n_summaries = n_summaries;
  for (const ScuAnnotation& scu : scus) {
    if (pyramid.dialog_id.empty()) {
      pyramid.dialog_id = scu.dialog_id;
    } else if (scu.dialog_id != pyramid.dialog_id) {
      throw DataError("build_pyramid: mixed dialog ids '" + pyramid.dialog_id +
                      "' and '" + scu.dialog_id + "'");
    }
    if (scu.used_by.empty()) {
      throw DataError("build_pyramid: SCU '" + scu.scu_id + "' has empty used_by");
    }
    for (int writer : scu.used_by) {
      if (writer < 1 || writer > n_summaries) {
        throw DataError("build_pyramid: SCU '" + scu.scu_id +
                        "' references writer index " + std::to_string(writer) +
                        " outside 1.." + std::to_string(n_summaries));
      }
    }
    pyramid.entries.push_back(
        PyramidEntry{scu, static_cast<int>(scu.used_by.size())});
  }
  std::sort(pyramid.entries.begin(), pyramid.entries.end(),
            [](const PyramidEntry& lhs, const PyramidEntry& rhs) {
              if (lhs.tier != rhs.tier) return lhs.tier > rhs.tier;
              return lhs.scu.scu_id < rhs.scu.scu_id;
            });
  return pyramid;
}

std::vector<std::string> central_propositions(const Pyramid& pyramid, int min_tier) {
  if (min_tier < 1) {
    throw DataError("central_propositions: min_tier must be >= 1");
  }
  std::vector<std::string> labels;
  for (const PyramidEntry& entry : pyramid.entries) {
    if (entry.tier >= min_tier) {
      labels.push_back(entry.scu.label);
    }
  }
  return labels;
}

void write_pyramid_report(std::ostream& out, const Pyramid& pyramid) {
  std::size_t label_width = 9;  // "SCU Label"
  for (const PyramidEntry& entry : pyramid.entries) {
    label_width = std::max(label_width, entry.scu.label.size());
  }
  out << "Pyramid for " << pyramid.dialog_id << "\n";
  out << std::left << std::setw(static_cast<int>(label_width)) << "SCU Label";
  for (int i = 1; i <= pyramid.n_summaries; ++i) {
    out << "  " << i;
  }
  out << "  Tier\n";
  for (const PyramidEntry& entry : pyramid.entries) {
    out << std::left << std::setw(static_cast<int>(label_width)) << entry.scu.label;
    for (int i = 1; i <= pyramid.n_summaries; ++i) {
      out << "  " << (entry.scu.used_by.count(i) ? "x" : " ");
    }
    out << "  " << entry.tier << "\n";
  }
}

}  // namespace afs
