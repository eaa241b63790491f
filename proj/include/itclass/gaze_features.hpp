#ifndef ITCLASS_GAZE_FEATURES_HPP
#define ITCLASS_GAZE_FEATURES_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "itclass/types.hpp"

namespace itclass {

enum class RegionKind { PREV, IT, NEXT, IT_PLUS_NEXT };

const char* region_prefix(RegionKind r);

// Read-only lookup over the averaged corpus: token metadata, per-token means
// and trial-bounded neighbours.
class GazeIndex {
 public:
  GazeIndex(const std::vector<Token>& tokens,
            const std::vector<GazeMeasures>& gaze);

  const Token* token(std::uint32_t uid) const;
  const GazeMeasures* measures(std::uint32_t uid) const;
  // Neighbouring token uid within the same trial; empty at trial edges.
  std::optional<std::uint32_t> prev_in_trial(std::uint32_t uid) const;
  std::optional<std::uint32_t> next_in_trial(std::uint32_t uid) const;

 private:
  const std::vector<Token>* tokens_;
  const std::vector<GazeMeasures>* gaze_;
  std::unordered_map<std::uint32_t, std::size_t> index_;
};

// One numeric entry per registry measure, names prefixed with the region
// ("PREV.Gaze_Duration"). A missing neighbour (instance at a trial edge)
// yields an all-zero vector plus the matching IT.boundary_* flag; the flag
// entry is present (0/1) for PREV and NEXT regions unconditionally so that
// all instances share one schema. IT_PLUS_NEXT is derived via
// combine_it_next.
FeatureVector region_features(std::uint32_t instance_uid, RegionKind region,
                              const GazeIndex& index);

// Adds the pronoun's and the following word's measures; measures that do not
// add up meaningfully (Skip, First_Fix_Progressive, run indices) are averaged
// instead. Entries renamed with the IT_PLUS_NEXT prefix; a boundary flag on
// the NEXT input is carried through unchanged.
FeatureVector combine_it_next(const FeatureVector& fv_it,
                              const FeatureVector& fv_next);

// Keeps exactly the group's registry members (matched on the measure suffix);
// non-registry entries such as boundary flags are dropped.
FeatureVector group_filter(const FeatureVector& fv, GazeGroupKind group);

}  // namespace itclass

#endif
