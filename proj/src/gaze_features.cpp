#include "itclass/gaze_features.hpp"

namespace itclass {

const char* region_prefix(RegionKind r) {
  switch (r) {
    case RegionKind::PREV:
      return "PREV";
    case RegionKind::IT:
      return "IT";
    case RegionKind::NEXT:
      return "NEXT";
    case RegionKind::IT_PLUS_NEXT:
      return "IT_PLUS_NEXT";
  }
  return "?";
}

GazeIndex::GazeIndex(const std::vector<Token>& tokens,
                     const std::vector<GazeMeasures>& gaze)
    : tokens_(&tokens), gaze_(&gaze) {
  if (tokens.size() != gaze.size())
    throw ValidationError("GazeIndex: token and gaze sequences differ in length");
  index_.reserve(tokens.size() * 2);
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (gaze[i].token_uid != tokens[i].uid)
      throw ValidationError("GazeIndex: gaze measures not aligned with tokens");
    index_.emplace(tokens[i].uid, i);
  }
}

const Token* GazeIndex::token(std::uint32_t uid) const {
  auto it = index_.find(uid);
  return it == index_.end() ? nullptr : &(*tokens_)[it->second];
}

const GazeMeasures* GazeIndex::measures(std::uint32_t uid) const {
  auto it = index_.find(uid);
  return it == index_.end() ? nullptr : &(*gaze_)[it->second];
}

std::optional<std::uint32_t> GazeIndex::prev_in_trial(std::uint32_t uid) const {
  auto it = index_.find(uid);
  if (it == index_.end() || it->second == 0) return std::nullopt;
  const Token& here = (*tokens_)[it->second];
  const Token& prev = (*tokens_)[it->second - 1];
  if (prev.trial_id != here.trial_id) return std::nullopt;
  return prev.uid;
}

std::optional<std::uint32_t> GazeIndex::next_in_trial(std::uint32_t uid) const {
  auto it = index_.find(uid);
  if (it == index_.end() || it->second + 1 >= tokens_->size()) return std::nullopt;
  const Token& here = (*tokens_)[it->second];
  const Token& next = (*tokens_)[it->second + 1];
  if (next.trial_id != here.trial_id) return std::nullopt;
  return next.uid;
}

FeatureVector region_features(std::uint32_t instance_uid, RegionKind region,
                              const GazeIndex& index) {
  if (region == RegionKind::IT_PLUS_NEXT) {
    return combine_it_next(region_features(instance_uid, RegionKind::IT, index),
                           region_features(instance_uid, RegionKind::NEXT, index));
  }
  if (!index.token(instance_uid))
    throw ValidationError("region_features: unknown instance uid " +
                          std::to_string(instance_uid));

  std::optional<std::uint32_t> target;
  switch (region) {
    case RegionKind::PREV:
      target = index.prev_in_trial(instance_uid);
      break;
    case RegionKind::IT:
      target = instance_uid;
      break;
    case RegionKind::NEXT:
      target = index.next_in_trial(instance_uid);
      break;
    default:
      break;
  }

  const std::string prefix = region_prefix(region);
  const std::string source = "gaze:" + prefix;
  FeatureVector fv;
  const GazeMeasures* gm = target ? index.measures(*target) : nullptr;
  const auto& names = gaze_measure_names();
  for (int m = 0; m < kNumGazeMeasures; ++m) {
    const std::string name = prefix + "." + names[m];
    fv.add_numeric(name, gm ? gm->measures[m] : 0.0, source,
                   "gaze:" + prefix + ":" + names[m]);
  }
  if (region == RegionKind::PREV)
    fv.add_numeric("IT.boundary_prev", target ? 0.0 : 1.0, source,
                   "gaze:PREV:boundary");
  if (region == RegionKind::NEXT)
    fv.add_numeric("IT.boundary_next", target ? 0.0 : 1.0, source,
                   "gaze:NEXT:boundary");
  return fv;
}

FeatureVector combine_it_next(const FeatureVector& fv_it,
                              const FeatureVector& fv_next) {
  FeatureVector out;
  const auto& names = gaze_measure_names();
  for (int m = 0; m < kNumGazeMeasures; ++m) {
    const Feature* a = fv_it.find("IT." + names[m]);
    const Feature* b = fv_next.find("NEXT." + names[m]);
    if (!a || !b)
      throw ValidationError("combine_it_next: registry mismatch at measure " +
                            names[m]);
    const double v = gaze_measure_is_averaged_on_combine(m)
                         ? 0.5 * (a->num + b->num)
                         : a->num + b->num;
    out.add_numeric("IT_PLUS_NEXT." + names[m], v, "gaze:IT_PLUS_NEXT",
                    "gaze:IT_PLUS_NEXT:" + names[m]);
  }
  if (const Feature* flag = fv_next.find("IT.boundary_next"))
    out.add_numeric(flag->name, flag->num, flag->source, flag->group);
  return out;
}

FeatureVector group_filter(const FeatureVector& fv, GazeGroupKind group) {
  FeatureVector out;
  for (const Feature& e : fv.entries) {
    auto dot = e.name.find('.');
    if (dot == std::string::npos) continue;
    const int m = gaze_measure_index(std::string_view(e.name).substr(dot + 1));
    if (m < 0) continue;  // boundary flags and other non-registry entries
    if (gaze_measure_group(m) == group) out.entries.push_back(e);
  }
  return out;
}

}  // namespace itclass
