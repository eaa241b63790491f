#include "itclass/types.hpp"

#include <algorithm>
#include <unordered_map>

namespace itclass {

const char* label_name(Label l) {
  switch (l) {
    case Label::NOM:
      return "NOM";
    case Label::PLEON:
      return "PLEON";
    case Label::CLAUSE:
      return "CLAUSE";
  }
  return "?";
}

Label parse_label(std::string_view s) {
  if (s == "NOM") return Label::NOM;
  if (s == "PLEON") return Label::PLEON;
  if (s == "CLAUSE") return Label::CLAUSE;
  throw ValidationError("unknown label: '" + std::string(s) +
                        "' (expected PLEON|NOM|CLAUSE)");
}

const std::array<std::string, kNumGazeMeasures>& gaze_measure_names() {
  static const std::array<std::string, kNumGazeMeasures> names = {
      // Early
      "First_Run_Fixation_Count", "First_Run_Fixation_Pct",
      "First_Fixation_Duration", "First_Fixation_Visited_Count",
      "First_Fix_Progressive",
      // Medium
      "Second_Run_Fixation_Count", "Second_Run_Fixation_Pct",
      "Second_Fixation_Duration", "Second_Fixation_Run", "Gaze_Duration",
      // Late
      "Third_Run_Fixation_Count", "Third_Run_Fixation_Pct",
      "Third_Fixation_Duration", "Third_Fixation_Run", "Last_Fixation_Duration",
      "Last_Fixation_Run", "Go_Past_Time", "Selective_Go_Past_Time",
      "Fixation_Count", "Fixation_Pct", "Total_Reading_Time",
      "Total_Reading_Time_Pct", "Trial_Fixation_Count",
      "Trial_Total_Reading_Time", "Spillover", "Skip"};
  return names;
}

int gaze_measure_index(std::string_view name) {
  static const std::unordered_map<std::string_view, int> index = [] {
    std::unordered_map<std::string_view, int> m;
    const auto& names = gaze_measure_names();
    for (int i = 0; i < kNumGazeMeasures; ++i) m.emplace(names[i], i);
    return m;
  }();
  auto it = index.find(name);
  return it == index.end() ? -1 : it->second;
}

GazeGroupKind gaze_measure_group(int index) {
  if (index < 5) return GazeGroupKind::EARLY;
  if (index < 10) return GazeGroupKind::MEDIUM;
  return GazeGroupKind::LATE;
}

std::vector<int> gaze_group_members(GazeGroupKind g) {
  std::vector<int> out;
  for (int i = 0; i < kNumGazeMeasures; ++i) {
    if (gaze_measure_group(i) == g) out.push_back(i);
  }
  return out;
}

bool gaze_measure_is_averaged_on_combine(int index) {
  // Skip, First_Fix_Progressive and the run-index measures; summing those
  // would not mean anything.
  switch (index) {
    case 3:   // First_Fixation_Visited_Count
    case 4:   // First_Fix_Progressive
    case 8:   // Second_Fixation_Run
    case 13:  // Third_Fixation_Run
    case 15:  // Last_Fixation_Run
    case 25:  // Skip
      return true;
    default:
      return false;
  }
}

bool gaze_measure_is_trial_level(int index) {
  return index == kTrialFixationCountIdx || index == kTrialTotalReadingTimeIdx;
}

void FeatureVector::add_numeric(std::string name, double v, std::string source,
                                std::string group) {
  entries.push_back(Feature{std::move(name), FeatureKind::Numeric, v, "",
                            std::move(source), std::move(group)});
}

void FeatureVector::add_categorical(std::string name, std::string v,
                                    std::string source, std::string group) {
  entries.push_back(Feature{std::move(name), FeatureKind::Categorical, 0.0,
                            std::move(v), std::move(source), std::move(group)});
}

const Feature* FeatureVector::find(std::string_view name) const {
  for (const auto& e : entries) {
    if (e.name == name) return &e;
  }
  return nullptr;
}

double FeatureVector::numeric(std::string_view name) const {
  const Feature* f = find(name);
  if (!f || f->kind != FeatureKind::Numeric)
    throw ValidationError("no numeric feature named '" + std::string(name) + "'");
  return f->num;
}

std::string FeatureVector::categorical(std::string_view name) const {
  const Feature* f = find(name);
  if (!f || f->kind != FeatureKind::Categorical)
    throw ValidationError("no categorical feature named '" + std::string(name) +
                          "'");
  return f->cat;
}

void FeatureVector::append(const FeatureVector& other) {
  for (const auto& e : other.entries) {
    if (find(e.name))
      throw ValidationError("duplicate feature name on append: " + e.name);
    entries.push_back(e);
  }
}

}  // namespace itclass
