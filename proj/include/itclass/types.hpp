#ifndef ITCLASS_TYPES_HPP
#define ITCLASS_TYPES_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "itclass/common.hpp"

namespace itclass {

// ---------------------------------------------------------------------------
// Labels

enum class Label : int { NOM = 0, PLEON = 1, CLAUSE = 2 };

inline constexpr int kNumClasses = 3;

// Tie-breaking / report order.
inline constexpr std::array<Label, 3> kClassOrder = {Label::NOM, Label::PLEON,
                                                     Label::CLAUSE};

// Confusion matrices are laid out gold-by-predicted in this order.
inline constexpr std::array<Label, 3> kMatrixOrder = {Label::NOM, Label::CLAUSE,
                                                      Label::PLEON};

const char* label_name(Label l);
Label parse_label(std::string_view s);  // throws ValidationError

// ---------------------------------------------------------------------------
// Gaze measure registry (fixed 26-column registry, grouped Early/Medium/Late)

inline constexpr int kNumGazeMeasures = 26;

enum class GazeGroupKind { EARLY, MEDIUM, LATE };

// Index into the registry; Early = [0,5), Medium = [5,10), Late = [10,26).
const std::array<std::string, kNumGazeMeasures>& gaze_measure_names();
int gaze_measure_index(std::string_view name);  // -1 when unknown
GazeGroupKind gaze_measure_group(int index);
std::vector<int> gaze_group_members(GazeGroupKind g);

// Measures that are not meaningfully additive across adjacent words; when two
// regions are combined these are averaged instead of summed.
bool gaze_measure_is_averaged_on_combine(int index);

// Trial-level measures (constant across all words of a trial).
bool gaze_measure_is_trial_level(int index);

inline constexpr int kTrialFixationCountIdx = 22;
inline constexpr int kTrialTotalReadingTimeIdx = 23;
inline constexpr int kSkipIdx = 25;
inline constexpr int kFirstRunFixationCountIdx = 0;

// ---------------------------------------------------------------------------
// Corpus records

struct Token {
  std::uint32_t uid = 0;  // global token index, 0-based, file order
  int trial_id = 0;
  int sentence_id = 0;
  int paragraph_id = 0;
  int position_in_sentence = 0;  // 0-based, resets at sentence change
  std::string surface;
  bool is_punctuation = false;
};

struct RawGazeRecord {
  int participant_id = 0;
  std::uint32_t token_uid = 0;
  std::array<double, kNumGazeMeasures> measures{};  // registry order
};

struct GazeMeasures {
  std::uint32_t token_uid = 0;
  std::array<double, kNumGazeMeasures> measures{};  // mean over participants
  int n_participants = 0;
};

struct AnnotatedInstance {
  std::uint32_t token_uid = 0;
  Label label_a1 = Label::NOM;
  Label label_a2 = Label::NOM;
  std::optional<Label> final_label;  // present iff the annotators agree
};

// ---------------------------------------------------------------------------
// Feature vectors

enum class FeatureKind { Numeric, Categorical };

struct Feature {
  std::string name;
  FeatureKind kind = FeatureKind::Numeric;
  double num = 0.0;
  std::string cat;
  // Provenance: which extractor produced the entry ("gaze:IT_PLUS_NEXT",
  // "basic", "pos_window", "linguistic", "embedding").
  std::string source;
  // Selection group this entry belongs to; forward selection toggles groups.
  std::string group;
};

struct FeatureVector {
  std::vector<Feature> entries;

  void add_numeric(std::string name, double v, std::string source,
                   std::string group);
  void add_categorical(std::string name, std::string v, std::string source,
                       std::string group);
  const Feature* find(std::string_view name) const;
  double numeric(std::string_view name) const;       // throws if absent
  std::string categorical(std::string_view name) const;  // throws if absent
  void append(const FeatureVector& other);            // throws on name clash
};

}  // namespace itclass

#endif
