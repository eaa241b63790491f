#ifndef ITCLASS_CORPUS_HPP
#define ITCLASS_CORPUS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "itclass/types.hpp"

namespace itclass {

struct GazeCorpus {
  std::vector<Token> tokens;           // ordered by uid
  std::vector<RawGazeRecord> records;  // one per (participant, token) row
};

// Reads the word-level gaze export (CSV, one row per participant x token).
// Validates the measure-column registry, the non-negativity of durations,
// the [0,100] range of percentage columns and the skip/first-run invariant.
// Empty measure cells mean "not applicable" and are imputed as 0.
GazeCorpus load_gaze_corpus(const std::string& path);

// Per-token arithmetic mean over participants, summed in ascending
// participant_id order so repeated runs are bit-identical.
// Errors if a token has no gaze records at all.
std::vector<GazeMeasures> average_gaze(const std::vector<RawGazeRecord>& records,
                                       const std::vector<Token>& tokens);

// Occurrences of the pronoun: lowercased surface "it" or the clitic "it's"
// (either apostrophe). The possessive "its" is not an occurrence. Surfaces
// that look like tokenisation errors ("it...the") are flagged, not located.
struct ItCandidate {
  std::uint32_t uid = 0;
  bool noise = false;  // true when the surface carries junk characters
};

std::vector<ItCandidate> locate_it_candidates(const std::vector<Token>& tokens);

// Clean instances only; strictly increasing uids.
std::vector<std::uint32_t> locate_it_instances(const std::vector<Token>& tokens);

// Dual-annotator labels, TSV (token_uid, annotator1, annotator2).
// `instances` is the set of uids that may legally carry an annotation;
// a row referencing any other uid is an error. final_label is set when the
// two annotators agree.
std::vector<AnnotatedInstance> load_annotations(
    const std::string& path, const std::vector<std::uint32_t>& instances);

// The classification dataset: instances on which the annotators agreed and
// whose token is a clean located occurrence (noise-flagged tokens drop out
// here even when annotated).
std::vector<AnnotatedInstance> retained_instances(
    const std::vector<AnnotatedInstance>& annotated,
    const std::vector<std::uint32_t>& located_clean);

// ---------------------------------------------------------------------------
// Small CSV helpers shared by the loaders and report writers.

// Splits one CSV line honouring RFC-4180 double quotes.
std::vector<std::string> csv_split(std::string_view line);

// Quotes a field if it contains a comma, quote or newline.
std::string csv_quote(std::string_view field);

}  // namespace itclass

#endif
