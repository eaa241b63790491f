#ifndef ITCLASS_TAGGER_HPP
#define ITCLASS_TAGGER_HPP

#include <cstdint>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "itclass/types.hpp"

namespace itclass {

using TaggedSentence = std::vector<std::pair<std::string, std::string>>;

// Averaged-perceptron POS tagger (Penn Treebank tags). Greedy left-to-right
// decoding with word/suffix/shape and previous-tag features; words that were
// only ever seen with one tag short-circuit through a tag dictionary.
class TaggerModel {
 public:
  struct TagWeight {
    double w = 0.0;
    double total = 0.0;
    long ts = 0;
  };

  // Frozen averaged weights: feature -> tag id -> weight.
  std::unordered_map<std::string, std::unordered_map<int, double>> weights;
  std::vector<std::string> tags;                       // id -> name
  std::unordered_map<std::string, int> tag_ids;        // name -> id
  std::unordered_map<std::string, int> tag_dictionary;  // word -> tag id

  const std::string& tag_name(int id) const { return tags[id]; }
  bool empty() const { return weights.empty() && tag_dictionary.empty(); }
};

// Sentence shuffling per epoch is driven only by `seed`; training itself is
// sequential and deterministic, so equal inputs give bit-identical models.
TaggerModel train_tagger(const std::vector<TaggedSentence>& corpus, int epochs,
                         std::uint64_t seed);

// One tag per token; punctuation tokens get their surface back as the tag.
// Sentences are delimited by Token::sentence_id.
std::vector<std::string> tag(const std::vector<Token>& tokens,
                             const TaggerModel& model);

// Convenience for plain word sequences (one sentence).
std::vector<std::string> tag_sentence(const std::vector<std::string>& words,
                                      const TaggerModel& model);

// Reads the word<TAB>tag training format (blank line = sentence boundary).
std::vector<TaggedSentence> load_tagged_corpus(const std::string& path);

// Reads a pre-tagged file aligned line-by-line with the corpus token stream;
// errors cite the first divergent line on count or surface mismatch.
std::vector<std::string> load_tagged(const std::string& path,
                                     const std::vector<Token>& tokens);

}  // namespace itclass

#endif
