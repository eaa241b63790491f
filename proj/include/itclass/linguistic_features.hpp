#ifndef ITCLASS_LINGUISTIC_FEATURES_HPP
#define ITCLASS_LINGUISTIC_FEATURES_HPP

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "itclass/types.hpp"

namespace itclass {

// Distance features saturate here when the target never occurs before the
// sentence ends.
inline constexpr double kDistanceCap = 50.0;

struct NPSpan {
  std::uint32_t start_uid = 0;
  std::uint32_t end_uid = 0;  // inclusive
  std::uint32_t head_uid = 0;
};

// Maximal (DT|PRP$)? (JJ|JJR|JJS)* (NN|NNS|NNP|NNPS)+ spans plus bare
// pronouns (PRP), greedy left to right, non-overlapping. One sentence at a
// time; `tokens` and `tags` must be aligned.
std::vector<NPSpan> chunk_nps(const std::vector<Token>& tokens,
                              const std::vector<std::string>& tags);

struct EmbeddingTable {
  int dimension = 0;
  std::unordered_map<std::string, std::vector<float>> vectors;

  // nullptr for out-of-vocabulary words (callers substitute zeros).
  const std::vector<float>* lookup(const std::string& word) const;
};

// Text format: optional "count dim" first line, then "word v1 ... vd".
EmbeddingTable load_embeddings(const std::string& path);

// Precomputes sentence spans, paragraph groupings and NP chunks once, then
// answers per-instance feature queries.
class LinguisticContext {
 public:
  LinguisticContext(const std::vector<Token>& tokens,
                    const std::vector<std::string>& tags);

  // The Evans-style block: position, NP counts, lexical neighbours, the
  // POS window (L4..L1, R1..R4), complementiser counts, pattern booleans and
  // capped distance features.
  FeatureVector evans_features(std::uint32_t instance_uid) const;

  // Previous_word / Next_word / Word_length / Punctuation.
  FeatureVector basic_features(std::uint32_t instance_uid) const;

  // 2 x dimension numeric features for the previous and next word; zeros for
  // out-of-vocabulary words and at boundaries.
  FeatureVector embedding_features(std::uint32_t instance_uid,
                                   const EmbeddingTable& table) const;

  const std::vector<NPSpan>& sentence_nps(std::uint32_t instance_uid) const;

 private:
  struct SentenceInfo {
    std::size_t begin = 0;  // token index range [begin, end)
    std::size_t end = 0;
    std::vector<NPSpan> nps;
  };

  std::size_t index_of(std::uint32_t uid) const;
  const SentenceInfo& sentence_of(std::size_t token_index) const;

  const std::vector<Token>* tokens_;
  std::vector<std::string> tags_;
  std::vector<SentenceInfo> sentences_;
  std::vector<std::size_t> sentence_idx_of_token_;
  std::unordered_map<std::uint32_t, std::size_t> token_index_;
  // paragraph_id -> NP spans of all its sentences, in order
  std::unordered_map<int, std::vector<NPSpan>> paragraph_nps_;
};

}  // namespace itclass

#endif
