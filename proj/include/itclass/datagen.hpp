#ifndef ITCLASS_DATAGEN_HPP
#define ITCLASS_DATAGEN_HPP

#include <cstdint>
#include <string>

namespace itclass {

// Generates a corpus export in the shape of the public eye-tracking corpus
// this toolkit consumes: a word-level gaze CSV (one row per participant and
// token), a dual-annotator annotation TSV over the located pronoun
// instances, gold tags, a disjoint tagger-training corpus and a small
// word-embedding table. Everything is derived deterministically from `seed`,
// so repeated runs are byte-identical.
struct DatagenConfig {
  std::string out_dir;
  std::uint64_t seed = 20180614;
  int participants = 14;
  long target_tokens = 54364;
  int embedding_dim = 50;
  // Scales every annotation-plan cell; 1.0 reproduces the published
  // distribution exactly, smaller values give fast test fixtures.
  double plan_scale = 1.0;
};

struct DatagenResult {
  std::string gaze_csv;
  std::string annotations_tsv;
  std::string corpus_tagged_tsv;
  std::string tagger_train_tsv;
  std::string embeddings_txt;
  long tokens = 0;
  long clean_instances = 0;
  long noise_tokens = 0;
  long annotation_rows = 0;
};

DatagenResult generate_corpus(const DatagenConfig& cfg);

}  // namespace itclass

#endif
