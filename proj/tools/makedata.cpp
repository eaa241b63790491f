#include <CLI11.hpp>

#include <cstdio>

#include "itclass/datagen.hpp"

// Generates the demonstration corpus export this repository's experiment
// presets run against. The original eye-tracking corpus cannot be
// redistributed here; this produces a same-shaped export with the published
// annotation statistics baked in, deterministically from the seed.
int main(int argc, char** argv) {
  CLI::App app{"Generate the synthetic gaze-corpus export"};

  itclass::DatagenConfig cfg;
  cfg.out_dir = "data/generated";
  app.add_option("--out", cfg.out_dir, "Output directory");
  app.add_option("--seed", cfg.seed, "Generator seed (changing it changes every file)");
  app.add_option("--participants", cfg.participants, "Number of readers");
  app.add_option("--tokens", cfg.target_tokens, "Corpus size in tokens");
  app.add_option("--scale", cfg.plan_scale,
                 "Annotation-plan scale (1.0 = published distribution)");
  app.add_option("--embedding-dim", cfg.embedding_dim, "Embedding dimensionality");

  CLI11_PARSE(app, argc, argv);

  try {
    itclass::DatagenResult res = itclass::generate_corpus(cfg);
    std::printf("gaze csv:      %s\n", res.gaze_csv.c_str());
    std::printf("annotations:   %s (%ld rows)\n", res.annotations_tsv.c_str(),
                res.annotation_rows);
    std::printf("gold tags:     %s\n", res.corpus_tagged_tsv.c_str());
    std::printf("tagger corpus: %s\n", res.tagger_train_tsv.c_str());
    std::printf("embeddings:    %s\n", res.embeddings_txt.c_str());
    std::printf("tokens: %ld, clean instances: %ld, noise tokens: %ld\n",
                res.tokens, res.clean_instances, res.noise_tokens);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
