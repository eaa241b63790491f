#ifndef ITCLASS_EXPERIMENTS_HPP
#define ITCLASS_EXPERIMENTS_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "itclass/classifier.hpp"
#include "itclass/corpus.hpp"
#include "itclass/evaluation.hpp"
#include "itclass/gaze_features.hpp"
#include "itclass/linguistic_features.hpp"
#include "itclass/tagger.hpp"

namespace itclass {

// Flat key = value config; feature_block and select_pool may repeat.
struct ExperimentConfig {
  // Paths
  std::string gaze_csv;
  std::string annotations;
  std::string tagger_train;  // train the built-in tagger on this file
  std::string tagged;        // or use a pre-tagged, corpus-aligned file
  std::string embeddings;

  std::string model = "logistic";  // logistic | majority
  std::string model_id;            // defaults to the config file stem
  std::vector<std::string> feature_blocks;
  std::vector<std::string> select_pools;

  int folds = 10;
  std::uint64_t seed = 20;
  double l2_lambda = 1.0;
  int max_iters = 500;
  double tolerance = 1e-6;
  int rare_threshold = 2;
  int tagger_epochs = 5;

  // Cheaper settings used while ranking candidates during forward selection;
  // the winning feature set is always re-scored with the full settings.
  double select_min_gain = 0.1;
  int select_max_iters = 100;
  double select_tolerance = 1e-3;
  int select_max_additions = 24;
  // After the first selection round, keep only this many candidates (0 =
  // keep all); bounds the cost of selection over large pools.
  int select_top_k = 0;

  int bootstrap_iterations = 10000;
  int threads = 0;  // 0 = hardware concurrency

  std::string out_dir = "out";

  // Canonical text used for hashing and provenance echo.
  std::string canonical() const;
  std::uint64_t hash() const;
};

ExperimentConfig parse_config_file(const std::string& path);
ExperimentConfig parse_config_text(const std::string& text,
                                   const std::string& origin);

// Expands a feature_block spec ("basic", "prev_next_word", "pos_window",
// "linguistic", "embeddings", "gaze:REGION[:GROUP]") into selection group
// names. Throws on unknown specs.
std::vector<std::string> expand_block(const std::string& block);

// ---------------------------------------------------------------------------
// Loaded corpus + per-instance features

struct Dataset {
  std::vector<Token> tokens;
  std::vector<GazeMeasures> gaze;
  std::vector<std::string> tags;
  std::vector<ItCandidate> candidates;
  std::vector<std::uint32_t> located;              // clean instances
  std::vector<AnnotatedInstance> annotated;        // every annotation row
  std::vector<AnnotatedInstance> retained;         // final-labelled, clean
  std::vector<FeatureVector> features;             // aligned with retained
  std::vector<Label> labels;                       // aligned with retained
  long corpus_token_count = 0;
};

// Runs ingest -> tagging -> feature extraction for every feature the config
// could need (blocks plus selection pools).
Dataset load_dataset(const ExperimentConfig& cfg);

// ---------------------------------------------------------------------------
// Cross-validated evaluation

struct InstancePrediction {
  std::uint32_t token_uid = 0;
  Label gold = Label::NOM;
  Label predicted = Label::NOM;
  int fold = 0;
};

struct CvOutcome {
  ConfusionMatrix cm;
  EvalReport report;                       // micro-pooled over folds
  std::vector<InstancePrediction> preds;   // one per instance, uid-ordered
};

// Stratified k-fold train/predict with per-fold encoding; predictions from
// all folds pool into a single confusion matrix.
CvOutcome run_cv(const std::vector<FeatureVector>& features,
                 const std::vector<Label>& labels,
                 const std::vector<std::uint32_t>& uids,
                 const std::vector<int>& fold_of,
                 const std::vector<std::string>& groups, const TrainConfig& tc,
                 int rare_threshold, int threads);

struct ExperimentResult {
  EvalReport report;
  ConfusionMatrix cm;
  std::vector<InstancePrediction> preds;
  SelectionResult selection;  // empty when no selection pool configured
  std::vector<int> fold_of;
  std::vector<std::uint32_t> uids;
  std::vector<std::string> active_groups;
  double wall_seconds = 0.0;
  std::string out_path;  // set when artifacts were written
};

// The full pipeline for one config. When `out_root` is non-empty, writes
// report.csv/report.txt/confusion.csv/predictions.csv/folds.csv/
// features.csv/selection_trace.csv/config.txt under out_root/<config hash>/.
ExperimentResult run_experiment(const ExperimentConfig& cfg,
                                const Dataset& data,
                                const std::string& out_root = "");

// Convenience: loads the dataset itself.
ExperimentResult run_experiment(const ExperimentConfig& cfg,
                                const std::string& out_root = "");

// ---------------------------------------------------------------------------
// Ablation grid (gaze group x region over the token baseline)

struct AblationResult {
  double baseline_f1 = 0.0;                 // token baseline, percentage points
  std::array<std::array<double, 4>, 3> f1;  // [Early,Medium,Late] x
                                            // [PREV, IT, NEXT, IT_PLUS_NEXT]
  std::string out_path;
};

AblationResult run_ablation(const ExperimentConfig& cfg, const Dataset& data,
                            const std::string& out_root = "");

// ---------------------------------------------------------------------------
// Agreement

struct AgreementSummary {
  AgreementReport agreement;           // over every annotation pair
  std::array<long, 3> final_counts{};  // retained label counts (Label index)
  long retained_total = 0;
  long disagreements = 0;
  std::string table_text;              // aligned three-column distribution
};

AgreementSummary agreement_report(const ExperimentConfig& cfg,
                                  const Dataset& data);

// ---------------------------------------------------------------------------
// Report rendering

std::string render_report_csv(const std::vector<EvalReport>& reports);
std::string render_report_table(const std::vector<EvalReport>& reports);
std::string render_confusion_csv(const ConfusionMatrix& cm);

// Feature dump: token_uid, final_label, then one column per feature.
std::string render_feature_dump(const std::vector<FeatureVector>& features,
                                const std::vector<Label>& labels,
                                const std::vector<std::uint32_t>& uids);

struct FeatureDump {
  std::vector<FeatureVector> features;
  std::vector<Label> labels;
  std::vector<std::uint32_t> uids;
};
FeatureDump parse_feature_dump(const std::string& csv_text);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace itclass

#endif
