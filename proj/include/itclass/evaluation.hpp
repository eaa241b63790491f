#ifndef ITCLASS_EVALUATION_HPP
#define ITCLASS_EVALUATION_HPP

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "itclass/types.hpp"

namespace itclass {

// 3x3 counts, rows = gold, columns = predicted, both in kMatrixOrder
// (NOM, CLAUSE, PLEON).
struct ConfusionMatrix {
  std::array<std::array<long, 3>, 3> counts{};

  static int slot(Label l);            // index of a label in kMatrixOrder
  void add(Label gold, Label predicted, long n = 1);
  long total() const;
  long row_sum(int r) const;
  long col_sum(int c) const;
};

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  long support = 0;
};

// All ratios in [0,1]; reports multiply by 100 when rendering.
struct EvalReport {
  std::array<ClassMetrics, 3> per_class{};  // kMatrixOrder
  double weighted_precision = 0.0;
  double weighted_recall = 0.0;
  double weighted_f1 = 0.0;
  double macro_f1 = 0.0;  // supplementary only
  double accuracy = 0.0;
  long n = 0;
  std::string model_id;
  std::string feature_set_id;
};

struct AgreementReport {
  double kappa = 0.0;
  double percent_agreement = 0.0;  // in [0,100]
  std::array<long, 3> dist_a1{};   // counts per class, kClassOrder? see note
  std::array<long, 3> dist_a2{};
  long n_pairs = 0;
  long n_agreements = 0;
};
// dist_* are indexed by Label cast to int (NOM=0, PLEON=1, CLAUSE=2).

// Per-class precision/recall/F1 from a pooled confusion matrix, and the
// class-count weighted summary scores. Weighted recall equals accuracy by
// construction when every instance receives exactly one prediction.
EvalReport weighted_prf(const ConfusionMatrix& cm);

// Predicts the most frequent class for everything (ties fall back to
// kClassOrder) and evaluates that.
EvalReport majority_baseline(const std::vector<Label>& gold);

// Cohen's kappa over two aligned label sequences. kappa is defined as 0 in
// the degenerate case where expected agreement is 1.
AgreementReport cohen_kappa(const std::vector<Label>& a,
                            const std::vector<Label>& b);

// Stratified k folds: seeded shuffle within each class (processed in
// kClassOrder), then one continuous round-robin deal across folds, which
// keeps both per-class counts and fold sizes within +-1.
// Returns fold index per instance.
std::vector<int> stratified_kfold(const std::vector<Label>& labels, int k,
                                  std::uint64_t seed);

struct SignificanceResult {
  double observed_delta = 0.0;  // weighted-F1 difference, percentage points
  double p_value = 1.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  int iterations = 0;
};

// Paired bootstrap over instances for the weighted-F1 difference between two
// prediction vectors on shared gold labels. Per-resample RNG streams are
// derived from (seed, resample index), so parallel and sequential runs agree.
SignificanceResult significance(const std::vector<Label>& preds_a,
                                const std::vector<Label>& preds_b,
                                const std::vector<Label>& gold, int iterations,
                                std::uint64_t seed);

}  // namespace itclass

#endif
