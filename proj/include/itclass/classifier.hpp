#ifndef ITCLASS_CLASSIFIER_HPP
#define ITCLASS_CLASSIFIER_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "itclass/types.hpp"

namespace itclass {

inline constexpr const char* kRareLevel = "__RARE__";

// ---------------------------------------------------------------------------
// Encoding

struct EncodedColumn {
  std::string name;      // "feature" for numerics, "feature=level" for one-hot
  std::string feature;   // source feature name
  std::string group;     // selection group
  FeatureKind kind = FeatureKind::Numeric;
  std::string level;     // categorical level (may be kRareLevel)
  double mean = 0.0;     // z-score parameters; (0,1) for one-hot columns
  double sd = 1.0;
};

// Fitted on training rows only; maps FeatureVectors to numeric rows.
// Categorical levels below `rare_threshold` occurrences collapse into a
// shared RARE level; zero-variance columns are dropped.
class ColumnPlan {
 public:
  static ColumnPlan fit(const std::vector<FeatureVector>& rows,
                        const std::vector<std::size_t>& train_idx,
                        int rare_threshold = 2);

  // Restricted variant: only features whose group is in `groups`.
  static ColumnPlan fit(const std::vector<FeatureVector>& rows,
                        const std::vector<std::size_t>& train_idx,
                        const std::vector<std::string>& groups,
                        int rare_threshold = 2);

  Eigen::MatrixXd encode(const std::vector<FeatureVector>& rows,
                         const std::vector<std::size_t>& idx) const;
  Eigen::RowVectorXd encode_row(const FeatureVector& fv) const;

  const std::vector<EncodedColumn>& columns() const { return cols_; }
  std::uint64_t schema_hash() const;

  // Used by the selection harness to splice plans: columns of `other`
  // appended after this plan's columns.
  ColumnPlan concatenated(const ColumnPlan& other) const;

  static ColumnPlan from_columns(std::vector<EncodedColumn> cols);

 private:
  std::vector<EncodedColumn> cols_;
};

struct DesignMatrix {
  Eigen::MatrixXd X;  // n x D, encoded
  ColumnPlan plan;
};

// Convenience: fit plan on all rows and encode all rows (single-split use).
DesignMatrix encode(const std::vector<FeatureVector>& rows,
                    int rare_threshold = 2);

// ---------------------------------------------------------------------------
// Multinomial logistic regression

struct TrainConfig {
  double l2_lambda = 1.0;
  int max_iters = 500;
  double tolerance = 1e-6;  // on the gradient max-norm
  std::uint64_t seed = 20;  // recorded for provenance; training is full-batch
                            // deterministic and does not consume randomness
  bool collect_loss_trace = false;
};

struct ModelParams {
  // kNumClasses x (D+1); last column is the unpenalised bias.
  // Row order matches kClassOrder (NOM, PLEON, CLAUSE).
  Eigen::MatrixXd weights;
  std::vector<EncodedColumn> columns;
  double l2_lambda = 1.0;
  std::uint64_t seed = 20;
};

struct TrainResult {
  ModelParams params;
  int iterations = 0;
  bool converged = false;
  double final_loss = 0.0;
  std::vector<double> loss_trace;  // filled when collect_loss_trace
};

// Full-batch gradient descent with Armijo backtracking on
// cross-entropy + (lambda/2)*||W||^2 (bias unpenalised). Deterministic.
// Optional warm start must match the final column count.
TrainResult train(const Eigen::MatrixXd& X, const std::vector<Label>& y,
                  const ColumnPlan& plan, const TrainConfig& cfg,
                  const Eigen::MatrixXd* warm_start = nullptr);

// The training objective and its analytic gradient at W, where W is
// kNumClasses x (X.cols() + 1) with the unpenalised bias in the last column.
// Exposed so the gradient can be checked against finite differences.
double lr_objective(const Eigen::MatrixXd& X, const std::vector<Label>& y,
                    const Eigen::MatrixXd& W, double lambda);
Eigen::MatrixXd lr_gradient(const Eigen::MatrixXd& X,
                            const std::vector<Label>& y,
                            const Eigen::MatrixXd& W, double lambda);

struct Prediction {
  Eigen::Vector3d probabilities;  // kClassOrder, sums to 1
  Label label = Label::NOM;       // argmax, ties broken by kClassOrder
};

Prediction predict(const ModelParams& model, const Eigen::RowVectorXd& row);
Prediction predict(const ModelParams& model, const FeatureVector& fv);

// Versioned flat text round-trip, lossless to 17 significant digits.
void save_model(const ModelParams& model, const std::string& path);
ModelParams load_model(const std::string& path);

// ---------------------------------------------------------------------------
// Greedy forward selection over feature groups

struct SelectionStep {
  std::string group;
  double score;  // cross-validated weighted F1 (percentage points) after add
};

struct SelectionResult {
  std::vector<std::string> selected;  // added groups, in order
  std::vector<SelectionStep> trace;
  double base_score = 0.0;
  double final_score = 0.0;
};

// scorer(groups) must return the cross-validated weighted F1, in percentage
// points, of base + groups. Adds the best candidate while the improvement
// exceeds min_gain points, up to max_additions. Ties go to the earlier
// candidate. When top_k > 0, rounds after the first only consider the top_k
// candidates of the first round's ranking (a deterministic pruning that
// bounds the quadratic cost on large pools).
SelectionResult forward_select(
    const std::vector<std::string>& candidates,
    const std::function<double(const std::vector<std::string>&)>& scorer,
    double min_gain, int max_additions = 1 << 30, int top_k = 0);

}  // namespace itclass

#endif
