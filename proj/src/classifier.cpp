#include "itclass/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace itclass {

// ---------------------------------------------------------------------------
// ColumnPlan

static ColumnPlan fit_impl(const std::vector<FeatureVector>& rows,
                           const std::vector<std::size_t>& train_idx,
                           const std::vector<std::string>* groups,
                           int rare_threshold);

ColumnPlan ColumnPlan::fit(const std::vector<FeatureVector>& rows,
                           const std::vector<std::size_t>& train_idx,
                           int rare_threshold) {
  return fit_impl(rows, train_idx, nullptr, rare_threshold);
}

ColumnPlan ColumnPlan::fit(const std::vector<FeatureVector>& rows,
                           const std::vector<std::size_t>& train_idx,
                           const std::vector<std::string>& groups,
                           int rare_threshold) {
  return fit_impl(rows, train_idx, &groups, rare_threshold);
}

// groups == nullptr means every feature; an empty list means none.
static ColumnPlan fit_impl(const std::vector<FeatureVector>& rows,
                           const std::vector<std::size_t>& train_idx,
                           const std::vector<std::string>* groups,
                           int rare_threshold) {
  std::vector<EncodedColumn> cols;
  if (rows.empty() || train_idx.empty())
    return ColumnPlan::from_columns(std::move(cols));

  std::unordered_set<std::string> active;
  if (groups) active.insert(groups->begin(), groups->end());
  const bool all_groups = groups == nullptr;
  const FeatureVector& schema = rows[0];

  // Schema consistency across all rows.
  for (const auto& fv : rows) {
    if (fv.entries.size() != schema.entries.size())
      throw ValidationError("feature schema mismatch: differing entry counts");
  }
  for (std::size_t e = 0; e < schema.entries.size(); ++e) {
    for (const auto& fv : rows) {
      if (fv.entries[e].name != schema.entries[e].name)
        throw ValidationError("feature schema mismatch at feature '" +
                              schema.entries[e].name + "'");
    }
  }

  for (std::size_t e = 0; e < schema.entries.size(); ++e) {
    const Feature& proto = schema.entries[e];
    if (!all_groups && !active.count(proto.group)) continue;

    if (proto.kind == FeatureKind::Numeric) {
      double sum = 0.0, sumsq = 0.0;
      for (std::size_t i : train_idx) {
        double v = rows[i].entries[e].num;
        if (!std::isfinite(v))
          throw ValidationError("non-finite value in numeric feature '" +
                                proto.name + "'");
        sum += v;
        sumsq += v * v;
      }
      const double n = static_cast<double>(train_idx.size());
      const double mean = sum / n;
      double var = sumsq / n - mean * mean;
      if (var < 0) var = 0;
      const double sd = std::sqrt(var);
      if (sd <= 0.0) continue;  // constant column, nothing to learn from it
      EncodedColumn col;
      col.name = proto.name;
      col.feature = proto.name;
      col.group = proto.group;
      col.kind = FeatureKind::Numeric;
      col.mean = mean;
      col.sd = sd;
      cols.push_back(std::move(col));
    } else {
      std::map<std::string, int> counts;  // ordered -> deterministic levels
      for (std::size_t i : train_idx) counts[rows[i].entries[e].cat]++;
      std::vector<std::string> levels;
      bool has_rare = false;
      for (const auto& [level, cnt] : counts) {
        if (cnt >= rare_threshold) levels.push_back(level);
        else has_rare = true;
      }
      if (has_rare) levels.push_back(kRareLevel);
      if (levels.size() < 2) continue;  // single effective level = constant
      for (const auto& level : levels) {
        EncodedColumn col;
        col.name = proto.name + "=" + level;
        col.feature = proto.name;
        col.group = proto.group;
        col.kind = FeatureKind::Categorical;
        col.level = level;
        col.mean = 0.0;
        col.sd = 1.0;
        cols.push_back(std::move(col));
      }
    }
  }
  return ColumnPlan::from_columns(std::move(cols));
}

Eigen::RowVectorXd ColumnPlan::encode_row(const FeatureVector& fv) const {
  Eigen::RowVectorXd row(static_cast<Eigen::Index>(cols_.size()));
  std::unordered_map<std::string_view, const Feature*> by_name;
  by_name.reserve(fv.entries.size() * 2);
  for (const auto& e : fv.entries) by_name.emplace(e.name, &e);

  for (std::size_t c = 0; c < cols_.size(); ++c) {
    const EncodedColumn& col = cols_[c];
    auto it = by_name.find(col.feature);
    if (it == by_name.end())
      throw ValidationError("row is missing feature '" + col.feature + "'");
    const Feature& f = *it->second;
    if (f.kind != col.kind)
      throw ValidationError("feature kind mismatch for '" + col.feature + "'");
    if (col.kind == FeatureKind::Numeric) {
      row(static_cast<Eigen::Index>(c)) = (f.num - col.mean) / col.sd;
    } else {
      row(static_cast<Eigen::Index>(c)) = (f.cat == col.level) ? 1.0 : 0.0;
    }
  }

  // Unseen categorical levels map to the RARE column when the plan has one.
  std::unordered_map<std::string_view, std::pair<bool, std::size_t>> rare_col;
  for (std::size_t c = 0; c < cols_.size(); ++c) {
    if (cols_[c].kind == FeatureKind::Categorical && cols_[c].level == kRareLevel)
      rare_col[cols_[c].feature] = {true, c};
  }
  if (!rare_col.empty()) {
    // Detect features whose one-hot block came out all-zero.
    std::unordered_map<std::string_view, double> block_sum;
    for (std::size_t c = 0; c < cols_.size(); ++c) {
      if (cols_[c].kind == FeatureKind::Categorical)
        block_sum[cols_[c].feature] += row(static_cast<Eigen::Index>(c));
    }
    for (const auto& [feat, info] : rare_col) {
      if (block_sum[feat] == 0.0)
        row(static_cast<Eigen::Index>(info.second)) = 1.0;
    }
  }
  return row;
}

Eigen::MatrixXd ColumnPlan::encode(const std::vector<FeatureVector>& rows,
                                   const std::vector<std::size_t>& idx) const {
  Eigen::MatrixXd X(static_cast<Eigen::Index>(idx.size()),
                    static_cast<Eigen::Index>(cols_.size()));
  for (std::size_t r = 0; r < idx.size(); ++r)
    X.row(static_cast<Eigen::Index>(r)) = encode_row(rows[idx[r]]);
  return X;
}

std::uint64_t ColumnPlan::schema_hash() const {
  std::uint64_t h = fnv1a64("itclass-columns-v1");
  for (const auto& c : cols_) {
    h = fnv1a64(c.name, h);
    h = fnv1a64("|", h);
  }
  return h;
}

ColumnPlan ColumnPlan::concatenated(const ColumnPlan& other) const {
  ColumnPlan out = *this;
  out.cols_.insert(out.cols_.end(), other.cols_.begin(), other.cols_.end());
  return out;
}

ColumnPlan ColumnPlan::from_columns(std::vector<EncodedColumn> cols) {
  ColumnPlan plan;
  plan.cols_ = std::move(cols);
  return plan;
}

DesignMatrix encode(const std::vector<FeatureVector>& rows, int rare_threshold) {
  std::vector<std::size_t> idx(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) idx[i] = i;
  DesignMatrix dm;
  dm.plan = ColumnPlan::fit(rows, idx, rare_threshold);
  dm.X = dm.plan.encode(rows, idx);
  return dm;
}

// ---------------------------------------------------------------------------
// Training

namespace {

// Row-wise softmax with the usual max-shift; also returns the data loss.
double softmax_rows(const Eigen::MatrixXd& scores,
                    const std::vector<Label>& y, Eigen::MatrixXd& probs) {
  const Eigen::Index n = scores.rows();
  probs.resize(n, scores.cols());
  double loss = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double m = scores.row(i).maxCoeff();
    Eigen::RowVectorXd ex = (scores.row(i).array() - m).exp();
    const double z = ex.sum();
    probs.row(i) = ex / z;
    loss -= scores(i, static_cast<int>(y[static_cast<std::size_t>(i)])) - m -
            std::log(z);
  }
  return loss;
}

double loss_only(const Eigen::MatrixXd& Xb, const Eigen::MatrixXd& W,
                 const std::vector<Label>& y, double lambda) {
  const Eigen::MatrixXd scores = Xb * W.transpose();
  double loss = 0.0;
  for (Eigen::Index i = 0; i < scores.rows(); ++i) {
    const double m = scores.row(i).maxCoeff();
    const double z = (scores.row(i).array() - m).exp().sum();
    loss -= scores(i, static_cast<int>(y[static_cast<std::size_t>(i)])) - m -
            std::log(z);
  }
  const Eigen::Index d = W.cols() - 1;
  loss += 0.5 * lambda * W.leftCols(d).squaredNorm();
  return loss;
}

}  // namespace

namespace {

Eigen::MatrixXd with_bias(const Eigen::MatrixXd& X) {
  Eigen::MatrixXd Xb(X.rows(), X.cols() + 1);
  Xb.leftCols(X.cols()) = X;
  Xb.col(X.cols()).setOnes();
  return Xb;
}

}  // namespace

double lr_objective(const Eigen::MatrixXd& X, const std::vector<Label>& y,
                    const Eigen::MatrixXd& W, double lambda) {
  return loss_only(with_bias(X), W, y, lambda);
}

Eigen::MatrixXd lr_gradient(const Eigen::MatrixXd& X,
                            const std::vector<Label>& y,
                            const Eigen::MatrixXd& W, double lambda) {
  const Eigen::MatrixXd Xb = with_bias(X);
  const Eigen::Index d = X.cols();
  Eigen::MatrixXd probs;
  Eigen::MatrixXd scores = Xb * W.transpose();
  softmax_rows(scores, y, probs);
  for (Eigen::Index i = 0; i < Xb.rows(); ++i)
    probs(i, static_cast<int>(y[static_cast<std::size_t>(i)])) -= 1.0;
  Eigen::MatrixXd grad = probs.transpose() * Xb;
  grad.leftCols(d) += lambda * W.leftCols(d);
  return grad;
}

TrainResult train(const Eigen::MatrixXd& X, const std::vector<Label>& y,
                  const ColumnPlan& plan, const TrainConfig& cfg,
                  const Eigen::MatrixXd* warm_start) {
  const Eigen::Index n = X.rows();
  if (n == 0) throw ValidationError("train: no rows");
  if (static_cast<std::size_t>(n) != y.size())
    throw ValidationError("train: label count does not match row count");
  {
    std::set<Label> present(y.begin(), y.end());
    if (present.size() < 2)
      throw ValidationError("train: need at least 2 classes present");
  }

  const Eigen::Index d = X.cols();
  Eigen::MatrixXd Xb(n, d + 1);
  Xb.leftCols(d) = X;
  Xb.col(d).setOnes();

  Eigen::MatrixXd W = Eigen::MatrixXd::Zero(kNumClasses, d + 1);
  if (warm_start) {
    if (warm_start->rows() != kNumClasses || warm_start->cols() != d + 1)
      throw ValidationError("train: warm start shape mismatch");
    W = *warm_start;
  }

  TrainResult result;
  result.params.l2_lambda = cfg.l2_lambda;
  result.params.seed = cfg.seed;
  result.params.columns = plan.columns();

  Eigen::MatrixXd probs, scores, grad;
  double step = 1.0;
  double loss = loss_only(Xb, W, y, cfg.l2_lambda);
  if (!std::isfinite(loss))
    throw ValidationError("train: non-finite loss at start (bad scaling?)");
  if (cfg.collect_loss_trace) result.loss_trace.push_back(loss);

  // Backtracking proximal gradient: the cross-entropy part is stepped along
  // its gradient, the L2 term applied in closed form (so a large lambda
  // cannot wreck the step size), and the unpenalised bias moves freely.
  int iter = 0;
  for (; iter < cfg.max_iters; ++iter) {
    scores.noalias() = Xb * W.transpose();
    softmax_rows(scores, y, probs);
    for (Eigen::Index i = 0; i < n; ++i)
      probs(i, static_cast<int>(y[static_cast<std::size_t>(i)])) -= 1.0;
    grad.noalias() = probs.transpose() * Xb;  // data gradient only

    Eigen::MatrixXd full_grad = grad;
    full_grad.leftCols(d) += cfg.l2_lambda * W.leftCols(d);
    if (full_grad.cwiseAbs().maxCoeff() < cfg.tolerance) {
      result.converged = true;
      break;
    }

    double t = std::min(step * 2.0, 1e3);
    bool accepted = false;
    Eigen::MatrixXd Wtry(kNumClasses, d + 1);
    for (int halvings = 0; halvings < 60; ++halvings) {
      Wtry.leftCols(d) =
          (W.leftCols(d) - t * grad.leftCols(d)) / (1.0 + t * cfg.l2_lambda);
      Wtry.col(d) = W.col(d) - t * grad.col(d);
      const double ltry = loss_only(Xb, Wtry, y, cfg.l2_lambda);
      const double moved2 = (Wtry - W).squaredNorm();
      if (std::isfinite(ltry) && ltry <= loss - 1e-4 * moved2 / t) {
        W = Wtry;
        loss = ltry;
        step = t;
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) {
      // No descent step representable; treat as converged.
      result.converged = true;
      break;
    }
    if (!std::isfinite(loss))
      throw ValidationError("train: non-finite loss (bad scaling?)");
    if (cfg.collect_loss_trace) result.loss_trace.push_back(loss);
  }

  result.iterations = iter;
  result.final_loss = loss;
  result.params.weights = std::move(W);
  return result;
}

// ---------------------------------------------------------------------------
// Prediction

Prediction predict(const ModelParams& model, const Eigen::RowVectorXd& row) {
  const Eigen::Index d = model.weights.cols() - 1;
  if (row.cols() != d)
    throw ValidationError("predict: row has " + std::to_string(row.cols()) +
                          " columns, model expects " + std::to_string(d));
  Eigen::Vector3d scores;
  for (int c = 0; c < kNumClasses; ++c)
    scores(c) = model.weights.row(c).head(d).dot(row) + model.weights(c, d);

  const double m = scores.maxCoeff();
  Eigen::Vector3d ex = (scores.array() - m).exp();
  Prediction pred;
  pred.probabilities = ex / ex.sum();
  int best = 0;
  for (int c = 1; c < kNumClasses; ++c)
    if (pred.probabilities(c) > pred.probabilities(best)) best = c;
  pred.label = static_cast<Label>(best);
  return pred;
}

Prediction predict(const ModelParams& model, const FeatureVector& fv) {
  ColumnPlan plan = ColumnPlan::from_columns(model.columns);
  return predict(model, plan.encode_row(fv));
}

// ---------------------------------------------------------------------------
// Model persistence

void save_model(const ModelParams& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write model file: " + path);
  ColumnPlan plan = ColumnPlan::from_columns(model.columns);
  char buf[64];
  auto fmt = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
  };
  out << "itclass-model v1\n";
  out << "schema_hash " << std::hex << plan.schema_hash() << std::dec << "\n";
  out << "classes NOM PLEON CLAUSE\n";
  out << "lambda " << fmt(model.l2_lambda) << "\n";
  out << "seed " << model.seed << "\n";
  out << "columns " << model.columns.size() << "\n";
  const Eigen::Index d = model.weights.cols() - 1;
  for (Eigen::Index c = 0; c < d; ++c) {
    const EncodedColumn& col = model.columns[static_cast<std::size_t>(c)];
    out << col.name << "\t" << col.group << "\t"
        << (col.kind == FeatureKind::Numeric ? "num" : "cat") << "\t"
        << fmt(col.mean) << "\t" << fmt(col.sd) << "\t"
        << fmt(model.weights(0, c)) << "\t" << fmt(model.weights(1, c)) << "\t"
        << fmt(model.weights(2, c)) << "\n";
  }
  out << "__bias__\t-\tnum\t0\t1\t" << fmt(model.weights(0, d)) << "\t"
      << fmt(model.weights(1, d)) << "\t" << fmt(model.weights(2, d)) << "\n";
  if (!out) throw IoError("failed writing model file: " + path);
}

ModelParams load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open model file: " + path);
  std::string line;
  auto need_line = [&](const char* what) {
    if (!std::getline(in, line))
      throw ValidationError(std::string("model file truncated at ") + what);
    return line;
  };
  if (need_line("magic") != "itclass-model v1")
    throw ValidationError("not an itclass model file: " + path);
  std::string expected_hash = need_line("schema_hash");
  if (need_line("classes") != "classes NOM PLEON CLAUSE")
    throw ValidationError("unexpected class order in model file");
  std::string lambda_line = need_line("lambda");
  std::string seed_line = need_line("seed");
  std::string columns_line = need_line("columns");

  double lambda = 0.0;
  if (lambda_line.rfind("lambda ", 0) != 0 ||
      !parse_double(std::string_view(lambda_line).substr(7), lambda))
    throw ValidationError("bad lambda line in model file");
  long seed = 0, ncols = 0;
  if (seed_line.rfind("seed ", 0) != 0 ||
      !parse_long(std::string_view(seed_line).substr(5), seed))
    throw ValidationError("bad seed line in model file");
  if (columns_line.rfind("columns ", 0) != 0 ||
      !parse_long(std::string_view(columns_line).substr(8), ncols) || ncols < 0)
    throw ValidationError("bad columns line in model file");

  ModelParams model;
  model.l2_lambda = lambda;
  model.seed = static_cast<std::uint64_t>(seed);
  model.weights.resize(kNumClasses, ncols + 1);

  for (long c = 0; c <= ncols; ++c) {
    need_line("column row");
    std::vector<std::string> f = split(line, '\t');
    if (f.size() != 8)
      throw ValidationError("bad column line in model file: " + line);
    const bool is_bias = f[0] == "__bias__";
    if (is_bias != (c == ncols))
      throw ValidationError("misplaced bias line in model file");
    double mean, sd, w0, w1, w2;
    if (!parse_double(f[3], mean) || !parse_double(f[4], sd) ||
        !parse_double(f[5], w0) || !parse_double(f[6], w1) ||
        !parse_double(f[7], w2))
      throw ValidationError("bad numbers in model column line: " + line);
    model.weights(0, c) = w0;
    model.weights(1, c) = w1;
    model.weights(2, c) = w2;
    if (is_bias) break;
    EncodedColumn col;
    col.name = f[0];
    col.group = f[1];
    col.kind = f[2] == "num" ? FeatureKind::Numeric : FeatureKind::Categorical;
    auto eq = col.name.find('=');
    if (col.kind == FeatureKind::Categorical && eq != std::string::npos) {
      col.feature = col.name.substr(0, eq);
      col.level = col.name.substr(eq + 1);
    } else {
      col.feature = col.name;
    }
    col.mean = mean;
    col.sd = sd;
    model.columns.push_back(std::move(col));
  }

  ColumnPlan plan = ColumnPlan::from_columns(model.columns);
  std::ostringstream hash_check;
  hash_check << "schema_hash " << std::hex << plan.schema_hash();
  if (hash_check.str() != expected_hash)
    throw ValidationError("model file schema hash mismatch");
  return model;
}

// ---------------------------------------------------------------------------
// Forward selection

SelectionResult forward_select(
    const std::vector<std::string>& candidates,
    const std::function<double(const std::vector<std::string>&)>& scorer,
    double min_gain, int max_additions, int top_k) {
  SelectionResult result;
  std::vector<std::string> current;
  result.base_score = scorer(current);
  result.final_score = result.base_score;

  std::vector<std::string> remaining = candidates;
  bool first_round = true;
  while (!remaining.empty() &&
         static_cast<int>(current.size()) < max_additions) {
    double best_score = -1.0;
    std::size_t best_idx = 0;
    std::vector<double> round_scores(remaining.size());
    for (std::size_t i = 0; i < remaining.size(); ++i) {
      std::vector<std::string> trial = current;
      trial.push_back(remaining[i]);
      const double s = scorer(trial);
      round_scores[i] = s;
      if (s > best_score) {
        best_score = s;
        best_idx = i;
      }
    }
    if (best_score <= result.final_score + min_gain) break;
    current.push_back(remaining[best_idx]);
    result.selected.push_back(remaining[best_idx]);
    result.trace.push_back({remaining[best_idx], best_score});
    result.final_score = best_score;

    if (first_round && top_k > 0 &&
        remaining.size() > static_cast<std::size_t>(top_k)) {
      // Keep the top_k first-round candidates (stable on ties).
      std::vector<std::size_t> order(remaining.size());
      for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
      std::stable_sort(order.begin(), order.end(),
                       [&](std::size_t a, std::size_t b) {
                         return round_scores[a] > round_scores[b];
                       });
      order.resize(static_cast<std::size_t>(top_k));
      std::sort(order.begin(), order.end());  // preserve candidate order
      std::vector<std::string> pruned;
      for (std::size_t i : order)
        if (i != best_idx) pruned.push_back(remaining[i]);
      remaining = std::move(pruned);
    } else {
      remaining.erase(remaining.begin() + static_cast<long>(best_idx));
    }
    first_round = false;
  }
  return result;
}

}  // namespace itclass
