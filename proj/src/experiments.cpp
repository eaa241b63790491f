#include "itclass/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>
#include <unordered_set>

namespace itclass {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Config

namespace {

std::string fmt_double(double v, const char* spec = "%.17g") {
  char buf[64];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

std::string resolve_path(const std::string& base_dir, const std::string& p) {
  if (p.empty()) return p;
  fs::path path(p);
  if (path.is_absolute() || base_dir.empty()) return p;
  return (fs::path(base_dir) / path).lexically_normal().string();
}

int effective_threads(int requested) {
  if (requested > 0) return requested;
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

// Minimal fixed-size worker pool over an index range; results land in
// caller-indexed slots so ordering never depends on scheduling.
void parallel_for(int n, int threads, const std::function<void(int)>& body) {
  threads = std::min(threads, n);
  if (threads <= 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr error;
  std::mutex error_mu;
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (;;) {
        const int i = next.fetch_add(1);
        if (i >= n) return;
        try {
          body(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mu);
          if (!error) error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace

std::string ExperimentConfig::canonical() const {
  std::ostringstream out;
  out << "gaze_csv = " << gaze_csv << "\n";
  out << "annotations = " << annotations << "\n";
  out << "tagger_train = " << tagger_train << "\n";
  out << "tagged = " << tagged << "\n";
  out << "embeddings = " << embeddings << "\n";
  out << "model = " << model << "\n";
  out << "model_id = " << model_id << "\n";
  for (const auto& b : feature_blocks) out << "feature_block = " << b << "\n";
  for (const auto& p : select_pools) out << "select_pool = " << p << "\n";
  out << "folds = " << folds << "\n";
  out << "seed = " << seed << "\n";
  out << "l2_lambda = " << fmt_double(l2_lambda) << "\n";
  out << "max_iters = " << max_iters << "\n";
  out << "tolerance = " << fmt_double(tolerance) << "\n";
  out << "rare_threshold = " << rare_threshold << "\n";
  out << "tagger_epochs = " << tagger_epochs << "\n";
  out << "select_min_gain = " << fmt_double(select_min_gain) << "\n";
  out << "select_max_iters = " << select_max_iters << "\n";
  out << "select_tolerance = " << fmt_double(select_tolerance) << "\n";
  out << "select_max_additions = " << select_max_additions << "\n";
  out << "select_top_k = " << select_top_k << "\n";
  out << "bootstrap_iterations = " << bootstrap_iterations << "\n";
  return out.str();
}

std::uint64_t ExperimentConfig::hash() const { return fnv1a64(canonical()); }

ExperimentConfig parse_config_text(const std::string& text,
                                   const std::string& origin) {
  ExperimentConfig cfg;
  std::string base_dir;
  if (!origin.empty()) base_dir = fs::path(origin).parent_path().string();

  std::size_t line_no = 0;
  for (const std::string& raw : split(text, '\n')) {
    ++line_no;
    std::string line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ValidationError(origin + " line " + std::to_string(line_no) +
                            ": expected 'key = value'");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));

    auto as_long = [&](long lo, long hi) {
      long v;
      if (!parse_long(value, v) || v < lo || v > hi)
        throw ValidationError(origin + " line " + std::to_string(line_no) +
                              ": bad value for " + key);
      return v;
    };
    auto as_double = [&]() {
      double v;
      if (value == "inf") return std::numeric_limits<double>::infinity();
      if (!parse_double(value, v))
        throw ValidationError(origin + " line " + std::to_string(line_no) +
                              ": bad value for " + key);
      return v;
    };

    if (key == "gaze_csv") cfg.gaze_csv = resolve_path(base_dir, value);
    else if (key == "annotations") cfg.annotations = resolve_path(base_dir, value);
    else if (key == "tagger_train") cfg.tagger_train = resolve_path(base_dir, value);
    else if (key == "tagged") cfg.tagged = resolve_path(base_dir, value);
    else if (key == "embeddings") cfg.embeddings = resolve_path(base_dir, value);
    else if (key == "model") cfg.model = value;
    else if (key == "model_id") cfg.model_id = value;
    else if (key == "feature_block") cfg.feature_blocks.push_back(value);
    else if (key == "select_pool") cfg.select_pools.push_back(value);
    else if (key == "folds") cfg.folds = static_cast<int>(as_long(2, 1000));
    else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(as_long(0, 1L << 62));
    else if (key == "l2_lambda") cfg.l2_lambda = as_double();
    else if (key == "max_iters") cfg.max_iters = static_cast<int>(as_long(1, 1000000));
    else if (key == "tolerance") cfg.tolerance = as_double();
    else if (key == "rare_threshold") cfg.rare_threshold = static_cast<int>(as_long(1, 1000000));
    else if (key == "tagger_epochs") cfg.tagger_epochs = static_cast<int>(as_long(1, 1000));
    else if (key == "select_min_gain") cfg.select_min_gain = as_double();
    else if (key == "select_max_iters") cfg.select_max_iters = static_cast<int>(as_long(1, 1000000));
    else if (key == "select_tolerance") cfg.select_tolerance = as_double();
    else if (key == "select_max_additions") cfg.select_max_additions = static_cast<int>(as_long(0, 10000));
    else if (key == "select_top_k") cfg.select_top_k = static_cast<int>(as_long(0, 10000));
    else if (key == "bootstrap_iterations") cfg.bootstrap_iterations = static_cast<int>(as_long(1, 100000000));
    else if (key == "threads") cfg.threads = static_cast<int>(as_long(0, 1024));
    else if (key == "out_dir") cfg.out_dir = resolve_path(base_dir, value);
    else
      throw ValidationError(origin + " line " + std::to_string(line_no) +
                            ": unknown key '" + key + "'");
  }
  if (cfg.model != "logistic" && cfg.model != "majority")
    throw ValidationError(origin + ": model must be 'logistic' or 'majority'");
  if (cfg.model_id.empty() && !origin.empty())
    cfg.model_id = fs::path(origin).stem().string();
  if (cfg.model_id.empty()) cfg.model_id = "experiment";
  return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
  return parse_config_text(read_text_file(path), path);
}

// ---------------------------------------------------------------------------
// Block expansion

namespace {

const std::vector<std::string>& evans_group_names() {
  static const std::vector<std::string> names = {
      "Word_position",
      "Preceding_NPs_in_sentence",
      "Preceding_NPs_in_paragraph",
      "Following_NPs_in_sentence",
      "NPs_in_sentence",
      "NPs_in_paragraph",
      "Following_adjectives_in_sentence",
      "Previous_verb",
      "Following_adjective",
      "Following_verb",
      "Following_complementisers",
      "An_adjective_before_the_next_NP",
      "A_complementiser_before_the_next_NP",
      "Immediately_preceding_preposition",
      "Words_until_next_complementiser",
      "Words_until_next_infinitive",
      "Words_until_next_preposition",
      "Words_until_next_ing_verb"};
  return names;
}

RegionKind parse_region(const std::string& s) {
  if (s == "prev") return RegionKind::PREV;
  if (s == "it") return RegionKind::IT;
  if (s == "next") return RegionKind::NEXT;
  if (s == "it_plus_next") return RegionKind::IT_PLUS_NEXT;
  throw ValidationError("unknown gaze region '" + s + "'");
}

std::vector<GazeGroupKind> parse_gaze_groups(const std::string& s) {
  if (s == "early") return {GazeGroupKind::EARLY};
  if (s == "medium") return {GazeGroupKind::MEDIUM};
  if (s == "late") return {GazeGroupKind::LATE};
  if (s == "all")
    return {GazeGroupKind::EARLY, GazeGroupKind::MEDIUM, GazeGroupKind::LATE};
  throw ValidationError("unknown gaze group '" + s + "' (early|medium|late|all)");
}

std::vector<std::string> expand_gaze_block(RegionKind region,
                                           const std::vector<GazeGroupKind>& groups) {
  std::vector<std::string> out;
  const std::string prefix = region_prefix(region);
  const auto& names = gaze_measure_names();
  for (GazeGroupKind g : groups) {
    for (int m : gaze_group_members(g)) {
      if (gaze_measure_is_trial_level(m)) {
        // Trial-level measures are constant across the trial's regions and
        // enter the design once, from the pronoun's own trial.
        if (region == RegionKind::IT)
          out.push_back("gaze:trial:" + names[m]);
        continue;
      }
      out.push_back("gaze:" + prefix + ":" + names[m]);
    }
  }
  if (region == RegionKind::PREV) out.push_back("gaze:PREV:boundary");
  if (region == RegionKind::NEXT || region == RegionKind::IT_PLUS_NEXT)
    out.push_back("gaze:NEXT:boundary");
  return out;
}

}  // namespace

std::vector<std::string> expand_block(const std::string& block) {
  if (block == "basic")
    return {"Previous_word", "Next_word", "Word_length", "Punctuation"};
  if (block == "prev_next_word") return {"Previous_word", "Next_word"};
  if (block == "pos_window")
    return {"POS_L4", "POS_L3", "POS_L2", "POS_L1",
            "POS_R1", "POS_R2", "POS_R3", "POS_R4"};
  if (block == "linguistic") return evans_group_names();
  if (block == "embeddings") return {"embeddings"};
  if (block == "gaze:trial")
    return {"gaze:trial:Trial_Fixation_Count",
            "gaze:trial:Trial_Total_Reading_Time"};
  if (block.rfind("gaze:", 0) == 0) {
    std::vector<std::string> parts = split(block, ':');
    if (parts.size() == 2)
      return expand_gaze_block(parse_region(parts[1]),
                               parse_gaze_groups("all"));
    if (parts.size() == 3)
      return expand_gaze_block(parse_region(parts[1]),
                               parse_gaze_groups(parts[2]));
  }
  throw ValidationError("unknown feature block '" + block + "'");
}

// ---------------------------------------------------------------------------
// Dataset loading and feature assembly

namespace {

std::vector<std::string> expand_all(const std::vector<std::string>& blocks) {
  std::vector<std::string> out;
  std::unordered_set<std::string> seen;
  for (const auto& b : blocks) {
    for (auto& g : expand_block(b)) {
      if (seen.insert(g).second) out.push_back(std::move(g));
    }
  }
  return out;
}

// Candidate pools exclude bookkeeping groups (boundary flags), which belong
// to whichever region block is active rather than being selectable signals.
std::vector<std::string> expand_pools(const std::vector<std::string>& pools,
                                      const std::vector<std::string>& base) {
  std::unordered_set<std::string> base_set(base.begin(), base.end());
  std::vector<std::string> out;
  std::unordered_set<std::string> seen;
  for (const auto& p : pools) {
    for (auto& g : expand_block(p)) {
      if (g.find(":boundary") != std::string::npos) continue;
      if (base_set.count(g)) continue;
      if (seen.insert(g).second) out.push_back(std::move(g));
    }
  }
  return out;
}

void append_filtered(FeatureVector& dst, const FeatureVector& src,
                     const std::unordered_set<std::string>& needed,
                     std::unordered_set<std::string>& names_taken) {
  for (const Feature& e : src.entries) {
    if (!needed.count(e.group)) continue;
    if (!names_taken.insert(e.name).second) continue;  // shared flag entries
    dst.entries.push_back(e);
  }
}

}  // namespace

Dataset load_dataset(const ExperimentConfig& cfg) {
  if (cfg.gaze_csv.empty())
    throw ValidationError("config: gaze_csv path is required");
  if (cfg.annotations.empty())
    throw ValidationError("config: annotations path is required");

  Dataset data;
  {
    GazeCorpus corpus = load_gaze_corpus(cfg.gaze_csv);
    data.tokens = std::move(corpus.tokens);
    data.gaze = average_gaze(corpus.records, data.tokens);
  }
  data.corpus_token_count = static_cast<long>(data.tokens.size());
  data.candidates = locate_it_candidates(data.tokens);
  data.located = locate_it_instances(data.tokens);

  std::vector<std::uint32_t> annotatable;
  for (const auto& c : data.candidates) annotatable.push_back(c.uid);
  data.annotated = load_annotations(cfg.annotations, annotatable);
  data.retained = retained_instances(data.annotated, data.located);
  if (data.retained.empty())
    throw ValidationError("no retained instances after agreement filtering");

  // Tags: an aligned pre-tagged file wins; otherwise train the built-in
  // tagger on the configured training corpus.
  std::vector<std::string> needed =
      expand_all(cfg.feature_blocks);
  {
    std::vector<std::string> pool_groups =
        expand_pools(cfg.select_pools, needed);
    needed.insert(needed.end(), pool_groups.begin(), pool_groups.end());
  }
  std::unordered_set<std::string> needed_set(needed.begin(), needed.end());

  bool needs_tags = false, needs_gaze = false, needs_embeddings = false;
  for (const auto& g : needed) {
    if (g.rfind("gaze:", 0) == 0) needs_gaze = true;
    else if (g == "embeddings") needs_embeddings = true;
    else if (g.rfind("POS_", 0) == 0) needs_tags = true;
    else {
      for (const auto& ev : evans_group_names())
        if (g == ev) { needs_tags = true; break; }
    }
  }

  if (needs_tags) {
    if (!cfg.tagged.empty()) {
      data.tags = load_tagged(cfg.tagged, data.tokens);
    } else if (!cfg.tagger_train.empty()) {
      TaggerModel tagger = train_tagger(load_tagged_corpus(cfg.tagger_train),
                                        cfg.tagger_epochs, cfg.seed);
      data.tags = tag(data.tokens, tagger);
    } else {
      throw ValidationError(
          "config: linguistic/POS features need 'tagged' or 'tagger_train'");
    }
  } else {
    data.tags.assign(data.tokens.size(), "NN");
  }

  EmbeddingTable embeddings;
  if (needs_embeddings) {
    if (cfg.embeddings.empty())
      throw ValidationError("config: embeddings block needs an 'embeddings' path");
    embeddings = load_embeddings(cfg.embeddings);
  }

  LinguisticContext ling(data.tokens, data.tags);
  GazeIndex gindex(data.tokens, data.gaze);

  const bool needs_ling = [&] {
    for (const auto& g : needed) {
      if (g.rfind("POS_", 0) == 0) return true;
      for (const auto& ev : evans_group_names())
        if (g == ev) return true;
    }
    return false;
  }();
  const bool needs_basic = needed_set.count("Previous_word") ||
                           needed_set.count("Next_word") ||
                           needed_set.count("Word_length") ||
                           needed_set.count("Punctuation");

  data.features.reserve(data.retained.size());
  data.labels.reserve(data.retained.size());
  for (const AnnotatedInstance& inst : data.retained) {
    FeatureVector fv;
    std::unordered_set<std::string> taken;
    if (needs_basic)
      append_filtered(fv, ling.basic_features(inst.token_uid), needed_set, taken);
    if (needs_ling)
      append_filtered(fv, ling.evans_features(inst.token_uid), needed_set, taken);
    if (needs_gaze) {
      FeatureVector fv_prev =
          region_features(inst.token_uid, RegionKind::PREV, gindex);
      FeatureVector fv_it =
          region_features(inst.token_uid, RegionKind::IT, gindex);
      FeatureVector fv_next =
          region_features(inst.token_uid, RegionKind::NEXT, gindex);
      FeatureVector fv_comb = combine_it_next(fv_it, fv_next);
      // Trial-level entries ride along under their own group names.
      FeatureVector trial;
      const auto& names = gaze_measure_names();
      trial.add_numeric("Trial_Fixation_Count",
                        fv_it.numeric("IT." + names[kTrialFixationCountIdx]),
                        "gaze:trial", "gaze:trial:Trial_Fixation_Count");
      trial.add_numeric("Trial_Total_Reading_Time",
                        fv_it.numeric("IT." + names[kTrialTotalReadingTimeIdx]),
                        "gaze:trial", "gaze:trial:Trial_Total_Reading_Time");
      append_filtered(fv, fv_prev, needed_set, taken);
      append_filtered(fv, fv_it, needed_set, taken);
      append_filtered(fv, fv_next, needed_set, taken);
      append_filtered(fv, fv_comb, needed_set, taken);
      append_filtered(fv, trial, needed_set, taken);
    }
    if (needs_embeddings)
      append_filtered(fv, ling.embedding_features(inst.token_uid, embeddings),
                      needed_set, taken);
    data.features.push_back(std::move(fv));
    data.labels.push_back(*inst.final_label);
  }
  return data;
}

// ---------------------------------------------------------------------------
// Cross-validation

CvOutcome run_cv(const std::vector<FeatureVector>& features,
                 const std::vector<Label>& labels,
                 const std::vector<std::uint32_t>& uids,
                 const std::vector<int>& fold_of,
                 const std::vector<std::string>& groups, const TrainConfig& tc,
                 int rare_threshold, int threads) {
  const int k = *std::max_element(fold_of.begin(), fold_of.end()) + 1;
  std::vector<std::vector<InstancePrediction>> per_fold(
      static_cast<std::size_t>(k));

  parallel_for(k, effective_threads(threads), [&](int f) {
    std::vector<std::size_t> train_idx, test_idx;
    for (std::size_t i = 0; i < features.size(); ++i) {
      if (fold_of[i] == f) test_idx.push_back(i);
      else train_idx.push_back(i);
    }
    if (test_idx.empty()) return;
    ColumnPlan plan = ColumnPlan::fit(features, train_idx, groups, rare_threshold);
    Eigen::MatrixXd Xtr = plan.encode(features, train_idx);
    std::vector<Label> ytr;
    ytr.reserve(train_idx.size());
    for (std::size_t i : train_idx) ytr.push_back(labels[i]);

    TrainResult tr = train(Xtr, ytr, plan, tc);
    auto& out = per_fold[static_cast<std::size_t>(f)];
    for (std::size_t i : test_idx) {
      Prediction p = predict(tr.params, plan.encode_row(features[i]));
      out.push_back({uids[i], labels[i], p.label, f});
    }
  });

  CvOutcome outcome;
  for (const auto& fold_preds : per_fold)
    for (const auto& p : fold_preds) outcome.preds.push_back(p);
  std::sort(outcome.preds.begin(), outcome.preds.end(),
            [](const InstancePrediction& a, const InstancePrediction& b) {
              return a.token_uid < b.token_uid;
            });
  for (const auto& p : outcome.preds) outcome.cm.add(p.gold, p.predicted);
  outcome.report = weighted_prf(outcome.cm);
  return outcome;
}

// ---------------------------------------------------------------------------
// Selection scorer with per-round caching and warm starts

namespace {

class SelectionScorer {
 public:
  SelectionScorer(const std::vector<FeatureVector>& features,
                  const std::vector<Label>& labels,
                  const std::vector<std::uint32_t>& uids,
                  const std::vector<int>& fold_of,
                  std::vector<std::string> base_groups, TrainConfig tc,
                  int rare_threshold, int threads)
      : features_(features),
        labels_(labels),
        uids_(uids),
        fold_of_(fold_of),
        base_groups_(std::move(base_groups)),
        tc_(tc),
        rare_(rare_threshold),
        threads_(threads),
        k_(*std::max_element(fold_of.begin(), fold_of.end()) + 1) {
    rebase({});
  }

  // groups = the selected-so-far candidates (base blocks are implicit).
  double score(const std::vector<std::string>& groups) {
    if (groups == selected_) return base_score_;
    if (groups.size() == selected_.size() + 1 &&
        std::equal(selected_.begin(), selected_.end(), groups.begin()))
      return score_candidate(groups.back());
    rebase(groups);
    return base_score_;
  }

 private:
  struct FoldState {
    std::vector<std::size_t> train_idx, test_idx;
    ColumnPlan plan;
    Eigen::MatrixXd Xtr;
    Eigen::MatrixXd W;  // trained weights on the base feature set
    std::vector<Label> ytr;
  };

  void rebase(const std::vector<std::string>& groups) {
    selected_ = groups;
    std::vector<std::string> all = base_groups_;
    all.insert(all.end(), groups.begin(), groups.end());
    folds_.assign(static_cast<std::size_t>(k_), {});
    std::vector<std::vector<InstancePrediction>> per_fold(
        static_cast<std::size_t>(k_));

    parallel_for(k_, effective_threads(threads_), [&](int f) {
      FoldState& st = folds_[static_cast<std::size_t>(f)];
      for (std::size_t i = 0; i < features_.size(); ++i) {
        if (fold_of_[i] == f) st.test_idx.push_back(i);
        else st.train_idx.push_back(i);
      }
      st.plan = ColumnPlan::fit(features_, st.train_idx, all, rare_);
      st.Xtr = st.plan.encode(features_, st.train_idx);
      for (std::size_t i : st.train_idx) st.ytr.push_back(labels_[i]);
      TrainResult tr = train(st.Xtr, st.ytr, st.plan, tc_);
      st.W = tr.params.weights;
      auto& preds = per_fold[static_cast<std::size_t>(f)];
      for (std::size_t i : st.test_idx) {
        Prediction p = predict(tr.params, st.plan.encode_row(features_[i]));
        preds.push_back({uids_[i], labels_[i], p.label, f});
      }
    });
    base_score_ = pooled_f1(per_fold);
  }

  double score_candidate(const std::string& cand) {
    std::vector<std::vector<InstancePrediction>> per_fold(
        static_cast<std::size_t>(k_));
    const std::vector<std::string> cand_only = {cand};

    parallel_for(k_, effective_threads(threads_), [&](int f) {
      const FoldState& st = folds_[static_cast<std::size_t>(f)];
      ColumnPlan cplan =
          ColumnPlan::fit(features_, st.train_idx, cand_only, rare_);
      auto& preds = per_fold[static_cast<std::size_t>(f)];

      if (cplan.columns().empty()) {
        // Candidate adds nothing on this fold (constant column); keep the
        // base model's predictions.
        ModelParams base;
        base.weights = st.W;
        base.columns = st.plan.columns();
        for (std::size_t i : st.test_idx) {
          Prediction p = predict(base, st.plan.encode_row(features_[i]));
          preds.push_back({uids_[i], labels_[i], p.label, f});
        }
        return;
      }

      const Eigen::Index db = st.Xtr.cols();
      const Eigen::Index dc = static_cast<Eigen::Index>(cplan.columns().size());
      Eigen::MatrixXd Xtr(st.Xtr.rows(), db + dc);
      Xtr.leftCols(db) = st.Xtr;
      Xtr.rightCols(dc) = cplan.encode(features_, st.train_idx);

      Eigen::MatrixXd W0 = Eigen::MatrixXd::Zero(kNumClasses, db + dc + 1);
      W0.leftCols(db) = st.W.leftCols(db);
      W0.col(db + dc) = st.W.col(db);  // bias carried over

      ColumnPlan joint = st.plan.concatenated(cplan);
      TrainResult tr = train(Xtr, st.ytr, joint, tc_, &W0);
      for (std::size_t i : st.test_idx) {
        Prediction p = predict(tr.params, joint.encode_row(features_[i]));
        preds.push_back({uids_[i], labels_[i], p.label, f});
      }
    });
    return pooled_f1(per_fold);
  }

  double pooled_f1(
      const std::vector<std::vector<InstancePrediction>>& per_fold) const {
    ConfusionMatrix cm;
    for (const auto& fold : per_fold)
      for (const auto& p : fold) cm.add(p.gold, p.predicted);
    return 100.0 * weighted_prf(cm).weighted_f1;
  }

  const std::vector<FeatureVector>& features_;
  const std::vector<Label>& labels_;
  const std::vector<std::uint32_t>& uids_;
  const std::vector<int>& fold_of_;
  std::vector<std::string> base_groups_;
  TrainConfig tc_;
  int rare_;
  int threads_;
  int k_;

  std::vector<std::string> selected_;
  std::vector<FoldState> folds_;
  double base_score_ = 0.0;
};

}  // namespace

// ---------------------------------------------------------------------------
// Experiment runner

namespace {

std::string hash_hex(std::uint64_t h) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string feature_set_id(const ExperimentConfig& cfg) {
  std::string id;
  for (const auto& b : cfg.feature_blocks) {
    if (!id.empty()) id += "+";
    id += b;
  }
  if (!cfg.select_pools.empty()) {
    id += id.empty() ? "select(" : "+select(";
    for (std::size_t i = 0; i < cfg.select_pools.size(); ++i) {
      if (i) id += ",";
      id += cfg.select_pools[i];
    }
    id += ")";
  }
  return id.empty() ? "none" : id;
}

void write_artifacts(const ExperimentConfig& cfg, const Dataset& data,
                     ExperimentResult& result, const std::string& out_root) {
  fs::path dir = fs::path(out_root) / hash_hex(cfg.hash());
  fs::create_directories(dir);
  result.out_path = dir.string();

  write_text_file((dir / "config.txt").string(), cfg.canonical());
  write_text_file((dir / "report.csv").string(),
                  render_report_csv({result.report}));
  write_text_file((dir / "report.txt").string(),
                  render_report_table({result.report}));
  write_text_file((dir / "confusion.csv").string(),
                  render_confusion_csv(result.cm));

  std::ostringstream preds;
  preds << "token_uid,fold,gold,predicted\n";
  for (const auto& p : result.preds)
    preds << p.token_uid << "," << p.fold << "," << label_name(p.gold) << ","
          << label_name(p.predicted) << "\n";
  write_text_file((dir / "predictions.csv").string(), preds.str());

  std::ostringstream folds;
  folds << "token_uid,fold\n";
  for (std::size_t i = 0; i < result.uids.size(); ++i)
    folds << result.uids[i] << ","
          << (i < result.fold_of.size() ? result.fold_of[i] : -1) << "\n";
  write_text_file((dir / "folds.csv").string(), folds.str());

  std::ostringstream trace;
  trace << "step,group,cv_weighted_f1\n";
  trace << "0,BASE," << fmt_double(result.selection.base_score, "%.4f") << "\n";
  for (std::size_t s = 0; s < result.selection.trace.size(); ++s)
    trace << (s + 1) << "," << result.selection.trace[s].group << ","
          << fmt_double(result.selection.trace[s].score, "%.4f") << "\n";
  write_text_file((dir / "selection_trace.csv").string(), trace.str());

  write_text_file((dir / "features.csv").string(),
                  render_feature_dump(data.features, data.labels, result.uids));
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg, const Dataset& data,
                                const std::string& out_root) {
  const auto t0 = std::chrono::steady_clock::now();
  ExperimentResult result;
  result.uids.reserve(data.retained.size());
  for (const auto& inst : data.retained) result.uids.push_back(inst.token_uid);

  try {
    if (cfg.model == "majority") {
      result.report = majority_baseline(data.labels);
      Label majority = Label::NOM;
      long best = -1;
      std::array<long, 3> counts{};
      for (Label l : data.labels) counts[static_cast<int>(l)]++;
      for (Label l : kClassOrder) {
        if (counts[static_cast<int>(l)] > best) {
          best = counts[static_cast<int>(l)];
          majority = l;
        }
      }
      for (std::size_t i = 0; i < data.labels.size(); ++i) {
        result.cm.add(data.labels[i], majority);
        result.preds.push_back({result.uids[i], data.labels[i], majority, 0});
      }
    } else {
      result.fold_of = stratified_kfold(data.labels, cfg.folds, cfg.seed);
      std::vector<std::string> groups = expand_all(cfg.feature_blocks);

      if (!cfg.select_pools.empty()) {
        std::vector<std::string> candidates =
            expand_pools(cfg.select_pools, groups);
        TrainConfig select_tc;
        select_tc.l2_lambda = cfg.l2_lambda;
        select_tc.max_iters = cfg.select_max_iters;
        select_tc.tolerance = cfg.select_tolerance;
        select_tc.seed = cfg.seed;
        SelectionScorer scorer(data.features, data.labels, result.uids,
                               result.fold_of, groups, select_tc,
                               cfg.rare_threshold, cfg.threads);
        result.selection = forward_select(
            candidates,
            [&](const std::vector<std::string>& gs) { return scorer.score(gs); },
            cfg.select_min_gain, cfg.select_max_additions, cfg.select_top_k);
        groups.insert(groups.end(), result.selection.selected.begin(),
                      result.selection.selected.end());
      }

      TrainConfig tc;
      tc.l2_lambda = cfg.l2_lambda;
      tc.max_iters = cfg.max_iters;
      tc.tolerance = cfg.tolerance;
      tc.seed = cfg.seed;
      CvOutcome cv = run_cv(data.features, data.labels, result.uids,
                            result.fold_of, groups, tc, cfg.rare_threshold,
                            cfg.threads);
      result.report = cv.report;
      result.cm = cv.cm;
      result.preds = std::move(cv.preds);
      result.active_groups = std::move(groups);
    }
  } catch (ValidationError& e) {
    throw ValidationError("[" + cfg.model_id + "] " + e.what());
  } catch (IoError& e) {
    throw IoError("[" + cfg.model_id + "] " + e.what());
  }

  result.report.model_id = cfg.model_id;
  result.report.feature_set_id = feature_set_id(cfg);
  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!out_root.empty()) write_artifacts(cfg, data, result, out_root);
  return result;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg,
                                const std::string& out_root) {
  Dataset data = load_dataset(cfg);
  return run_experiment(cfg, data, out_root);
}

// ---------------------------------------------------------------------------
// Ablation

AblationResult run_ablation(const ExperimentConfig& cfg, const Dataset& data,
                            const std::string& out_root) {
  AblationResult result;
  // The grid is meaningless if the dataset was assembled without the gaze
  // regions; refuse rather than emit twelve copies of the baseline.
  {
    bool has_gaze = false, has_words = false;
    if (!data.features.empty()) {
      for (const auto& e : data.features[0].entries) {
        if (e.group.rfind("gaze:IT_PLUS_NEXT:", 0) == 0) has_gaze = true;
        if (e.group == "Previous_word") has_words = true;
      }
    }
    if (!has_gaze || !has_words)
      throw ValidationError(
          "run_ablation: dataset lacks gaze region or word features; load it "
          "with the gaze and prev_next_word blocks");
  }
  std::vector<std::uint32_t> uids;
  for (const auto& inst : data.retained) uids.push_back(inst.token_uid);
  std::vector<int> fold_of = stratified_kfold(data.labels, cfg.folds, cfg.seed);

  TrainConfig tc;
  tc.l2_lambda = cfg.l2_lambda;
  tc.max_iters = cfg.max_iters;
  tc.tolerance = cfg.tolerance;
  tc.seed = cfg.seed;

  const std::vector<std::string> base = expand_block("prev_next_word");
  result.baseline_f1 =
      100.0 * run_cv(data.features, data.labels, uids, fold_of, base, tc,
                     cfg.rare_threshold, cfg.threads)
                  .report.weighted_f1;

  const char* group_names[3] = {"early", "medium", "late"};
  const char* region_names[4] = {"prev", "it", "next", "it_plus_next"};
  for (int g = 0; g < 3; ++g) {
    for (int r = 0; r < 4; ++r) {
      std::vector<std::string> groups = base;
      for (auto& extra : expand_block(std::string("gaze:") + region_names[r] +
                                      ":" + group_names[g]))
        groups.push_back(std::move(extra));
      result.f1[static_cast<std::size_t>(g)][static_cast<std::size_t>(r)] =
          100.0 * run_cv(data.features, data.labels, uids, fold_of, groups, tc,
                         cfg.rare_threshold, cfg.threads)
                      .report.weighted_f1;
    }
  }

  if (!out_root.empty()) {
    fs::path dir = fs::path(out_root) / hash_hex(cfg.hash());
    fs::create_directories(dir);
    std::ostringstream csv;
    csv << "group,Prev,It,Next,It_Plus_Next\n";
    const char* row_names[3] = {"Early", "Medium", "Late"};
    for (int g = 0; g < 3; ++g) {
      csv << row_names[g];
      for (int r = 0; r < 4; ++r)
        csv << "," << fmt_double(result.f1[static_cast<std::size_t>(g)]
                                          [static_cast<std::size_t>(r)],
                                 "%.1f");
      csv << "\n";
    }
    csv << "baseline," << fmt_double(result.baseline_f1, "%.1f") << ",,,\n";
    write_text_file((dir / "ablation.csv").string(), csv.str());
    result.out_path = dir.string();
  }
  return result;
}

// ---------------------------------------------------------------------------
// Agreement

AgreementSummary agreement_report(const ExperimentConfig& cfg,
                                  const Dataset& data) {
  (void)cfg;
  AgreementSummary summary;
  std::vector<Label> a1, a2;
  a1.reserve(data.annotated.size());
  a2.reserve(data.annotated.size());
  for (const auto& inst : data.annotated) {
    a1.push_back(inst.label_a1);
    a2.push_back(inst.label_a2);
    if (!inst.final_label) ++summary.disagreements;
  }
  summary.agreement = cohen_kappa(a1, a2);
  for (const auto& inst : data.retained)
    summary.final_counts[static_cast<int>(*inst.final_label)]++;
  summary.retained_total = static_cast<long>(data.retained.size());

  // Table 1 layout: rows Pleonastic / Nom. anaph. / Clause anaph.
  const Label row_order[3] = {Label::PLEON, Label::NOM, Label::CLAUSE};
  const char* row_names[3] = {"Pleonastic", "Nom. anaph.", "Clause anaph."};
  const double n = static_cast<double>(summary.agreement.n_pairs);
  std::ostringstream t;
  char buf[128];
  std::snprintf(buf, sizeof(buf), "%-14s %-14s %-14s %-14s\n", "",
                "Annotat. 1", "Annotat. 2", "Final");
  t << buf;
  for (int r = 0; r < 3; ++r) {
    const int c = static_cast<int>(row_order[r]);
    auto cell = [&](long count, double total) {
      std::snprintf(buf, sizeof(buf), "%ld (%.0f%%)", count,
                    total > 0 ? 100.0 * count / total : 0.0);
      return std::string(buf);
    };
    std::snprintf(buf, sizeof(buf), "%-14s %-14s %-14s %-14s\n", row_names[r],
                  cell(summary.agreement.dist_a1[c], n).c_str(),
                  cell(summary.agreement.dist_a2[c], n).c_str(),
                  cell(summary.final_counts[c],
                       static_cast<double>(summary.retained_total))
                      .c_str());
    t << buf;
  }
  summary.table_text = t.str();
  return summary;
}

// ---------------------------------------------------------------------------
// Rendering

std::string render_report_csv(const std::vector<EvalReport>& reports) {
  std::ostringstream out;
  out << "model_id,feature_set,n,weighted_precision,weighted_recall,"
         "weighted_f1,accuracy,macro_f1";
  for (int i = 0; i < 3; ++i) {
    std::string cls = label_name(kMatrixOrder[static_cast<std::size_t>(i)]);
    out << "," << cls << "_precision," << cls << "_recall," << cls << "_f1,"
        << cls << "_support";
  }
  out << "\n";
  for (const auto& r : reports) {
    out << csv_quote(r.model_id) << "," << csv_quote(r.feature_set_id) << ","
        << r.n << "," << fmt_double(100.0 * r.weighted_precision, "%.4f") << ","
        << fmt_double(100.0 * r.weighted_recall, "%.4f") << ","
        << fmt_double(100.0 * r.weighted_f1, "%.4f") << ","
        << fmt_double(100.0 * r.accuracy, "%.4f") << ","
        << fmt_double(100.0 * r.macro_f1, "%.4f");
    for (const auto& c : r.per_class)
      out << "," << fmt_double(100.0 * c.precision, "%.4f") << ","
          << fmt_double(100.0 * c.recall, "%.4f") << ","
          << fmt_double(100.0 * c.f1, "%.4f") << "," << c.support;
    out << "\n";
  }
  return out.str();
}

std::string render_report_table(const std::vector<EvalReport>& reports) {
  std::ostringstream out;
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%-36s %7s %7s %7s\n", "Model", "P", "R", "F1");
  out << buf;
  for (const auto& r : reports) {
    std::snprintf(buf, sizeof(buf), "%-36s %7.1f %7.1f %7.1f\n",
                  r.model_id.c_str(), 100.0 * r.weighted_precision,
                  100.0 * r.weighted_recall, 100.0 * r.weighted_f1);
    out << buf;
  }
  return out.str();
}

std::string render_confusion_csv(const ConfusionMatrix& cm) {
  std::ostringstream out;
  out << "gold\\pred";
  for (Label l : kMatrixOrder) out << "," << label_name(l);
  out << "\n";
  for (int r = 0; r < 3; ++r) {
    out << label_name(kMatrixOrder[static_cast<std::size_t>(r)]);
    for (int c = 0; c < 3; ++c) out << "," << cm.counts[r][c];
    out << "\n";
  }
  return out.str();
}

std::string render_feature_dump(const std::vector<FeatureVector>& features,
                                const std::vector<Label>& labels,
                                const std::vector<std::uint32_t>& uids) {
  std::ostringstream out;
  out << "token_uid,final_label";
  if (!features.empty()) {
    for (const auto& e : features[0].entries) out << "," << csv_quote(e.name);
    out << "\n#kind,label";
    for (const auto& e : features[0].entries)
      out << "," << (e.kind == FeatureKind::Numeric ? "num" : "cat");
  }
  out << "\n";
  for (std::size_t i = 0; i < features.size(); ++i) {
    out << uids[i] << "," << label_name(labels[i]);
    for (const auto& e : features[i].entries) {
      if (e.kind == FeatureKind::Numeric) out << "," << fmt_double(e.num);
      else out << "," << csv_quote(e.cat);
    }
    out << "\n";
  }
  return out.str();
}

FeatureDump parse_feature_dump(const std::string& csv_text) {
  FeatureDump dump;
  std::vector<std::string> lines = split(csv_text, '\n');
  if (lines.size() < 2)
    throw ValidationError("feature dump: missing header lines");
  std::vector<std::string> header = csv_split(lines[0]);
  std::vector<std::string> kinds = csv_split(lines[1]);
  if (header.size() < 2 || header[0] != "token_uid" || header[1] != "final_label")
    throw ValidationError("feature dump: bad header");
  if (kinds.size() != header.size() || kinds[0] != "#kind")
    throw ValidationError("feature dump: bad kind row");

  for (std::size_t ln = 2; ln < lines.size(); ++ln) {
    if (lines[ln].empty()) continue;
    std::vector<std::string> f = csv_split(lines[ln]);
    if (f.size() != header.size())
      throw ValidationError("feature dump line " + std::to_string(ln + 1) +
                            ": field count mismatch");
    long uid;
    if (!parse_long(f[0], uid))
      throw ValidationError("feature dump line " + std::to_string(ln + 1) +
                            ": bad token_uid");
    dump.uids.push_back(static_cast<std::uint32_t>(uid));
    dump.labels.push_back(parse_label(f[1]));
    FeatureVector fv;
    for (std::size_t c = 2; c < f.size(); ++c) {
      if (kinds[c] == "num") {
        double v;
        if (!parse_double(f[c], v))
          throw ValidationError("feature dump line " + std::to_string(ln + 1) +
                                ": bad number in column " + header[c]);
        fv.add_numeric(header[c], v, "dump", header[c]);
      } else {
        fv.add_categorical(header[c], f[c], "dump", header[c]);
      }
    }
    dump.features.push_back(std::move(fv));
  }
  return dump;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write file: " + path);
  out << content;
  if (!out) throw IoError("failed writing file: " + path);
}

}  // namespace itclass
