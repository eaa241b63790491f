#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>

#include "itclass/experiments.hpp"

using namespace itclass;
namespace fs = std::filesystem;

namespace {

struct GlobalArgs {
  std::string config_path;
  std::string config_path_b;  // second model for `significance`
  long seed = -1;
  long folds = -1;
  long threads = -1;
  std::string out_dir;
  std::vector<std::string> report_files;
  long iterations = -1;
};

ExperimentConfig load_cfg(const GlobalArgs& args, const std::string& path) {
  if (path.empty())
    throw ValidationError("a --config file is required for this command");
  ExperimentConfig cfg = parse_config_file(path);
  if (args.seed >= 0) cfg.seed = static_cast<std::uint64_t>(args.seed);
  if (args.folds >= 2) cfg.folds = static_cast<int>(args.folds);
  if (args.threads >= 0) cfg.threads = static_cast<int>(args.threads);
  if (args.iterations > 0) cfg.bootstrap_iterations = static_cast<int>(args.iterations);
  if (!args.out_dir.empty()) cfg.out_dir = args.out_dir;
  return cfg;
}

void print_report(const EvalReport& r) {
  std::cout << render_report_table({r});
  std::printf("  accuracy %.2f  macro-F1 %.2f  n=%ld\n", 100.0 * r.accuracy,
              100.0 * r.macro_f1, r.n);
}

void print_confusion(const ConfusionMatrix& cm) {
  std::printf("%-12s", "gold\\pred");
  for (Label l : kMatrixOrder) std::printf("%10s", label_name(l));
  std::printf("\n");
  for (int r = 0; r < 3; ++r) {
    std::printf("%-12s", label_name(kMatrixOrder[static_cast<std::size_t>(r)]));
    for (int c = 0; c < 3; ++c) std::printf("%10ld", cm.counts[r][c]);
    std::printf("\n");
  }
}

int cmd_ingest(const GlobalArgs& args) {
  ExperimentConfig cfg = load_cfg(args, args.config_path);
  Dataset data = load_dataset(cfg);
  long noise = 0;
  for (const auto& c : data.candidates)
    if (c.noise) ++noise;
  long agreed = 0;
  for (const auto& a : data.annotated)
    if (a.final_label) ++agreed;
  std::printf("tokens:               %ld\n", data.corpus_token_count);
  std::printf("pronoun instances:    %zu\n", data.located.size());
  std::printf("tokenisation noise:   %ld\n", noise);
  std::printf("annotation pairs:     %zu\n", data.annotated.size());
  std::printf("annotator agreements: %ld\n", agreed);
  std::printf("retained instances:   %zu\n", data.retained.size());
  return 0;
}

int cmd_agreement(const GlobalArgs& args) {
  ExperimentConfig cfg = load_cfg(args, args.config_path);
  if (cfg.feature_blocks.empty()) cfg.feature_blocks = {"basic"};
  Dataset data = load_dataset(cfg);
  AgreementSummary sum = agreement_report(cfg, data);
  std::cout << sum.table_text;
  std::printf("\npairs:             %ld\n", sum.agreement.n_pairs);
  std::printf("kappa:             %.4f\n", sum.agreement.kappa);
  std::printf("percent agreement: %.2f\n", sum.agreement.percent_agreement);
  std::printf("disagreements:     %ld\n", sum.disagreements);
  std::printf("retained:          %ld\n", sum.retained_total);
  return 0;
}

int cmd_features(const GlobalArgs& args) {
  ExperimentConfig cfg = load_cfg(args, args.config_path);
  Dataset data = load_dataset(cfg);
  std::vector<std::uint32_t> uids;
  for (const auto& inst : data.retained) uids.push_back(inst.token_uid);
  fs::path dir = fs::path(cfg.out_dir);
  fs::create_directories(dir);
  const std::string path = (dir / "features.csv").string();
  write_text_file(path, render_feature_dump(data.features, data.labels, uids));
  std::printf("wrote %s (%zu instances, %zu features)\n", path.c_str(),
              data.features.size(),
              data.features.empty() ? 0 : data.features[0].entries.size());
  return 0;
}

int cmd_train(const GlobalArgs& args) {
  ExperimentConfig cfg = load_cfg(args, args.config_path);
  Dataset data = load_dataset(cfg);
  ExperimentResult res = run_experiment(cfg, data, cfg.out_dir);

  // Refit on the full dataset with the selected feature groups and save.
  std::vector<std::size_t> idx(data.features.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  ColumnPlan plan = ColumnPlan::fit(data.features, idx, res.active_groups,
                                    cfg.rare_threshold);
  TrainConfig tc;
  tc.l2_lambda = cfg.l2_lambda;
  tc.max_iters = cfg.max_iters;
  tc.tolerance = cfg.tolerance;
  tc.seed = cfg.seed;
  TrainResult tr = train(plan.encode(data.features, idx), data.labels, plan, tc);
  const std::string model_path = (fs::path(res.out_path) / "model.txt").string();
  save_model(tr.params, model_path);

  print_report(res.report);
  if (!res.selection.trace.empty()) {
    std::printf("selected groups (in order):\n");
    for (const auto& step : res.selection.trace)
      std::printf("  %-44s %.2f\n", step.group.c_str(), step.score);
  }
  std::printf("model written to %s\n", model_path.c_str());
  return 0;
}

int cmd_evaluate(const GlobalArgs& args) {
  ExperimentConfig cfg = load_cfg(args, args.config_path);
  ExperimentResult res = run_experiment(cfg, cfg.out_dir);
  print_report(res.report);
  print_confusion(res.cm);
  if (!res.selection.trace.empty()) {
    std::printf("selected groups (in order):\n");
    for (const auto& step : res.selection.trace)
      std::printf("  %-44s %.2f\n", step.group.c_str(), step.score);
  }
  std::printf("artifacts in %s (%.1fs)\n", res.out_path.c_str(), res.wall_seconds);
  return 0;
}

int cmd_ablate(const GlobalArgs& args) {
  ExperimentConfig cfg = load_cfg(args, args.config_path);
  // The grid needs every gaze region plus the token baseline features,
  // whatever the config's own blocks say.
  for (const char* block :
       {"prev_next_word", "gaze:prev", "gaze:it", "gaze:next",
        "gaze:it_plus_next", "gaze:trial"})
    cfg.feature_blocks.push_back(block);
  Dataset data = load_dataset(cfg);
  AblationResult grid = run_ablation(cfg, data, cfg.out_dir);
  std::printf("%-8s %8s %8s %8s %12s\n", "", "Prev", "It", "Next", "It+Next");
  const char* rows[3] = {"Early", "Medium", "Late"};
  for (int g = 0; g < 3; ++g) {
    std::printf("%-8s", rows[g]);
    for (int r = 0; r < 4; ++r)
      std::printf(r == 3 ? "%12.1f" : "%8.1f",
                  grid.f1[static_cast<std::size_t>(g)][static_cast<std::size_t>(r)]);
    std::printf("\n");
  }
  std::printf("baseline (Previous + Next word): %.1f\n", grid.baseline_f1);
  if (!grid.out_path.empty())
    std::printf("grid written to %s\n", grid.out_path.c_str());
  return 0;
}

int cmd_significance(const GlobalArgs& args) {
  ExperimentConfig cfg_a = load_cfg(args, args.config_path);
  ExperimentConfig cfg_b = load_cfg(args, args.config_path_b);
  Dataset data = load_dataset(cfg_a);  // shared corpus; config A drives paths
  ExperimentResult res_a = run_experiment(cfg_a, data);

  Dataset data_b = load_dataset(cfg_b);
  ExperimentResult res_b = run_experiment(cfg_b, data_b);

  if (res_a.preds.size() != res_b.preds.size())
    throw ValidationError("significance: the two models scored different instance sets");
  std::vector<Label> gold, pa, pb;
  for (std::size_t i = 0; i < res_a.preds.size(); ++i) {
    if (res_a.preds[i].token_uid != res_b.preds[i].token_uid)
      throw ValidationError("significance: prediction uid mismatch");
    gold.push_back(res_a.preds[i].gold);
    pa.push_back(res_a.preds[i].predicted);
    pb.push_back(res_b.preds[i].predicted);
  }
  SignificanceResult sig =
      significance(pa, pb, gold, cfg_a.bootstrap_iterations, cfg_a.seed);
  std::printf("model A (%s): weighted F1 %.2f\n", cfg_a.model_id.c_str(),
              100.0 * res_a.report.weighted_f1);
  std::printf("model B (%s): weighted F1 %.2f\n", cfg_b.model_id.c_str(),
              100.0 * res_b.report.weighted_f1);
  std::printf("delta %.3f points, p = %.4f, 95%% CI (%.3f; %.3f), %d resamples\n",
              sig.observed_delta, sig.p_value, sig.ci_low, sig.ci_high,
              sig.iterations);
  return 0;
}

int cmd_report(const GlobalArgs& args) {
  if (args.report_files.empty())
    throw ValidationError("report: pass one or more report.csv files");
  std::vector<EvalReport> reports;
  for (const auto& path : args.report_files) {
    const std::string text = read_text_file(path);
    std::vector<std::string> lines = split(text, '\n');
    if (lines.size() < 2)
      throw ValidationError("report: empty report file " + path);
    for (std::size_t i = 1; i < lines.size(); ++i) {
      if (lines[i].empty()) continue;
      std::vector<std::string> f = csv_split(lines[i]);
      if (f.size() < 8)
        throw ValidationError("report: malformed row in " + path);
      EvalReport r;
      r.model_id = f[0];
      r.feature_set_id = f[1];
      long n;
      double wp, wr, wf, acc;
      if (!parse_long(f[2], n) || !parse_double(f[3], wp) ||
          !parse_double(f[4], wr) || !parse_double(f[5], wf) ||
          !parse_double(f[6], acc))
        throw ValidationError("report: malformed numbers in " + path);
      r.n = n;
      r.weighted_precision = wp / 100.0;
      r.weighted_recall = wr / 100.0;
      r.weighted_f1 = wf / 100.0;
      r.accuracy = acc / 100.0;
      reports.push_back(std::move(r));
    }
  }
  std::cout << render_report_table(reports);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pronoun-'it' classification toolkit"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand

  GlobalArgs args;
  app.add_option("--seed", args.seed, "Random seed (default 20)");
  app.add_option("--folds", args.folds, "Cross-validation folds (default 10)");
  app.add_option("--threads", args.threads, "Worker threads (0 = hardware)");
  app.add_option("--out", args.out_dir, "Output directory");

  auto add_config = [&](CLI::App* sub) {
    sub->add_option("--config", args.config_path, "Experiment config file")
        ->required();
  };

  CLI::App* ingest = app.add_subcommand("ingest", "Validate and summarise a corpus");
  add_config(ingest);
  CLI::App* agreement =
      app.add_subcommand("agreement", "Annotator agreement statistics");
  add_config(agreement);
  CLI::App* features = app.add_subcommand("features", "Emit the feature dump CSV");
  add_config(features);
  CLI::App* train_cmd =
      app.add_subcommand("train", "Cross-validate, then fit and save a model");
  add_config(train_cmd);
  CLI::App* evaluate =
      app.add_subcommand("evaluate", "Run a cross-validated experiment");
  add_config(evaluate);
  CLI::App* ablate = app.add_subcommand("ablate", "Gaze group x region ablation grid");
  add_config(ablate);
  CLI::App* signif = app.add_subcommand(
      "significance", "Paired bootstrap comparison of two configs");
  add_config(signif);
  signif->add_option("--config-b", args.config_path_b, "Second experiment config")
      ->required();
  signif->add_option("--iterations", args.iterations, "Bootstrap resamples");
  CLI::App* report =
      app.add_subcommand("report", "Render a text table from report.csv files");
  report->add_option("files", args.report_files, "report.csv paths");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (ingest->parsed()) return cmd_ingest(args);
    if (agreement->parsed()) return cmd_agreement(args);
    if (features->parsed()) return cmd_features(args);
    if (train_cmd->parsed()) return cmd_train(args);
    if (evaluate->parsed()) return cmd_evaluate(args);
    if (ablate->parsed()) return cmd_ablate(args);
    if (signif->parsed()) return cmd_significance(args);
    if (report->parsed()) return cmd_report(args);
  } catch (const IoError& e) {
    std::fprintf(stderr, "io error: %s\n", e.what());
    return 2;
  } catch (const ValidationError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
