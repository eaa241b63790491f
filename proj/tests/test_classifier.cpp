#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "itclass/classifier.hpp"
#include "itclass/rng.hpp"

using namespace itclass;

namespace {

FeatureVector fv_numeric(const std::vector<std::pair<std::string, double>>& vals) {
  FeatureVector fv;
  for (const auto& [name, v] : vals) fv.add_numeric(name, v, "test", name);
  return fv;
}

std::vector<std::size_t> all_indices(std::size_t n) {
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  return idx;
}

}  // namespace

TEST_CASE("encode: one-hot expansion is mutually exclusive") {
  std::vector<FeatureVector> rows;
  for (int i = 0; i < 6; ++i) {
    FeatureVector fv;
    fv.add_categorical("POS_R1", i % 2 ? "IN" : "JJ", "test", "POS_R1");
    rows.push_back(fv);
  }
  DesignMatrix dm = encode(rows);
  REQUIRE(dm.plan.columns().size() == 2);
  for (Eigen::Index r = 0; r < dm.X.rows(); ++r) {
    CHECK(dm.X.row(r).sum() == doctest::Approx(1.0));
    CHECK(dm.X.row(r).maxCoeff() == doctest::Approx(1.0));
  }
}

TEST_CASE("encode: z-score with population sd, constants dropped") {
  std::vector<FeatureVector> rows = {
      fv_numeric({{"x", 100}, {"c", 5}}),
      fv_numeric({{"x", 200}, {"c", 5}}),
  };
  DesignMatrix dm = encode(rows);
  REQUIRE(dm.plan.columns().size() == 1);  // constant column dropped
  CHECK(dm.plan.columns()[0].name == "x");
  CHECK(dm.X(0, 0) == doctest::Approx(-1.0));
  CHECK(dm.X(1, 0) == doctest::Approx(1.0));
}

TEST_CASE("encode: rare categorical levels map to the RARE column") {
  std::vector<FeatureVector> rows;
  const char* words[] = {"was", "was", "was", "seemed", "seemed", "once"};
  for (const char* w : words) {
    FeatureVector fv;
    fv.add_categorical("Next_word", w, "test", "Next_word");
    rows.push_back(fv);
  }
  DesignMatrix dm = encode(rows, 2);
  bool has_rare = false;
  for (const auto& c : dm.plan.columns()) has_rare |= c.level == kRareLevel;
  CHECK(has_rare);
  // The singleton level has no column of its own.
  for (const auto& c : dm.plan.columns()) CHECK(c.level != "once");

  // An unseen level at prediction time falls into RARE.
  FeatureVector probe;
  probe.add_categorical("Next_word", "never_seen", "test", "Next_word");
  Eigen::RowVectorXd row = dm.plan.encode_row(probe);
  CHECK(row.sum() == doctest::Approx(1.0));
}

TEST_CASE("encode: schema mismatch names the feature") {
  std::vector<FeatureVector> rows = {fv_numeric({{"a", 1}}), fv_numeric({{"b", 1}})};
  std::vector<std::size_t> idx = all_indices(2);
  try {
    ColumnPlan::fit(rows, idx);
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("a") != std::string::npos);
  }
}

TEST_CASE("analytic gradient matches central finite differences") {
  Rng rng(2024);
  const int n = 5, d = 8;
  Eigen::MatrixXd X(n, d);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j) X(i, j) = rng.gaussian(0, 1);
  std::vector<Label> y;
  for (int i = 0; i < n; ++i) y.push_back(static_cast<Label>(rng.bounded(3)));
  Eigen::MatrixXd W(kNumClasses, d + 1);
  for (int c = 0; c < kNumClasses; ++c)
    for (int j = 0; j <= d; ++j) W(c, j) = rng.gaussian(0, 0.5);

  const double lambda = 0.3;
  Eigen::MatrixXd G = lr_gradient(X, y, W, lambda);

  const double h = 1e-5;
  double max_rel = 0.0;
  for (int c = 0; c < kNumClasses; ++c) {
    for (int j = 0; j <= d; ++j) {
      Eigen::MatrixXd Wp = W, Wm = W;
      Wp(c, j) += h;
      Wm(c, j) -= h;
      const double fd =
          (lr_objective(X, y, Wp, lambda) - lr_objective(X, y, Wm, lambda)) /
          (2 * h);
      const double denom = std::max(1.0, std::abs(fd));
      max_rel = std::max(max_rel, std::abs(fd - G(c, j)) / denom);
    }
  }
  CHECK(max_rel < 1e-5);
}

TEST_CASE("objective at zero weights is n log 3") {
  Eigen::MatrixXd X(4, 2);
  X.setRandom();
  std::vector<Label> y = {Label::NOM, Label::PLEON, Label::CLAUSE, Label::NOM};
  Eigen::MatrixXd W = Eigen::MatrixXd::Zero(kNumClasses, 3);
  CHECK(lr_objective(X, y, W, 1.0) == doctest::Approx(4.0 * std::log(3.0)));
}

TEST_CASE("training separates a linearly separable toy set") {
  std::vector<FeatureVector> rows;
  std::vector<Label> y;
  Rng rng(5);
  for (int i = 0; i < 60; ++i) {
    const int cls = i % 3;
    FeatureVector fv;
    fv.add_numeric("f0", (cls == 0 ? 4.0 : 0.0) + rng.gaussian(0, 0.2), "t", "g");
    fv.add_numeric("f1", (cls == 1 ? 4.0 : 0.0) + rng.gaussian(0, 0.2), "t", "g");
    rows.push_back(fv);
    y.push_back(static_cast<Label>(cls));
  }
  DesignMatrix dm = encode(rows);
  TrainConfig cfg;
  cfg.l2_lambda = 0.1;
  cfg.max_iters = 300;
  cfg.tolerance = 1e-8;
  TrainResult tr = train(dm.X, y, dm.plan, cfg);
  int correct = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    Prediction p = predict(tr.params, Eigen::RowVectorXd(dm.X.row(
                                          static_cast<Eigen::Index>(i))));
    if (p.label == y[i]) ++correct;
  }
  CHECK(correct == 60);
}

TEST_CASE("huge lambda drives predictions to the class priors") {
  std::vector<FeatureVector> rows;
  std::vector<Label> y;
  Rng rng(7);
  for (int i = 0; i < 90; ++i) {
    rows.push_back(fv_numeric({{"x", rng.gaussian(0, 1)}}));
    y.push_back(i < 54 ? Label::NOM : (i < 76 ? Label::PLEON : Label::CLAUSE));
  }
  DesignMatrix dm = encode(rows);
  TrainConfig cfg;
  cfg.l2_lambda = 1e7;
  cfg.max_iters = 500;
  cfg.tolerance = 1e-9;
  TrainResult tr = train(dm.X, y, dm.plan, cfg);
  // Feature weights collapse, the unpenalised bias carries the priors.
  CHECK(tr.params.weights.leftCols(1).cwiseAbs().maxCoeff() < 1e-3);
  Prediction p = predict(tr.params, Eigen::RowVectorXd::Zero(1));
  CHECK(p.probabilities(0) == doctest::Approx(54.0 / 90.0).epsilon(1e-3));
  CHECK(p.probabilities(1) == doctest::Approx(22.0 / 90.0).epsilon(1e-3));
  CHECK(p.probabilities(2) == doctest::Approx(14.0 / 90.0).epsilon(1e-3));
}

TEST_CASE("loss trace is monotone non-increasing") {
  Rng rng(11);
  std::vector<FeatureVector> rows;
  std::vector<Label> y;
  for (int i = 0; i < 40; ++i) {
    rows.push_back(fv_numeric({{"a", rng.gaussian(0, 1)}, {"b", rng.gaussian(0, 1)}}));
    y.push_back(static_cast<Label>(rng.bounded(3)));
  }
  DesignMatrix dm = encode(rows);
  TrainConfig cfg;
  cfg.collect_loss_trace = true;
  cfg.max_iters = 200;
  TrainResult tr = train(dm.X, y, dm.plan, cfg);
  REQUIRE(tr.loss_trace.size() > 2);
  for (std::size_t i = 1; i < tr.loss_trace.size(); ++i)
    CHECK(tr.loss_trace[i] <= tr.loss_trace[i - 1] + 1e-12);
}

TEST_CASE("training is bit-deterministic for identical inputs") {
  Rng rng(13);
  std::vector<FeatureVector> rows;
  std::vector<Label> y;
  for (int i = 0; i < 50; ++i) {
    rows.push_back(fv_numeric({{"a", rng.gaussian(0, 1)}, {"b", rng.gaussian(0, 1)}}));
    y.push_back(static_cast<Label>(rng.bounded(3)));
  }
  DesignMatrix dm = encode(rows);
  TrainConfig cfg;
  TrainResult t1 = train(dm.X, y, dm.plan, cfg);
  TrainResult t2 = train(dm.X, y, dm.plan, cfg);
  CHECK(t1.params.weights == t2.params.weights);
}

TEST_CASE("predict: softmax basics") {
  ModelParams model;
  model.weights = Eigen::MatrixXd::Zero(kNumClasses, 4);  // 3 cols + bias
  EncodedColumn col;
  col.kind = FeatureKind::Numeric;
  model.columns = {col, col, col};

  SUBCASE("zero weights give the uniform distribution") {
    Prediction p = predict(model, Eigen::RowVectorXd::Zero(3));
    for (int c = 0; c < 3; ++c)
      CHECK(p.probabilities(c) == doctest::Approx(1.0 / 3).epsilon(1e-12));
    CHECK(p.label == Label::NOM);  // tie broken by class order
  }
  SUBCASE("shifting all class scores leaves probabilities unchanged") {
    Rng rng(3);
    Eigen::MatrixXd W(kNumClasses, 4);
    for (int c = 0; c < 3; ++c)
      for (int j = 0; j < 4; ++j) W(c, j) = rng.gaussian(0, 1);
    model.weights = W;
    Eigen::RowVectorXd x(3);
    x << 0.3, -1.2, 0.5;
    Prediction p1 = predict(model, x);
    model.weights.col(3).array() += 7.5;  // constant added to every class
    Prediction p2 = predict(model, x);
    for (int c = 0; c < 3; ++c)
      CHECK(p1.probabilities(c) == doctest::Approx(p2.probabilities(c)).epsilon(1e-12));
  }
  SUBCASE("probabilities sum to 1 on random rows") {
    Rng rng(17);
    Eigen::MatrixXd W(kNumClasses, 4);
    for (int c = 0; c < 3; ++c)
      for (int j = 0; j < 4; ++j) W(c, j) = rng.gaussian(0, 2);
    model.weights = W;
    for (int i = 0; i < 1000; ++i) {
      Eigen::RowVectorXd x(3);
      x << rng.gaussian(0, 3), rng.gaussian(0, 3), rng.gaussian(0, 3);
      Prediction p = predict(model, x);
      CHECK(std::abs(p.probabilities.sum() - 1.0) <= 1e-12);
    }
  }
  SUBCASE("dimension mismatch errors") {
    CHECK_THROWS_AS(predict(model, Eigen::RowVectorXd::Zero(5)), ValidationError);
  }
}

TEST_CASE("model save/load round-trips losslessly") {
  Rng rng(23);
  std::vector<FeatureVector> rows;
  std::vector<Label> y;
  for (int i = 0; i < 30; ++i) {
    FeatureVector fv;
    fv.add_numeric("len", rng.gaussian(5, 2), "t", "len");
    fv.add_categorical("w", i % 3 ? "of" : "was", "t", "w");
    rows.push_back(fv);
    y.push_back(static_cast<Label>(rng.bounded(3)));
  }
  DesignMatrix dm = encode(rows);
  TrainConfig cfg;
  cfg.max_iters = 120;
  TrainResult tr = train(dm.X, y, dm.plan, cfg);

  auto path = (std::filesystem::temp_directory_path() / "itclass_model.txt").string();
  save_model(tr.params, path);
  ModelParams loaded = load_model(path);

  CHECK(loaded.weights == tr.params.weights);  // bit-exact via %.17g
  REQUIRE(loaded.columns.size() == tr.params.columns.size());
  for (std::size_t c = 0; c < loaded.columns.size(); ++c) {
    CHECK(loaded.columns[c].name == tr.params.columns[c].name);
    CHECK(loaded.columns[c].mean == tr.params.columns[c].mean);
    CHECK(loaded.columns[c].sd == tr.params.columns[c].sd);
  }
  Prediction a = predict(tr.params, rows[4]);
  Prediction b = predict(loaded, rows[4]);
  CHECK(a.probabilities == b.probabilities);
}

TEST_CASE("forward selection keeps informative groups and stops on noise") {
  // Synthetic scorer: the informative group raises the score once, noise
  // groups add nothing.
  auto scorer = [](const std::vector<std::string>& groups) {
    double score = 50.0;
    for (const auto& g : groups) {
      if (g == "useful") score += 6.0;
      if (g == "noise") score += 0.02;
    }
    return score;
  };
  SUBCASE("retains only the informative group") {
    SelectionResult res = forward_select({"noise", "useful"}, scorer, 0.1);
    REQUIRE(res.selected.size() == 1);
    CHECK(res.selected[0] == "useful");
    CHECK(res.final_score == doctest::Approx(56.0));
  }
  SUBCASE("empty candidate list changes nothing") {
    SelectionResult res = forward_select({}, scorer, 0.1);
    CHECK(res.selected.empty());
    CHECK(res.final_score == doctest::Approx(res.base_score));
  }
  SUBCASE("infinite threshold adds nothing") {
    SelectionResult res = forward_select(
        {"useful"}, scorer, std::numeric_limits<double>::infinity());
    CHECK(res.selected.empty());
  }
  SUBCASE("max_additions caps the greedy loop") {
    auto additive = [](const std::vector<std::string>& groups) {
      return 10.0 + static_cast<double>(groups.size());
    };
    SelectionResult res =
        forward_select({"a", "b", "c", "d"}, additive, 0.1, 2);
    CHECK(res.selected.size() == 2);
  }
}

TEST_CASE("prediction is consistent under matched column permutation") {
  Rng rng(29);
  ModelParams model;
  model.weights = Eigen::MatrixXd(kNumClasses, 5);  // 4 cols + bias
  for (int c = 0; c < 3; ++c)
    for (int j = 0; j < 5; ++j) model.weights(c, j) = rng.gaussian(0, 1);

  Eigen::RowVectorXd x(4);
  x << 0.7, -0.3, 1.1, 0.2;
  Prediction before = predict(model, x);

  // Reverse the feature columns in both the row and the weight matrix.
  ModelParams permuted = model;
  Eigen::RowVectorXd xr(4);
  for (int j = 0; j < 4; ++j) {
    xr(j) = x(3 - j);
    permuted.weights.col(j) = model.weights.col(3 - j);
  }
  Prediction after = predict(permuted, xr);
  for (int c = 0; c < 3; ++c)
    CHECK(before.probabilities(c) ==
          doctest::Approx(after.probabilities(c)).epsilon(1e-12));
  CHECK(before.label == after.label);
}

TEST_CASE("train input validation") {
  Eigen::MatrixXd X(2, 1);
  X << 1, 2;
  ColumnPlan plan;
  TrainConfig cfg;
  SUBCASE("single class errors") {
    std::vector<Label> y = {Label::NOM, Label::NOM};
    CHECK_THROWS_AS(train(X, y, plan, cfg), ValidationError);
  }
  SUBCASE("label count mismatch errors") {
    std::vector<Label> y = {Label::NOM};
    CHECK_THROWS_AS(train(X, y, plan, cfg), ValidationError);
  }
}
