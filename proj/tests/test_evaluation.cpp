#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>

#include "itclass/evaluation.hpp"
#include "itclass/rng.hpp"

using namespace itclass;

namespace {

ConfusionMatrix matrix_from(const std::array<std::array<long, 3>, 3>& counts) {
  ConfusionMatrix cm;
  cm.counts = counts;
  return cm;
}

// The published best-combined confusion matrix, rows/cols NOM, CLAUSE, PLEON.
const std::array<std::array<long, 3>, 3> kBestCombined = {
    {{395, 2, 56}, {53, 11, 25}, {93, 3, 176}}};

std::vector<Label> labels_with_counts(long nom, long pleon, long clause) {
  std::vector<Label> out;
  out.insert(out.end(), nom, Label::NOM);
  out.insert(out.end(), pleon, Label::PLEON);
  out.insert(out.end(), clause, Label::CLAUSE);
  return out;
}

}  // namespace

TEST_CASE("weighted_prf reproduces the published combined-model metrics") {
  EvalReport rep = weighted_prf(matrix_from(kBestCombined));

  // Independent oracle: direct per-class formulas on the frozen counts.
  const double p_nom = 395.0 / 541.0, r_nom = 395.0 / 453.0;
  const double p_cla = 11.0 / 16.0, r_cla = 11.0 / 89.0;
  const double p_ple = 176.0 / 257.0, r_ple = 176.0 / 272.0;
  const double f_nom = 2.0 * 395.0 / (541.0 + 453.0);
  const double f_cla = 2.0 * 11.0 / (16.0 + 89.0);
  const double f_ple = 2.0 * 176.0 / (257.0 + 272.0);
  const double wp = (453 * p_nom + 89 * p_cla + 272 * p_ple) / 814.0;
  const double wr = (453 * r_nom + 89 * r_cla + 272 * r_ple) / 814.0;
  const double wf = (453 * f_nom + 89 * f_cla + 272 * f_ple) / 814.0;

  CHECK(rep.weighted_precision == doctest::Approx(wp).epsilon(1e-12));
  CHECK(rep.weighted_recall == doctest::Approx(wr).epsilon(1e-12));
  CHECK(rep.weighted_f1 == doctest::Approx(wf).epsilon(1e-12));

  // Published rounded values, within rounding tolerance.
  CHECK(std::abs(100.0 * rep.weighted_precision - 71.0) < 0.05);
  CHECK(std::abs(100.0 * rep.weighted_recall - 71.5) < 0.05);
  CHECK(std::abs(100.0 * rep.weighted_f1 - 68.8) < 0.05);
  CHECK(rep.n == 814);
  CHECK(rep.accuracy == doctest::Approx(582.0 / 814.0).epsilon(1e-12));
}

TEST_CASE("weighted_prf on a perfect diagonal is 100/100/100") {
  ConfusionMatrix cm = matrix_from({{{10, 0, 0}, {0, 7, 0}, {0, 0, 3}}});
  EvalReport rep = weighted_prf(cm);
  CHECK(rep.weighted_precision == doctest::Approx(1.0));
  CHECK(rep.weighted_recall == doctest::Approx(1.0));
  CHECK(rep.weighted_f1 == doctest::Approx(1.0));
  CHECK(rep.accuracy == doctest::Approx(1.0));
}

TEST_CASE("weighted recall equals accuracy on random confusion matrices") {
  Rng rng(12345);
  for (int trial = 0; trial < 1000; ++trial) {
    std::array<std::array<long, 3>, 3> counts{};
    long total = 0;
    for (auto& row : counts)
      for (auto& c : row) {
        c = static_cast<long>(rng.bounded(50));
        total += c;
      }
    if (total == 0) counts[0][0] = 1;
    EvalReport rep = weighted_prf(matrix_from(counts));
    CHECK(rep.weighted_recall == doctest::Approx(rep.accuracy).epsilon(1e-12));
  }
}

TEST_CASE("weighted_prf invariant under matched row+column permutation") {
  EvalReport a = weighted_prf(matrix_from(kBestCombined));
  // Swap classes 0 and 2 in both axes.
  std::array<std::array<long, 3>, 3> p{};
  const int perm[3] = {2, 1, 0};
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c)
      p[perm[r]][perm[c]] = kBestCombined[r][c];
  EvalReport b = weighted_prf(matrix_from(p));
  CHECK(a.weighted_precision == doctest::Approx(b.weighted_precision).epsilon(1e-12));
  CHECK(a.weighted_recall == doctest::Approx(b.weighted_recall).epsilon(1e-12));
  CHECK(a.weighted_f1 == doctest::Approx(b.weighted_f1).epsilon(1e-12));
}

TEST_CASE("majority baseline on the published class counts") {
  auto gold = labels_with_counts(453, 272, 89);
  EvalReport rep = majority_baseline(gold);
  CHECK(std::abs(100.0 * rep.accuracy - 55.65) < 0.05);
  // Under the weighted-F1 definition an all-majority predictor scores 39.8.
  CHECK(std::abs(100.0 * rep.weighted_f1 - 39.8) < 0.05);
  CHECK(rep.weighted_recall == doctest::Approx(rep.accuracy).epsilon(1e-12));
}

TEST_CASE("majority baseline edge cases") {
  SUBCASE("single class is perfect") {
    EvalReport rep = majority_baseline(labels_with_counts(0, 5, 0));
    CHECK(rep.accuracy == doctest::Approx(1.0));
  }
  SUBCASE("ties resolve by class order, NOM first") {
    auto gold = labels_with_counts(4, 4, 0);
    EvalReport rep = majority_baseline(gold);
    // NOM predicted: NOM recall 1, PLEON recall 0.
    CHECK(rep.per_class[ConfusionMatrix::slot(Label::NOM)].recall ==
          doctest::Approx(1.0));
    CHECK(rep.per_class[ConfusionMatrix::slot(Label::PLEON)].recall ==
          doctest::Approx(0.0));
  }
  SUBCASE("empty labels error") {
    CHECK_THROWS_AS(majority_baseline({}), ValidationError);
  }
}

TEST_CASE("cohen kappa hand-computed fixture") {
  // A = [x,x,y,y], B = [x,y,y,y]: po = 0.75, pe = 0.5, kappa = 0.5.
  std::vector<Label> a = {Label::NOM, Label::NOM, Label::PLEON, Label::PLEON};
  std::vector<Label> b = {Label::NOM, Label::PLEON, Label::PLEON, Label::PLEON};
  AgreementReport rep = cohen_kappa(a, b);
  CHECK(rep.kappa == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(rep.percent_agreement == doctest::Approx(75.0).epsilon(1e-12));
}

TEST_CASE("cohen kappa degenerate and identity cases") {
  SUBCASE("identical varied sequences give kappa 1") {
    std::vector<Label> a = {Label::NOM, Label::PLEON, Label::CLAUSE, Label::NOM};
    AgreementReport rep = cohen_kappa(a, a);
    CHECK(rep.kappa == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(rep.percent_agreement == doctest::Approx(100.0));
  }
  SUBCASE("both constant and equal: expected agreement 1, kappa defined as 0") {
    std::vector<Label> a(5, Label::NOM);
    AgreementReport rep = cohen_kappa(a, a);
    CHECK(rep.kappa == doctest::Approx(0.0));
    CHECK(rep.percent_agreement == doctest::Approx(100.0));
  }
  SUBCASE("one annotator constant gives kappa 0") {
    std::vector<Label> a(6, Label::NOM);
    std::vector<Label> b = {Label::NOM, Label::NOM, Label::NOM,
                            Label::PLEON, Label::PLEON, Label::CLAUSE};
    AgreementReport rep = cohen_kappa(a, b);
    CHECK(rep.kappa == doctest::Approx(0.0).epsilon(1e-9));
  }
  SUBCASE("length mismatch errors") {
    std::vector<Label> a(3, Label::NOM), b(4, Label::NOM);
    CHECK_THROWS_AS(cohen_kappa(a, b), ValidationError);
  }
}

TEST_CASE("stratified k-fold dealing on the published distribution") {
  // 814 instances: 453 NOM, 272 PLEON, 89 CLAUSE interleaved.
  std::vector<Label> labels;
  Rng mix(7);
  {
    auto pool = labels_with_counts(453, 272, 89);
    mix.shuffle(pool);
    labels = pool;
  }
  std::vector<int> fold_of = stratified_kfold(labels, 10, 20);

  std::array<long, 10> sizes{};
  std::map<std::pair<int, int>, long> class_fold;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    sizes[static_cast<std::size_t>(fold_of[i])]++;
    class_fold[{static_cast<int>(labels[i]), fold_of[i]}]++;
  }
  for (long s : sizes) CHECK((s == 81 || s == 82));
  for (int f = 0; f < 10; ++f) {
    long clause = class_fold[{static_cast<int>(Label::CLAUSE), f}];
    CHECK((clause == 8 || clause == 9));
  }
  // Per-class counts across folds differ by at most 1.
  for (int c = 0; c < 3; ++c) {
    long lo = 1L << 40, hi = -1;
    for (int f = 0; f < 10; ++f) {
      long n = class_fold[{c, f}];
      lo = std::min(lo, n);
      hi = std::max(hi, n);
    }
    CHECK(hi - lo <= 1);
  }

  SUBCASE("same seed twice gives identical folds") {
    CHECK(stratified_kfold(labels, 10, 20) == fold_of);
  }
  SUBCASE("different seed moves instances") {
    CHECK(stratified_kfold(labels, 10, 21) != fold_of);
  }
  SUBCASE("k = 1 errors") {
    CHECK_THROWS_AS(stratified_kfold(labels, 1, 20), ValidationError);
  }
  SUBCASE("k > n errors") {
    std::vector<Label> tiny(3, Label::NOM);
    CHECK_THROWS_AS(stratified_kfold(tiny, 5, 20), ValidationError);
  }
}

TEST_CASE("significance: self-comparison is null") {
  std::vector<Label> gold = labels_with_counts(30, 20, 10);
  std::vector<Label> preds = gold;
  preds[3] = Label::PLEON;  // imperfect but identical in both arms
  SignificanceResult res = significance(preds, preds, gold, 500, 20);
  CHECK(res.observed_delta == doctest::Approx(0.0));
  CHECK(res.p_value > 0.99);
  CHECK(res.ci_low == doctest::Approx(0.0));
  CHECK(res.ci_high == doctest::Approx(0.0));
}

TEST_CASE("significance: perfect vs random on 200 instances") {
  Rng rng(99);
  std::vector<Label> gold, random_preds;
  for (int i = 0; i < 200; ++i) {
    gold.push_back(static_cast<Label>(rng.bounded(3)));
    random_preds.push_back(static_cast<Label>(rng.bounded(3)));
  }
  SignificanceResult res = significance(gold, random_preds, gold, 2000, 20);
  CHECK(res.p_value < 0.01);
  CHECK(res.ci_low > 0.0);
}

TEST_CASE("significance: CI endpoints ordered and runs are seed-deterministic") {
  Rng rng(5);
  std::vector<Label> gold, a, b;
  for (int i = 0; i < 60; ++i) {
    gold.push_back(static_cast<Label>(rng.bounded(3)));
    a.push_back(static_cast<Label>(rng.bounded(3)));
    b.push_back(static_cast<Label>(rng.bounded(3)));
  }
  SignificanceResult r1 = significance(a, b, gold, 1000, 42);
  SignificanceResult r2 = significance(a, b, gold, 1000, 42);
  CHECK(r1.ci_low <= r1.ci_high);
  CHECK(r1.p_value == r2.p_value);
  CHECK(r1.ci_low == r2.ci_low);
  CHECK(r1.ci_high == r2.ci_high);
}
