#include "itclass/evaluation.hpp"

#include <algorithm>
#include <cmath>

#include "itclass/rng.hpp"

namespace itclass {

int ConfusionMatrix::slot(Label l) {
  for (int i = 0; i < 3; ++i)
    if (kMatrixOrder[i] == l) return i;
  return -1;
}

void ConfusionMatrix::add(Label gold, Label predicted, long n) {
  counts[slot(gold)][slot(predicted)] += n;
}

long ConfusionMatrix::total() const {
  long t = 0;
  for (const auto& row : counts)
    for (long c : row) t += c;
  return t;
}

long ConfusionMatrix::row_sum(int r) const {
  long t = 0;
  for (long c : counts[r]) t += c;
  return t;
}

long ConfusionMatrix::col_sum(int c) const {
  long t = 0;
  for (const auto& row : counts) t += row[c];
  return t;
}

EvalReport weighted_prf(const ConfusionMatrix& cm) {
  EvalReport rep;
  const long total = cm.total();
  if (total <= 0) throw ValidationError("weighted_prf: empty confusion matrix");
  rep.n = total;

  long diag = 0;
  double wp = 0.0, wr = 0.0, wf = 0.0, mf = 0.0;
  for (int i = 0; i < 3; ++i) {
    const long tp = cm.counts[i][i];
    const long gold = cm.row_sum(i);
    const long pred = cm.col_sum(i);
    ClassMetrics m;
    m.support = gold;
    m.precision = pred > 0 ? static_cast<double>(tp) / pred : 0.0;
    m.recall = gold > 0 ? static_cast<double>(tp) / gold : 0.0;
    m.f1 = (m.precision + m.recall) > 0.0
               ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
               : 0.0;
    rep.per_class[i] = m;
    diag += tp;
    wp += m.precision * gold;
    wr += m.recall * gold;
    wf += m.f1 * gold;
    mf += m.f1;
  }
  rep.weighted_precision = wp / total;
  rep.weighted_recall = wr / total;
  rep.weighted_f1 = wf / total;
  rep.macro_f1 = mf / 3.0;
  rep.accuracy = static_cast<double>(diag) / total;
  return rep;
}

EvalReport majority_baseline(const std::vector<Label>& gold) {
  if (gold.empty()) throw ValidationError("majority_baseline: no labels");
  std::array<long, 3> counts{};
  for (Label l : gold) counts[static_cast<int>(l)]++;

  Label majority = kClassOrder[0];
  long best = -1;
  for (Label l : kClassOrder) {
    long c = counts[static_cast<int>(l)];
    if (c > best) {
      best = c;
      majority = l;
    }
  }
  ConfusionMatrix cm;
  for (Label l : gold) cm.add(l, majority);
  EvalReport rep = weighted_prf(cm);
  rep.model_id = "majority";
  rep.feature_set_id = "none";
  return rep;
}

AgreementReport cohen_kappa(const std::vector<Label>& a,
                            const std::vector<Label>& b) {
  if (a.size() != b.size())
    throw ValidationError("cohen_kappa: label sequences differ in length");
  if (a.empty()) throw ValidationError("cohen_kappa: empty label sequences");

  AgreementReport rep;
  rep.n_pairs = static_cast<long>(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    rep.dist_a1[static_cast<int>(a[i])]++;
    rep.dist_a2[static_cast<int>(b[i])]++;
    if (a[i] == b[i]) rep.n_agreements++;
  }
  const double n = static_cast<double>(rep.n_pairs);
  const double po = rep.n_agreements / n;
  double pe = 0.0;
  for (int c = 0; c < 3; ++c)
    pe += (rep.dist_a1[c] / n) * (rep.dist_a2[c] / n);

  rep.percent_agreement = 100.0 * po;
  rep.kappa = (1.0 - pe) < 1e-12 ? 0.0 : (po - pe) / (1.0 - pe);
  return rep;
}

std::vector<int> stratified_kfold(const std::vector<Label>& labels, int k,
                                  std::uint64_t seed) {
  const long n = static_cast<long>(labels.size());
  if (k < 2) throw ValidationError("stratified_kfold: k must be >= 2");
  if (k > n)
    throw ValidationError("stratified_kfold: k (" + std::to_string(k) +
                          ") exceeds instance count (" + std::to_string(n) + ")");

  std::vector<int> fold_of(labels.size(), -1);
  Rng rng(seed);
  long deal = 0;  // continuous dealing pointer across classes
  for (Label cls : kClassOrder) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < labels.size(); ++i)
      if (labels[i] == cls) members.push_back(i);
    rng.shuffle(members);
    for (std::size_t m : members) fold_of[m] = static_cast<int>(deal++ % k);
  }
  return fold_of;
}

namespace {

double weighted_f1_of(const std::vector<Label>& preds,
                      const std::vector<Label>& gold,
                      const std::vector<std::uint32_t>& idx) {
  ConfusionMatrix cm;
  for (std::uint32_t i : idx) cm.add(gold[i], preds[i]);
  return weighted_prf(cm).weighted_f1;
}

}  // namespace

SignificanceResult significance(const std::vector<Label>& preds_a,
                                const std::vector<Label>& preds_b,
                                const std::vector<Label>& gold, int iterations,
                                std::uint64_t seed) {
  if (preds_a.size() != gold.size() || preds_b.size() != gold.size())
    throw ValidationError("significance: prediction vectors not aligned with gold");
  if (gold.empty()) throw ValidationError("significance: empty inputs");
  if (iterations < 1) throw ValidationError("significance: iterations must be >= 1");

  const std::size_t n = gold.size();
  std::vector<std::uint32_t> all(n);
  for (std::size_t i = 0; i < n; ++i) all[i] = static_cast<std::uint32_t>(i);

  SignificanceResult res;
  res.iterations = iterations;
  res.observed_delta =
      100.0 * (weighted_f1_of(preds_a, gold, all) - weighted_f1_of(preds_b, gold, all));

  std::vector<double> deltas(iterations);
  long le_zero = 0, ge_zero = 0;
  std::vector<std::uint32_t> sample(n);
  for (int b = 0; b < iterations; ++b) {
    Rng r = Rng::stream(seed, static_cast<std::uint64_t>(b));
    for (std::size_t i = 0; i < n; ++i)
      sample[i] = static_cast<std::uint32_t>(r.bounded(n));
    double d = 100.0 * (weighted_f1_of(preds_a, gold, sample) -
                        weighted_f1_of(preds_b, gold, sample));
    deltas[b] = d;
    if (d <= 0.0) ++le_zero;
    if (d >= 0.0) ++ge_zero;
  }

  // Two-sided bootstrap p-value with the +1 correction.
  double p_lo = static_cast<double>(le_zero + 1) / (iterations + 1);
  double p_hi = static_cast<double>(ge_zero + 1) / (iterations + 1);
  res.p_value = std::min(1.0, 2.0 * std::min(p_lo, p_hi));

  std::sort(deltas.begin(), deltas.end());
  auto percentile = [&](double q) {
    double h = q * (iterations - 1);
    std::size_t lo = static_cast<std::size_t>(std::floor(h));
    std::size_t hi = static_cast<std::size_t>(std::ceil(h));
    double frac = h - lo;
    return deltas[lo] * (1.0 - frac) + deltas[hi] * frac;
  };
  res.ci_low = percentile(0.025);
  res.ci_high = percentile(0.975);
  return res;
}

}  // namespace itclass
