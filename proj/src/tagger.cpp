#include "itclass/tagger.hpp"

#include <algorithm>
#include <cctype>

#include "itclass/rng.hpp"

namespace itclass {

namespace {

constexpr int kDictMinCount = 5;

bool all_punct(const std::string& s) {
  if (s.empty()) return false;
  for (unsigned char c : s)
    if (std::isalnum(c)) return false;
  return true;
}

std::string word_shape(const std::string& w) {
  bool cap = !w.empty() && std::isupper(static_cast<unsigned char>(w[0]));
  bool digit = false, hyphen = false;
  for (unsigned char c : w) {
    if (std::isdigit(c)) digit = true;
    if (c == '-') hyphen = true;
  }
  std::string shape;
  if (cap) shape += "C";
  if (digit) shape += "D";
  if (hyphen) shape += "H";
  return shape.empty() ? "x" : shape;
}

std::string suffix3(const std::string& w) {
  return w.size() <= 3 ? w : w.substr(w.size() - 3);
}

// Context features for position i. prev/prev2 are predicted tag names.
void collect_features(const std::vector<std::string>& raw,
                      const std::vector<std::string>& lowered, std::size_t i,
                      const std::string& prev, const std::string& prev2,
                      std::vector<std::string>& out) {
  const std::string& w = lowered[i];
  out.clear();
  out.push_back("b");
  out.push_back("w=" + w);
  out.push_back("s3=" + suffix3(w));
  out.push_back("p1=" + w.substr(0, 1));
  out.push_back("sh=" + word_shape(raw[i]));
  out.push_back("t-1=" + prev);
  out.push_back("t-2=" + prev2);
  out.push_back("t-1t-2=" + prev + "|" + prev2);
  out.push_back("t-1w=" + prev + "|" + w);
  if (i > 0) {
    out.push_back("w-1=" + lowered[i - 1]);
    out.push_back("s3-1=" + suffix3(lowered[i - 1]));
  } else {
    out.push_back("w-1=<S>");
  }
  if (i > 1) out.push_back("w-2=" + lowered[i - 2]);
  if (i + 1 < lowered.size()) {
    out.push_back("w+1=" + lowered[i + 1]);
    out.push_back("s3+1=" + suffix3(lowered[i + 1]));
  } else {
    out.push_back("w+1=</S>");
  }
  if (i + 2 < lowered.size()) out.push_back("w+2=" + lowered[i + 2]);
}

struct Trainer {
  std::unordered_map<std::string, std::unordered_map<int, TaggerModel::TagWeight>>
      weights;
  long timestamp = 0;

  double score_and_best(const std::vector<std::string>& feats, int ntags,
                        std::vector<double>& scores) {
    scores.assign(static_cast<std::size_t>(ntags), 0.0);
    for (const auto& f : feats) {
      auto it = weights.find(f);
      if (it == weights.end()) continue;
      for (const auto& [tag, tw] : it->second)
        scores[static_cast<std::size_t>(tag)] += tw.w;
    }
    return 0.0;
  }

  void bump(const std::string& feat, int tag, double delta) {
    TaggerModel::TagWeight& tw = weights[feat][tag];
    tw.total += tw.w * static_cast<double>(timestamp - tw.ts);
    tw.ts = timestamp;
    tw.w += delta;
  }
};

int argmax_tag(const std::vector<double>& scores) {
  int best = 0;
  for (int t = 1; t < static_cast<int>(scores.size()); ++t)
    if (scores[static_cast<std::size_t>(t)] > scores[static_cast<std::size_t>(best)])
      best = t;
  return best;
}

}  // namespace

TaggerModel train_tagger(const std::vector<TaggedSentence>& corpus, int epochs,
                         std::uint64_t seed) {
  if (corpus.empty()) throw ValidationError("train_tagger: empty corpus");
  if (epochs < 1) throw ValidationError("train_tagger: epochs must be >= 1");

  TaggerModel model;
  // Intern tags in first-seen order, and count (word, tag) pairs for the
  // unambiguous-word dictionary.
  std::unordered_map<std::string, std::unordered_map<int, long>> word_tags;
  for (const auto& sent : corpus) {
    for (const auto& [word, tagname] : sent) {
      auto [it, inserted] =
          model.tag_ids.emplace(tagname, static_cast<int>(model.tags.size()));
      if (inserted) model.tags.push_back(tagname);
      word_tags[to_lower_ascii(word)][it->second]++;
    }
  }
  const int ntags = static_cast<int>(model.tags.size());

  for (const auto& [word, tagcounts] : word_tags) {
    if (tagcounts.size() != 1) continue;
    const auto& [tagid, count] = *tagcounts.begin();
    if (count >= kDictMinCount) model.tag_dictionary.emplace(word, tagid);
  }

  Trainer trainer;
  Rng rng(seed);
  std::vector<std::size_t> order(corpus.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  std::vector<std::string> feats, lowered, raw;
  std::vector<double> scores;
  for (int epoch = 0; epoch < epochs; ++epoch) {
    rng.shuffle(order);
    for (std::size_t si : order) {
      const TaggedSentence& sent = corpus[si];
      lowered.clear();
      raw.clear();
      for (const auto& [word, tagname] : sent) {
        raw.push_back(word);
        lowered.push_back(to_lower_ascii(word));
      }
      std::string prev = "<S>", prev2 = "<S2>";
      for (std::size_t i = 0; i < sent.size(); ++i) {
        ++trainer.timestamp;
        const int gold = model.tag_ids.at(sent[i].second);
        int guess;
        auto dict = model.tag_dictionary.find(lowered[i]);
        if (dict != model.tag_dictionary.end()) {
          guess = dict->second;
        } else {
          collect_features(raw, lowered, i, prev, prev2, feats);
          trainer.score_and_best(feats, ntags, scores);
          guess = argmax_tag(scores);
          if (guess != gold) {
            for (const auto& f : feats) {
              trainer.bump(f, gold, 1.0);
              trainer.bump(f, guess, -1.0);
            }
          }
        }
        prev2 = prev;
        prev = model.tags[static_cast<std::size_t>(guess)];
      }
    }
  }

  // Average.
  const double T = static_cast<double>(trainer.timestamp);
  for (auto& [feat, per_tag] : trainer.weights) {
    for (auto& [tagid, tw] : per_tag) {
      tw.total += tw.w * static_cast<double>(trainer.timestamp - tw.ts);
      const double avg = tw.total / T;
      if (avg != 0.0) model.weights[feat][tagid] = avg;
    }
  }
  return model;
}

namespace {

std::vector<std::string> tag_words(const std::vector<std::string>& words,
                                   const std::vector<bool>& punct,
                                   const TaggerModel& model) {
  std::vector<std::string> out(words.size());
  std::vector<std::string> lowered(words.size());
  for (std::size_t i = 0; i < words.size(); ++i)
    lowered[i] = to_lower_ascii(words[i]);

  const int ntags = static_cast<int>(model.tags.size());
  std::vector<std::string> feats;
  std::vector<double> scores;
  std::string prev = "<S>", prev2 = "<S2>";
  for (std::size_t i = 0; i < words.size(); ++i) {
    std::string chosen;
    if (punct[i]) {
      chosen = words[i];  // pass-through
    } else {
      auto dict = model.tag_dictionary.find(lowered[i]);
      if (dict != model.tag_dictionary.end()) {
        chosen = model.tags[static_cast<std::size_t>(dict->second)];
      } else if (ntags > 0) {
        collect_features(words, lowered, i, prev, prev2, feats);
        scores.assign(static_cast<std::size_t>(ntags), 0.0);
        for (const auto& f : feats) {
          auto it = model.weights.find(f);
          if (it == model.weights.end()) continue;
          for (const auto& [tagid, w] : it->second)
            scores[static_cast<std::size_t>(tagid)] += w;
        }
        chosen = model.tags[static_cast<std::size_t>(argmax_tag(scores))];
      } else {
        chosen = "NN";
      }
    }
    out[i] = chosen;
    prev2 = prev;
    prev = chosen;
  }
  return out;
}

}  // namespace

std::vector<std::string> tag(const std::vector<Token>& tokens,
                             const TaggerModel& model) {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  std::size_t i = 0;
  while (i < tokens.size()) {
    std::size_t j = i;
    while (j < tokens.size() && tokens[j].sentence_id == tokens[i].sentence_id)
      ++j;
    std::vector<std::string> words;
    std::vector<bool> punct;
    for (std::size_t k = i; k < j; ++k) {
      words.push_back(tokens[k].surface);
      punct.push_back(tokens[k].is_punctuation);
    }
    for (auto& t : tag_words(words, punct, model)) out.push_back(std::move(t));
    i = j;
  }
  return out;
}

std::vector<std::string> tag_sentence(const std::vector<std::string>& words,
                                      const TaggerModel& model) {
  std::vector<bool> punct(words.size());
  for (std::size_t i = 0; i < words.size(); ++i) punct[i] = all_punct(words[i]);
  return tag_words(words, punct, model);
}

std::vector<TaggedSentence> load_tagged_corpus(const std::string& path) {
  std::string text = read_text_file(path);
  std::vector<TaggedSentence> corpus;
  TaggedSentence current;
  std::size_t line_no = 0;
  for (const std::string& raw : split(text, '\n')) {
    ++line_no;
    std::string line = raw;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      if (!current.empty()) corpus.push_back(std::move(current));
      current.clear();
      continue;
    }
    std::vector<std::string> f = split(line, '\t');
    if (f.size() != 2 || f[0].empty() || f[1].empty())
      throw ValidationError("tagged corpus line " + std::to_string(line_no) +
                            ": expected 'word<TAB>tag'");
    current.emplace_back(f[0], f[1]);
  }
  if (!current.empty()) corpus.push_back(std::move(current));
  return corpus;
}

std::vector<std::string> load_tagged(const std::string& path,
                                     const std::vector<Token>& tokens) {
  std::string text = read_text_file(path);
  std::vector<std::string> tags;
  tags.reserve(tokens.size());
  std::size_t line_no = 0;
  std::size_t ti = 0;
  for (const std::string& raw : split(text, '\n')) {
    ++line_no;
    std::string line = raw;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;  // sentence boundary
    std::vector<std::string> f = split(line, '\t');
    if (f.size() != 2)
      throw ValidationError("tagged file line " + std::to_string(line_no) +
                            ": expected 'word<TAB>tag'");
    if (ti >= tokens.size())
      throw ValidationError("tagged file line " + std::to_string(line_no) +
                            ": more tagged lines than corpus tokens (" +
                            std::to_string(tokens.size()) + ")");
    if (f[0] != tokens[ti].surface)
      throw ValidationError("tagged file line " + std::to_string(line_no) +
                            ": surface '" + f[0] + "' disagrees with corpus '" +
                            tokens[ti].surface + "' at token_uid " +
                            std::to_string(tokens[ti].uid));
    tags.push_back(f[1]);
    ++ti;
  }
  if (ti != tokens.size())
    throw ValidationError("tagged file ends after " + std::to_string(ti) +
                          " tokens; corpus has " + std::to_string(tokens.size()));
  return tags;
}

}  // namespace itclass
