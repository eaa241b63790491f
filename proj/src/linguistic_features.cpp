#include "itclass/linguistic_features.hpp"

#include <algorithm>

namespace itclass {

namespace {

bool is_noun(const std::string& tag) {
  return tag == "NN" || tag == "NNS" || tag == "NNP" || tag == "NNPS";
}
bool is_adjective(const std::string& tag) {
  return tag == "JJ" || tag == "JJR" || tag == "JJS";
}
bool is_verb(const std::string& tag) { return tag.rfind("VB", 0) == 0; }

bool is_complementiser(const std::string& surface_lower, const std::string& tag) {
  return tag == "IN" && (surface_lower == "that" || surface_lower == "whether" ||
                         surface_lower == "if");
}

bool is_preposition(const std::string& surface_lower, const std::string& tag) {
  return tag == "IN" && !is_complementiser(surface_lower, tag);
}

bool surface_is_it(const std::string& surface) {
  const std::string s = to_lower_ascii(normalize_apostrophe(surface));
  return s == "it" || s == "it's";
}

// Chunks [begin, end) of the aligned token/tag arrays.
std::vector<NPSpan> chunk_range(const std::vector<Token>& tokens,
                                const std::vector<std::string>& tags,
                                std::size_t begin, std::size_t end) {
  std::vector<NPSpan> spans;
  std::size_t i = begin;
  while (i < end) {
    if (tags[i] == "PRP") {
      spans.push_back({tokens[i].uid, tokens[i].uid, tokens[i].uid});
      ++i;
      continue;
    }
    std::size_t j = i;
    if (j < end && (tags[j] == "DT" || tags[j] == "PRP$")) ++j;
    while (j < end && is_adjective(tags[j])) ++j;
    std::size_t noun_start = j;
    while (j < end && is_noun(tags[j])) ++j;
    if (j > noun_start) {
      spans.push_back({tokens[i].uid, tokens[j - 1].uid, tokens[j - 1].uid});
      i = j;
    } else {
      ++i;
    }
  }
  return spans;
}

}  // namespace

std::vector<NPSpan> chunk_nps(const std::vector<Token>& tokens,
                              const std::vector<std::string>& tags) {
  if (tokens.size() != tags.size())
    throw ValidationError("chunk_nps: tokens and tags differ in length");
  return chunk_range(tokens, tags, 0, tokens.size());
}

const std::vector<float>* EmbeddingTable::lookup(const std::string& word) const {
  auto it = vectors.find(word);
  return it == vectors.end() ? nullptr : &it->second;
}

EmbeddingTable load_embeddings(const std::string& path) {
  std::string text = read_text_file(path);
  EmbeddingTable table;
  std::size_t line_no = 0;
  bool first_content_line = true;
  for (const std::string& raw : split(text, '\n')) {
    ++line_no;
    std::string line = raw;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> f;
    for (auto& part : split(line, ' '))
      if (!part.empty()) f.push_back(std::move(part));
    if (f.empty()) continue;

    if (first_content_line) {
      first_content_line = false;
      // Optional "count dim" header.
      long cnt, dim;
      if (f.size() == 2 && parse_long(f[0], cnt) && parse_long(f[1], dim)) {
        if (dim < 1)
          throw ValidationError("embeddings line " + std::to_string(line_no) +
                                ": bad dimension");
        table.dimension = static_cast<int>(dim);
        continue;
      }
    }
    if (f.size() < 2)
      throw ValidationError("embeddings line " + std::to_string(line_no) +
                            ": expected 'word v1 ... vd'");
    const int dim = static_cast<int>(f.size()) - 1;
    if (table.dimension == 0) table.dimension = dim;
    if (dim != table.dimension)
      throw ValidationError("embeddings line " + std::to_string(line_no) +
                            ": expected " + std::to_string(table.dimension) +
                            " values, got " + std::to_string(dim));
    std::vector<float> vec(static_cast<std::size_t>(dim));
    for (int d = 0; d < dim; ++d) {
      double v;
      if (!parse_double(f[static_cast<std::size_t>(d) + 1], v))
        throw ValidationError("embeddings line " + std::to_string(line_no) +
                              ": bad number '" + f[static_cast<std::size_t>(d) + 1] +
                              "'");
      vec[static_cast<std::size_t>(d)] = static_cast<float>(v);
    }
    table.vectors[f[0]] = std::move(vec);
  }
  if (table.vectors.empty())
    throw ValidationError("embeddings file has no vectors: " + path);
  return table;
}

LinguisticContext::LinguisticContext(const std::vector<Token>& tokens,
                                     const std::vector<std::string>& tags)
    : tokens_(&tokens), tags_(tags) {
  if (tokens.size() != tags.size())
    throw ValidationError("LinguisticContext: tokens and tags differ in length");
  token_index_.reserve(tokens.size() * 2);
  for (std::size_t i = 0; i < tokens.size(); ++i)
    token_index_.emplace(tokens[i].uid, i);

  sentence_idx_of_token_.resize(tokens.size());
  std::size_t start = 0;
  for (std::size_t i = 1; i <= tokens.size(); ++i) {
    if (i == tokens.size() || tokens[i].sentence_id != tokens[start].sentence_id) {
      SentenceInfo info;
      info.begin = start;
      info.end = i;
      info.nps = chunk_range(tokens, tags_, start, i);
      for (std::size_t k = start; k < i; ++k)
        sentence_idx_of_token_[k] = sentences_.size();
      auto& para = paragraph_nps_[tokens[start].paragraph_id];
      para.insert(para.end(), info.nps.begin(), info.nps.end());
      sentences_.push_back(std::move(info));
      start = i;
    }
  }
}

std::size_t LinguisticContext::index_of(std::uint32_t uid) const {
  auto it = token_index_.find(uid);
  if (it == token_index_.end())
    throw ValidationError("unknown token uid " + std::to_string(uid));
  return it->second;
}

const LinguisticContext::SentenceInfo& LinguisticContext::sentence_of(
    std::size_t token_index) const {
  return sentences_[sentence_idx_of_token_[token_index]];
}

const std::vector<NPSpan>& LinguisticContext::sentence_nps(
    std::uint32_t instance_uid) const {
  return sentence_of(index_of(instance_uid)).nps;
}

FeatureVector LinguisticContext::evans_features(std::uint32_t instance_uid) const {
  const std::size_t idx = index_of(instance_uid);
  const std::vector<Token>& toks = *tokens_;
  if (!surface_is_it(toks[idx].surface))
    throw ValidationError("evans_features: token uid " +
                          std::to_string(instance_uid) +
                          " is not an occurrence of 'it'");
  const SentenceInfo& sent = sentence_of(idx);

  FeatureVector fv;
  auto num = [&](const char* name, double v) {
    fv.add_numeric(name, v, "linguistic", name);
  };
  auto cat = [&](const char* name, std::string v, const char* source) {
    fv.add_categorical(name, std::move(v), source, name);
  };
  auto lower = [&](std::size_t i) { return to_lower_ascii(toks[i].surface); };

  num("Word_position", toks[idx].position_in_sentence);

  // NP counts relative to the instance.
  long preceding_s = 0, following_s = 0;
  for (const NPSpan& np : sent.nps) {
    if (np.end_uid < instance_uid) ++preceding_s;
    if (np.start_uid > instance_uid) ++following_s;
  }
  long preceding_p = 0;
  const auto& para = paragraph_nps_.at(toks[idx].paragraph_id);
  for (const NPSpan& np : para)
    if (np.end_uid < instance_uid) ++preceding_p;

  num("Preceding_NPs_in_sentence", static_cast<double>(preceding_s));
  num("Preceding_NPs_in_paragraph", static_cast<double>(preceding_p));
  num("Following_NPs_in_sentence", static_cast<double>(following_s));
  num("NPs_in_sentence", static_cast<double>(sent.nps.size()));
  num("NPs_in_paragraph", static_cast<double>(para.size()));

  long following_adj = 0;
  for (std::size_t q = idx + 1; q < sent.end; ++q)
    if (is_adjective(tags_[q])) ++following_adj;
  num("Following_adjectives_in_sentence", static_cast<double>(following_adj));

  // Nearest lexical neighbours inside the sentence.
  std::string prev_verb = "NONE", following_adjective = "NONE",
              following_verb = "NONE";
  for (std::size_t q = idx; q-- > sent.begin;) {
    if (is_verb(tags_[q])) {
      prev_verb = lower(q);
      break;
    }
  }
  for (std::size_t q = idx + 1; q < sent.end; ++q) {
    if (following_adjective == "NONE" && is_adjective(tags_[q]))
      following_adjective = lower(q);
    if (following_verb == "NONE" && is_verb(tags_[q])) following_verb = lower(q);
  }
  cat("Previous_verb", prev_verb, "linguistic");
  cat("Following_adjective", following_adjective, "linguistic");
  cat("Following_verb", following_verb, "linguistic");

  // POS window, sentence-bounded.
  for (int o = 4; o >= 1; --o) {
    std::string name = "POS_L" + std::to_string(o);
    std::string v = (idx >= sent.begin + static_cast<std::size_t>(o))
                        ? tags_[idx - static_cast<std::size_t>(o)]
                        : "BOUNDARY";
    fv.add_categorical(name, v, "pos_window", name);
  }
  for (int o = 1; o <= 4; ++o) {
    std::string name = "POS_R" + std::to_string(o);
    std::string v = (idx + static_cast<std::size_t>(o) < sent.end)
                        ? tags_[idx + static_cast<std::size_t>(o)]
                        : "BOUNDARY";
    fv.add_categorical(name, v, "pos_window", name);
  }

  long following_compl = 0;
  for (std::size_t q = idx + 1; q < sent.end; ++q)
    if (is_complementiser(lower(q), tags_[q])) ++following_compl;
  num("Following_complementisers", static_cast<double>(following_compl));

  // Pattern booleans around the next NP.
  bool adj_before_np = false, compl_before_np = false;
  std::size_t next_np_start = sent.end;
  for (const NPSpan& np : sent.nps) {
    if (np.start_uid > instance_uid) {
      next_np_start = index_of(np.start_uid);
      break;
    }
  }
  if (next_np_start < sent.end) {
    for (std::size_t q = idx + 1; q < next_np_start; ++q) {
      if (is_adjective(tags_[q])) adj_before_np = true;
      if (is_complementiser(lower(q), tags_[q])) compl_before_np = true;
    }
  }
  num("An_adjective_before_the_next_NP", adj_before_np ? 1.0 : 0.0);
  num("A_complementiser_before_the_next_NP", compl_before_np ? 1.0 : 0.0);

  const bool prep_before =
      idx > sent.begin && is_preposition(lower(idx - 1), tags_[idx - 1]);
  num("Immediately_preceding_preposition", prep_before ? 1.0 : 0.0);

  // Distances: tokens strictly after the instance up to and including the
  // match, within the sentence; kDistanceCap when absent.
  double d_compl = kDistanceCap, d_inf = kDistanceCap, d_prep = kDistanceCap,
         d_ing = kDistanceCap;
  for (std::size_t q = idx + 1; q < sent.end; ++q) {
    const double dist = static_cast<double>(q - idx);
    if (d_compl == kDistanceCap && is_complementiser(lower(q), tags_[q]))
      d_compl = dist;
    if (d_inf == kDistanceCap && tags_[q] == "TO" && q + 1 < sent.end &&
        tags_[q + 1] == "VB")
      d_inf = dist;
    if (d_prep == kDistanceCap && is_preposition(lower(q), tags_[q]))
      d_prep = dist;
    if (d_ing == kDistanceCap && tags_[q] == "VBG") d_ing = dist;
  }
  num("Words_until_next_complementiser", d_compl);
  num("Words_until_next_infinitive", d_inf);
  num("Words_until_next_preposition", d_prep);
  num("Words_until_next_ing_verb", d_ing);

  return fv;
}

FeatureVector LinguisticContext::basic_features(std::uint32_t instance_uid) const {
  const std::size_t idx = index_of(instance_uid);
  const std::vector<Token>& toks = *tokens_;

  FeatureVector fv;
  const bool has_prev =
      idx > 0 && toks[idx - 1].trial_id == toks[idx].trial_id;
  const bool has_next =
      idx + 1 < toks.size() && toks[idx + 1].trial_id == toks[idx].trial_id;

  fv.add_categorical("Previous_word",
                     has_prev ? to_lower_ascii(toks[idx - 1].surface) : "BOUNDARY",
                     "basic", "Previous_word");
  fv.add_categorical("Next_word",
                     has_next ? to_lower_ascii(toks[idx + 1].surface) : "BOUNDARY",
                     "basic", "Next_word");
  fv.add_numeric("Word_length",
                 static_cast<double>(utf8_length(toks[idx].surface)), "basic",
                 "Word_length");
  fv.add_numeric("Punctuation",
                 has_next && toks[idx + 1].is_punctuation ? 1.0 : 0.0, "basic",
                 "Punctuation");
  return fv;
}

FeatureVector LinguisticContext::embedding_features(
    std::uint32_t instance_uid, const EmbeddingTable& table) const {
  const std::size_t idx = index_of(instance_uid);
  const std::vector<Token>& toks = *tokens_;

  FeatureVector fv;
  auto emit = [&](const char* prefix, const std::vector<float>* vec) {
    for (int d = 0; d < table.dimension; ++d) {
      fv.add_numeric(std::string(prefix) + std::to_string(d),
                     vec ? static_cast<double>((*vec)[static_cast<std::size_t>(d)])
                         : 0.0,
                     "embedding", "embeddings");
    }
  };
  const std::vector<float>* prev = nullptr;
  const std::vector<float>* next = nullptr;
  if (idx > 0 && toks[idx - 1].trial_id == toks[idx].trial_id)
    prev = table.lookup(to_lower_ascii(toks[idx - 1].surface));
  if (idx + 1 < toks.size() && toks[idx + 1].trial_id == toks[idx].trial_id)
    next = table.lookup(to_lower_ascii(toks[idx + 1].surface));
  emit("PREV_EMB_", prev);
  emit("NEXT_EMB_", next);
  return fv;
}

}  // namespace itclass
