#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "itclass/rng.hpp"
#include "itclass/tagger.hpp"

using namespace itclass;

namespace {

TaggedSentence sent(std::initializer_list<std::pair<const char*, const char*>> ws) {
  TaggedSentence s;
  for (const auto& [w, t] : ws) s.emplace_back(w, t);
  return s;
}

std::vector<Token> tokens_from(const std::vector<std::string>& words) {
  std::vector<Token> out;
  for (std::size_t i = 0; i < words.size(); ++i) {
    Token t;
    t.uid = static_cast<std::uint32_t>(i);
    t.surface = words[i];
    t.sentence_id = 0;
    t.is_punctuation = words[i].size() == 1 &&
                       std::string(".,?!").find(words[i][0]) != std::string::npos;
    out.push_back(t);
  }
  return out;
}

std::string write_temp(const std::string& name, const std::string& content) {
  auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream out(path);
  out << content;
  return path.string();
}

// A miniature grammar over an unambiguous lexicon, for held-out accuracy.
std::vector<TaggedSentence> toy_corpus(int n, std::uint64_t seed) {
  const std::pair<const char*, const char*> subjects[] = {
      {"mary", "NNP"}, {"john", "NNP"}, {"he", "PRP"}, {"she", "PRP"}};
  const std::pair<const char*, const char*> verbs[] = {
      {"saw", "VBD"}, {"heard", "VBD"}, {"took", "VBD"}, {"found", "VBD"}};
  const std::pair<const char*, const char*> nouns[] = {
      {"cat", "NN"}, {"book", "NN"}, {"garden", "NN"}, {"letter", "NN"}};
  const std::pair<const char*, const char*> adjs[] = {
      {"old", "JJ"}, {"small", "JJ"}, {"nice", "JJ"}};
  Rng rng(seed);
  std::vector<TaggedSentence> corpus;
  for (int i = 0; i < n; ++i) {
    TaggedSentence s;
    auto add = [&](const std::pair<const char*, const char*>& w) {
      s.emplace_back(w.first, w.second);
    };
    add(subjects[rng.bounded(4)]);
    add(verbs[rng.bounded(4)]);
    add({"the", "DT"});
    if (rng.bernoulli(0.5)) add(adjs[rng.bounded(3)]);
    add(nouns[rng.bounded(4)]);
    if (rng.bernoulli(0.4)) {
      add({"in", "IN"});
      add({"the", "DT"});
      add(nouns[rng.bounded(4)]);
    }
    s.emplace_back(".", ".");
    corpus.push_back(std::move(s));
  }
  return corpus;
}

double accuracy(const TaggerModel& model,
                const std::vector<TaggedSentence>& corpus) {
  long correct = 0, total = 0;
  for (const auto& s : corpus) {
    std::vector<std::string> words;
    for (const auto& [w, t] : s) words.push_back(w);
    auto tags = tag_sentence(words, model);
    for (std::size_t i = 0; i < s.size(); ++i) {
      ++total;
      if (tags[i] == s[i].second) ++correct;
    }
  }
  return static_cast<double>(correct) / static_cast<double>(total);
}

}  // namespace

TEST_CASE("single-sentence memorisation") {
  auto corpus = std::vector<TaggedSentence>{
      sent({{"the", "DT"}, {"cat", "NN"}, {"sat", "VBD"}})};
  TaggerModel model = train_tagger(corpus, 5, 1);
  auto tags = tag_sentence({"the", "cat", "sat"}, model);
  REQUIRE(tags.size() == 3);
  CHECK(tags[0] == "DT");
  CHECK(tags[1] == "NN");
  CHECK(tags[2] == "VBD");
}

TEST_CASE("toy corpus self-accuracy over 95 percent") {
  auto corpus = std::vector<TaggedSentence>{
      sent({{"mary", "NNP"}, {"saw", "VBD"}, {"the", "DT"}, {"cat", "NN"}, {".", "."}}),
      sent({{"he", "PRP"}, {"heard", "VBD"}, {"a", "DT"}, {"voice", "NN"}, {".", "."}}),
      sent({{"the", "DT"}, {"cat", "NN"}, {"sat", "VBD"}, {"here", "RB"}, {".", "."}})};
  TaggerModel model = train_tagger(corpus, 5, 1);
  CHECK(accuracy(model, corpus) >= 0.95);
}

TEST_CASE("held-out accuracy over 90 percent on the toy grammar") {
  auto train_set = toy_corpus(400, 11);
  auto test_set = toy_corpus(80, 12);
  TaggerModel model = train_tagger(train_set, 5, 20);
  CHECK(accuracy(model, test_set) >= 0.90);
}

TEST_CASE("training is deterministic under a fixed seed") {
  auto corpus = toy_corpus(50, 3);
  TaggerModel m1 = train_tagger(corpus, 4, 20);
  TaggerModel m2 = train_tagger(corpus, 4, 20);
  REQUIRE(m1.weights.size() == m2.weights.size());
  for (const auto& [feat, per_tag] : m1.weights) {
    auto it = m2.weights.find(feat);
    REQUIRE(it != m2.weights.end());
    REQUIRE(per_tag.size() == it->second.size());
    for (const auto& [tag, w] : per_tag) {
      auto jt = it->second.find(tag);
      REQUIRE(jt != it->second.end());
      CHECK(w == jt->second);  // bit-identical
    }
  }
}

TEST_CASE("pronoun contexts tag it as PRP") {
  auto corpus = std::vector<TaggedSentence>{
      sent({{"i", "PRP"}, {"heard", "VBD"}, {"of", "IN"}, {"it", "PRP"}, {".", "."}}),
      sent({{"she", "PRP"}, {"took", "VBD"}, {"it", "PRP"}, {".", "."}}),
      sent({{"it", "PRP"}, {"was", "VBD"}, {"nice", "JJ"}, {".", "."}}),
      sent({{"he", "PRP"}, {"saw", "VBD"}, {"it", "PRP"}, {"there", "RB"}, {".", "."}})};
  TaggerModel model = train_tagger(corpus, 8, 2);
  auto tags = tag_sentence({"I", "heard", "of", "it"}, model);
  REQUIRE(tags.size() == 4);
  CHECK(tags[0] == "PRP");
  CHECK(tags[1] == "VBD");
  CHECK(tags[2] == "IN");
  CHECK(tags[3] == "PRP");
}

TEST_CASE("punctuation passes through as its own tag") {
  auto corpus = std::vector<TaggedSentence>{sent({{"the", "DT"}, {"cat", "NN"}})};
  TaggerModel model = train_tagger(corpus, 2, 1);
  auto toks = tokens_from({","});
  auto tags = tag(toks, model);
  REQUIRE(tags.size() == 1);
  CHECK(tags[0] == ",");
}

TEST_CASE("empty input round-trips") {
  auto corpus = std::vector<TaggedSentence>{sent({{"a", "DT"}})};
  TaggerModel model = train_tagger(corpus, 1, 1);
  CHECK(tag({}, model).empty());
  CHECK_THROWS_AS(train_tagger({}, 3, 1), ValidationError);
}

TEST_CASE("load_tagged alignment") {
  auto toks = tokens_from({"The", "cat", "sat", "."});
  SUBCASE("aligned file loads") {
    auto path = write_temp("itclass_tags_ok.tsv",
                           "The\tDT\ncat\tNN\nsat\tVBD\n.\t.\n\n");
    auto tags = load_tagged(path, toks);
    REQUIRE(tags.size() == 4);
    CHECK(tags[2] == "VBD");
  }
  SUBCASE("missing line is an alignment error") {
    auto path = write_temp("itclass_tags_short.tsv", "The\tDT\ncat\tNN\n");
    CHECK_THROWS_AS(load_tagged(path, toks), ValidationError);
  }
  SUBCASE("surface mismatch cites the uid") {
    auto path = write_temp("itclass_tags_bad.tsv",
                           "The\tDT\ndog\tNN\nsat\tVBD\n.\t.\n");
    try {
      load_tagged(path, toks);
      FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
      CHECK(std::string(e.what()).find("token_uid 1") != std::string::npos);
    }
  }
  SUBCASE("extra lines error") {
    auto path = write_temp("itclass_tags_long.tsv",
                           "The\tDT\ncat\tNN\nsat\tVBD\n.\t.\nmore\tNN\n");
    CHECK_THROWS_AS(load_tagged(path, toks), ValidationError);
  }
}

TEST_CASE("load_tagged_corpus splits on blank lines") {
  auto path = write_temp("itclass_tc.tsv", "a\tDT\nb\tNN\n\nc\tVBD\n");
  auto corpus = load_tagged_corpus(path);
  REQUIRE(corpus.size() == 2);
  CHECK(corpus[0].size() == 2);
  CHECK(corpus[1].size() == 1);
  CHECK_THROWS_AS(load_tagged_corpus(write_temp("itclass_tc_bad.tsv", "a b\n")),
                  ValidationError);
}
