#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "itclass/corpus.hpp"
#include "itclass/rng.hpp"

using namespace itclass;

namespace {

std::string measure_header() {
  std::string h =
      "participant_id,trial_id,token_uid,surface,sentence_id,paragraph_id,"
      "position_in_sentence,is_punctuation";
  for (const auto& n : gaze_measure_names()) h += "," + n;
  return h;
}

// A row with every measure 0 except the provided overrides.
std::string row(int participant, int trial, long uid, const std::string& surface,
                int sentence, int paragraph, int pos, int punct,
                const std::vector<std::pair<std::string, std::string>>& overrides) {
  std::vector<std::string> vals(kNumGazeMeasures, "0");
  for (const auto& [name, v] : overrides) {
    int idx = gaze_measure_index(name);
    REQUIRE(idx >= 0);
    vals[static_cast<std::size_t>(idx)] = v;
  }
  std::string r = std::to_string(participant) + "," + std::to_string(trial) + "," +
                  std::to_string(uid) + "," + csv_quote(surface) + "," +
                  std::to_string(sentence) + "," + std::to_string(paragraph) +
                  "," + std::to_string(pos) + "," + std::to_string(punct);
  for (const auto& v : vals) r += "," + v;
  return r;
}

std::string write_temp(const std::string& name, const std::string& content) {
  auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream out(path);
  out << content;
  out.close();
  return path.string();
}

Token mk_token(std::uint32_t uid, const std::string& surface, int trial = 0,
               int sentence = 0, int paragraph = 0, int pos = 0,
               bool punct = false) {
  Token t;
  t.uid = uid;
  t.surface = surface;
  t.trial_id = trial;
  t.sentence_id = sentence;
  t.paragraph_id = paragraph;
  t.position_in_sentence = pos;
  t.is_punctuation = punct;
  return t;
}

}  // namespace

TEST_CASE("load_gaze_corpus: two tokens, two participants") {
  std::string csv = measure_header() + "\n";
  csv += row(1, 0, 0, "The", 0, 0, 0, 0, {{"First_Fixation_Duration", "100"}}) + "\n";
  csv += row(1, 0, 1, "cat", 0, 0, 1, 0, {{"First_Fixation_Duration", "210"}}) + "\n";
  csv += row(2, 0, 0, "The", 0, 0, 0, 0, {{"First_Fixation_Duration", "140"}}) + "\n";
  csv += row(2, 0, 1, "cat", 0, 0, 1, 0, {{"Skip", "1"}}) + "\n";
  auto path = write_temp("itclass_gaze_small.csv", csv);

  GazeCorpus corpus = load_gaze_corpus(path);
  CHECK(corpus.tokens.size() == 2);
  CHECK(corpus.records.size() == 4);
  CHECK(corpus.tokens[0].surface == "The");
  CHECK(corpus.tokens[1].uid == 1);
  CHECK_FALSE(corpus.tokens[0].is_punctuation);
}

TEST_CASE("load_gaze_corpus rejects malformed input") {
  SUBCASE("negative duration names the line") {
    std::string csv = measure_header() + "\n";
    csv += row(1, 0, 0, "a", 0, 0, 0, 0, {}) + "\n";
    csv += row(1, 0, 1, "b", 0, 0, 1, 0, {{"Gaze_Duration", "-5"}}) + "\n";
    auto path = write_temp("itclass_gaze_neg.csv", csv);
    try {
      load_gaze_corpus(path);
      FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
      CHECK(std::string(e.what()).find("line 3") != std::string::npos);
      CHECK(std::string(e.what()).find("Gaze_Duration") != std::string::npos);
    }
  }
  SUBCASE("unknown measure column is named") {
    std::string csv = measure_header() + ",Bogus_Column\n";
    try {
      load_gaze_corpus(write_temp("itclass_gaze_unk.csv", csv));
      FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
      CHECK(std::string(e.what()).find("Bogus_Column") != std::string::npos);
    }
  }
  SUBCASE("missing measure column is named") {
    std::string h =
        "participant_id,trial_id,token_uid,surface,sentence_id,paragraph_id,"
        "position_in_sentence,is_punctuation";
    const auto& names = gaze_measure_names();
    for (int i = 0; i + 1 < kNumGazeMeasures; ++i) h += "," + names[static_cast<std::size_t>(i)];
    try {
      load_gaze_corpus(write_temp("itclass_gaze_missing.csv", h + "\n"));
      FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
      CHECK(std::string(e.what()).find("Skip") != std::string::npos);
    }
  }
  SUBCASE("skip with first-run fixations violates the invariant") {
    std::string csv = measure_header() + "\n";
    csv += row(1, 0, 0, "a", 0, 0, 0, 0,
               {{"Skip", "1"}, {"First_Run_Fixation_Count", "2"}}) + "\n";
    CHECK_THROWS_AS(load_gaze_corpus(write_temp("itclass_gaze_skip.csv", csv)),
                    ValidationError);
  }
  SUBCASE("percentage above 100 is rejected") {
    std::string csv = measure_header() + "\n";
    csv += row(1, 0, 0, "a", 0, 0, 0, 0, {{"Fixation_Pct", "101"}}) + "\n";
    CHECK_THROWS_AS(load_gaze_corpus(write_temp("itclass_gaze_pct.csv", csv)),
                    ValidationError);
  }
}

TEST_CASE("empty measure cells impute to zero") {
  std::string csv = measure_header() + "\n";
  // An empty First_Fixation_Duration cell means "not applicable".
  csv += row(1, 0, 0, "a", 0, 0, 0, 0,
             {{"Skip", "1"}, {"First_Fixation_Duration", ""}}) + "\n";
  auto path = write_temp("itclass_gaze_empty.csv", csv);
  GazeCorpus corpus = load_gaze_corpus(path);
  REQUIRE(corpus.records.size() == 1);
  const int ffd = gaze_measure_index("First_Fixation_Duration");
  CHECK(corpus.records[0].measures[static_cast<std::size_t>(ffd)] == 0.0);
}

TEST_CASE("average_gaze: arithmetic mean and skip imputation") {
  std::vector<Token> tokens = {mk_token(0, "word")};
  const int gd = gaze_measure_index("Gaze_Duration");
  const int skip = gaze_measure_index("Skip");

  SUBCASE("two readers average to the midpoint") {
    RawGazeRecord a, b;
    a.participant_id = 1;
    a.token_uid = 0;
    a.measures[static_cast<std::size_t>(gd)] = 100;
    b.participant_id = 2;
    b.token_uid = 0;
    b.measures[static_cast<std::size_t>(gd)] = 200;
    auto avg = average_gaze({a, b}, tokens);
    CHECK(avg[0].measures[static_cast<std::size_t>(gd)] == doctest::Approx(150.0));
    CHECK(avg[0].n_participants == 2);
  }
  SUBCASE("a skipping reader contributes imputed zeros") {
    RawGazeRecord a, b;
    a.participant_id = 1;
    a.token_uid = 0;
    a.measures[static_cast<std::size_t>(gd)] = 120;
    b.participant_id = 2;
    b.token_uid = 0;
    b.measures[static_cast<std::size_t>(skip)] = 1;  // all durations stay 0
    auto avg = average_gaze({a, b}, tokens);
    CHECK(avg[0].measures[static_cast<std::size_t>(gd)] == doctest::Approx(60.0));
    CHECK(avg[0].measures[static_cast<std::size_t>(skip)] == doctest::Approx(0.5));
  }
  SUBCASE("identical records average to themselves") {
    RawGazeRecord a;
    a.participant_id = 1;
    a.token_uid = 0;
    a.measures[static_cast<std::size_t>(gd)] = 333;
    RawGazeRecord b = a;
    b.participant_id = 2;
    RawGazeRecord c = a;
    c.participant_id = 3;
    auto avg = average_gaze({a, b, c}, tokens);
    CHECK(avg[0].measures[static_cast<std::size_t>(gd)] == doctest::Approx(333.0));
  }
  SUBCASE("permutation of record order changes nothing") {
    std::vector<RawGazeRecord> records;
    Rng rng(3);
    for (int p = 1; p <= 14; ++p) {
      RawGazeRecord r;
      r.participant_id = p;
      r.token_uid = 0;
      for (int m = 0; m < kNumGazeMeasures; ++m)
        r.measures[static_cast<std::size_t>(m)] = rng.uniform() * 100;
      records.push_back(r);
    }
    auto base = average_gaze(records, tokens);
    for (int t = 0; t < 5; ++t) {
      rng.shuffle(records);
      auto again = average_gaze(records, tokens);
      for (int m = 0; m < kNumGazeMeasures; ++m)
        CHECK(again[0].measures[static_cast<std::size_t>(m)] ==
              base[0].measures[static_cast<std::size_t>(m)]);
    }
  }
  SUBCASE("token without records errors") {
    std::vector<Token> two = {mk_token(0, "a"), mk_token(1, "b")};
    RawGazeRecord a;
    a.participant_id = 1;
    a.token_uid = 0;
    CHECK_THROWS_AS(average_gaze({a}, two), ValidationError);
  }
}

TEST_CASE("locate_it_instances") {
  SUBCASE("plain occurrence") {
    std::vector<Token> toks = {mk_token(0, "is"), mk_token(1, "it"),
                               mk_token(2, "not"), mk_token(3, "so"),
                               mk_token(4, "?", 0, 0, 0, 4, true)};
    auto uids = locate_it_instances(toks);
    REQUIRE(uids.size() == 1);
    CHECK(uids[0] == 1);
  }
  SUBCASE("possessive excluded") {
    std::vector<Token> toks = {mk_token(0, "its"), mk_token(1, "colour")};
    CHECK(locate_it_instances(toks).empty());
  }
  SUBCASE("clitic forms count, either apostrophe") {
    std::vector<Token> toks = {mk_token(0, "It's"), mk_token(1, "it\xE2\x80\x99s"),
                               mk_token(2, "It")};
    CHECK(locate_it_instances(toks).size() == 3);
  }
  SUBCASE("tokenisation noise is flagged, not located") {
    std::vector<Token> toks = {mk_token(0, "it...the"), mk_token(1, "it"),
                               mk_token(2, "it?..ah,")};
    auto cands = locate_it_candidates(toks);
    REQUIRE(cands.size() == 3);
    CHECK(cands[0].noise);
    CHECK_FALSE(cands[1].noise);
    CHECK(cands[2].noise);
    auto clean = locate_it_instances(toks);
    REQUIRE(clean.size() == 1);
    CHECK(clean[0] == 1);
  }
  SUBCASE("ordinary it-prefixed words are not candidates") {
    std::vector<Token> toks = {mk_token(0, "item"), mk_token(1, "Italy")};
    CHECK(locate_it_candidates(toks).empty());
  }
  SUBCASE("output is strictly increasing") {
    std::vector<Token> toks;
    for (std::uint32_t i = 0; i < 50; ++i)
      toks.push_back(mk_token(i, i % 7 == 3 ? "it" : "word"));
    auto uids = locate_it_instances(toks);
    for (std::size_t i = 1; i < uids.size(); ++i) CHECK(uids[i] > uids[i - 1]);
  }
}

TEST_CASE("load_annotations") {
  std::vector<std::uint32_t> instances = {7, 9, 12};
  SUBCASE("agreement produces a final label") {
    auto path = write_temp("itclass_ann1.tsv",
                           "token_uid\tannotator1\tannotator2\n7\tNOM\tNOM\n");
    auto anns = load_annotations(path, instances);
    REQUIRE(anns.size() == 1);
    CHECK(anns[0].final_label.has_value());
    CHECK(*anns[0].final_label == Label::NOM);
  }
  SUBCASE("disagreement leaves final label absent") {
    auto path = write_temp("itclass_ann2.tsv",
                           "token_uid\tannotator1\tannotator2\n9\tPLEON\tCLAUSE\n");
    auto anns = load_annotations(path, instances);
    REQUIRE(anns.size() == 1);
    CHECK_FALSE(anns[0].final_label.has_value());
  }
  SUBCASE("unknown uid errors") {
    auto path = write_temp("itclass_ann3.tsv",
                           "token_uid\tannotator1\tannotator2\n8\tNOM\tNOM\n");
    CHECK_THROWS_AS(load_annotations(path, instances), ValidationError);
  }
  SUBCASE("bad label errors") {
    auto path = write_temp("itclass_ann4.tsv",
                           "token_uid\tannotator1\tannotator2\n7\tNOM\tMAYBE\n");
    CHECK_THROWS_AS(load_annotations(path, instances), ValidationError);
  }
  SUBCASE("duplicate uid errors") {
    auto path = write_temp(
        "itclass_ann5.tsv",
        "token_uid\tannotator1\tannotator2\n7\tNOM\tNOM\n7\tNOM\tNOM\n");
    CHECK_THROWS_AS(load_annotations(path, instances), ValidationError);
  }
}

TEST_CASE("retained_instances drops disagreements and noise uids") {
  std::vector<AnnotatedInstance> annotated;
  AnnotatedInstance agree_clean;
  agree_clean.token_uid = 1;
  agree_clean.label_a1 = agree_clean.label_a2 = Label::PLEON;
  agree_clean.final_label = Label::PLEON;
  AnnotatedInstance disagree;
  disagree.token_uid = 2;
  disagree.label_a1 = Label::NOM;
  disagree.label_a2 = Label::CLAUSE;
  AnnotatedInstance agree_noise;
  agree_noise.token_uid = 3;
  agree_noise.label_a1 = agree_noise.label_a2 = Label::NOM;
  agree_noise.final_label = Label::NOM;
  annotated = {agree_clean, disagree, agree_noise};

  std::vector<std::uint32_t> clean_located = {1, 2};  // uid 3 is noise
  auto retained = retained_instances(annotated, clean_located);
  REQUIRE(retained.size() == 1);
  CHECK(retained[0].token_uid == 1);
}
