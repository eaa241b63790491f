#include "itclass/datagen.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <unordered_set>

#include "itclass/common.hpp"
#include "itclass/corpus.hpp"
#include "itclass/rng.hpp"
#include "itclass/types.hpp"

namespace itclass {

namespace fs = std::filesystem;

namespace {

// ---------------------------------------------------------------------------
// Lexicon

struct Word {
  const char* surface;
  const char* tag;
};

const Word kNames[] = {{"Mary", "NNP"},     {"John", "NNP"},   {"Emily", "NNP"},
                       {"Alfred", "NNP"},   {"Cynthia", "NNP"}, {"Lawrence", "NNP"},
                       {"Dorcas", "NNP"},   {"Evelyn", "NNP"}};
const Word kSubjPron[] = {{"he", "PRP"}, {"she", "PRP"}, {"they", "PRP"},
                          {"we", "PRP"}, {"you", "PRP"}, {"I", "PRP"}};
const Word kObjPron[] = {{"him", "PRP"}, {"her", "PRP"}, {"them", "PRP"},
                         {"us", "PRP"},  {"me", "PRP"}};
const Word kPossPron[] = {{"his", "PRP$"}, {"her", "PRP$"}, {"their", "PRP$"},
                          {"its", "PRP$"}, {"my", "PRP$"},  {"your", "PRP$"}};

const Word kNouns[] = {
    {"house", "NN"},   {"garden", "NN"},  {"letter", "NN"},  {"table", "NN"},
    {"door", "NN"},    {"evening", "NN"}, {"morning", "NN"}, {"coffee", "NN"},
    {"village", "NN"}, {"doctor", "NN"},  {"room", "NN"},    {"window", "NN"},
    {"voice", "NN"},   {"paper", "NN"},   {"book", "NN"},    {"box", "NN"},
    {"key", "NN"},     {"tea", "NN"},     {"fire", "NN"},    {"chair", "NN"},
    {"lawn", "NN"},    {"hall", "NN"},    {"road", "NN"},    {"case", "NN"},
    {"story", "NN"},   {"plan", "NN"},    {"word", "NN"},    {"face", "NN"},
    {"smile", "NN"},   {"truth", "NN"},   {"news", "NN"},    {"nurse", "NN"},
    {"war", "NN"},     {"work", "NN"},    {"farm", "NN"},    {"cup", "NN"},
    {"glass", "NN"},   {"gate", "NN"},    {"wall", "NN"},    {"path", "NN"},
    {"tree", "NN"},    {"light", "NN"},   {"idea", "NN"},    {"answer", "NN"},
    {"question", "NN"},{"matter", "NN"},  {"affair", "NN"},  {"business", "NN"},
    {"fact", "NN"},    {"point", "NN"},   {"reason", "NN"},  {"change", "NN"},
    {"visit", "NN"},   {"talk", "NN"},    {"look", "NN"},    {"manner", "NN"},
    {"way", "NN"},     {"place", "NN"},   {"thing", "NN"},   {"man", "NN"},
    {"woman", "NN"},   {"friend", "NN"},  {"day", "NN"},     {"night", "NN"},
    {"week", "NN"},    {"year", "NN"},    {"garden", "NN"},  {"photograph", "NN"}};
const Word kPluralNouns[] = {{"letters", "NNS"}, {"papers", "NNS"},
                             {"voices", "NNS"},  {"rooms", "NNS"},
                             {"flowers", "NNS"}, {"friends", "NNS"},
                             {"plans", "NNS"},   {"stories", "NNS"},
                             {"words", "NNS"},   {"things", "NNS"}};

const Word kTransVerbs[] = {
    {"heard", "VBD"},   {"saw", "VBD"},      {"took", "VBD"},
    {"found", "VBD"},   {"gave", "VBD"},     {"put", "VBD"},
    {"left", "VBD"},    {"opened", "VBD"},   {"closed", "VBD"},
    {"read", "VBD"},    {"watched", "VBD"},  {"mentioned", "VBD"},
    {"remembered", "VBD"}, {"noticed", "VBD"}, {"wanted", "VBD"},
    {"brought", "VBD"}, {"kept", "VBD"},     {"held", "VBD"},
    {"carried", "VBD"}, {"dropped", "VBD"},  {"moved", "VBD"}};
const Word kSayVerbs[] = {{"said", "VBD"},     {"thought", "VBD"},
                          {"knew", "VBD"},     {"believed", "VBD"},
                          {"felt", "VBD"},     {"supposed", "VBD"}};
const Word kIntransVerbs[] = {
    {"paused", "VBD"},  {"smiled", "VBD"},  {"nodded", "VBD"},
    {"waited", "VBD"},  {"stopped", "VBD"}, {"turned", "VBD"},
    {"walked", "VBD"},  {"came", "VBD"},    {"went", "VBD"},
    {"stood", "VBD"},   {"sat", "VBD"},     {"replied", "VBD"},
    {"answered", "VBD"},{"laughed", "VBD"}, {"sighed", "VBD"}};
const Word kPsychVerbs[] = {
    {"surprised", "VBD"}, {"worried", "VBD"},  {"pleased", "VBD"},
    {"annoyed", "VBD"},   {"puzzled", "VBD"},  {"shocked", "VBD"},
    {"startled", "VBD"},  {"amused", "VBD"},   {"troubled", "VBD"}};
const Word kBaseVerbs[] = {
    {"go", "VB"},    {"see", "VB"},   {"find", "VB"},  {"take", "VB"},
    {"say", "VB"},   {"believe", "VB"}, {"leave", "VB"}, {"stay", "VB"},
    {"know", "VB"},  {"come", "VB"},  {"wait", "VB"},  {"talk", "VB"},
    {"rest", "VB"},  {"think", "VB"}, {"ask", "VB"},   {"tell", "VB"},
    {"hear", "VB"},  {"understand", "VB"}, {"help", "VB"}, {"forget", "VB"}};
const Word kIngVerbs[] = {{"going", "VBG"},   {"saying", "VBG"},
                          {"watching", "VBG"}, {"reading", "VBG"},
                          {"thinking", "VBG"}, {"walking", "VBG"},
                          {"talking", "VBG"},  {"smiling", "VBG"},
                          {"waiting", "VBG"}};
const Word kWeatherIng[] = {{"raining", "VBG"}, {"snowing", "VBG"},
                            {"getting", "VBG"}};
const Word kModals[] = {{"would", "MD"}, {"could", "MD"}, {"should", "MD"},
                        {"might", "MD"}, {"must", "MD"}};

const Word kAdjShared[] = {{"good", "JJ"},  {"late", "JJ"},   {"long", "JJ"},
                           {"small", "JJ"}, {"old", "JJ"},    {"young", "JJ"},
                           {"happy", "JJ"}, {"tired", "JJ"},  {"careful", "JJ"}};
const Word kAdjPleon[] = {{"nice", "JJ"},      {"true", "JJ"},
                          {"possible", "JJ"},  {"useful", "JJ"},
                          {"clear", "JJ"},     {"important", "JJ"},
                          {"likely", "JJ"},    {"easy", "JJ"},
                          {"difficult", "JJ"}, {"pleasant", "JJ"}};
const Word kAdjClause[] = {{"odd", "JJ"},     {"strange", "JJ"},
                           {"obvious", "JJ"}, {"serious", "JJ"},
                           {"curious", "JJ"}, {"absurd", "JJ"}};
const Word kAdjNom[] = {{"empty", "JJ"}, {"dark", "JJ"},  {"quiet", "JJ"},
                        {"heavy", "JJ"}, {"broken", "JJ"}, {"cold", "JJ"}};

const Word kNounClause[] = {{"lie", "NN"},     {"shock", "NN"},
                            {"surprise", "NN"}, {"relief", "NN"},
                            {"mistake", "NN"},  {"blow", "NN"},
                            {"nuisance", "NN"}};
const Word kNounPleon[] = {{"pity", "NN"}, {"shame", "NN"}, {"wonder", "NN"}};

const Word kAdvEnd[] = {{"again", "RB"}, {"away", "RB"}, {"back", "RB"},
                        {"down", "RB"},  {"carefully", "RB"}, {"aside", "RB"}};
const Word kAdvMid[] = {{"very", "RB"},  {"quite", "RB"}, {"so", "RB"},
                        {"rather", "RB"}, {"really", "RB"}};
const Word kAdvSent[] = {{"then", "RB"},    {"soon", "RB"},   {"slowly", "RB"},
                         {"quickly", "RB"}, {"softly", "RB"}, {"perhaps", "RB"},
                         {"certainly", "RB"}, {"indeed", "RB"}, {"still", "RB"},
                         {"never", "RB"},   {"always", "RB"}, {"often", "RB"},
                         {"once", "RB"},    {"together", "RB"}, {"alone", "RB"},
                         {"here", "RB"},    {"there", "RB"}};
const Word kPreps[] = {{"of", "IN"},    {"in", "IN"},    {"on", "IN"},
                       {"at", "IN"},    {"with", "IN"},  {"from", "IN"},
                       {"about", "IN"}, {"under", "IN"}, {"over", "IN"},
                       {"near", "IN"},  {"after", "IN"}, {"before", "IN"},
                       {"through", "IN"}, {"behind", "IN"}};
const Word kObjPreps[] = {{"of", "IN"},   {"about", "IN"}, {"on", "IN"},
                          {"with", "IN"}, {"at", "IN"},    {"from", "IN"}};
const Word kDets[] = {{"the", "DT"}, {"a", "DT"}, {"this", "DT"}, {"every", "DT"}};
const Word kConj[] = {{"and", "CC"}, {"but", "CC"}};

const Word kDot = {".", "."};
const Word kComma = {",", ","};
const Word kQuestion = {"?", "?"};
const Word kBang = {"!", "!"};
const Word kThat = {"that", "IN"};
const Word kWas = {"was", "VBD"};
const Word kIs = {"is", "VBZ"};
const Word kSeemed = {"seemed", "VBD"};
const Word kSeems = {"seems", "VBZ"};
const Word kTo = {"to", "TO"};
const Word kNot = {"not", "RB"};

template <std::size_t N>
const Word& pick(const Word (&pool)[N], Rng& rng) {
  return pool[rng.bounded(N)];
}

// ---------------------------------------------------------------------------
// Instance patterns and class mixtures

enum Prefix { PX_START, PX_CONJ, PX_PREP, PX_VERB, PX_SAID_THAT, PX_TAGQ };
enum Suffix {
  SX_BE_ADJ,
  SX_BE_NP,
  SX_VBD_NP,
  SX_END,
  SX_ADV_END,
  SX_SEEMED,
  SX_RAIN,
  SX_TAKES,
  SX_MD_VB
};

// Mixture weights per class (NOM=0, PLEON=1, CLAUSE=2), tuned so that the
// token baseline, the linguistic model and the gaze model land in the target
// bands. Rows need not sum to 1; they are normalised at sampling time.
const double kPrefixMix[3][6] = {
    // START CONJ  PREP  VERB  SAID  TAGQ
    {0.195, 0.130, 0.265, 0.280, 0.130, 0.000},  // NOM
    {0.345, 0.150, 0.052, 0.165, 0.288, 0.000},  // PLEON
    {0.310, 0.190, 0.103, 0.175, 0.195, 0.027},  // CLAUSE
};
const double kSuffixMix[3][9] = {
    // BE_ADJ BE_NP VBD_NP END   ADV   SEEMED RAIN  TAKES MD
    {0.193, 0.170, 0.100, 0.198, 0.138, 0.070, 0.010, 0.030, 0.108},  // NOM
    {0.378, 0.113, 0.052, 0.063, 0.043, 0.140, 0.118, 0.068, 0.020},  // PLEON
    {0.273, 0.200, 0.185, 0.083, 0.055, 0.120, 0.010, 0.000, 0.078},  // CLAUSE
};

int sample_mix(const double* weights, int n, Rng& rng) {
  double total = 0.0;
  for (int i = 0; i < n; ++i) total += weights[i];
  double u = rng.uniform() * total;
  for (int i = 0; i < n; ++i) {
    u -= weights[i];
    if (u <= 0.0) return i;
  }
  return n - 1;
}

struct DraftWord {
  std::string surface;
  std::string tag;
};

struct SentenceDraft {
  std::vector<DraftWord> words;
  int it_index = -1;
  int instance_slot = -1;
  int cls = -1;           // generation class, Label-indexed
  double gaze_scale = 1.0;
};

void push(SentenceDraft& s, const Word& w) {
  s.words.push_back({w.surface, w.tag});
}

void push_subject(SentenceDraft& s, Rng& rng) {
  if (rng.bernoulli(0.45)) push(s, pick(kNames, rng));
  else push(s, pick(kSubjPron, rng));
}

void push_np(SentenceDraft& s, Rng& rng, bool allow_adj = true) {
  push(s, pick(kDets, rng));
  if (allow_adj && rng.bernoulli(0.3)) push(s, pick(kAdjShared, rng));
  push(s, pick(kNouns, rng));
}

void push_short_clause(SentenceDraft& s, Rng& rng) {
  push_subject(s, rng);
  push(s, pick(kIntransVerbs, rng));
  if (rng.bernoulli(0.3)) push(s, pick(kAdvSent, rng));
}

// "she left early" style complement clause after "that" or "seemed that".
void push_that_clause(SentenceDraft& s, Rng& rng) {
  push_subject(s, rng);
  if (rng.bernoulli(0.5)) {
    push(s, pick(kIntransVerbs, rng));
    if (rng.bernoulli(0.5)) push(s, pick(kAdvSent, rng));
  } else {
    push(s, pick(kTransVerbs, rng));
    push_np(s, rng, false);
  }
}

// Builds one instance sentence; records where "it" sits and the pattern's
// textual ambiguity (shared pleonastic/clause shapes get a stronger gaze
// signature; unmistakable shapes a weaker one).
SentenceDraft make_instance_sentence(int cls, Rng& rng, double amb_scale,
                                     double clear_scale) {
  SentenceDraft s;
  s.cls = cls;
  const int prefix = sample_mix(kPrefixMix[cls], 6, rng);
  int suffix = prefix == PX_TAGQ ? -1 : sample_mix(kSuffixMix[cls], 9, rng);

  // Prefix.
  switch (prefix) {
    case PX_START:
      break;
    case PX_CONJ:
      push_short_clause(s, rng);
      push(s, kComma);
      push(s, pick(kConj, rng));
      break;
    case PX_PREP: {
      if (rng.bernoulli(0.18)) {
        // "when was the first time you heard of it"
        push(s, {"when", "WRB"});
        push(s, kWas);
        push(s, {"the", "DT"});
        push(s, {"first", "JJ"});
        push(s, {"time", "NN"});
        push(s, pick(kSubjPron, rng));
        push(s, pick(kTransVerbs, rng));
      } else {
        push_subject(s, rng);
        push(s, pick(kTransVerbs, rng));
        if (rng.bernoulli(0.25)) push_np(s, rng, false);
      }
      push(s, pick(kObjPreps, rng));
      break;
    }
    case PX_VERB:
      push_subject(s, rng);
      if (rng.bernoulli(0.2)) push(s, pick(kAdvSent, rng));
      push(s, pick(kTransVerbs, rng));
      break;
    case PX_SAID_THAT:
      push_subject(s, rng);
      push(s, pick(kSayVerbs, rng));
      push(s, kThat);
      break;
    case PX_TAGQ:
      push_short_clause(s, rng);
      push(s, kComma);
      push(s, kIs);
      break;
  }

  const bool clitic =
      suffix >= 0 &&
      (suffix == SX_BE_ADJ || suffix == SX_BE_NP || suffix == SX_RAIN) &&
      rng.bernoulli(0.16);

  s.it_index = static_cast<int>(s.words.size());
  if (clitic) {
    s.words.push_back({rng.bernoulli(0.2) ? "it\xE2\x80\x99s" : "it's", "PRP"});
  } else {
    push(s, {"it", "PRP"});
  }

  const bool present = rng.bernoulli(0.3);
  auto push_be = [&] {
    if (!clitic) push(s, present ? kIs : kWas);
  };

  // Suffix.
  switch (suffix) {
    case -1:  // tag question
      push(s, kNot);
      push(s, {"so", "RB"});
      push(s, kQuestion);
      return s;
    case SX_BE_ADJ: {
      push_be();
      if (rng.bernoulli(0.35)) push(s, pick(kAdvMid, rng));
      if (cls == 1) push(s, rng.bernoulli(0.7) ? pick(kAdjPleon, rng)
                                               : pick(kAdjShared, rng));
      else if (cls == 2) push(s, rng.bernoulli(0.6) ? pick(kAdjClause, rng)
                                                    : pick(kAdjShared, rng));
      else push(s, rng.bernoulli(0.6) ? pick(kAdjNom, rng)
                                      : pick(kAdjShared, rng));
      const double u = rng.uniform();
      if (cls == 1 && u < 0.42) {
        if (rng.bernoulli(0.55)) {
          push(s, kThat);
          push_that_clause(s, rng);
        } else {
          push(s, kTo);
          push(s, pick(kBaseVerbs, rng));
          if (rng.bernoulli(0.4)) push(s, pick(kAdvSent, rng));
        }
      } else if (cls == 2 && u < 0.18) {
        push(s, kThat);
        push_that_clause(s, rng);
      } else if (rng.bernoulli(0.25)) {
        push(s, pick(kPreps, rng));
        push_np(s, rng, false);
      }
      break;
    }
    case SX_BE_NP: {
      push_be();
      push(s, {"a", "DT"});
      if (cls == 2) push(s, rng.bernoulli(0.65) ? pick(kNounClause, rng)
                                                : pick(kNouns, rng));
      else if (cls == 1) push(s, rng.bernoulli(0.6) ? pick(kNounPleon, rng)
                                                    : pick(kNounClause, rng));
      else push(s, pick(kNouns, rng));
      break;
    }
    case SX_VBD_NP: {
      push(s, pick(kPsychVerbs, rng));
      if (rng.bernoulli(0.5)) push(s, pick(kObjPron, rng));
      else push_np(s, rng, false);
      if (rng.bernoulli(0.25)) {
        push(s, pick(kAdvSent, rng));
      }
      break;
    }
    case SX_END:
      break;
    case SX_ADV_END:
      push(s, pick(kAdvEnd, rng));
      break;
    case SX_SEEMED: {
      if (!clitic) push(s, present ? kSeems : kSeemed);
      const double u = rng.uniform();
      if (u < 0.45) {
        push(s, cls == 2 ? pick(kAdjClause, rng) : pick(kAdjPleon, rng));
      } else if (u < 0.75) {
        push(s, kThat);
        push_that_clause(s, rng);
      } else {
        push(s, kTo);
        push(s, pick(kBaseVerbs, rng));
      }
      break;
    }
    case SX_RAIN:
      push_be();
      push(s, pick(kWeatherIng, rng));
      if (s.words.back().surface == "getting")
        push(s, {"dark", "JJ"});
      else if (rng.bernoulli(0.3)) {
        push(s, {"all", "DT"});
        push(s, {"day", "NN"});
      }
      break;
    case SX_TAKES:
      push(s, present ? Word{"takes", "VBZ"} : Word{"took", "VBD"});
      push(s, rng.bernoulli(0.6) ? Word{"time", "NN"} : Word{"courage", "NN"});
      push(s, kTo);
      push(s, pick(kBaseVerbs, rng));
      if (rng.bernoulli(0.35)) push(s, pick(kAdvSent, rng));
      break;
    case SX_MD_VB:
      push(s, pick(kModals, rng));
      push(s, pick(kBaseVerbs, rng));
      if (rng.bernoulli(0.3)) push(s, pick(kAdvSent, rng));
      break;
  }

  // Occasional trailing prepositional phrase keeps lengths varied.
  if (suffix != SX_END && suffix != SX_ADV_END && rng.bernoulli(0.2)) {
    push(s, pick(kPreps, rng));
    push_np(s, rng, false);
  }
  push(s, rng.bernoulli(0.08) ? kBang : kDot);

  const bool shared_shape =
      (prefix == PX_START || prefix == PX_CONJ) &&
      (suffix == SX_BE_ADJ || suffix == SX_BE_NP || suffix == SX_SEEMED ||
       suffix == SX_MD_VB || suffix == SX_VBD_NP);
  s.gaze_scale = shared_shape ? amb_scale : clear_scale;
  return s;
}

SentenceDraft make_filler_sentence(Rng& rng) {
  SentenceDraft s;
  switch (rng.bounded(8)) {
    case 0:
      push_subject(s, rng);
      push(s, pick(kTransVerbs, rng));
      push_np(s, rng);
      if (rng.bernoulli(0.5)) {
        push(s, pick(kPreps, rng));
        push_np(s, rng, false);
      }
      break;
    case 1:
      push_subject(s, rng);
      push(s, pick(kSayVerbs, rng));
      push(s, kThat);
      push_that_clause(s, rng);
      break;
    case 2:
      push(s, {"there", "EX"});
      push(s, kWas);
      push(s, {"a", "DT"});
      push(s, pick(kAdjShared, rng));
      push(s, pick(kNouns, rng));
      push(s, {"in", "IN"});
      push_np(s, rng, false);
      break;
    case 3:
      push_subject(s, rng);
      push(s, pick(kModals, rng));
      push(s, pick(kBaseVerbs, rng));
      if (rng.bernoulli(0.6)) push(s, pick(kAdvSent, rng));
      break;
    case 4:
      push(s, {"oh", "UH"});
      push(s, kComma);
      push_short_clause(s, rng);
      break;
    case 5:
      push(s, pick(kPossPron, rng));
      push(s, pick(kNouns, rng));
      push(s, rng.bernoulli(0.5) ? kWas : kSeemed);
      push(s, pick(kAdjShared, rng));
      break;
    case 6:
      push(s, pick(kNames, rng));
      push(s, {"and", "CC"});
      push(s, pick(kNames, rng));
      push(s, pick(kIntransVerbs, rng));
      push(s, pick(kPreps, rng));
      push_np(s, rng, false);
      break;
    default:
      push_subject(s, rng);
      push(s, kWas);
      push(s, pick(kIngVerbs, rng));
      if (rng.bernoulli(0.5)) push(s, pick(kPluralNouns, rng));
      if (rng.bernoulli(0.4)) push(s, pick(kAdvSent, rng));
      break;
  }
  push(s, rng.bernoulli(0.06) ? kQuestion : kDot);
  return s;
}

// Fixed-shape sentence of exactly n >= 3 tokens, for landing on the exact
// corpus size.
SentenceDraft make_pad_sentence(int n, Rng& rng) {
  SentenceDraft s;
  push_subject(s, rng);
  push(s, pick(kIntransVerbs, rng));
  for (int i = 0; i < n - 3; ++i) push(s, pick(kAdvSent, rng));
  push(s, kDot);
  return s;
}

// ---------------------------------------------------------------------------
// Annotation plan

struct PlanEntry {
  int a1 = -1, a2 = -1;  // Label indices; -1,-1 = unannotated
  bool noise = false;
  int cls = 0;  // class used for text generation
};

std::vector<PlanEntry> build_plan(Rng& rng, double scale) {
  const int NOM = 0, PLEON = 1, CLAUSE = 2;
  std::vector<PlanEntry> plan;
  auto add = [&](int a1, int a2, int count) {
    const int n = std::max(1, static_cast<int>(std::llround(count * scale)));
    for (int i = 0; i < n; ++i) plan.push_back({a1, a2, false, 0});
  };
  // Agreement diagonal (273 PLEON / 453 NOM / 89 CLAUSE) and the
  // off-diagonal cells that reproduce the published marginals.
  add(PLEON, PLEON, 272);
  plan.push_back({PLEON, PLEON, true, PLEON});  // the tokenisation-noise item
  add(NOM, NOM, 453);
  add(CLAUSE, CLAUSE, 89);
  add(PLEON, NOM, 50);
  add(PLEON, CLAUSE, 16);
  add(NOM, PLEON, 25);
  add(NOM, CLAUSE, 14);
  add(CLAUSE, PLEON, 108);
  add(CLAUSE, NOM, 24);
  plan.push_back({-1, -1, false, NOM});  // located but never annotated

  for (auto& e : plan) {
    if (e.a1 < 0) continue;
    if (e.a1 == e.a2) e.cls = e.a1;
    else e.cls = rng.bernoulli(0.5) ? e.a1 : e.a2;
  }
  rng.shuffle(plan);
  return plan;
}

// ---------------------------------------------------------------------------
// Gaze synthesis

struct GazeDelta {
  double skip = 0, ffd = 0, p2 = 0, sfd = 0, p3 = 0, lfd = 0, gp = 0;
};

struct ClassGazeProfile {
  GazeDelta prev, it, next;
};

// Class-conditional reading signatures: pleonastic "it" is skipped more and
// read faster; clause-anaphoric contexts draw second/third passes and longer
// late measures, mostly on the pronoun's neighbours.
const ClassGazeProfile kGazeProfiles[3] = {
    // NOM
    {{0.000, 4.0, 0.018, 3.0, 0.005, 2.0, 0.012},
     {-0.012, 1.0, 0.015, 2.5, 0.003, 1.0, 0.010},
     {0.000, 2.0, 0.018, 3.5, 0.005, 2.5, 0.015}},
    // PLEON
    {{0.006, -2.0, -0.009, -2.0, -0.002, -1.0, -0.006},
     {0.050, -3.5, -0.015, -3.0, -0.004, -2.5, -0.012},
     {0.009, -2.5, -0.012, -2.5, -0.003, -2.0, -0.009}},
    // CLAUSE
    {{-0.006, 2.0, 0.030, 5.0, 0.009, 3.0, 0.018},
     {-0.030, 3.0, 0.048, 8.0, 0.017, 5.0, 0.030},
     {-0.012, 3.5, 0.060, 10.0, 0.021, 6.0, 0.042}},
};

struct TokenPlan {
  std::string surface;
  std::string tag;
  bool punct = false;
  int sentence_id = 0, paragraph_id = 0, trial_id = 0, pos = 0;
  GazeDelta delta;      // class effect (already scaled), zero for most tokens
  bool has_delta = false;
};

struct TokenGaze {
  std::array<double, kNumGazeMeasures> m{};
};

double clampd(double v, double lo, double hi) {
  return v < lo ? lo : (v > hi ? hi : v);
}

// One participant-token draw; trial percentages are filled in later.
void gen_token_gaze(const TokenPlan& tp, double speed, Rng& rng, TokenGaze& g) {
  g.m.fill(0.0);
  const double len = static_cast<double>(utf8_length(tp.surface));

  double p_skip;
  if (tp.punct) p_skip = 0.78;
  else if (len <= 2) p_skip = 0.52;
  else if (len <= 4) p_skip = 0.36;
  else if (len <= 6) p_skip = 0.20;
  else if (len <= 8) p_skip = 0.11;
  else p_skip = 0.06;

  GazeDelta d = tp.delta;
  p_skip = clampd(p_skip + d.skip, 0.02, 0.95);

  const bool skip = rng.bernoulli(p_skip);
  double first_total = 0.0;
  long frfc = 0;
  double ffd = 0.0;
  if (!skip) {
    ffd = clampd(rng.gaussian((162 + 3.4 * len + d.ffd) * speed, 27), 65, 600);
    ffd = std::floor(ffd);
    frfc = 1;
    if (len >= 6 && rng.bernoulli(0.25)) ++frfc;
    if (len >= 10 && rng.bernoulli(0.30)) ++frfc;
    first_total = ffd;
    for (long f = 1; f < frfc; ++f)
      first_total += std::floor(clampd(rng.gaussian(140 * speed, 28), 55, 450));
  }

  // Re-reading runs.
  const double p2 = clampd((skip ? 0.10 : 0.17) + d.p2, 0.005, 0.9);
  long src = 0;
  double second_total = 0.0, sfd = 0.0;
  if (rng.bernoulli(p2)) {
    src = 1 + (rng.bernoulli(0.3) ? 1 : 0);
    sfd = std::floor(clampd(rng.gaussian((172 + d.sfd) * speed, 33), 60, 550));
    second_total = sfd;
    for (long f = 1; f < src; ++f)
      second_total += std::floor(clampd(rng.gaussian(150 * speed, 30), 55, 450));
  }
  const double p3 = clampd(0.05 + d.p3, 0.002, 0.8);
  long trc = 0;
  double third_total = 0.0, tfd = 0.0;
  if (src > 0 && rng.bernoulli(p3)) {
    trc = 1;
    tfd = std::floor(clampd(rng.gaussian((164 + d.sfd * 0.5) * speed, 32), 60, 500));
    third_total = tfd;
  }

  const long total_fix = frfc + src + trc;

  // Run index of the n-th fixation overall.
  auto run_of_fixation = [&](long n) -> long {
    if (total_fix < n) return 0;
    if (n <= frfc) return 1;
    if (n <= frfc + src) return 2;
    return 3;
  };

  double last_run = 0;
  if (trc > 0) last_run = 3;
  else if (src > 0) last_run = 2;
  else if (frfc > 0) last_run = 1;

  double last_dur = 0;
  if (total_fix > 0) {
    if (trc > 0) last_dur = tfd;
    else if (src > 0) last_dur = second_total - (src > 1 ? sfd : 0);
    else last_dur = first_total - (frfc > 1 ? ffd : 0);
    last_dur = std::floor(clampd(last_dur + d.lfd, 50, 600));
  }

  double gopast = 0, sel_gopast = 0;
  if (!skip) {
    gopast = first_total;
    if (rng.bernoulli(clampd(0.22 + d.gp, 0.01, 0.9)))
      gopast += std::floor(clampd(rng.gaussian(170 * speed, 55), 40, 700));
    sel_gopast = std::floor(first_total + 0.5 * (gopast - first_total));
  }

  auto& m = g.m;
  m[0] = static_cast<double>(frfc);                    // First_Run_Fixation_Count
  m[2] = ffd;                                          // First_Fixation_Duration
  m[3] = skip ? 0 : 1 + (rng.bernoulli(0.3) ? 1 : 0);  // First_Fixation_Visited_Count
  m[4] = skip ? 0 : (rng.bernoulli(0.88) ? 1 : 0);     // First_Fix_Progressive
  m[5] = static_cast<double>(src);                     // Second_Run_Fixation_Count
  m[7] = sfd;                                          // Second_Fixation_Duration
  m[8] = static_cast<double>(run_of_fixation(2));      // Second_Fixation_Run
  m[9] = first_total;                                  // Gaze_Duration
  m[10] = static_cast<double>(trc);                    // Third_Run_Fixation_Count
  m[12] = tfd;                                         // Third_Fixation_Duration
  m[13] = static_cast<double>(run_of_fixation(3));     // Third_Fixation_Run
  m[14] = last_dur;                                    // Last_Fixation_Duration
  m[15] = last_run;                                    // Last_Fixation_Run
  m[16] = gopast;                                      // Go_Past_Time
  m[17] = sel_gopast;                                  // Selective_Go_Past_Time
  m[18] = static_cast<double>(total_fix);              // Fixation_Count
  m[20] = first_total + second_total + third_total;    // Total_Reading_Time
  m[25] = skip ? 1 : 0;                                // Skip
  return;
}

// ---------------------------------------------------------------------------
// Output formatting helpers

void append_long(std::string& out, long v) {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%ld", v);
  out += buf;
}

void append_num(std::string& out, double v) {
  if (v == std::floor(v) && std::abs(v) < 1e15) {
    append_long(out, static_cast<long>(v));
  } else {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    out += buf;
  }
}

class ChunkedWriter {
 public:
  explicit ChunkedWriter(const std::string& path) : out_(path, std::ios::binary) {
    if (!out_) throw IoError("cannot write file: " + path);
    buf_.reserve(kFlushAt + 4096);
  }
  std::string& buf() { return buf_; }
  void maybe_flush() {
    if (buf_.size() >= kFlushAt) {
      out_.write(buf_.data(), static_cast<std::streamsize>(buf_.size()));
      buf_.clear();
    }
  }
  void finish() {
    out_.write(buf_.data(), static_cast<std::streamsize>(buf_.size()));
    buf_.clear();
    out_.flush();
    if (!out_) throw IoError("failed writing output file");
  }

 private:
  static constexpr std::size_t kFlushAt = 4 << 20;
  std::ofstream out_;
  std::string buf_;
};

}  // namespace

// ---------------------------------------------------------------------------

DatagenResult generate_corpus(const DatagenConfig& cfg) {
  if (cfg.out_dir.empty()) throw ValidationError("datagen: out_dir is required");
  if (cfg.participants < 1 || cfg.target_tokens < 2000)
    throw ValidationError("datagen: need >= 1 participant and >= 2000 tokens");
  fs::create_directories(cfg.out_dir);

  const double kAmbScale = 1.45, kClearScale = 0.55;

  Rng plan_rng = Rng::stream(cfg.seed, 1);
  Rng text_rng = Rng::stream(cfg.seed, 2);
  Rng layout_rng = Rng::stream(cfg.seed, 3);
  Rng gaze_rng = Rng::stream(cfg.seed, 4);
  Rng aux_rng = Rng::stream(cfg.seed, 5);

  std::vector<PlanEntry> plan = build_plan(plan_rng, cfg.plan_scale);

  // --- sentence drafts -----------------------------------------------------
  std::vector<SentenceDraft> drafts;
  drafts.reserve(8000);
  std::vector<double> scale_of_slot(plan.size(), 1.0);
  for (std::size_t slot = 0; slot < plan.size(); ++slot) {
    SentenceDraft d =
        make_instance_sentence(plan[slot].cls, text_rng, kAmbScale, kClearScale);
    d.instance_slot = static_cast<int>(slot);
    if (plan[slot].noise)
      d.words[static_cast<std::size_t>(d.it_index)] = {"it...the", "NN"};
    scale_of_slot[slot] = d.gaze_scale;
    drafts.push_back(std::move(d));
  }

  long total = 0;
  for (const auto& d : drafts) total += static_cast<long>(d.words.size());
  while (cfg.target_tokens - total > 64) {
    drafts.push_back(make_filler_sentence(text_rng));
    total += static_cast<long>(drafts.back().words.size());
  }

  layout_rng.shuffle(drafts);

  // Land exactly on the target with pad sentences (remainder here is in
  // [4, 64]; each pad consumes 10, the final one 4..14 tokens).
  long remaining = cfg.target_tokens - total;
  while (remaining > 14) {
    drafts.push_back(make_pad_sentence(10, text_rng));
    remaining -= 10;
  }
  if (remaining > 0)
    drafts.push_back(make_pad_sentence(static_cast<int>(remaining), text_rng));

  // --- layout: tokens with sentence/paragraph/trial ids --------------------
  std::vector<TokenPlan> tokens;
  tokens.reserve(static_cast<std::size_t>(cfg.target_tokens));
  std::vector<long> it_uid_of_slot(plan.size(), -1);

  int sentence_id = 0, paragraph_id = 0, trial_id = 0;
  int sentences_left = 2 + static_cast<int>(layout_rng.bounded(4));
  int paragraphs_left = 3 + static_cast<int>(layout_rng.bounded(4));

  for (const SentenceDraft& d : drafts) {
    for (std::size_t w = 0; w < d.words.size(); ++w) {
      TokenPlan tp;
      tp.surface = d.words[w].surface;
      tp.tag = d.words[w].tag;
      tp.punct = tp.surface.size() == 1 &&
                 std::string(".,?!").find(tp.surface[0]) != std::string::npos;
      if (w == 0 && !tp.punct) tp.surface[0] = static_cast<char>(
          std::toupper(static_cast<unsigned char>(tp.surface[0])));
      tp.sentence_id = sentence_id;
      tp.paragraph_id = paragraph_id;
      tp.trial_id = trial_id;
      tp.pos = static_cast<int>(w);
      tokens.push_back(std::move(tp));
    }
    if (d.instance_slot >= 0)
      it_uid_of_slot[static_cast<std::size_t>(d.instance_slot)] =
          static_cast<long>(tokens.size() - d.words.size()) + d.it_index;

    ++sentence_id;
    if (--sentences_left <= 0) {
      sentences_left = 2 + static_cast<int>(layout_rng.bounded(4));
      ++paragraph_id;
      if (--paragraphs_left <= 0) {
        paragraphs_left = 3 + static_cast<int>(layout_rng.bounded(4));
        ++trial_id;
      }
    }
  }
  if (static_cast<long>(tokens.size()) != cfg.target_tokens)
    throw ValidationError("datagen: layout produced " +
                          std::to_string(tokens.size()) + " tokens, expected " +
                          std::to_string(cfg.target_tokens));

  // Attach class gaze deltas to the pronoun and its trial-mates.
  for (std::size_t slot = 0; slot < plan.size(); ++slot) {
    const long uid = it_uid_of_slot[slot];
    if (uid < 0) continue;
    const double scale = scale_of_slot[slot];
    const ClassGazeProfile& prof = kGazeProfiles[plan[slot].cls];
    auto apply = [&](long at, const GazeDelta& d) {
      if (at < 0 || at >= static_cast<long>(tokens.size())) return;
      if (tokens[static_cast<std::size_t>(at)].trial_id !=
          tokens[static_cast<std::size_t>(uid)].trial_id)
        return;
      GazeDelta scaled = d;
      scaled.skip *= scale;
      scaled.ffd *= scale;
      scaled.p2 *= scale;
      scaled.sfd *= scale;
      scaled.p3 *= scale;
      scaled.lfd *= scale;
      scaled.gp *= scale;
      tokens[static_cast<std::size_t>(at)].delta = scaled;
      tokens[static_cast<std::size_t>(at)].has_delta = true;
    };
    apply(uid - 1, prof.prev);
    apply(uid, prof.it);
    apply(uid + 1, prof.next);
  }

  // --- gaze CSV -------------------------------------------------------------
  DatagenResult result;
  result.gaze_csv = (fs::path(cfg.out_dir) / "corpus_gaze.csv").string();
  {
    ChunkedWriter writer(result.gaze_csv);
    std::string& buf = writer.buf();
    buf += "participant_id,trial_id,token_uid,surface,sentence_id,paragraph_id,"
           "position_in_sentence,is_punctuation";
    for (const auto& name : gaze_measure_names()) {
      buf += ",";
      buf += name;
    }
    buf += "\n";

    const std::size_t n = tokens.size();
    std::vector<TokenGaze> gaze(n);
    for (int p = 1; p <= cfg.participants; ++p) {
      const double speed = clampd(gaze_rng.gaussian(1.0, 0.07), 0.8, 1.25);
      for (std::size_t i = 0; i < n; ++i)
        gen_token_gaze(tokens[i], speed, gaze_rng, gaze[i]);

      // Spillover and trial totals need a second pass.
      std::size_t t0 = 0;
      while (t0 < n) {
        std::size_t t1 = t0;
        double trial_fix = 0, trial_trt = 0;
        while (t1 < n && tokens[t1].trial_id == tokens[t0].trial_id) {
          trial_fix += gaze[t1].m[18];
          trial_trt += gaze[t1].m[20];
          ++t1;
        }
        for (std::size_t i = t0; i < t1; ++i) {
          auto& m = gaze[i].m;
          if (m[25] == 0 && i + 1 < t1 && gaze[i + 1].m[25] == 0)
            m[24] = gaze[i + 1].m[2];  // Spillover = next word's FFD
          m[22] = trial_fix;
          m[23] = trial_trt;
          if (trial_fix > 0) {
            m[1] = 100.0 * m[0] / trial_fix;
            m[6] = 100.0 * m[5] / trial_fix;
            m[11] = 100.0 * m[10] / trial_fix;
            m[19] = 100.0 * m[18] / trial_fix;
          }
          if (trial_trt > 0) m[21] = 100.0 * m[20] / trial_trt;
        }
        t0 = t1;
      }

      for (std::size_t i = 0; i < n; ++i) {
        const TokenPlan& tp = tokens[i];
        append_long(buf, p);
        buf += ",";
        append_long(buf, tp.trial_id);
        buf += ",";
        append_long(buf, static_cast<long>(i));
        buf += ",";
        buf += csv_quote(tp.surface);
        buf += ",";
        append_long(buf, tp.sentence_id);
        buf += ",";
        append_long(buf, tp.paragraph_id);
        buf += ",";
        append_long(buf, tp.pos);
        buf += ",";
        buf += tp.punct ? "1" : "0";
        for (int m = 0; m < kNumGazeMeasures; ++m) {
          buf += ",";
          append_num(buf, gaze[i].m[static_cast<std::size_t>(m)]);
        }
        buf += "\n";
        writer.maybe_flush();
      }
    }
    writer.finish();
  }

  // --- annotations ----------------------------------------------------------
  result.annotations_tsv = (fs::path(cfg.out_dir) / "annotations.tsv").string();
  {
    struct Row {
      long uid;
      int a1, a2;
    };
    std::vector<Row> rows;
    for (std::size_t slot = 0; slot < plan.size(); ++slot) {
      if (plan[slot].a1 < 0) continue;
      rows.push_back({it_uid_of_slot[slot], plan[slot].a1, plan[slot].a2});
    }
    std::sort(rows.begin(), rows.end(),
              [](const Row& a, const Row& b) { return a.uid < b.uid; });
    std::string out = "token_uid\tannotator1\tannotator2\n";
    for (const Row& r : rows) {
      append_long(out, r.uid);
      out += "\t";
      out += label_name(static_cast<Label>(r.a1));
      out += "\t";
      out += label_name(static_cast<Label>(r.a2));
      out += "\n";
    }
    std::ofstream f(result.annotations_tsv, std::ios::binary);
    if (!f) throw IoError("cannot write " + result.annotations_tsv);
    f << out;
    result.annotation_rows = static_cast<long>(rows.size());
  }

  // --- gold tags ------------------------------------------------------------
  result.corpus_tagged_tsv = (fs::path(cfg.out_dir) / "corpus_tagged.tsv").string();
  {
    ChunkedWriter writer(result.corpus_tagged_tsv);
    std::string& buf = writer.buf();
    int last_sentence = -1;
    for (const TokenPlan& tp : tokens) {
      if (tp.sentence_id != last_sentence && last_sentence >= 0) buf += "\n";
      last_sentence = tp.sentence_id;
      buf += tp.surface;
      buf += "\t";
      buf += tp.tag;
      buf += "\n";
      writer.maybe_flush();
    }
    buf += "\n";
    writer.finish();
  }

  // --- tagger training corpus (disjoint text, same lexicon) ------------------
  result.tagger_train_tsv = (fs::path(cfg.out_dir) / "tagger_train.tsv").string();
  {
    std::string out;
    const int kSentences = 1600;
    for (int i = 0; i < kSentences; ++i) {
      SentenceDraft d;
      if (i % 3 == 0) {
        d = make_instance_sentence(static_cast<int>(aux_rng.bounded(3)), aux_rng,
                                   1.0, 1.0);
      } else {
        d = make_filler_sentence(aux_rng);
      }
      for (std::size_t w = 0; w < d.words.size(); ++w) {
        std::string surface = d.words[w].surface;
        if (w == 0 && surface.size() == 1 &&
            std::string(".,?!").find(surface) != std::string::npos) {
          // pathological; skip capitalisation
        } else if (w == 0) {
          surface[0] = static_cast<char>(
              std::toupper(static_cast<unsigned char>(surface[0])));
        }
        out += surface;
        out += "\t";
        out += d.words[w].tag;
        out += "\n";
      }
      out += "\n";
    }
    std::ofstream f(result.tagger_train_tsv, std::ios::binary);
    if (!f) throw IoError("cannot write " + result.tagger_train_tsv);
    f << out;
  }

  // --- embeddings -----------------------------------------------------------
  result.embeddings_txt = (fs::path(cfg.out_dir) / "embeddings.txt").string();
  {
    std::unordered_set<std::string> vocab;
    for (const TokenPlan& tp : tokens)
      if (!tp.punct) vocab.insert(to_lower_ascii(tp.surface));
    std::vector<std::string> words(vocab.begin(), vocab.end());
    std::sort(words.begin(), words.end());

    std::string out;
    append_long(out, static_cast<long>(words.size()));
    out += " ";
    append_long(out, cfg.embedding_dim);
    out += "\n";
    char buf[32];
    for (const auto& w : words) {
      Rng wr(fnv1a64(w, cfg.seed ^ 0x5851F42D4C957F2DULL));
      out += w;
      for (int d = 0; d < cfg.embedding_dim; ++d) {
        std::snprintf(buf, sizeof(buf), " %.4f", wr.gaussian(0.0, 0.3));
        out += buf;
      }
      out += "\n";
    }
    std::ofstream f(result.embeddings_txt, std::ios::binary);
    if (!f) throw IoError("cannot write " + result.embeddings_txt);
    f << out;
  }

  result.tokens = static_cast<long>(tokens.size());
  long clean = 0, noise = 0;
  for (std::size_t slot = 0; slot < plan.size(); ++slot) {
    if (plan[slot].noise) ++noise;
    else ++clean;
  }
  result.clean_instances = clean;
  result.noise_tokens = noise;
  return result;
}

}  // namespace itclass
