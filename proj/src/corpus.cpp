#include "itclass/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <unordered_map>
#include <unordered_set>

namespace itclass {

namespace {

const char* kFixedColumns[] = {"participant_id",        "trial_id",
                               "token_uid",             "surface",
                               "sentence_id",           "paragraph_id",
                               "position_in_sentence",  "is_punctuation"};
constexpr int kNumFixedColumns = 8;

bool is_pct_measure(int idx) {
  const std::string& n = gaze_measure_names()[idx];
  return n.size() > 4 && n.compare(n.size() - 4, 4, "_Pct") == 0;
}

[[noreturn]] void row_error(std::size_t line_no, const std::string& what) {
  throw ValidationError("gaze csv line " + std::to_string(line_no) + ": " + what);
}

}  // namespace

std::vector<std::string> csv_split(std::string_view line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

std::string csv_quote(std::string_view field) {
  if (field.find_first_of(",\"\n") == std::string_view::npos)
    return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out += "\"";
  return out;
}

GazeCorpus load_gaze_corpus(const std::string& path) {
  std::string text = read_text_file(path);

  GazeCorpus corpus;
  std::size_t pos = 0;
  std::size_t line_no = 0;

  auto next_line = [&](std::string_view& out) -> bool {
    if (pos >= text.size()) return false;
    std::size_t end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    out = std::string_view(text).substr(pos, end - pos);
    if (!out.empty() && out.back() == '\r') out.remove_suffix(1);
    pos = end + 1;
    ++line_no;
    return true;
  };

  std::string_view header_line;
  if (!next_line(header_line)) throw ValidationError("gaze csv is empty: " + path);
  std::vector<std::string> header = csv_split(header_line);

  if (header.size() < kNumFixedColumns)
    throw ValidationError("gaze csv header too short in " + path);
  for (int i = 0; i < kNumFixedColumns; ++i) {
    if (header[i] != kFixedColumns[i])
      throw ValidationError("gaze csv header: expected column '" +
                            std::string(kFixedColumns[i]) + "' at position " +
                            std::to_string(i) + ", got '" + header[i] + "'");
  }

  // Map the remaining header columns onto the measure registry.
  std::vector<int> measure_of_column(header.size() - kNumFixedColumns, -1);
  std::vector<bool> seen(kNumGazeMeasures, false);
  for (std::size_t c = kNumFixedColumns; c < header.size(); ++c) {
    int idx = gaze_measure_index(header[c]);
    if (idx < 0)
      throw ValidationError("gaze csv: unknown measure column '" + header[c] +
                            "'");
    if (seen[idx])
      throw ValidationError("gaze csv: duplicate measure column '" + header[c] +
                            "'");
    seen[idx] = true;
    measure_of_column[c - kNumFixedColumns] = idx;
  }
  for (int i = 0; i < kNumGazeMeasures; ++i) {
    if (!seen[i])
      throw ValidationError("gaze csv: missing measure column '" +
                            gaze_measure_names()[i] + "'");
  }

  const std::size_t ncols = header.size();
  std::unordered_map<std::uint32_t, std::size_t> token_index;
  std::string_view line;
  // The export is wide but rigid; reserve from the file size to avoid
  // repeated reallocation on the full corpus.
  corpus.records.reserve(text.size() / 120 + 16);

  std::vector<std::string> fields;
  while (next_line(line)) {
    if (line.empty()) continue;
    fields = csv_split(line);
    if (fields.size() != ncols)
      row_error(line_no, "expected " + std::to_string(ncols) + " fields, got " +
                             std::to_string(fields.size()));

    long participant, trial, uid_l, sentence, paragraph, position, punct;
    if (!parse_long(fields[0], participant)) row_error(line_no, "bad participant_id");
    if (!parse_long(fields[1], trial)) row_error(line_no, "bad trial_id");
    if (!parse_long(fields[2], uid_l) || uid_l < 0) row_error(line_no, "bad token_uid");
    if (!parse_long(fields[4], sentence)) row_error(line_no, "bad sentence_id");
    if (!parse_long(fields[5], paragraph)) row_error(line_no, "bad paragraph_id");
    if (!parse_long(fields[6], position) || position < 0)
      row_error(line_no, "bad position_in_sentence");
    if (!parse_long(fields[7], punct) || (punct != 0 && punct != 1))
      row_error(line_no, "bad is_punctuation (want 0 or 1)");

    auto uid = static_cast<std::uint32_t>(uid_l);
    auto it = token_index.find(uid);
    if (it == token_index.end()) {
      Token tok;
      tok.uid = uid;
      tok.trial_id = static_cast<int>(trial);
      tok.sentence_id = static_cast<int>(sentence);
      tok.paragraph_id = static_cast<int>(paragraph);
      tok.position_in_sentence = static_cast<int>(position);
      tok.surface = fields[3];
      tok.is_punctuation = punct == 1;
      if (!corpus.tokens.empty()) {
        const Token& prev = corpus.tokens.back();
        if (uid <= prev.uid)
          row_error(line_no, "token_uid not strictly increasing (" +
                                 std::to_string(uid) + " after " +
                                 std::to_string(prev.uid) + ")");
        if (tok.sentence_id != prev.sentence_id && tok.position_in_sentence != 0)
          row_error(line_no, "position_in_sentence must reset to 0 at sentence change");
      }
      token_index.emplace(uid, corpus.tokens.size());
      corpus.tokens.push_back(std::move(tok));
    } else {
      const Token& tok = corpus.tokens[it->second];
      if (tok.surface != fields[3])
        row_error(line_no, "surface mismatch for token_uid " + std::to_string(uid));
    }

    RawGazeRecord rec;
    rec.participant_id = static_cast<int>(participant);
    rec.token_uid = uid;
    for (std::size_t c = kNumFixedColumns; c < ncols; ++c) {
      int m = measure_of_column[c - kNumFixedColumns];
      const std::string& f = fields[c];
      double v = 0.0;  // empty cell = not applicable
      if (!f.empty()) {
        if (!parse_double(f, v))
          row_error(line_no, "bad numeric value '" + f + "' in column " +
                                 gaze_measure_names()[m]);
      }
      if (v < 0.0)
        row_error(line_no, "negative value in column " + gaze_measure_names()[m]);
      if (is_pct_measure(m) && v > 100.0)
        row_error(line_no, "percentage out of [0,100] in column " +
                               gaze_measure_names()[m]);
      rec.measures[m] = v;
    }
    if (rec.measures[kSkipIdx] != 0.0 && rec.measures[kSkipIdx] != 1.0)
      row_error(line_no, "Skip must be 0 or 1");
    if (rec.measures[kSkipIdx] == 1.0 &&
        rec.measures[kFirstRunFixationCountIdx] != 0.0)
      row_error(line_no, "Skip = 1 but First_Run_Fixation_Count > 0");
    corpus.records.push_back(rec);
  }

  if (corpus.tokens.empty())
    throw ValidationError("gaze csv has a header but no rows: " + path);
  return corpus;
}

std::vector<GazeMeasures> average_gaze(const std::vector<RawGazeRecord>& records,
                                       const std::vector<Token>& tokens) {
  std::unordered_map<std::uint32_t, std::size_t> token_slot;
  token_slot.reserve(tokens.size() * 2);
  for (std::size_t i = 0; i < tokens.size(); ++i)
    token_slot.emplace(tokens[i].uid, i);

  // Bucket record indices per token, then sort each bucket by participant so
  // the summation order is fixed.
  std::vector<std::vector<std::uint32_t>> buckets(tokens.size());
  for (std::size_t r = 0; r < records.size(); ++r) {
    auto it = token_slot.find(records[r].token_uid);
    if (it == token_slot.end())
      throw ValidationError("gaze record references unknown token_uid " +
                            std::to_string(records[r].token_uid));
    buckets[it->second].push_back(static_cast<std::uint32_t>(r));
  }

  std::vector<GazeMeasures> out(tokens.size());
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    auto& bucket = buckets[i];
    if (bucket.empty())
      throw ValidationError("token_uid " + std::to_string(tokens[i].uid) +
                            " has no gaze records");
    std::sort(bucket.begin(), bucket.end(), [&](std::uint32_t a, std::uint32_t b) {
      return records[a].participant_id < records[b].participant_id;
    });
    GazeMeasures gm;
    gm.token_uid = tokens[i].uid;
    gm.n_participants = static_cast<int>(bucket.size());
    for (std::uint32_t r : bucket) {
      for (int m = 0; m < kNumGazeMeasures; ++m)
        gm.measures[m] += records[r].measures[m];
    }
    for (int m = 0; m < kNumGazeMeasures; ++m)
      gm.measures[m] /= static_cast<double>(gm.n_participants);
    out[i] = std::move(gm);
  }
  return out;
}

std::vector<ItCandidate> locate_it_candidates(const std::vector<Token>& tokens) {
  std::vector<ItCandidate> out;
  for (const Token& t : tokens) {
    std::string s = to_lower_ascii(normalize_apostrophe(t.surface));
    if (s == "its") continue;  // possessive
    if (s == "it" || s == "it's") {
      out.push_back({t.uid, false});
      continue;
    }
    // Tokenisation errors in the source export glue the pronoun to trailing
    // junk ("it...the", "it?..ah,"). Flag them; they are never instances.
    if (s.size() > 2 && s.compare(0, 2, "it") == 0 &&
        s.find_first_of("?.") != std::string::npos) {
      out.push_back({t.uid, true});
    }
  }
  return out;
}

std::vector<std::uint32_t> locate_it_instances(const std::vector<Token>& tokens) {
  std::vector<std::uint32_t> out;
  for (const ItCandidate& c : locate_it_candidates(tokens)) {
    if (!c.noise) out.push_back(c.uid);
  }
  return out;
}

std::vector<AnnotatedInstance> load_annotations(
    const std::string& path, const std::vector<std::uint32_t>& instances) {
  std::string text = read_text_file(path);
  std::unordered_set<std::uint32_t> allowed(instances.begin(), instances.end());

  std::vector<AnnotatedInstance> out;
  std::unordered_set<std::uint32_t> seen;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  bool header_done = false;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    std::string_view line = std::string_view(text).substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    pos = end + 1;
    ++line_no;
    if (line.empty()) {
      if (pos > text.size()) break;
      continue;
    }
    std::vector<std::string> f = split(line, '\t');
    if (!header_done) {
      if (f.size() != 3 || f[0] != "token_uid" || f[1] != "annotator1" ||
          f[2] != "annotator2")
        throw ValidationError(
            "annotation tsv: expected header 'token_uid\\tannotator1\\tannotator2'");
      header_done = true;
      continue;
    }
    if (f.size() != 3)
      throw ValidationError("annotation tsv line " + std::to_string(line_no) +
                            ": expected 3 tab-separated fields");
    long uid_l;
    if (!parse_long(f[0], uid_l) || uid_l < 0)
      throw ValidationError("annotation tsv line " + std::to_string(line_no) +
                            ": bad token_uid");
    auto uid = static_cast<std::uint32_t>(uid_l);
    if (!allowed.count(uid))
      throw ValidationError("annotation tsv line " + std::to_string(line_no) +
                            ": token_uid " + std::to_string(uid) +
                            " is not a located instance");
    if (!seen.insert(uid).second)
      throw ValidationError("annotation tsv line " + std::to_string(line_no) +
                            ": duplicate token_uid " + std::to_string(uid));
    AnnotatedInstance a;
    a.token_uid = uid;
    a.label_a1 = parse_label(f[1]);
    a.label_a2 = parse_label(f[2]);
    if (a.label_a1 == a.label_a2) a.final_label = a.label_a1;
    out.push_back(a);
    if (pos > text.size()) break;
  }
  if (!header_done)
    throw ValidationError("annotation tsv is empty: " + path);
  return out;
}

std::vector<AnnotatedInstance> retained_instances(
    const std::vector<AnnotatedInstance>& annotated,
    const std::vector<std::uint32_t>& located_clean) {
  std::unordered_set<std::uint32_t> clean(located_clean.begin(),
                                          located_clean.end());
  std::vector<AnnotatedInstance> out;
  for (const auto& a : annotated) {
    if (a.final_label && clean.count(a.token_uid)) out.push_back(a);
  }
  return out;
}

}  // namespace itclass
