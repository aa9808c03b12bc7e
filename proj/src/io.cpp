#include "softbio/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace softbio {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::string strip(std::string s) {
  const auto is_space = [](unsigned char c) { return std::isspace(c); };
  while (!s.empty() && is_space(s.front())) s.erase(s.begin());
  while (!s.empty() && is_space(s.back())) s.pop_back();
  return s;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

// Reads lines with universal newlines; trailing blank lines are dropped.
std::vector<std::string> read_lines(std::istream& in) {
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  while (!lines.empty() && strip(lines.back()).empty()) lines.pop_back();
  return lines;
}

[[noreturn]] void fail(const std::string& name, std::size_t line_no,
                       const std::string& message) {
  throw DataError(name + ":" + std::to_string(line_no) + ": " + message);
}

int parse_int(const std::string& text, const std::string& name,
              std::size_t line_no, const std::string& what) {
  int value = 0;
  const std::string t = strip(text);
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc() || ptr != t.data() + t.size())
    fail(name, line_no, "expected an integer " + what + ", got \"" + text +
                            "\"");
  return value;
}

double parse_double(const std::string& text, const std::string& name,
                    std::size_t line_no, const std::string& what) {
  double value = 0.0;
  const std::string t = strip(text);
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc() || ptr != t.data() + t.size())
    fail(name, line_no,
         "expected a number " + what + ", got \"" + text + "\"");
  return value;
}

std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

// Maps a header row onto column indices. Every required column must appear
// exactly once; optional columns may appear; anything else is rejected.
std::map<std::string, std::size_t> parse_header(
    const std::vector<std::string>& fields, const std::string& name,
    const std::vector<std::string>& required,
    const std::vector<std::string>& optional = {}) {
  std::map<std::string, std::size_t> columns;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    const std::string col = lower(strip(fields[i]));
    const bool known =
        std::find(required.begin(), required.end(), col) != required.end() ||
        std::find(optional.begin(), optional.end(), col) != optional.end();
    if (!known) fail(name, 1, "unknown column \"" + fields[i] + "\"");
    if (!columns.emplace(col, i).second)
      fail(name, 1, "duplicate column \"" + col + "\"");
  }
  for (const std::string& col : required) {
    if (!columns.count(col)) fail(name, 1, "missing column \"" + col + "\"");
  }
  return columns;
}

std::ifstream open_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open file: " + path.string());
  return in;
}

}  // namespace

std::string subject_of_image(const std::string& image_id) {
  const std::size_t sep = image_id.rfind('_');
  if (sep != std::string::npos && sep > 0) {
    const std::string suffix = image_id.substr(sep + 1);
    if (suffix.size() >= 4 &&
        std::all_of(suffix.begin(), suffix.end(),
                    [](unsigned char c) { return std::isdigit(c); }))
      return image_id.substr(0, sep);
  }
  throw DataError("image id without a _NNNN index suffix: \"" + image_id +
                  "\"");
}

std::string make_image_id(const std::string& subject, int index) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d", index);
  return subject + "_" + buf;
}

namespace {

int image_index(const std::string& image_id) {
  const std::size_t sep = image_id.rfind('_');
  return std::stoi(image_id.substr(sep + 1));
}

}  // namespace

// ---------------------------------------------------------------------------
// Annotations

std::vector<AnnotationRecord> parse_annotations(std::istream& in,
                                                const std::string& name,
                                                ProfileSource source) {
  const std::vector<std::string> lines = read_lines(in);
  if (lines.empty()) fail(name, 1, "empty annotation file");
  const auto columns =
      parse_header(split(lines[0], ','), name,
                   {"image_id", "subject_id", "gender", "age", "ethnicity",
                    "glasses", "beard", "moustache"});

  std::vector<AnnotationRecord> records;
  std::set<std::string> seen;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::size_t line_no = i + 1;
    const std::vector<std::string> fields = split(lines[i], ',');
    if (fields.size() != columns.size())
      fail(name, line_no,
           "expected " + std::to_string(columns.size()) + " fields, got " +
               std::to_string(fields.size()));

    AnnotationRecord record;
    record.image_id = strip(fields[columns.at("image_id")]);
    record.subject_id = strip(fields[columns.at("subject_id")]);
    record.profile = SoftProfile(source);
    if (record.image_id.empty()) fail(name, line_no, "empty image_id");
    if (!seen.insert(record.image_id).second)
      fail(name, line_no, "duplicate image_id \"" + record.image_id + "\"");
    try {
      if (subject_of_image(record.image_id) != record.subject_id)
        fail(name, line_no,
             "image_id \"" + record.image_id +
                 "\" does not belong to subject \"" + record.subject_id +
                 "\"");
    } catch (const DataError&) {
      fail(name, line_no, "malformed image_id \"" + record.image_id + "\"");
    }

    for (TraitKind kind : kAllTraitKinds) {
      const std::string cell = strip(fields[columns.at(trait_name(kind))]);
      if (cell.empty()) continue;  // missing
      try {
        record.profile.set(kind, parse_trait_label(kind, cell));
      } catch (const DataError& e) {
        fail(name, line_no, e.what());
      }
    }
    records.push_back(std::move(record));
  }
  return records;
}

std::vector<AnnotationRecord> load_annotations(
    const std::filesystem::path& path, ProfileSource source) {
  std::ifstream in = open_file(path);
  return parse_annotations(in, path.filename().string(), source);
}

std::string emit_annotations(std::span<const AnnotationRecord> records) {
  std::string out =
      "image_id,subject_id,gender,age,ethnicity,glasses,beard,moustache\n";
  for (const AnnotationRecord& r : records) {
    out += r.image_id + ',' + r.subject_id;
    for (TraitKind kind : kAllTraitKinds) {
      out += ',';
      out += format_trait_label(kind, r.profile.value(kind));
    }
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// Pairs

PairsFile parse_pairs(std::istream& in, const std::string& name) {
  const std::vector<std::string> lines = read_lines(in);
  if (lines.empty()) fail(name, 1, "empty pairs file");

  const std::vector<std::string> header = split(lines[0], '\t');
  if (header.size() != 2)
    fail(name, 1, "header must be <folds>\\t<pairs_per_class_per_fold>");
  PairsFile file;
  file.folds = parse_int(header[0], name, 1, "fold count");
  file.per_class_per_fold = parse_int(header[1], name, 1, "per-class count");
  if (file.folds < 1 || file.per_class_per_fold < 1)
    fail(name, 1, "fold and per-class counts must be positive");

  const std::size_t expected =
      static_cast<std::size_t>(file.folds) * 2 * file.per_class_per_fold;
  if (lines.size() - 1 != expected)
    fail(name, lines.size(),
         "expected " + std::to_string(expected) + " pair lines, got " +
             std::to_string(lines.size() - 1));

  for (int fold = 0; fold < file.folds; ++fold) {
    int genuine = 0, impostor = 0;
    for (int k = 0; k < 2 * file.per_class_per_fold; ++k) {
      const std::size_t idx =
          1 + static_cast<std::size_t>(fold) * 2 * file.per_class_per_fold + k;
      const std::size_t line_no = idx + 1;
      const std::vector<std::string> f = split(lines[idx], '\t');
      PairRecord pair;
      pair.fold = fold;
      if (f.size() == 3) {
        const std::string subject = strip(f[0]);
        const int i = parse_int(f[1], name, line_no, "image index");
        const int j = parse_int(f[2], name, line_no, "image index");
        if (subject.empty()) fail(name, line_no, "empty subject name");
        if (i < 1 || j < 1) fail(name, line_no, "image indices start at 1");
        if (i == j) fail(name, line_no, "genuine pair compares an image "
                                        "with itself");
        pair.left_image = make_image_id(subject, i);
        pair.right_image = make_image_id(subject, j);
        pair.label = PairLabel::kGenuine;
        ++genuine;
      } else if (f.size() == 4) {
        const std::string s1 = strip(f[0]), s2 = strip(f[2]);
        const int i = parse_int(f[1], name, line_no, "image index");
        const int j = parse_int(f[3], name, line_no, "image index");
        if (s1.empty() || s2.empty()) fail(name, line_no, "empty subject name");
        if (i < 1 || j < 1) fail(name, line_no, "image indices start at 1");
        if (s1 == s2)
          fail(name, line_no, "impostor pair within one subject \"" + s1 +
                                  "\"");
        pair.left_image = make_image_id(s1, i);
        pair.right_image = make_image_id(s2, j);
        pair.label = PairLabel::kImpostor;
        ++impostor;
      } else {
        fail(name, line_no, "expected 3 or 4 tab-separated fields, got " +
                                std::to_string(f.size()));
      }
      file.pairs.push_back(std::move(pair));
    }
    if (genuine != file.per_class_per_fold ||
        impostor != file.per_class_per_fold)
      fail(name, 1 + static_cast<std::size_t>(fold + 1) * 2 *
                          file.per_class_per_fold,
           "fold " + std::to_string(fold) + " has " + std::to_string(genuine) +
               " genuine and " + std::to_string(impostor) +
               " impostor pairs, expected " +
               std::to_string(file.per_class_per_fold) + " of each");
  }
  return file;
}

PairsFile load_pairs(const std::filesystem::path& path) {
  std::ifstream in = open_file(path);
  return parse_pairs(in, path.filename().string());
}

std::string emit_pairs(const PairsFile& file) {
  std::string out = std::to_string(file.folds) + '\t' +
                    std::to_string(file.per_class_per_fold) + '\n';
  for (int fold = 0; fold < file.folds; ++fold) {
    for (const PairLabel label : {PairLabel::kGenuine, PairLabel::kImpostor}) {
      for (const PairRecord& p : file.pairs) {
        if (p.fold != fold || p.label != label) continue;
        const std::string left = subject_of_image(p.left_image);
        const std::string right = subject_of_image(p.right_image);
        if (label == PairLabel::kGenuine) {
          out += left + '\t' + std::to_string(image_index(p.left_image)) +
                 '\t' + std::to_string(image_index(p.right_image)) + '\n';
        } else {
          out += left + '\t' + std::to_string(image_index(p.left_image)) +
                 '\t' + right + '\t' +
                 std::to_string(image_index(p.right_image)) + '\n';
        }
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Scores

std::vector<ScoreRecord> parse_scores(std::istream& in,
                                      const std::string& name,
                                      const std::string& matcher_id,
                                      bool invert) {
  const std::vector<std::string> lines = read_lines(in);
  if (lines.empty()) fail(name, 1, "empty score file");
  const auto columns = parse_header(split(lines[0], ','), name,
                                    {"left_image", "right_image", "score"});

  std::vector<ScoreRecord> records;
  std::set<std::pair<std::string, std::string>> seen;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::size_t line_no = i + 1;
    const std::vector<std::string> fields = split(lines[i], ',');
    if (fields.size() != columns.size())
      fail(name, line_no, "expected 3 fields, got " +
                              std::to_string(fields.size()));
    ScoreRecord r;
    r.left_image = strip(fields[columns.at("left_image")]);
    r.right_image = strip(fields[columns.at("right_image")]);
    r.score = parse_double(fields[columns.at("score")], name, line_no,
                           "score");
    if (!std::isfinite(r.score)) fail(name, line_no, "non-finite score");
    if (invert) r.score = -r.score;
    r.matcher_id = matcher_id;
    if (r.left_image.empty() || r.right_image.empty())
      fail(name, line_no, "empty image id");
    if (!seen.emplace(r.left_image, r.right_image).second)
      fail(name, line_no, "duplicate score for (" + r.left_image + ", " +
                              r.right_image + ")");
    records.push_back(std::move(r));
  }
  return records;
}

std::vector<ScoreRecord> load_scores(const std::filesystem::path& path,
                                     std::string matcher_id, bool invert) {
  if (matcher_id.empty()) matcher_id = path.stem().string();
  std::ifstream in = open_file(path);
  return parse_scores(in, path.filename().string(), matcher_id, invert);
}

std::string emit_scores(std::span<const ScoreRecord> records) {
  std::string out = "left_image,right_image,score\n";
  for (const ScoreRecord& r : records) {
    out += r.left_image + ',' + r.right_image + ',' + format_double(r.score) +
           '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// COTS

std::vector<CotsRecord> parse_cots(std::istream& in, const std::string& name,
                                   ProfileSource source) {
  const std::vector<std::string> lines = read_lines(in);
  if (lines.empty()) fail(name, 1, "empty COTS file");
  std::vector<std::string> conf_columns;
  for (TraitKind kind : kAllTraitKinds)
    conf_columns.push_back("conf_" + trait_name(kind));
  const auto columns = parse_header(
      split(lines[0], ','), name,
      {"image_id", "detected", "gender", "age_years", "ethnicity", "glasses",
       "beard", "moustache"},
      conf_columns);

  std::vector<CotsRecord> records;
  std::set<std::string> seen;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::size_t line_no = i + 1;
    const std::vector<std::string> fields = split(lines[i], ',');
    if (fields.size() != columns.size())
      fail(name, line_no,
           "expected " + std::to_string(columns.size()) + " fields, got " +
               std::to_string(fields.size()));

    CotsRecord r;
    r.image_id = strip(fields[columns.at("image_id")]);
    r.profile = SoftProfile(source);
    if (r.image_id.empty()) fail(name, line_no, "empty image_id");
    if (!seen.insert(r.image_id).second)
      fail(name, line_no, "duplicate image_id \"" + r.image_id + "\"");

    const std::string detected = lower(strip(fields[columns.at("detected")]));
    if (detected == "1" || detected == "true") r.detected = true;
    else if (detected == "0" || detected == "false") r.detected = false;
    else fail(name, line_no, "detected must be 0/1, got \"" + detected + "\"");

    for (TraitKind kind : kAllTraitKinds) {
      const std::string column =
          kind == TraitKind::kAge ? "age_years" : trait_name(kind);
      const std::string cell = strip(fields[columns.at(column)]);
      if (cell.empty()) continue;
      if (!r.detected)
        fail(name, line_no,
             "undetected image \"" + r.image_id + "\" carries a " +
                 trait_name(kind) + " estimate");
      try {
        if (kind == TraitKind::kAge) {
          r.profile.set(kind, TraitValue::years(parse_double(
                                  cell, name, line_no, "age in years")));
        } else {
          r.profile.set(kind, parse_trait_label(kind, cell));
        }
      } catch (const DataError& e) {
        fail(name, line_no, e.what());
      }
    }

    for (TraitKind kind : kAllTraitKinds) {
      const std::string column = "conf_" + trait_name(kind);
      const auto it = columns.find(column);
      if (it == columns.end()) continue;
      const std::string cell = strip(fields[it->second]);
      if (cell.empty()) continue;
      const double c = parse_double(cell, name, line_no, "confidence");
      if (c < 0.0 || c > 1.0)
        fail(name, line_no, "confidence out of [0,1]: " + cell);
      r.confidence[static_cast<int>(kind)] = c;
    }
    records.push_back(std::move(r));
  }
  return records;
}

std::vector<CotsRecord> load_cots(const std::filesystem::path& path,
                                  ProfileSource source) {
  std::ifstream in = open_file(path);
  return parse_cots(in, path.filename().string(), source);
}

// ---------------------------------------------------------------------------
// Join

ProfileIndex ProfileIndex::from_annotations(
    std::span<const AnnotationRecord> records) {
  ProfileIndex index;
  for (const AnnotationRecord& r : records) {
    if (!index.profiles_.emplace(r.image_id, r.profile).second)
      throw DataError("duplicate annotation for image \"" + r.image_id + "\"");
  }
  return index;
}

ProfileIndex ProfileIndex::from_cots(std::span<const CotsRecord> records) {
  ProfileIndex index;
  for (const CotsRecord& r : records) {
    if (!index.profiles_.emplace(r.image_id, r.profile).second)
      throw DataError("duplicate COTS record for image \"" + r.image_id +
                      "\"");
  }
  return index;
}

const SoftProfile* ProfileIndex::find(const std::string& image_id) const {
  const auto it = profiles_.find(image_id);
  return it == profiles_.end() ? nullptr : &it->second;
}

namespace {

std::string pair_key(const std::string& left, const std::string& right) {
  return left + '\x1f' + right;
}

}  // namespace

ScoreIndex::ScoreIndex(std::span<const ScoreRecord> records) {
  for (const ScoreRecord& r : records) {
    if (matcher_id_.empty()) matcher_id_ = r.matcher_id;
    if (!scores_.emplace(pair_key(r.left_image, r.right_image), r.score)
             .second)
      throw DataError("duplicate score for (" + r.left_image + ", " +
                      r.right_image + ")");
  }
}

std::optional<double> ScoreIndex::find(const std::string& left,
                                       const std::string& right) const {
  auto it = scores_.find(pair_key(left, right));
  if (it == scores_.end()) it = scores_.find(pair_key(right, left));
  if (it == scores_.end()) return std::nullopt;
  return it->second;
}

JoinResult join(std::span<const PairRecord> pairs,
                const ProfileIndex& profiles, const ScoreIndex* scores,
                JoinPolicy policy) {
  JoinResult result;
  std::set<std::string> missing_seen;
  const auto note_missing = [&](const std::string& id) {
    if (missing_seen.insert(id).second) result.missing_ids.push_back(id);
  };

  for (const PairRecord& pair : pairs) {
    const SoftProfile* left = profiles.find(pair.left_image);
    const SoftProfile* right = profiles.find(pair.right_image);
    if (!left || !right) {
      if (!left) note_missing(pair.left_image);
      if (!right) note_missing(pair.right_image);
      ++result.dropped_missing_profile;
      continue;
    }
    JoinedPair joined{pair, *left, *right, std::nullopt};
    if (scores) {
      joined.face_score = scores->find(pair.left_image, pair.right_image);
      if (!joined.face_score) {
        note_missing(pair.left_image + " vs " + pair.right_image);
        ++result.dropped_missing_score;
        continue;
      }
    }
    result.pairs.push_back(std::move(joined));
  }

  if (policy == JoinPolicy::kStrict &&
      result.dropped_missing_profile + result.dropped_missing_score > 0) {
    std::string ids;
    for (std::size_t i = 0; i < result.missing_ids.size() && i < 10; ++i) {
      if (!ids.empty()) ids += ", ";
      ids += result.missing_ids[i];
    }
    if (result.missing_ids.size() > 10)
      ids += ", and " + std::to_string(result.missing_ids.size() - 10) +
             " more";
    throw DataError("join failed to resolve: " + ids);
  }
  return result;
}

}  // namespace softbio
