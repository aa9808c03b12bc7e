#pragma once

#include <array>
#include <filesystem>
#include <istream>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "softbio/traits.hpp"

namespace softbio {

// ---------------------------------------------------------------------------
// Records

struct AnnotationRecord {
  std::string image_id;    // "<subject>_<index %04d>"
  std::string subject_id;  // must equal the image_id prefix
  SoftProfile profile;
};

enum class PairLabel { kGenuine, kImpostor };

struct PairRecord {
  int fold = 0;
  std::string left_image;
  std::string right_image;
  PairLabel label = PairLabel::kGenuine;
};

struct ScoreRecord {
  std::string left_image;
  std::string right_image;
  double score = 0.0;
  std::string matcher_id;
};

struct CotsRecord {
  std::string image_id;
  bool detected = false;
  SoftProfile profile;  // all missing when not detected
  std::array<std::optional<double>, kTraitCount> confidence{};
};

// "Name_0042" -> "Name"; throws DataError when no _NNNN suffix exists.
std::string subject_of_image(const std::string& image_id);
// ("Name", 42) -> "Name_0042"
std::string make_image_id(const std::string& subject, int index);

// ---------------------------------------------------------------------------
// Annotation CSV: header `image_id,subject_id,gender,age,ethnicity,glasses,
// beard,moustache` (columns locatable in any order); trait cells are instance
// names, decimal codes, or empty = missing; age also accepts "<years>y".

std::vector<AnnotationRecord> parse_annotations(
    std::istream& in, const std::string& name,
    ProfileSource source = ProfileSource::kManual);
std::vector<AnnotationRecord> load_annotations(
    const std::filesystem::path& path,
    ProfileSource source = ProfileSource::kManual);
std::string emit_annotations(std::span<const AnnotationRecord> records);

// ---------------------------------------------------------------------------
// Pairs file (LFW layout, tab-separated): header `<folds>\t<per_class>`,
// then per fold: per_class genuine lines `name\ti\tj` followed by per_class
// impostor lines `name1\ti\tname2\tj`; image_id = `name_%04d`.

struct PairsFile {
  int folds = 0;
  int per_class_per_fold = 0;
  std::vector<PairRecord> pairs;  // emission order
};

PairsFile parse_pairs(std::istream& in, const std::string& name);
PairsFile load_pairs(const std::filesystem::path& path);
std::string emit_pairs(const PairsFile& file);

// ---------------------------------------------------------------------------
// Score CSV: header `left_image,right_image,score`, one file per matcher.

std::vector<ScoreRecord> parse_scores(std::istream& in, const std::string& name,
                                      const std::string& matcher_id,
                                      bool invert = false);
// matcher_id defaults to the file stem when empty.
std::vector<ScoreRecord> load_scores(const std::filesystem::path& path,
                                     std::string matcher_id = "",
                                     bool invert = false);
std::string emit_scores(std::span<const ScoreRecord> records);

// ---------------------------------------------------------------------------
// COTS CSV: header `image_id,detected,gender,age_years,ethnicity,glasses,
// beard,moustache` plus optional `conf_<trait>` columns; detected is 0/1.

std::vector<CotsRecord> parse_cots(std::istream& in, const std::string& name,
                                   ProfileSource source);
std::vector<CotsRecord> load_cots(
    const std::filesystem::path& path,
    ProfileSource source = ProfileSource::kCotsMicrosoft);

// ---------------------------------------------------------------------------
// Join

class ProfileIndex {
 public:
  static ProfileIndex from_annotations(std::span<const AnnotationRecord>);
  // Undetected faces carry all-missing profiles.
  static ProfileIndex from_cots(std::span<const CotsRecord>);

  const SoftProfile* find(const std::string& image_id) const;
  std::size_t size() const { return profiles_.size(); }

 private:
  std::unordered_map<std::string, SoftProfile> profiles_;
};

class ScoreIndex {
 public:
  explicit ScoreIndex(std::span<const ScoreRecord> records);

  // Looks up (left,right), then (right,left).
  std::optional<double> find(const std::string& left,
                             const std::string& right) const;
  const std::string& matcher_id() const { return matcher_id_; }

 private:
  std::unordered_map<std::string, double> scores_;
  std::string matcher_id_;
};

enum class JoinPolicy { kDropWithCount, kStrict };

struct JoinedPair {
  PairRecord pair;
  SoftProfile left;
  SoftProfile right;
  std::optional<double> face_score;
};

struct JoinResult {
  std::vector<JoinedPair> pairs;
  std::size_t dropped_missing_profile = 0;
  std::size_t dropped_missing_score = 0;
  std::vector<std::string> missing_ids;  // unique, in first-seen order
};

// Attaches both profiles and (when scores are given) the face score to every
// pair. Unresolvable ids drop the pair with a count, or fail listing the ids
// under the strict policy.
JoinResult join(std::span<const PairRecord> pairs, const ProfileIndex& profiles,
                const ScoreIndex* scores = nullptr,
                JoinPolicy policy = JoinPolicy::kDropWithCount);

}  // namespace softbio
