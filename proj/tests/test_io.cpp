#include <doctest.h>

#include <sstream>

#include "softbio/io.hpp"
#include "test_support.hpp"

using namespace softbio;

TEST_SUITE_BEGIN("io");

namespace {

std::vector<AnnotationRecord> annotations_from(const std::string& text) {
  std::istringstream in(text);
  return parse_annotations(in, "test.csv");
}

PairsFile pairs_from(const std::string& text) {
  std::istringstream in(text);
  return parse_pairs(in, "pairs.txt");
}

const char* kAnnotationHeader =
    "image_id,subject_id,gender,age,ethnicity,glasses,beard,moustache\n";

}  // namespace

TEST_CASE("annotation rows parse through the label tables") {
  const auto records = annotations_from(
      std::string(kAnnotationHeader) +
      "George_W_Bush_0001,George_W_Bush,Male,Middle Aged,Caucasian,"
      "No Glasses,No,No\n"
      "Jane_Doe_0002,Jane_Doe,Female,,Asian,2,Yes,\n");
  REQUIRE(records.size() == 2);

  const SoftProfile& bush = records[0].profile;
  CHECK(records[0].image_id == "George_W_Bush_0001");
  CHECK(records[0].subject_id == "George_W_Bush");
  CHECK(bush.value(TraitKind::kGender) == TraitValue::categorical(0));
  CHECK(bush.value(TraitKind::kAge) == TraitValue::categorical(3));
  CHECK(bush.value(TraitKind::kEthnicity) == TraitValue::categorical(0));
  CHECK(bush.value(TraitKind::kGlasses) == TraitValue::categorical(0));
  CHECK(bush.value(TraitKind::kBeard) == TraitValue::categorical(1));
  CHECK(bush.value(TraitKind::kMoustache) == TraitValue::categorical(1));

  const SoftProfile& doe = records[1].profile;
  CHECK(doe.value(TraitKind::kAge).is_missing());
  CHECK(doe.value(TraitKind::kMoustache).is_missing());
  CHECK(doe.value(TraitKind::kGlasses) == TraitValue::categorical(2));
}

TEST_CASE("annotation schema violations carry line numbers") {
  CHECK_THROWS_WITH_AS(
      annotations_from(std::string(kAnnotationHeader) +
                       "A_0001,A,Male,Elder,Caucasian,No Glasses,No,No\n"),
      doctest::Contains("test.csv:2"), DataError);
  CHECK_THROWS_WITH_AS(
      annotations_from(std::string(kAnnotationHeader) +
                       "A_0001,A,Male,,,,,\nA_0001,A,Female,,,,,\n"),
      doctest::Contains("A_0001"), DataError);
  CHECK_THROWS_AS(
      annotations_from(std::string(kAnnotationHeader) + "A_0001,B,,,,,,\n"),
      DataError);
  CHECK_THROWS_AS(
      annotations_from(std::string(kAnnotationHeader) + "A_0001,A,Male\n"),
      DataError);
  CHECK_THROWS_AS(
      annotations_from("image_id,subject_id,gender,age,ethnicity,glasses,"
                       "beard,moustache,height\nA_0001,A,,,,,,,\n"),
      DataError);
  CHECK_THROWS_AS(annotations_from("image_id,subject_id\nA_0001,A\n"),
                  DataError);
}

TEST_CASE("annotation columns are located by header name") {
  const auto records = annotations_from(
      "moustache,image_id,gender,age,ethnicity,glasses,beard,subject_id\n"
      "Yes,A_0001,Female,Youth,Black,Eye Wear,No,A\n");
  REQUIRE(records.size() == 1);
  CHECK(records[0].profile.value(TraitKind::kMoustache) ==
        TraitValue::categorical(0));
  CHECK(records[0].profile.value(TraitKind::kGender) ==
        TraitValue::categorical(1));
}

TEST_CASE("annotations round-trip byte-identically") {
  const auto records = annotations_from(
      std::string(kAnnotationHeader) +
      "A_0001,A,Male,35.5y,Caucasian,No Glasses,No,No\n"
      "B_0001,B,Female,,Asian,,Yes,\n");
  const std::string emitted = emit_annotations(records);
  const auto reloaded = annotations_from(emitted);
  CHECK(emit_annotations(reloaded) == emitted);
  REQUIRE(reloaded.size() == records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    CHECK(reloaded[i].image_id == records[i].image_id);
    CHECK(reloaded[i].profile == records[i].profile);
  }
}

TEST_CASE("pairs files follow the fold-block layout") {
  const std::string text =
      "2\t2\n"
      "Abel_Pacheco\t1\t4\n"
      "Abel_Pacheco\t2\t3\n"
      "AJ_Cook\t1\tMarsha_Thomason\t1\n"
      "AJ_Cook\t2\tMarsha_Thomason\t2\n"
      "Zed_Zed\t1\t2\n"
      "Zed_Zed\t1\t3\n"
      "Ana_B\t1\tBob_C\t1\n"
      "Ana_B\t2\tBob_C\t2\n";
  const PairsFile file = pairs_from(text);
  CHECK(file.folds == 2);
  CHECK(file.per_class_per_fold == 2);
  REQUIRE(file.pairs.size() == 8);

  CHECK(file.pairs[0].left_image == "Abel_Pacheco_0001");
  CHECK(file.pairs[0].right_image == "Abel_Pacheco_0004");
  CHECK(file.pairs[0].label == PairLabel::kGenuine);
  CHECK(file.pairs[0].fold == 0);
  CHECK(file.pairs[2].left_image == "AJ_Cook_0001");
  CHECK(file.pairs[2].right_image == "Marsha_Thomason_0001");
  CHECK(file.pairs[2].label == PairLabel::kImpostor);
  CHECK(file.pairs[4].fold == 1);

  CHECK(emit_pairs(file) == text);
  const PairsFile reloaded = pairs_from(emit_pairs(file));
  CHECK(reloaded.folds == file.folds);
  REQUIRE(reloaded.pairs.size() == file.pairs.size());
  for (std::size_t i = 0; i < file.pairs.size(); ++i) {
    CHECK(reloaded.pairs[i].fold == file.pairs[i].fold);
    CHECK(reloaded.pairs[i].left_image == file.pairs[i].left_image);
    CHECK(reloaded.pairs[i].right_image == file.pairs[i].right_image);
    CHECK(reloaded.pairs[i].label == file.pairs[i].label);
  }
}

TEST_CASE("pairs format violations") {
  // Wrong total line count.
  CHECK_THROWS_AS(pairs_from("1\t2\nA\t1\t2\n"), DataError);
  // Genuine pair against itself.
  CHECK_THROWS_AS(pairs_from("1\t1\nA\t1\t1\nA\t1\tB\t1\n"), DataError);
  // Impostor within one subject.
  CHECK_THROWS_AS(pairs_from("1\t1\nA\t1\t2\nA\t1\tA\t2\n"), DataError);
  // Five fields.
  CHECK_THROWS_AS(pairs_from("1\t1\nA\t1\t2\nA\t1\tB\t1\t9\n"), DataError);
  // Zero-based index.
  CHECK_THROWS_AS(pairs_from("1\t1\nA\t0\t2\nA\t1\tB\t1\n"), DataError);
  // Malformed header.
  CHECK_THROWS_AS(pairs_from("10\n"), DataError);
  CHECK_THROWS_AS(pairs_from("x\t300\n"), DataError);
  // Genuine/impostor counts off within a fold.
  CHECK_THROWS_AS(pairs_from("1\t1\nA\t1\t2\nB\t1\t2\n"), DataError);
}

TEST_CASE("score files") {
  std::istringstream in(
      "left_image,right_image,score\nA_0001,B_0001,0.25\nA_0002,B_0002,-1\n");
  const auto records = parse_scores(in, "s.csv", "vgg");
  REQUIRE(records.size() == 2);
  CHECK(records[0].score == 0.25);
  CHECK(records[0].matcher_id == "vgg");

  const std::string emitted = emit_scores(records);
  std::istringstream again(emitted);
  CHECK(emit_scores(parse_scores(again, "s.csv", "vgg")) == emitted);

  std::istringstream inverted(
      "left_image,right_image,score\nA_0001,B_0001,0.25\n");
  CHECK(parse_scores(inverted, "s.csv", "vgg", true)[0].score == -0.25);

  std::istringstream dup(
      "left_image,right_image,score\nA_0001,B_0001,1\nA_0001,B_0001,2\n");
  CHECK_THROWS_AS(parse_scores(dup, "s.csv", "m"), DataError);
  std::istringstream inf(
      "left_image,right_image,score\nA_0001,B_0001,inf\n");
  CHECK_THROWS_AS(parse_scores(inf, "s.csv", "m"), DataError);
}

TEST_CASE("cots files") {
  std::istringstream in(
      "image_id,detected,gender,age_years,ethnicity,glasses,beard,moustache,"
      "conf_gender\n"
      "A_0001,1,Male,42.5,Caucasian,No Glasses,No,No,0.93\n"
      "A_0002,0,,,,,,,\n");
  const auto records = parse_cots(in, "c.csv", ProfileSource::kCotsMicrosoft);
  REQUIRE(records.size() == 2);
  CHECK(records[0].detected);
  CHECK(records[0].profile.value(TraitKind::kAge) == TraitValue::years(42.5));
  CHECK(records[0].confidence[0] == 0.93);
  CHECK_FALSE(records[1].detected);
  for (TraitKind kind : kAllTraitKinds)
    CHECK(records[1].profile.value(kind).is_missing());

  std::istringstream bad(
      "image_id,detected,gender,age_years,ethnicity,glasses,beard,moustache\n"
      "A_0001,0,Male,,,,,\n");
  CHECK_THROWS_AS(parse_cots(bad, "c.csv", ProfileSource::kCotsFacepp),
                  DataError);
  std::istringstream badconf(
      "image_id,detected,gender,age_years,ethnicity,glasses,beard,moustache,"
      "conf_gender\nA_0001,1,Male,,,,,,1.5\n");
  CHECK_THROWS_AS(parse_cots(badconf, "c.csv", ProfileSource::kCotsFacepp),
                  DataError);
}

TEST_CASE("image id helpers") {
  CHECK(subject_of_image("Abel_Pacheco_0001") == "Abel_Pacheco");
  CHECK(subject_of_image("AJ_Cook_0002") == "AJ_Cook");
  CHECK(make_image_id("Abel_Pacheco", 4) == "Abel_Pacheco_0004");
  CHECK(subject_of_image(make_image_id("A_B_C", 12)) == "A_B_C");
  CHECK_THROWS_AS(subject_of_image("NoIndex"), DataError);
  CHECK_THROWS_AS(subject_of_image("Short_01"), DataError);
}

TEST_CASE("joins attach profiles and scores") {
  const auto annotations = annotations_from(
      std::string(kAnnotationHeader) +
      "A_0001,A,Male,Youth,Caucasian,No Glasses,No,No\n"
      "A_0002,A,Male,Youth,Caucasian,No Glasses,No,No\n"
      "B_0001,B,Female,Senior,Asian,Eye Wear,No,No\n"
      "B_0002,B,Female,Senior,Asian,Eye Wear,No,No\n");
  const ProfileIndex profiles = ProfileIndex::from_annotations(annotations);
  const PairsFile pairs = pairs_from(
      "2\t1\nA\t1\t2\nA\t1\tB\t1\nB\t1\t2\nB\t2\tA\t2\n");

  SUBCASE("complete join has zero drops") {
    const JoinResult r = join(pairs.pairs, profiles);
    CHECK(r.pairs.size() == 4);
    CHECK(r.dropped_missing_profile == 0);
    CHECK(r.dropped_missing_score == 0);
    CHECK(!r.pairs[0].face_score);
    CHECK(r.pairs[0].left.value(TraitKind::kGender) ==
          TraitValue::categorical(0));

    // Per-fold class counts survive a complete join.
    for (int fold = 0; fold < pairs.folds; ++fold) {
      int genuine = 0, impostor = 0;
      for (const JoinedPair& p : r.pairs) {
        if (p.pair.fold != fold) continue;
        (p.pair.label == PairLabel::kGenuine ? genuine : impostor) += 1;
      }
      CHECK(genuine == pairs.per_class_per_fold);
      CHECK(impostor == pairs.per_class_per_fold);
    }
  }

  SUBCASE("scores joined, symmetric lookup, drop accounting") {
    std::vector<ScoreRecord> scores{
        {"A_0001", "A_0002", 0.9, "m"},
        {"B_0001", "A_0001", 0.2, "m"},  // reversed order in the pair list
        {"B_0001", "B_0002", 0.8, "m"},
        // (B_0002, A_0002) absent
    };
    const ScoreIndex index(scores);
    const JoinResult r = join(pairs.pairs, profiles, &index);
    CHECK(r.pairs.size() == 3);
    CHECK(r.dropped_missing_score == 1);
    CHECK(r.pairs.size() + r.dropped_missing_score +
              r.dropped_missing_profile ==
          pairs.pairs.size());
    CHECK(*r.pairs[0].face_score == 0.9);
    CHECK(*r.pairs[1].face_score == 0.2);

    CHECK_THROWS_WITH_AS(
        join(pairs.pairs, profiles, &index, JoinPolicy::kStrict),
        doctest::Contains("B_0002 vs A_0002"), DataError);
  }

  SUBCASE("missing profiles drop or fail") {
    const auto partial = annotations_from(
        std::string(kAnnotationHeader) +
        "A_0001,A,Male,Youth,Caucasian,No Glasses,No,No\n"
        "A_0002,A,Male,Youth,Caucasian,No Glasses,No,No\n"
        "B_0001,B,Female,Senior,Asian,Eye Wear,No,No\n");
    const ProfileIndex sparse = ProfileIndex::from_annotations(partial);
    const JoinResult r = join(pairs.pairs, sparse);
    CHECK(r.pairs.size() == 2);
    CHECK(r.dropped_missing_profile == 2);
    CHECK(r.missing_ids == std::vector<std::string>{"B_0002"});
    CHECK_THROWS_AS(join(pairs.pairs, sparse, nullptr, JoinPolicy::kStrict),
                    DataError);
  }

  SUBCASE("undetected COTS faces join as all-missing profiles") {
    std::vector<CotsRecord> cots;
    for (const std::string id : {"A_0001", "A_0002", "B_0001", "B_0002"}) {
      CotsRecord c;
      c.image_id = id;
      c.detected = id != "B_0002";
      if (c.detected)
        c.profile.set(TraitKind::kGender, TraitValue::categorical(0));
      cots.push_back(c);
    }
    const JoinResult r = join(pairs.pairs, ProfileIndex::from_cots(cots));
    CHECK(r.pairs.size() == 4);
    // B_0002 appears in pairs 2 and 3.
    CHECK(r.pairs[2].right.value(TraitKind::kGender).is_missing());
    CHECK(r.pairs[3].left.value(TraitKind::kGender).is_missing());
  }
}

TEST_SUITE_END();
