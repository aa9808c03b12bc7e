#include <doctest.h>

#include "softbio/traits.hpp"
#include "test_support.hpp"

using namespace softbio;

TEST_SUITE_BEGIN("traits");

TEST_CASE("label parsing follows the instance tables") {
  CHECK(parse_trait_label(TraitKind::kGender, "Female") ==
        TraitValue::categorical(1));
  CHECK(parse_trait_label(TraitKind::kAge, "Baby") ==
        TraitValue::categorical(0));
  CHECK(parse_trait_label(TraitKind::kGender, "male") ==
        TraitValue::categorical(0));
  CHECK(parse_trait_label(TraitKind::kAge, "MIDDLE AGED") ==
        TraitValue::categorical(3));
  CHECK(parse_trait_label(TraitKind::kGlasses, "no glasses") ==
        TraitValue::categorical(0));
  CHECK(parse_trait_label(TraitKind::kEthnicity, "2") ==
        TraitValue::categorical(2));
  CHECK(parse_trait_label(TraitKind::kAge, "35y") == TraitValue::years(35.0));
  CHECK(parse_trait_label(TraitKind::kAge, "35.5y") ==
        TraitValue::years(35.5));

  CHECK_THROWS_AS(parse_trait_label(TraitKind::kGlasses, "7"), DataError);
  CHECK_THROWS_AS(parse_trait_label(TraitKind::kAge, "Elder"), DataError);
  CHECK_THROWS_AS(parse_trait_label(TraitKind::kGender, "128y"), DataError);
  CHECK_THROWS_AS(parse_trait_label(TraitKind::kAge, "999y"), DataError);
  CHECK_THROWS_WITH_AS(parse_trait_label(TraitKind::kBeard, "Maybe"),
                       doctest::Contains("beard"), DataError);
  CHECK_THROWS_WITH_AS(parse_trait_label(TraitKind::kBeard, "Maybe"),
                       doctest::Contains("Maybe"), DataError);
}

TEST_CASE("labels round-trip through the canonical emitter") {
  for (TraitKind kind : kAllTraitKinds) {
    for (int c = 0; c < instance_count(kind); ++c) {
      const TraitValue v = TraitValue::categorical(c);
      CHECK(parse_trait_label(kind, format_trait_label(kind, v)) == v);
    }
  }
  Rng rng(7);
  for (int i = 0; i < 200; ++i) {
    const TraitValue v = TraitValue::years(rng.uniform() * 120.0);
    CHECK(parse_trait_label(TraitKind::kAge,
                            format_trait_label(TraitKind::kAge, v)) == v);
  }
  CHECK(format_trait_label(TraitKind::kAge, TraitValue::missing()) == "");
}

TEST_CASE("age thresholding uses half-open bins") {
  CHECK(age_to_category(50.0) == 3);
  CHECK(age_to_category(0.0) == 0);
  CHECK(age_to_category(61.0) == 4);  // boundary goes to the upper bin
  CHECK(age_to_category(2.999) == 0);
  CHECK(age_to_category(3.0) == 1);
  CHECK(age_to_category(13.0) == 2);
  CHECK(age_to_category(39.999) == 2);
  CHECK(age_to_category(40.0) == 3);
  CHECK(age_to_category(120.0) == 4);
  CHECK_THROWS_AS(age_to_category(50.0, AgeCuts{3, 13, 13, 61}), UsageError);
  CHECK_THROWS_AS(age_to_category(-1.0), DataError);
  CHECK_THROWS_AS(age_to_category(121.0), DataError);
}

TEST_CASE("trait distances") {
  const MatchConfig cfg;
  CHECK(*trait_distance(TraitKind::kGender, TraitValue::categorical(0),
                        TraitValue::categorical(1), cfg) == 1.0);
  CHECK(*trait_distance(TraitKind::kAge, TraitValue::categorical(2),
                        TraitValue::categorical(2), cfg) == 0.0);
  CHECK(*trait_distance(TraitKind::kAge, TraitValue::categorical(2),
                        TraitValue::categorical(4), cfg) == 0.5);

  MatchConfig raw;
  raw.age_normalization = AgeNormalization::kRaw;
  CHECK(*trait_distance(TraitKind::kAge, TraitValue::categorical(2),
                        TraitValue::categorical(4), raw) == 2.0);

  CHECK(*trait_distance(TraitKind::kAge, TraitValue::years(30),
                        TraitValue::years(34), cfg) == doctest::Approx(0.05));
  CHECK(*trait_distance(TraitKind::kAge, TraitValue::years(0),
                        TraitValue::years(100), cfg) == 1.0);  // clamped
  CHECK(*trait_distance(TraitKind::kAge, TraitValue::years(30),
                        TraitValue::years(34), raw) == doctest::Approx(4.0));

  CHECK(!trait_distance(TraitKind::kGender, TraitValue::missing(),
                        TraitValue::categorical(0), cfg));
  CHECK_THROWS_AS(trait_distance(TraitKind::kAge, TraitValue::categorical(2),
                                 TraitValue::years(30), cfg),
                  DataError);
  CHECK_THROWS_AS(trait_distance(TraitKind::kGender, TraitValue::years(30),
                                 TraitValue::years(30), cfg),
                  DataError);
  CHECK_THROWS_AS(trait_distance(TraitKind::kGender, TraitValue::categorical(5),
                                 TraitValue::categorical(0), cfg),
                  DataError);
}

namespace {

SoftProfile full_profile(int gender, int age, int ethnicity, int glasses,
                         int beard, int moustache) {
  SoftProfile p;
  p.set(TraitKind::kGender, TraitValue::categorical(gender));
  p.set(TraitKind::kAge, TraitValue::categorical(age));
  p.set(TraitKind::kEthnicity, TraitValue::categorical(ethnicity));
  p.set(TraitKind::kGlasses, TraitValue::categorical(glasses));
  p.set(TraitKind::kBeard, TraitValue::categorical(beard));
  p.set(TraitKind::kMoustache, TraitValue::categorical(moustache));
  return p;
}

}  // namespace

TEST_CASE("profile dissimilarity") {
  const MatchConfig cfg;
  const SoftProfile a = full_profile(0, 3, 0, 0, 1, 1);

  CHECK(profile_dissimilarity(a, a, TraitSet::all(), cfg) == 0.0);

  SoftProfile b = a;
  b.set(TraitKind::kGender, TraitValue::categorical(1));
  CHECK(profile_dissimilarity(a, b, TraitSet::all(), cfg) ==
        doctest::Approx(1.0 / 6.0));

  // Age missing on one side drops out; the remaining gender mismatch is 1.
  SoftProfile c = b;
  c.set(TraitKind::kAge, TraitValue::missing());
  const TraitSet age_gender =
      TraitSet::of({TraitKind::kAge, TraitKind::kGender});
  CHECK(profile_dissimilarity(a, c, age_gender, cfg) == 1.0);

  SoftProfile empty;
  CHECK_THROWS_AS(profile_dissimilarity(a, empty, TraitSet::all(), cfg),
                  NoEvidenceError);
  CHECK(!dissimilarity_if_defined(a, empty, TraitSet::all(), cfg));

  MatchConfig strict = cfg;
  strict.missing_policy = MissingPolicy::kFail;
  CHECK_THROWS_AS(profile_dissimilarity(a, c, age_gender, strict), DataError);

  CHECK_THROWS_AS(profile_dissimilarity(a, b, TraitSet(), cfg), UsageError);
}

TEST_CASE("sunglasses carry no evidence under the no-sunglasses variant") {
  MatchConfig starred;
  starred.glasses_variant = GlassesVariant::kNoSunglasses;
  const TraitSet glasses_only = TraitSet::of({TraitKind::kGlasses});

  SoftProfile sunglasses, bare;
  sunglasses.set(TraitKind::kGlasses, TraitValue::categorical(2));
  bare.set(TraitKind::kGlasses, TraitValue::categorical(0));

  CHECK(profile_dissimilarity(sunglasses, bare, glasses_only, MatchConfig{}) ==
        1.0);
  CHECK_THROWS_AS(
      profile_dissimilarity(sunglasses, bare, glasses_only, starred),
      NoEvidenceError);

  // In a larger set the trait drops out of numerator and denominator.
  SoftProfile p = full_profile(0, 3, 0, 2, 1, 1);
  SoftProfile q = full_profile(1, 3, 0, 0, 1, 1);
  CHECK(profile_dissimilarity(p, q, TraitSet::all(), MatchConfig{}) ==
        doctest::Approx(2.0 / 6.0));
  CHECK(profile_dissimilarity(p, q, TraitSet::all(), starred) ==
        doctest::Approx(1.0 / 5.0));
}

TEST_CASE("soft score maps") {
  CHECK(soft_score(0.0) == 1.0);
  CHECK(soft_score(1.0) == 0.5);
  MatchConfig negated;
  negated.score_map = ScoreMap::kNegated;
  CHECK(soft_score(0.25, negated) == -0.25);
  CHECK_THROWS_AS(soft_score(-0.1), UsageError);

  Rng rng(3);
  for (int i = 0; i < 100; ++i) {
    const double d1 = rng.uniform() * 2.0;
    const double d2 = d1 + rng.uniform() + 1e-9;
    CHECK(soft_score(d1) > soft_score(d2));
    CHECK(soft_score(d1, negated) > soft_score(d2, negated));
  }
}

TEST_CASE("matcher properties: symmetry, identity, range, oracle equality") {
  Rng rng(11);
  const std::array<MatchConfig, 3> configs = [] {
    std::array<MatchConfig, 3> cfgs{};
    cfgs[1].age_normalization = AgeNormalization::kRaw;
    cfgs[2].glasses_variant = GlassesVariant::kNoSunglasses;
    return cfgs;
  }();

  for (int i = 0; i < 4000; ++i) {
    const bool years = rng.uniform() < 0.3;
    const SoftProfile p = testing::random_profile(rng, 0.25, years);
    const SoftProfile q = testing::random_profile(rng, 0.25, years);
    const TraitSet set =
        TraitSet::from_bits(1 + static_cast<std::uint8_t>(
                                    rng.uniform_below(63)));
    const MatchConfig& cfg = configs[rng.uniform_below(3)];

    const auto pq = dissimilarity_if_defined(p, q, set, cfg);
    const auto qp = dissimilarity_if_defined(q, p, set, cfg);
    REQUIRE(pq.has_value() == qp.has_value());
    if (pq) {
      CHECK(*pq == doctest::Approx(*qp).epsilon(1e-12));
      if (cfg.age_normalization == AgeNormalization::kNormalized) {
        CHECK(*pq >= 0.0);
        CHECK(*pq <= 1.0);
      }
    }

    const auto oracle = testing::brute_force_dissimilarity(p, q, set, cfg);
    REQUIRE(pq.has_value() == oracle.has_value());
    if (pq) CHECK(std::abs(*pq - *oracle) <= 1e-12);

    const auto self = dissimilarity_if_defined(p, p, set, cfg);
    if (self) CHECK(*self == 0.0);
  }
}

TEST_CASE("both score maps rank pairs identically") {
  Rng rng(5150);
  MatchConfig recip;
  MatchConfig negated;
  negated.score_map = ScoreMap::kNegated;

  ScoreSet recip_scores, negated_scores;
  for (int i = 0; i < 600; ++i) {
    const bool genuine = i % 2 == 0;
    SoftProfile p = testing::random_profile(rng, 0.1, false);
    SoftProfile q = genuine ? p : testing::random_profile(rng, 0.1, false);
    const auto d = dissimilarity_if_defined(p, q, TraitSet::all(), recip);
    if (!d) continue;
    (genuine ? recip_scores.genuine : recip_scores.impostor)
        .push_back(soft_score(*d, recip));
    (genuine ? negated_scores.genuine : negated_scores.impostor)
        .push_back(soft_score(*d, negated));
  }
  CHECK(std::abs(eer(recip_scores) - eer(negated_scores)) <= 1e-12);
}

TEST_CASE("trait sets") {
  const TraitSet s = TraitSet::parse("age, ethnicity,gender");
  CHECK(s.size() == 3);
  CHECK(s.contains(TraitKind::kAge));
  CHECK(s.contains(TraitKind::kEthnicity));
  CHECK(s.contains(TraitKind::kGender));
  CHECK(s.to_string() == "gender+age+ethnicity");  // fixed trait order

  CHECK_THROWS_AS(TraitSet::parse("age,age"), UsageError);
  CHECK_THROWS_AS(TraitSet::parse(""), UsageError);
  CHECK_THROWS_AS(TraitSet::parse("age,height"), UsageError);

  CHECK(TraitSet::all().size() == 6);
  CHECK(traitset_lex_less(
      TraitSet::of({TraitKind::kGender, TraitKind::kMoustache}),
      TraitSet::of({TraitKind::kAge, TraitKind::kEthnicity})));
  CHECK(traitset_lex_less(TraitSet::of({TraitKind::kGender}),
                          TraitSet::of({TraitKind::kGender, TraitKind::kAge})));
}

TEST_SUITE_END();
