#include <doctest.h>

#include <cmath>

#include "softbio/analysis.hpp"
#include "softbio/io.hpp"
#include "test_support.hpp"

using namespace softbio;

TEST_SUITE_BEGIN("analysis");

TEST_CASE("pearson on pinned examples") {
  const std::vector<double> a{0, 1, 0, 1};
  CHECK(*pearson(a, a) == doctest::Approx(1.0));

  std::vector<double> neg;
  for (double v : a) neg.push_back(-v);
  CHECK(*pearson(a, neg) == doctest::Approx(-1.0));

  // Hand computation: both means 0.5, covariance terms cancel to 0.
  const std::vector<double> b{0, 1, 1, 0};
  CHECK(*pearson(a, b) == doctest::Approx(0.0));

  const std::vector<double> flat{2, 2, 2, 2};
  CHECK(!pearson(a, flat));
  CHECK(!pearson(flat, a));

  CHECK_THROWS_AS(pearson(a, std::vector<double>{1, 2}), UsageError);
  CHECK_THROWS_AS(pearson(std::vector<double>{1}, std::vector<double>{1}),
                  DataError);
}

TEST_CASE("pearson transform behavior") {
  Rng rng(12);
  std::vector<double> a, b;
  for (int i = 0; i < 200; ++i) {
    a.push_back(rng.uniform_below(5));
    b.push_back(rng.uniform_below(3) + 0.2 * a.back());
  }
  const double base = *pearson(a, b);

  std::vector<double> scaled;
  for (double v : a) scaled.push_back(2.5 * v + 13.0);
  CHECK(std::abs(*pearson(scaled, b) - base) <= 1e-12);

  std::vector<double> negated;
  for (double v : a) negated.push_back(-v);
  CHECK(std::abs(*pearson(negated, b) + base) <= 1e-12);

  CHECK(std::abs(*pearson(a, b) - *pearson(b, a)) <= 1e-12);
}

TEST_CASE("correlation matrices are symmetric with a unit diagonal") {
  Rng rng(21);
  std::vector<SoftProfile> profiles;
  for (int i = 0; i < 300; ++i)
    profiles.push_back(testing::random_profile(rng, 0.1, i % 4 == 0));

  const CorrelationMatrix m = trait_correlations(profiles);
  for (int i = 0; i < kTraitCount; ++i) {
    REQUIRE(m.coeff[i][i].has_value());
    CHECK(*m.coeff[i][i] == doctest::Approx(1.0).epsilon(1e-12));
    for (int j = 0; j < kTraitCount; ++j) {
      CHECK(m.support[i][j] == m.support[j][i]);
      REQUIRE(m.coeff[i][j].has_value() == m.coeff[j][i].has_value());
      if (m.coeff[i][j]) {
        CHECK(*m.coeff[i][j] == *m.coeff[j][i]);
        CHECK(*m.coeff[i][j] >= -1.0 - 1e-12);
        CHECK(*m.coeff[i][j] <= 1.0 + 1e-12);
      }
    }
  }
  // Pairwise deletion: support varies with the missing pattern.
  CHECK(m.support[0][1] <= 300);
}

TEST_CASE("independent noiseless priors give near-zero cross correlations") {
  // The generator draws traits independently, so every off-diagonal
  // coefficient converges to 0 at the Monte-Carlo rate ~1/sqrt(n).
  SynthSpec spec;
  spec.n_subjects = 3000;
  spec.images_per_subject = ImagesPerSubject::fixed(1);
  spec.seed = 404;
  const SynthPopulation pop = generate_population(spec);
  std::vector<SoftProfile> profiles;
  for (const AnnotationRecord& r : pop.annotations)
    profiles.push_back(r.profile);
  const CorrelationMatrix m = trait_correlations(profiles);
  for (int i = 0; i < kTraitCount; ++i) {
    for (int j = 0; j < kTraitCount; ++j) {
      if (i == j) continue;
      REQUIRE(m.coeff[i][j].has_value());
      CHECK(std::abs(*m.coeff[i][j]) < 0.06);  // ~3 sigma at n = 3000
    }
  }
}

TEST_CASE("demographic stats") {
  SoftProfile male;
  male.set(TraitKind::kGender, TraitValue::categorical(0));
  const std::vector<SoftProfile> one{male};
  const auto stats = demographic_stats(one);
  CHECK(stats[0].instances[0].count == 1);
  CHECK(stats[0].instances[0].percent == 100.0);
  CHECK(stats[0].instances[1].count == 0);
  CHECK(stats[0].missing == 0);
  CHECK(stats[1].missing == 1);  // age unset
  CHECK_THROWS_AS(demographic_stats(std::vector<SoftProfile>{}), DataError);
}

namespace {

AnnotationRecord make_annotation(const std::string& subject, int index,
                                 int gender, int age_code, int ethnicity) {
  AnnotationRecord r;
  r.subject_id = subject;
  r.image_id = make_image_id(subject, index);
  r.profile.set(TraitKind::kGender, TraitValue::categorical(gender));
  r.profile.set(TraitKind::kAge, TraitValue::categorical(age_code));
  r.profile.set(TraitKind::kEthnicity, TraitValue::categorical(ethnicity));
  return r;
}

CotsRecord make_cots(const std::string& image_id, bool detected,
                     std::optional<int> gender, std::optional<double> years,
                     std::optional<int> ethnicity) {
  CotsRecord r;
  r.image_id = image_id;
  r.detected = detected;
  r.profile = SoftProfile(ProfileSource::kCotsMicrosoft);
  if (gender) r.profile.set(TraitKind::kGender, TraitValue::categorical(*gender));
  if (years) r.profile.set(TraitKind::kAge, TraitValue::years(*years));
  if (ethnicity)
    r.profile.set(TraitKind::kEthnicity, TraitValue::categorical(*ethnicity));
  return r;
}

}  // namespace

TEST_CASE("cots accuracy tables") {
  SUBCASE("identical estimates score 100 everywhere") {
    std::vector<AnnotationRecord> truth;
    std::vector<CotsRecord> cots;
    for (int i = 0; i < 10; ++i) {
      truth.push_back(make_annotation("Person", i + 1, i % 2, 3, i % 3));
      cots.push_back(make_cots(truth.back().image_id, true, i % 2, 50.0,
                               i % 3));
    }
    const AccuracyTable t = cots_accuracy(truth, cots);
    CHECK(t.detection_rate == 1.0);
    CHECK(t.traits[0].overall == 1.0);
    CHECK(t.traits[1].overall == 1.0);  // 50y -> Middle Aged == code 3
    CHECK(t.traits[2].overall == 1.0);
    CHECK_FALSE(t.traits[3].available);
    CHECK_FALSE(t.traits[4].available);
  }

  SUBCASE("three of four genders right is 75 percent") {
    std::vector<AnnotationRecord> truth;
    std::vector<CotsRecord> cots;
    for (int i = 0; i < 4; ++i)
      truth.push_back(make_annotation("P", i + 1, 0, 3, 0));
    cots.push_back(make_cots("P_0001", true, 0, {}, {}));
    cots.push_back(make_cots("P_0002", true, 0, {}, {}));
    cots.push_back(make_cots("P_0003", true, 0, {}, {}));
    cots.push_back(make_cots("P_0004", true, 1, {}, {}));
    const AccuracyTable t = cots_accuracy(truth, cots);
    CHECK(t.traits[0].evaluated == 4);
    CHECK(t.traits[0].overall == doctest::Approx(0.75));
  }

  SUBCASE("groundtruth outside the COTS vocabulary is excluded") {
    std::vector<AnnotationRecord> truth;
    std::vector<CotsRecord> cots;
    // Groundtruth: 2 Caucasian, 1 Indian, 1 Other. The COTS only ever
    // answers Caucasian/Black/Asian, so only the first two are evaluated.
    truth.push_back(make_annotation("P", 1, 0, 3, 0));
    truth.push_back(make_annotation("P", 2, 0, 3, 0));
    truth.push_back(make_annotation("P", 3, 0, 3, 3));
    truth.push_back(make_annotation("P", 4, 0, 3, 4));
    cots.push_back(make_cots("P_0001", true, 0, {}, 0));
    cots.push_back(make_cots("P_0002", true, 0, {}, 1));
    cots.push_back(make_cots("P_0003", true, 0, {}, 2));
    cots.push_back(make_cots("P_0004", true, 0, {}, 0));
    const AccuracyTable t = cots_accuracy(truth, cots);
    CHECK(t.traits[2].evaluated == 2);
    CHECK(t.traits[2].correct == 1);
    CHECK(t.traits[2].overall == doctest::Approx(0.5));
  }

  SUBCASE("undetected faces only lower the detection rate") {
    std::vector<AnnotationRecord> truth;
    std::vector<CotsRecord> cots;
    for (int i = 0; i < 4; ++i)
      truth.push_back(make_annotation("P", i + 1, 0, 3, 0));
    cots.push_back(make_cots("P_0001", true, 0, {}, {}));
    cots.push_back(make_cots("P_0002", true, 0, {}, {}));
    cots.push_back(make_cots("P_0003", false, {}, {}, {}));
    cots.push_back(make_cots("P_0004", false, {}, {}, {}));
    const AccuracyTable t = cots_accuracy(truth, cots);
    CHECK(t.detection_rate == doctest::Approx(0.5));
    CHECK(t.traits[0].evaluated == 2);
    CHECK(t.traits[0].overall == 1.0);
  }

  SUBCASE("micro overall equals the support-weighted instance mean") {
    Rng rng(41);
    std::vector<AnnotationRecord> truth;
    std::vector<CotsRecord> cots;
    for (int i = 0; i < 500; ++i) {
      const int g = rng.uniform_below(2);
      truth.push_back(make_annotation("S", i + 1, g,
                                      rng.uniform_below(5),
                                      rng.uniform_below(5)));
      const int est = rng.uniform() < 0.85 ? g : 1 - g;
      cots.push_back(make_cots(truth.back().image_id, rng.uniform() < 0.95,
                               est, {}, {}));
    }
    const AccuracyTable t = cots_accuracy(truth, cots);
    const TraitAccuracy& gender = t.traits[0];
    double weighted = 0.0;
    std::size_t support = 0;
    for (const InstanceAccuracy& inst : gender.per_instance) {
      weighted += inst.accuracy * inst.support;
      support += inst.support;
    }
    CHECK(support == gender.evaluated);
    CHECK(std::abs(weighted / support - gender.overall) <= 1e-12);
  }

  SUBCASE("disjoint id universes fail") {
    std::vector<AnnotationRecord> truth{make_annotation("A", 1, 0, 3, 0)};
    std::vector<CotsRecord> cots{make_cots("B_0001", true, 0, {}, {})};
    CHECK_THROWS_AS(cots_accuracy(truth, cots), DataError);
  }
}

TEST_CASE("age stability tables") {
  SUBCASE("two estimates give |delta| / sqrt(2) under the sample std") {
    std::vector<CotsRecord> cots{make_cots("A_0001", true, {}, 30.0, {}),
                                 make_cots("A_0002", true, {}, 34.0, {})};
    const AgeStabilityTable t = age_stability(cots);
    CHECK(t.per_count[1].identities == 1);
    CHECK(t.per_count[1].mean_std == doctest::Approx(4.0 / std::sqrt(2.0)));
    CHECK(t.has_multi_image);

    const AgeStabilityTable pop = age_stability(cots, StdMode::kPopulation);
    CHECK(pop.per_count[1].mean_std == doctest::Approx(2.0));
  }

  SUBCASE("single-image identities pin the k=1 row at zero") {
    std::vector<CotsRecord> cots{make_cots("A_0001", true, {}, 30.0, {}),
                                 make_cots("B_0001", true, {}, 60.0, {})};
    const AgeStabilityTable t = age_stability(cots);
    CHECK(t.per_count[0].identities == 2);
    CHECK(t.per_count[0].mean_std == 0.0);
    CHECK_FALSE(t.has_multi_image);
  }

  SUBCASE("group counts partition the population") {
    Rng rng(77);
    std::vector<CotsRecord> cots;
    std::size_t subjects = 0;
    for (int s = 0; s < 120; ++s) {
      const int k = 1 + static_cast<int>(rng.uniform_below(20));
      const std::string name = "S" + std::to_string(s);
      ++subjects;
      for (int i = 0; i < k; ++i)
        cots.push_back(make_cots(make_image_id(name, i + 1), true, {},
                                 20.0 + rng.uniform() * 40.0, {}));
    }
    const AgeStabilityTable t = age_stability(cots);
    std::size_t grouped = t.more_than_15_identities;
    for (const AgeStabilityRow& row : t.per_count) grouped += row.identities;
    CHECK(grouped == subjects);
    CHECK(t.total_identities == subjects);

    // "more than 3" covers everything beyond 3 images, including > 15.
    std::size_t beyond3 = t.more_than_15_identities;
    for (const AgeStabilityRow& row : t.per_count)
      if (row.image_count > 3) beyond3 += row.identities;
    CHECK(t.more_than_3.identities == beyond3);
  }

  SUBCASE("undetected and categorical-age records") {
    std::vector<CotsRecord> undetected{make_cots("A_0001", false, {}, {}, {})};
    CHECK_THROWS_AS(age_stability(undetected), DataError);

    CotsRecord categorical = make_cots("A_0001", true, {}, {}, {});
    categorical.profile.set(TraitKind::kAge, TraitValue::categorical(3));
    CHECK_THROWS_AS(
        age_stability(std::vector<CotsRecord>{categorical}), DataError);
  }
}

TEST_SUITE_END();
