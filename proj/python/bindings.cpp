// Python bindings for the softbio core: trait matching, metrics, fusion,
// selection, analysis, ingestion and synthetic data generation.

#include <pybind11/functional.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "softbio/analysis.hpp"
#include "softbio/experiment.hpp"
#include "softbio/io.hpp"
#include "softbio/selection.hpp"
#include "softbio/synth.hpp"

namespace py = pybind11;
using namespace softbio;

namespace {

TraitKind kind_from_any(const py::object& obj) {
  if (py::isinstance<py::str>(obj))
    return trait_from_name(obj.cast<std::string>());
  return obj.cast<TraitKind>();
}

TraitSet set_from_any(const py::object& obj) {
  if (py::isinstance<py::str>(obj)) {
    std::string text = obj.cast<std::string>();
    for (char& c : text)
      if (c == '+') c = ',';
    return TraitSet::parse(text);
  }
  if (py::isinstance<TraitSet>(obj)) return obj.cast<TraitSet>();
  TraitSet s;
  for (const auto& item : obj.cast<py::iterable>()) {
    const TraitKind kind = kind_from_any(py::reinterpret_borrow<py::object>(
        item));
    s = s.with(kind);
  }
  if (s.empty()) throw UsageError("trait set must not be empty");
  return s;
}

AgeCuts cuts_from(const std::vector<double>& cuts) {
  if (cuts.size() != 4) throw UsageError("age cuts need exactly 4 values");
  return AgeCuts{cuts[0], cuts[1], cuts[2], cuts[3]};
}

}  // namespace

PYBIND11_MODULE(softbio, m) {
  m.doc() =
      "Soft-biometric verification: trait matching, EER evaluation, "
      "score-level fusion, SFFS selection and synthetic benchmarks";
  m.attr("__version__") = "0.1.0";

  py::register_exception<UsageError>(m, "UsageError", PyExc_ValueError);
  py::register_exception<DataError>(m, "DataError", PyExc_RuntimeError);

  // ---------------------------------------------------------------- traits
  py::enum_<TraitKind>(m, "TraitKind")
      .value("GENDER", TraitKind::kGender)
      .value("AGE", TraitKind::kAge)
      .value("ETHNICITY", TraitKind::kEthnicity)
      .value("GLASSES", TraitKind::kGlasses)
      .value("BEARD", TraitKind::kBeard)
      .value("MOUSTACHE", TraitKind::kMoustache);

  py::enum_<ProfileSource>(m, "ProfileSource")
      .value("MANUAL", ProfileSource::kManual)
      .value("COTS_FACEPP", ProfileSource::kCotsFacepp)
      .value("COTS_MICROSOFT", ProfileSource::kCotsMicrosoft)
      .value("SYNTHETIC", ProfileSource::kSynthetic);

  py::class_<TraitValue>(m, "TraitValue")
      .def_static("missing", &TraitValue::missing)
      .def_static("categorical", &TraitValue::categorical, py::arg("code"))
      .def_static("years", &TraitValue::years, py::arg("value"))
      .def_property_readonly("is_missing", &TraitValue::is_missing)
      .def_property_readonly("is_categorical", &TraitValue::is_categorical)
      .def_property_readonly("is_years", &TraitValue::is_years)
      .def_property_readonly(
          "code", [](const TraitValue& v) -> std::optional<int> {
            if (!v.is_categorical()) return std::nullopt;
            return v.code();
          })
      .def_property_readonly(
          "years_value", [](const TraitValue& v) -> std::optional<double> {
            if (!v.is_years()) return std::nullopt;
            return v.years_value();
          })
      .def(py::self == py::self)
      .def("__repr__", [](const TraitValue& v) {
        if (v.is_missing()) return std::string("TraitValue.missing()");
        if (v.is_years())
          return "TraitValue.years(" + std::to_string(v.years_value()) + ")";
        return "TraitValue.categorical(" + std::to_string(v.code()) + ")";
      });

  py::class_<SoftProfile>(m, "SoftProfile")
      .def(py::init<ProfileSource>(),
           py::arg("source") = ProfileSource::kManual)
      .def("value",
           [](const SoftProfile& p, const py::object& kind) {
             return p.value(kind_from_any(kind));
           })
      .def("set",
           [](SoftProfile& p, const py::object& kind, const TraitValue& v) {
             p.set(kind_from_any(kind), v);
           })
      .def_property_readonly("source", &SoftProfile::source)
      .def_property_readonly("fully_defined", &SoftProfile::fully_defined)
      .def(py::self == py::self);

  py::class_<TraitSet>(m, "TraitSet")
      .def(py::init([](const py::object& obj) { return set_from_any(obj); }),
           py::arg("traits"))
      .def_static("all", &TraitSet::all)
      .def("contains",
           [](const TraitSet& s, const py::object& kind) {
             return s.contains(kind_from_any(kind));
           })
      .def_property_readonly("names",
                             [](const TraitSet& s) {
                               std::vector<std::string> out;
                               for (TraitKind k : s.items())
                                 out.push_back(trait_name(k));
                               return out;
                             })
      .def("__len__", &TraitSet::size)
      .def(py::self == py::self)
      .def("__repr__",
           [](const TraitSet& s) { return "TraitSet(" + s.to_string() + ")"; });

  m.def("trait_name",
        [](TraitKind k) -> std::string { return trait_name(k); });
  m.def("instance_names", [](const py::object& kind) {
    return instance_names(kind_from_any(kind));
  });

  py::enum_<AgeNormalization>(m, "AgeNormalization")
      .value("NORMALIZED", AgeNormalization::kNormalized)
      .value("RAW", AgeNormalization::kRaw);
  py::enum_<ScoreMap>(m, "ScoreMap")
      .value("RECIPROCAL_SHIFTED", ScoreMap::kReciprocalShifted)
      .value("NEGATED", ScoreMap::kNegated);
  py::enum_<GlassesVariant>(m, "GlassesVariant")
      .value("FULL", GlassesVariant::kFull)
      .value("NO_SUNGLASSES", GlassesVariant::kNoSunglasses);
  py::enum_<MissingPolicy>(m, "MissingPolicy")
      .value("EXCLUDE_TRAIT", MissingPolicy::kExcludeTrait)
      .value("FAIL", MissingPolicy::kFail);

  py::class_<MatchConfig>(m, "MatchConfig")
      .def(py::init<>())
      .def_readwrite("age_normalization", &MatchConfig::age_normalization)
      .def_readwrite("age_span_years", &MatchConfig::age_span_years)
      .def_readwrite("score_map", &MatchConfig::score_map)
      .def_readwrite("glasses_variant", &MatchConfig::glasses_variant)
      .def_readwrite("missing_policy", &MatchConfig::missing_policy);

  m.def(
      "parse_trait_label",
      [](const py::object& kind, const std::string& text) {
        return parse_trait_label(kind_from_any(kind), text);
      },
      py::arg("kind"), py::arg("text"));
  m.def(
      "format_trait_label",
      [](const py::object& kind, const TraitValue& value) {
        return format_trait_label(kind_from_any(kind), value);
      },
      py::arg("kind"), py::arg("value"));
  m.def(
      "age_to_category",
      [](double years, const std::vector<double>& cuts) {
        return age_to_category(years, cuts_from(cuts));
      },
      py::arg("years"),
      py::arg("cuts") = std::vector<double>{3, 13, 40, 61});
  m.def(
      "trait_distance",
      [](const py::object& kind, const TraitValue& a, const TraitValue& b,
         const MatchConfig& cfg) {
        return trait_distance(kind_from_any(kind), a, b, cfg);
      },
      py::arg("kind"), py::arg("a"), py::arg("b"),
      py::arg("config") = MatchConfig{});
  m.def(
      "profile_dissimilarity",
      [](const SoftProfile& p, const SoftProfile& q, const py::object& set,
         const MatchConfig& cfg) {
        return dissimilarity_if_defined(p, q, set_from_any(set), cfg);
      },
      py::arg("p"), py::arg("q"), py::arg("traits"),
      py::arg("config") = MatchConfig{},
      "Mean defined trait distance; None when the pair carries no evidence");
  m.def("soft_score", &soft_score, py::arg("dissimilarity"),
        py::arg("config") = MatchConfig{});

  // --------------------------------------------------------------- metrics
  py::class_<ScoreSet>(m, "ScoreSet")
      .def(py::init([](std::vector<double> genuine,
                       std::vector<double> impostor) {
             return ScoreSet{std::move(genuine), std::move(impostor)};
           }),
           py::arg("genuine"), py::arg("impostor"))
      .def_readwrite("genuine", &ScoreSet::genuine)
      .def_readwrite("impostor", &ScoreSet::impostor);

  py::class_<RocPoint>(m, "RocPoint")
      .def_readonly("threshold", &RocPoint::threshold)
      .def_readonly("far", &RocPoint::far)
      .def_readonly("frr", &RocPoint::frr);

  py::class_<EerResult>(m, "EerResult")
      .def_readonly("eer", &EerResult::eer)
      .def_readonly("threshold", &EerResult::threshold)
      .def_readonly("degenerate", &EerResult::degenerate);

  py::class_<FoldReport>(m, "FoldReport")
      .def_readonly("fold_ids", &FoldReport::fold_ids)
      .def_readonly("fold_eer", &FoldReport::fold_eer)
      .def_readonly("eer_mean", &FoldReport::eer_mean)
      .def_readonly("eer_std", &FoldReport::eer_std)
      .def_readonly("has_accuracy", &FoldReport::has_accuracy)
      .def_readonly("fold_threshold", &FoldReport::fold_threshold)
      .def_readonly("fold_accuracy", &FoldReport::fold_accuracy)
      .def_readonly("accuracy_mean", &FoldReport::accuracy_mean)
      .def_readonly("accuracy_std", &FoldReport::accuracy_std)
      .def_readonly("scored_pairs", &FoldReport::scored_pairs)
      .def_readonly("dropped_pairs", &FoldReport::dropped_pairs);

  m.def("eer", &eer, py::arg("scores"));
  m.def("eer_detail", &eer_detail, py::arg("scores"));
  m.def("roc_curve", &roc_curve, py::arg("scores"));
  m.def("accuracy_at_threshold", &accuracy_at_threshold, py::arg("scores"),
        py::arg("threshold"));
  m.def("train_hter_threshold", &train_hter_threshold, py::arg("scores"));
  m.def(
      "cross_validate",
      [](const std::vector<ScoreSet>& folds, bool train_threshold) {
        return cross_validate(folds, train_threshold);
      },
      py::arg("folds"), py::arg("train_threshold") = false);

  // ---------------------------------------------------------------- fusion
  py::enum_<NormMethod>(m, "NormMethod")
      .value("MIN_MAX", NormMethod::kMinMax)
      .value("Z_SCORE", NormMethod::kZScore);

  py::class_<Normalizer>(m, "Normalizer")
      .def_static(
          "fit",
          [](const std::vector<double>& scores, NormMethod method) {
            return Normalizer::fit(scores, method);
          },
          py::arg("training"), py::arg("method") = NormMethod::kMinMax)
      .def("__call__", &Normalizer::apply, py::arg("score"))
      .def_property_readonly("degenerate", &Normalizer::degenerate)
      .def_property_readonly("param_a", &Normalizer::param_a)
      .def_property_readonly("param_b", &Normalizer::param_b);

  py::class_<FusionConfig> fusion_config(m, "FusionConfig");
  py::enum_<FusionConfig::SoftMissing>(fusion_config, "SoftMissing")
      .value("FACE_ONLY", FusionConfig::SoftMissing::kFaceOnly)
      .value("DROP_PAIR", FusionConfig::SoftMissing::kDropPair);
  fusion_config.def(py::init<>())
      .def_readwrite("face_weight", &FusionConfig::face_weight)
      .def_readwrite("soft_weight", &FusionConfig::soft_weight)
      .def_readwrite("soft_missing", &FusionConfig::soft_missing);

  m.def("fuse", &fuse, py::arg("face_score"), py::arg("soft_score"),
        py::arg("face_norm"), py::arg("soft_norm"),
        py::arg("config") = FusionConfig{},
        "Weighted normalized-score fusion; None = pair dropped");

  // ------------------------------------------------------------- selection
  py::class_<SelectionStep> step(m, "SelectionStep");
  py::enum_<SelectionStep::Action>(step, "Action")
      .value("ADD", SelectionStep::Action::kAdd)
      .value("REMOVE", SelectionStep::Action::kRemove);
  step.def_readonly("action", &SelectionStep::action)
      .def_readonly("trait", &SelectionStep::trait)
      .def_readonly("result", &SelectionStep::result)
      .def_readonly("criterion", &SelectionStep::criterion);

  py::class_<BestSubset>(m, "BestSubset")
      .def_readonly("set", &BestSubset::set)
      .def_readonly("criterion", &BestSubset::criterion);

  py::class_<SelectionTrace>(m, "SelectionTrace")
      .def_readonly("steps", &SelectionTrace::steps)
      .def_readonly("best_per_size", &SelectionTrace::best_per_size);

  m.def(
      "sffs",
      [](const py::object& candidates, const std::function<double(TraitSet)>& f,
         int max_n) {
        return sffs(set_from_any(candidates),
                    [&f](const TraitSet& s) { return f(s); }, max_n);
      },
      py::arg("candidates"), py::arg("criterion"), py::arg("max_n") = 6);
  m.def(
      "exhaustive_best",
      [](const py::object& candidates,
         const std::function<double(TraitSet)>& f) {
        return exhaustive_best(set_from_any(candidates),
                               [&f](const TraitSet& s) { return f(s); });
      },
      py::arg("candidates"), py::arg("criterion"));

  // -------------------------------------------------------------- analysis
  m.def(
      "pearson",
      [](const std::vector<double>& a, const std::vector<double>& b) {
        return pearson(a, b);
      },
      py::arg("a"), py::arg("b"),
      "Population-moment Pearson correlation; None when undefined");

  // ------------------------------------------------------------------- io
  py::class_<AnnotationRecord>(m, "AnnotationRecord")
      .def_readonly("image_id", &AnnotationRecord::image_id)
      .def_readonly("subject_id", &AnnotationRecord::subject_id)
      .def_readonly("profile", &AnnotationRecord::profile);

  py::enum_<PairLabel>(m, "PairLabel")
      .value("GENUINE", PairLabel::kGenuine)
      .value("IMPOSTOR", PairLabel::kImpostor);

  py::class_<PairRecord>(m, "PairRecord")
      .def_readonly("fold", &PairRecord::fold)
      .def_readonly("left_image", &PairRecord::left_image)
      .def_readonly("right_image", &PairRecord::right_image)
      .def_readonly("label", &PairRecord::label);

  py::class_<ScoreRecord>(m, "ScoreRecord")
      .def_readonly("left_image", &ScoreRecord::left_image)
      .def_readonly("right_image", &ScoreRecord::right_image)
      .def_readonly("score", &ScoreRecord::score)
      .def_readonly("matcher_id", &ScoreRecord::matcher_id);

  py::class_<PairsFile>(m, "PairsFile")
      .def_readonly("folds", &PairsFile::folds)
      .def_readonly("per_class_per_fold", &PairsFile::per_class_per_fold)
      .def_readonly("pairs", &PairsFile::pairs);

  m.def("subject_of_image", &subject_of_image, py::arg("image_id"));
  m.def("load_annotations", &load_annotations, py::arg("path"),
        py::arg("source") = ProfileSource::kManual);
  m.def("load_pairs", &load_pairs, py::arg("path"));
  m.def("load_scores", &load_scores, py::arg("path"),
        py::arg("matcher_id") = "", py::arg("invert") = false);
  m.def("emit_annotations",
        [](const std::vector<AnnotationRecord>& records) {
          return emit_annotations(records);
        });
  m.def("emit_pairs", &emit_pairs, py::arg("pairs_file"));
  m.def("emit_scores", [](const std::vector<ScoreRecord>& records) {
    return emit_scores(records);
  });

  // ----------------------------------------------------------------- synth
  py::enum_<SynthAgeMode>(m, "SynthAgeMode")
      .value("CATEGORICAL", SynthAgeMode::kCategorical)
      .value("YEARS", SynthAgeMode::kYears);

  py::class_<ImagesPerSubject>(m, "ImagesPerSubject")
      .def_static("fixed", &ImagesPerSubject::fixed, py::arg("count"))
      .def(py::init([](const std::vector<std::pair<int, double>>& histogram) {
             ImagesPerSubject d;
             d.histogram = histogram;
             d.validate();
             return d;
           }),
           py::arg("histogram"));

  py::class_<SynthSpec>(m, "SynthSpec")
      .def(py::init<>())
      .def_readwrite("n_subjects", &SynthSpec::n_subjects)
      .def_readwrite("images_per_subject", &SynthSpec::images_per_subject)
      .def_readwrite("trait_priors", &SynthSpec::trait_priors)
      .def_readwrite("label_noise", &SynthSpec::label_noise)
      .def_readwrite("age_drift_years", &SynthSpec::age_drift_years)
      .def_readwrite("age_mode", &SynthSpec::age_mode)
      .def_readwrite("seed", &SynthSpec::seed)
      .def("validate", &SynthSpec::validate);

  py::class_<SynthPopulation>(m, "SynthPopulation")
      .def_readonly("subject_names", &SynthPopulation::subject_names)
      .def_readonly("latent", &SynthPopulation::latent)
      .def_readonly("images_by_subject", &SynthPopulation::images_by_subject)
      .def_readonly("annotations", &SynthPopulation::annotations);

  py::class_<FaceScoreModel>(m, "FaceScoreModel")
      .def(py::init<>())
      .def_static("from_target_eer", &FaceScoreModel::from_target_eer,
                  py::arg("target_eer"))
      .def_readwrite("genuine_mean", &FaceScoreModel::genuine_mean)
      .def_readwrite("genuine_std", &FaceScoreModel::genuine_std)
      .def_readwrite("impostor_mean", &FaceScoreModel::impostor_mean)
      .def_readwrite("impostor_std", &FaceScoreModel::impostor_std)
      .def("analytic_eer", &FaceScoreModel::analytic_eer);

  m.def("default_trait_priors", &default_trait_priors);
  m.def("generate_population", &generate_population, py::arg("spec"));
  m.def(
      "generate_pairs",
      [](const SynthPopulation& pop, int folds, int per_class,
         std::uint64_t seed) {
        return generate_pairs(pop, folds, per_class, seed);
      },
      py::arg("population"), py::arg("folds"), py::arg("per_class_per_fold"),
      py::arg("seed"));
  m.def(
      "generate_face_scores",
      [](const std::vector<PairRecord>& pairs, const FaceScoreModel& model,
         std::uint64_t seed, const std::string& matcher_id) {
        return generate_face_scores(pairs, model, seed, matcher_id);
      },
      py::arg("pairs"), py::arg("model"), py::arg("seed"),
      py::arg("matcher_id") = "synthetic-face");
  m.def("normal_cdf", &normal_cdf, py::arg("x"));
  m.def("normal_quantile", &normal_quantile, py::arg("p"));
}
