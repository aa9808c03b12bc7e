"""Smoke tests for the softbio python module."""

import math

import pytest

import softbio as sb


def test_label_parsing_round_trip():
    v = sb.parse_trait_label("gender", "Female")
    assert v.code == 1
    assert sb.parse_trait_label("age", "Baby").code == 0
    assert sb.parse_trait_label(sb.TraitKind.AGE, "35.5y").years_value == 35.5
    assert sb.format_trait_label("age", sb.TraitValue.categorical(3)) == "Middle Aged"
    with pytest.raises(RuntimeError):
        sb.parse_trait_label("glasses", "7")


def test_age_thresholding():
    assert sb.age_to_category(50.0) == 3
    assert sb.age_to_category(61.0) == 4
    assert sb.age_to_category(0.0) == 0


def test_profile_matching():
    p = sb.SoftProfile()
    q = sb.SoftProfile()
    for trait, code in [("gender", 0), ("age", 3), ("ethnicity", 0),
                        ("glasses", 0), ("beard", 1), ("moustache", 1)]:
        p.set(trait, sb.TraitValue.categorical(code))
        q.set(trait, sb.TraitValue.categorical(code))
    assert sb.profile_dissimilarity(p, q, sb.TraitSet.all()) == 0.0
    q.set("gender", sb.TraitValue.categorical(1))
    d = sb.profile_dissimilarity(p, q, sb.TraitSet.all())
    assert abs(d - 1 / 6) < 1e-12
    assert sb.soft_score(0.0) == 1.0
    assert sb.soft_score(1.0) == 0.5

    empty = sb.SoftProfile()
    assert sb.profile_dissimilarity(p, empty, sb.TraitSet.all()) is None


def test_metrics():
    assert sb.eer(sb.ScoreSet([2, 3, 4], [-4, -3, -2])) == 0.0
    assert sb.eer(sb.ScoreSet([1, 3], [0, 2])) == 0.5
    assert sb.accuracy_at_threshold(sb.ScoreSet([1, 3], [0, 2]), 2.5) == 0.75
    curve = sb.roc_curve(sb.ScoreSet([1, 2], [0, 1]))
    assert curve[0].far == 1.0 and curve[-1].far == 0.0


def test_normalizer_and_fusion():
    n = sb.Normalizer.fit([0.0, 10.0], sb.NormMethod.MIN_MAX)
    assert n(5.0) == 0.5
    z = sb.Normalizer.fit([0.0, 2.0], sb.NormMethod.Z_SCORE)
    assert z(1.0) == 0.0
    unit = sb.Normalizer.fit([0.0, 1.0], sb.NormMethod.MIN_MAX)
    assert abs(sb.fuse(0.8, 0.4, unit, unit) - 0.6) < 1e-12
    assert sb.fuse(None, 0.4, unit, unit) is None
    assert sb.fuse(0.8, None, unit, unit) == 0.8


def test_sffs_with_python_criterion():
    calls = []

    def criterion(s):
        calls.append(s.names)
        return float(len(s))

    trace = sb.sffs(sb.TraitSet.all(), criterion, max_n=2)
    assert trace.best_per_size[0].set.names == ["gender"]
    assert calls  # the callable really drove the search

    best = sb.exhaustive_best(["age", "gender"], criterion)
    assert len(best) == 2


def test_pearson():
    assert sb.pearson([0, 1, 0, 1], [0, 1, 0, 1]) == pytest.approx(1.0)
    assert sb.pearson([0, 1, 0, 1], [0, 1, 1, 0]) == pytest.approx(0.0)
    assert sb.pearson([1, 1, 1, 1], [0, 1, 0, 1]) is None


def test_synthetic_end_to_end():
    spec = sb.SynthSpec()
    spec.n_subjects = 200
    spec.images_per_subject = sb.ImagesPerSubject.fixed(3)
    spec.label_noise = [0.05] * 6
    spec.seed = 11
    pop = sb.generate_population(spec)
    assert len(pop.annotations) == 600

    pairs = sb.generate_pairs(pop, folds=4, per_class_per_fold=50, seed=12)
    assert len(pairs.pairs) == 400

    model = sb.FaceScoreModel.from_target_eer(0.12)
    assert model.analytic_eer() == pytest.approx(0.12)
    scores = sb.generate_face_scores(pairs.pairs, model, seed=13)
    assert len(scores) == len(pairs.pairs)

    # Face EER over the pooled pairs should sit near the calibrated target.
    genuine = [s.score for s, p in zip(scores, pairs.pairs)
               if p.label == sb.PairLabel.GENUINE]
    impostor = [s.score for s, p in zip(scores, pairs.pairs)
                if p.label == sb.PairLabel.IMPOSTOR]
    assert abs(sb.eer(sb.ScoreSet(genuine, impostor)) - 0.12) < 0.06

    # Round-trip through the text formats.
    text = sb.emit_pairs(pairs)
    assert text.startswith("4\t50\n")
    assert sb.emit_annotations(pop.annotations).startswith("image_id,")


def test_normal_quantile():
    assert sb.normal_quantile(0.975) == pytest.approx(1.959963984540054)
    assert sb.normal_cdf(0.0) == pytest.approx(0.5)
    assert math.isclose(sb.normal_cdf(sb.normal_quantile(0.12)), 0.12,
                        rel_tol=1e-12)
