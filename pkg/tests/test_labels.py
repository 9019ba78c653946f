import numpy as np
import pytest

from annokit import labels, model
from annokit.errors import (
    AllZeroWeightsError,
    AnnokitError,
    NoAnnotationsError,
    UnmappedValueError,
)
from conftest import make_frame


def two_class_spec(variant="default", **kwargs):
    mapping = model.LabelMapping.from_values(["a", "b"])
    return labels.GeneratorSpec(
        annotators=["a1", "a2"], mapping=mapping, variant=variant, **kwargs
    )


class TestGeneratorSpec:
    def test_variant_validation(self):
        with pytest.raises(AnnokitError):
            two_class_spec(variant="gaussian")

    def test_effi_weight_validation(self):
        with pytest.raises(AnnokitError):
            two_class_spec(
                variant="effi", first_choice_weight=0.4, second_choice_weight=0.6
            )
        with pytest.raises(AnnokitError):
            two_class_spec(
                variant="effi", first_choice_weight=0.7, second_choice_weight=0.2
            )
        spec = two_class_spec(
            variant="effi", first_choice_weight=0.9, second_choice_weight=0.1
        )
        assert spec.first_choice_weight == 0.9

    def test_threshold_validation(self):
        with pytest.raises(AnnokitError):
            two_class_spec(hard_threshold=0.0)
        with pytest.raises(AnnokitError):
            two_class_spec(hard_threshold=1.0)

    def test_is_distribution(self):
        assert two_class_spec().is_distribution
        assert not two_class_spec(variant="topic").is_distribution


class TestFromAnnotations:
    def test_infers_annotators_and_mapping(self):
        frame = make_frame({"a1": {"s1": "b", "s2": "a"}, "a2": {"s1": "a"}})
        spec = labels.from_annotations(frame)
        assert spec.annotators == ["a1", "a2"]
        assert spec.mapping.classes == ["a", "b"]
        assert spec.variant == "default"

    def test_multi_value_split_for_topic(self):
        frame = make_frame({"a1": {"s1": "x,z", "s2": "y"}})
        spec = labels.from_annotations(frame, variant="topic")
        assert spec.mapping.classes == ["x", "y", "z"]

    def test_ordinal_numeric_order(self):
        frame = make_frame({"a1": {"s1": "10", "s2": "2", "s3": "1"}})
        spec = labels.from_annotations(frame, variant="ordinal")
        assert spec.mapping.classes == ["1", "2", "10"]

    def test_ordinal_falls_back_to_lexicographic(self):
        frame = make_frame({"a1": {"s1": "low", "s2": "high"}})
        spec = labels.from_annotations(frame, variant="ordinal")
        assert spec.mapping.classes == ["high", "low"]

    def test_explicit_mapping_wins(self):
        frame = make_frame({"a1": {"s1": "a"}})
        mapping = model.LabelMapping.from_values(["a", "b", "c"])
        spec = labels.from_annotations(frame, mapping=mapping)
        assert spec.num_classes == 3


class TestAnnotationProbLabels:
    def test_default_one_hot(self):
        frame = make_frame({"a1": {"s1": "a", "s2": "b"}, "a2": {"s1": "b"}})
        out = labels.annotation_prob_labels(frame, two_class_spec())
        by_id = dict(zip(out["sample_id"], out["a1_prob"]))
        assert list(by_id["s1"]) == [1.0, 0.0]
        assert list(by_id["s2"]) == [0.0, 1.0]
        missing = dict(zip(out["sample_id"], out["a2_prob"]))["s2"]
        assert missing is None

    def test_effi_two_choices(self):
        frame = make_frame({"a1": {"s1": "b,a", "s2": "a"}})
        mapping = model.LabelMapping.from_values(["a", "b"])
        spec = labels.GeneratorSpec(["a1"], mapping, variant="effi")
        out = labels.annotation_prob_labels(frame, spec)
        vecs = dict(zip(out["sample_id"], out["a1_prob"]))
        assert np.allclose(vecs["s1"], [1 / 3, 2 / 3])
        assert np.allclose(vecs["s2"], [1.0, 0.0])

    def test_effi_repeated_choice_accumulates(self):
        frame = make_frame({"a1": {"s1": "a,a"}})
        mapping = model.LabelMapping.from_values(["a", "b"])
        spec = labels.GeneratorSpec(["a1"], mapping, variant="effi")
        out = labels.annotation_prob_labels(frame, spec)
        assert np.allclose(out["a1_prob"].iloc[0], [1.0, 0.0])

    def test_effi_three_choices_rejected(self):
        frame = make_frame({"a1": {"s1": "a,b,a"}})
        mapping = model.LabelMapping.from_values(["a", "b"])
        spec = labels.GeneratorSpec(["a1"], mapping, variant="effi")
        with pytest.raises(UnmappedValueError):
            labels.annotation_prob_labels(frame, spec)

    def test_topic_multi_hot(self):
        frame = make_frame({"a1": {"s1": "x,z", "s2": "y"}})
        mapping = model.LabelMapping.from_values(["x", "y", "z"])
        spec = labels.GeneratorSpec(["a1"], mapping, variant="topic")
        out = labels.annotation_prob_labels(frame, spec)
        vecs = dict(zip(out["sample_id"], out["a1_prob"]))
        assert list(vecs["s1"]) == [1.0, 0.0, 1.0]
        assert list(vecs["s2"]) == [0.0, 1.0, 0.0]

    def test_re_columns_also_converted(self):
        frame = make_frame({"a1": {"s1": "a"}, "re_a1": {"s1": "b"}})
        out = labels.annotation_prob_labels(frame, two_class_spec())
        assert list(out["re_a1_prob"].iloc[0]) == [0.0, 1.0]

    def test_unmapped_value(self):
        frame = make_frame({"a1": {"s1": "c"}})
        with pytest.raises(UnmappedValueError, match="'c'"):
            labels.annotation_prob_labels(frame, two_class_spec())


class TestSampleProbLabels:
    def prob_frame(self, cells, spec):
        return labels.annotation_prob_labels(make_frame(cells), spec)

    def test_unweighted_mean(self):
        spec = two_class_spec()
        frame = self.prob_frame({"a1": {"s1": "a"}, "a2": {"s1": "b"}}, spec)
        out = labels.sample_prob_labels(frame, spec)
        assert np.allclose(out[model.SAMPLE_PROB].iloc[0], [0.5, 0.5])

    def test_reliability_weights(self):
        spec = two_class_spec()
        frame = self.prob_frame({"a1": {"s1": "a"}, "a2": {"s1": "b"}}, spec)
        out = labels.sample_prob_labels(frame, spec, reliabilities={"a1": 3.0, "a2": 1.0})
        assert np.allclose(out[model.SAMPLE_PROB].iloc[0], [0.75, 0.25])

    def test_missing_reliability_defaults_to_one(self):
        spec = two_class_spec()
        frame = self.prob_frame({"a1": {"s1": "a"}, "a2": {"s1": "b"}}, spec)
        out = labels.sample_prob_labels(frame, spec, reliabilities={"a1": 1.0})
        assert np.allclose(out[model.SAMPLE_PROB].iloc[0], [0.5, 0.5])

    def test_negative_reliability_clamped(self):
        spec = two_class_spec()
        frame = self.prob_frame({"a1": {"s1": "a"}, "a2": {"s1": "b"}}, spec)
        out = labels.sample_prob_labels(
            frame, spec, reliabilities={"a1": -2.0, "a2": 1.0}
        )
        assert np.allclose(out[model.SAMPLE_PROB].iloc[0], [0.0, 1.0])

    def test_reannotation_averaged(self):
        spec = two_class_spec()
        frame = self.prob_frame(
            {"a1": {"s1": "a"}, "re_a1": {"s1": "b"}, "a2": {"s1": "a"}}, spec
        )
        out = labels.sample_prob_labels(frame, spec)
        # a1 contributes ([1,0]+[0,1])/2, a2 contributes [1,0]
        assert np.allclose(out[model.SAMPLE_PROB].iloc[0], [0.75, 0.25])

    def test_absent_annotator_skipped(self):
        spec = two_class_spec()
        frame = self.prob_frame({"a1": {"s1": "a", "s2": "b"}, "a2": {"s1": "b"}}, spec)
        out = labels.sample_prob_labels(frame, spec)
        by_id = dict(zip(out["sample_id"], out[model.SAMPLE_PROB]))
        assert np.allclose(by_id["s2"], [0.0, 1.0])

    def test_no_annotations(self):
        spec = two_class_spec()
        frame = self.prob_frame(
            {"a1": {"s1": "a"}, "a2": {"s1": "b", "s2": "b"}}, spec
        )
        frame.loc[frame["sample_id"] == "s2", "a2_prob"] = None
        with pytest.raises(NoAnnotationsError, match="s2"):
            labels.sample_prob_labels(frame, spec)

    def test_all_zero_weights(self):
        spec = two_class_spec()
        frame = self.prob_frame({"a1": {"s1": "a"}, "a2": {"s1": "b"}}, spec)
        with pytest.raises(AllZeroWeightsError):
            labels.sample_prob_labels(frame, spec, reliabilities={"a1": 0.0, "a2": 0.0})

    def test_requires_prob_columns(self):
        spec = two_class_spec()
        with pytest.raises(AnnokitError, match="a1_prob"):
            labels.sample_prob_labels(make_frame({"a1": {"s1": "a"}}), spec)

    def test_distribution_sums_to_one(self):
        rng = np.random.default_rng(0)
        mapping = model.LabelMapping.from_values(["p", "q", "r"])
        names = ["a1", "a2", "a3"]
        spec = labels.GeneratorSpec(names, mapping, variant="effi")
        cells = {}
        for name in names:
            cells[name] = {}
            for s in range(40):
                pick = rng.choice(["p", "q", "r", "p,q", "r,p"])
                cells[name][f"s{s:02d}"] = pick
        frame = self.prob_frame(cells, spec)
        rel = {name: float(rng.uniform(0.2, 2.0)) for name in names}
        out = labels.sample_prob_labels(frame, spec, reliabilities=rel)
        sums = np.array([np.sum(v) for v in out[model.SAMPLE_PROB]])
        assert np.allclose(sums, 1.0, atol=1e-12)


class TestSampleHardLabels:
    def test_argmax_tie_breaks_low(self):
        spec = two_class_spec()
        frame = labels.annotation_prob_labels(
            make_frame({"a1": {"s1": "a"}, "a2": {"s1": "b"}}), spec
        )
        frame = labels.sample_prob_labels(frame, spec)
        out = labels.sample_hard_labels(frame, spec)
        assert out[model.SAMPLE_HARD].iloc[0] == 0

    def test_majority_differs_from_argmax(self):
        # two weak votes for b beat one strong vote for a under majority,
        # while reliability weighting flips argmax toward a
        mapping = model.LabelMapping.from_values(["a", "b"])
        spec = labels.GeneratorSpec(["a1", "a2", "a3"], mapping)
        frame = labels.annotation_prob_labels(
            make_frame(
                {"a1": {"s1": "a"}, "a2": {"s1": "b"}, "a3": {"s1": "b"}}
            ),
            spec,
        )
        rel = {"a1": 5.0, "a2": 1.0, "a3": 1.0}
        frame = labels.sample_prob_labels(frame, spec, reliabilities=rel)
        argmax = labels.sample_hard_labels(frame, spec, mode="argmax")
        majority = labels.sample_hard_labels(frame, spec, mode="majority")
        assert argmax[model.SAMPLE_HARD].iloc[0] == 0
        assert majority[model.SAMPLE_HARD].iloc[0] == 1

    def test_topic_threshold(self):
        mapping = model.LabelMapping.from_values(["x", "y", "z"])
        spec = labels.GeneratorSpec(["a1", "a2"], mapping, variant="topic")
        frame = labels.annotation_prob_labels(
            make_frame({"a1": {"s1": "x,y"}, "a2": {"s1": "x"}}), spec
        )
        frame = labels.sample_prob_labels(frame, spec)
        out = labels.sample_hard_labels(frame, spec)
        assert out[model.SAMPLE_HARD].iloc[0] == [0, 1]

    def test_topic_custom_threshold(self):
        mapping = model.LabelMapping.from_values(["x", "y", "z"])
        spec = labels.GeneratorSpec(
            ["a1", "a2"], mapping, variant="topic", hard_threshold=0.75
        )
        frame = labels.annotation_prob_labels(
            make_frame({"a1": {"s1": "x,y"}, "a2": {"s1": "x"}}), spec
        )
        frame = labels.sample_prob_labels(frame, spec)
        out = labels.sample_hard_labels(frame, spec)
        assert out[model.SAMPLE_HARD].iloc[0] == [0]

    def test_argmax_needs_sample_prob(self):
        spec = two_class_spec()
        frame = labels.annotation_prob_labels(make_frame({"a1": {"s1": "a"}}), spec)
        with pytest.raises(AnnokitError, match="sample_prob"):
            labels.sample_hard_labels(frame, spec)

    def test_unknown_mode(self):
        spec = two_class_spec()
        frame = labels.annotation_prob_labels(
            make_frame({"a1": {"s1": "a"}, "a2": {"s1": "a"}}), spec
        )
        frame = labels.sample_prob_labels(frame, spec)
        with pytest.raises(AnnokitError, match="mode"):
            labels.sample_hard_labels(frame, spec, mode="median")

    def test_majority_ignores_reliability(self):
        mapping = model.LabelMapping.from_values(["a", "b"])
        spec = labels.GeneratorSpec(["a1", "a2", "a3"], mapping)
        frame = labels.annotation_prob_labels(
            make_frame(
                {"a1": {"s1": "b"}, "a2": {"s1": "a"}, "a3": {"s1": "a"}}
            ),
            spec,
        )
        frame = labels.sample_prob_labels(frame, spec)
        out = labels.sample_hard_labels(frame, spec, mode="majority")
        assert out[model.SAMPLE_HARD].iloc[0] == 0

    def test_ordinal_pipeline(self):
        frame = make_frame(
            {"a1": {"s1": "3", "s2": "1"}, "a2": {"s1": "3", "s2": "2"}}
        )
        spec = labels.from_annotations(frame, variant="ordinal")
        frame = labels.annotation_prob_labels(frame, spec)
        frame = labels.sample_prob_labels(frame, spec)
        out = labels.sample_hard_labels(frame, spec)
        by_id = dict(zip(out["sample_id"], out[model.SAMPLE_HARD]))
        assert spec.mapping.classes[by_id["s1"]] == "3"
        # s2 ties between "1" and "2"; the lower scale point wins
        assert spec.mapping.classes[by_id["s2"]] == "1"
