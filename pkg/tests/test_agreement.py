import numpy as np
import pytest

import oracles
from annokit import agreement, model
from annokit.errors import (
    DegenerateMetricWarning,
    DisconnectedAnnotatorWarning,
    InsufficientOverlapError,
    UnmappedValueError,
)
from annokit.model import LabelMapping, ProjectConfig
from conftest import make_frame


def idx(values):
    return [int(v) for v in values]


class TestHandValues:
    def test_cohen_kappa_half(self, two_rater_fixture):
        a, b = two_rater_fixture
        assert agreement.cohen_kappa(idx(a), idx(b)) == pytest.approx(0.5, abs=1e-12)

    def test_fleiss_kappa(self, two_rater_fixture):
        a, b = two_rater_fixture
        expected = (0.75 - 0.53125) / (1 - 0.53125)
        assert agreement.fleiss_kappa(idx(a), idx(b)) == pytest.approx(expected, abs=1e-12)

    def test_nominal_alpha(self, two_rater_fixture):
        a, b = two_rater_fixture
        value = agreement.krippendorff_alpha(idx(a), idx(b), "nominal")
        assert value == pytest.approx(oracles.krippendorff_alpha(idx(a), idx(b)), abs=1e-12)
        assert value == pytest.approx(0.5333, abs=1e-4)

    def test_interval_alpha(self):
        # scale 1..5 mapped to indices 0..4
        a, b = [0, 1, 2], [0, 1, 3]
        value = agreement.krippendorff_alpha(a, b, "interval")
        oracle = oracles.krippendorff_alpha(a, b, oracles.interval_delta)
        assert value == pytest.approx(oracle, abs=1e-12)
        assert value == pytest.approx(36 / 41, abs=1e-9)

    def test_disjoint_constant_raters(self):
        assert agreement.cohen_kappa([0, 0], [1, 1]) == pytest.approx(0.0, abs=1e-12)

    def test_cosine_hand_value(self):
        value = agreement.cosine_agreement(
            [[0.5, 0.5, 0.0]], [[0.5, 0.0, 0.5]]
        )
        assert value == pytest.approx(0.5, abs=1e-12)

    def test_identical_sequences(self):
        a = [0, 1, 2, 1]
        for metric in ("cohen_kappa", "fleiss_kappa", "krippendorff_nominal",
                       "krippendorff_interval"):
            assert agreement.pairwise_agreement(a, a, metric) == pytest.approx(1.0)


class TestDegenerateCases:
    def test_constant_identical(self):
        with pytest.warns(DegenerateMetricWarning):
            assert agreement.cohen_kappa([0, 0, 0], [0, 0, 0]) == 1.0
        with pytest.warns(DegenerateMetricWarning):
            assert agreement.krippendorff_alpha([1, 1], [1, 1], "nominal") == 1.0

    def test_multi_label_all_constant(self):
        vecs = [[1, 0], [1, 0], [1, 0]]
        with pytest.warns(DegenerateMetricWarning):
            assert agreement.multi_label_agreement(vecs, vecs) == 1.0

    def test_zero_vector_contributes_zero(self):
        value = agreement.cosine_agreement(
            [[0.0, 0.0], [1.0, 0.0]], [[1.0, 0.0], [1.0, 0.0]]
        )
        assert value == pytest.approx(0.5)


class TestOracleEquivalence:
    @pytest.mark.filterwarnings("ignore::annokit.errors.DegenerateMetricWarning")
    def test_random_instances(self):
        rng = np.random.default_rng(42)
        for _ in range(200):
            n = rng.integers(2, 13)
            C = rng.integers(2, 5)
            a = rng.integers(0, C, size=n)
            b = rng.integers(0, C, size=n)
            la, lb = list(map(int, a)), list(map(int, b))
            checks = [
                (agreement.cohen_kappa(a, b), oracles.cohen_kappa(la, lb)),
                (agreement.fleiss_kappa(a, b), oracles.fleiss_kappa(la, lb)),
                (
                    agreement.krippendorff_alpha(a, b, "nominal"),
                    oracles.krippendorff_alpha(la, lb),
                ),
                (
                    agreement.krippendorff_alpha(a, b, "interval"),
                    oracles.krippendorff_alpha(la, lb, oracles.interval_delta),
                ),
            ]
            for got, expected in checks:
                assert got == pytest.approx(expected, abs=1e-9)

    @pytest.mark.filterwarnings("ignore::annokit.errors.DegenerateMetricWarning")
    def test_prob_metric_instances(self):
        rng = np.random.default_rng(43)
        for _ in range(100):
            n = rng.integers(2, 13)
            C = rng.integers(2, 5)
            pa = rng.random((n, C))
            pb = rng.random((n, C))
            got = agreement.cosine_agreement(pa, pb)
            expected = oracles.cosine_agreement(pa.tolist(), pb.tolist())
            assert got == pytest.approx(expected, abs=1e-9)
            ma = (rng.random((n, C)) < 0.5).astype(float)
            mb = (rng.random((n, C)) < 0.5).astype(float)
            got = agreement.multi_label_agreement(ma, mb)
            expected = oracles.multi_label_agreement(ma.tolist(), mb.tolist())
            assert got == pytest.approx(expected, abs=1e-9)

    def test_symmetry_and_permutation(self):
        rng = np.random.default_rng(44)
        for _ in range(50):
            n = int(rng.integers(3, 12))
            a = rng.integers(0, 3, size=n)
            b = rng.integers(0, 3, size=n)
            perm = rng.permutation(n)
            for metric in ("cohen_kappa", "fleiss_kappa", "krippendorff_nominal"):
                lhs = agreement.pairwise_agreement(a, b, metric)
                assert lhs == agreement.pairwise_agreement(b, a, metric)
                assert lhs == pytest.approx(
                    agreement.pairwise_agreement(a[perm], b[perm], metric), abs=1e-12
                )


class TestPairExtraction:
    def test_missing_cells_dropped_pairwise(self):
        frame = make_frame(
            {
                "a1": {"s1": "0", "s2": "1", "s3": "0"},
                "a2": {"s1": "0", "s3": "1"},
            }
        )
        mapping = LabelMapping.from_values(["0", "1"])
        a, b = agreement.pair_values(frame, "a1", "a2", "cohen_kappa", mapping)
        assert len(a) == len(b) == 2

    def test_unmapped_value(self):
        frame = make_frame({"a1": {"s1": "weird"}, "a2": {"s1": "0"}})
        mapping = LabelMapping.from_values(["0", "1"])
        with pytest.raises(UnmappedValueError):
            agreement.pair_values(frame, "a1", "a2", "cohen_kappa", mapping)

    def test_prob_metric_requires_prob_columns(self):
        frame = make_frame({"a1": {"s1": "0"}, "a2": {"s1": "0"}})
        with pytest.raises(Exception):
            agreement.pair_values(frame, "a1", "a2", "cosine", None)

    def test_insufficient_overlap(self):
        frame = make_frame({"a1": {"s1": "0"}, "a2": {"s1": "0"}})
        mapping = LabelMapping.from_values(["0", "1"])
        a, b = agreement.pair_values(frame, "a1", "a2", "cohen_kappa", mapping)
        with pytest.raises(InsufficientOverlapError):
            agreement.pairwise_agreement(a, b, "cohen_kappa")


class TestIntraAgreement:
    def test_identical_re_annotations(self):
        frame = make_frame(
            {
                "a1": {"s1": "0", "s2": "1", "s3": "0"},
                "re_a1": {"s1": "0", "s2": "1"},
            }
        )
        mapping = LabelMapping.from_values(["0", "1"])
        value = agreement.intra_agreement(frame, "a1", "krippendorff_nominal", mapping)
        assert value == pytest.approx(1.0)

    def test_absent_without_re_column(self):
        frame = make_frame({"a1": {"s1": "0", "s2": "1"}})
        mapping = LabelMapping.from_values(["0", "1"])
        assert agreement.intra_agreement(frame, "a1", "krippendorff_nominal", mapping) is None

    def test_flips_match_oracle(self):
        first = ["0", "1", "0", "1", "0", "1", "0", "1", "0", "1"]
        second = list(first)
        second[2] = "1"
        second[7] = "0"
        frame = make_frame(
            {
                "a1": {f"s{i}": v for i, v in enumerate(first)},
                "re_a1": {f"s{i}": v for i, v in enumerate(second)},
            }
        )
        mapping = LabelMapping.from_values(["0", "1"])
        value = agreement.intra_agreement(frame, "a1", "krippendorff_nominal", mapping)
        oracle = oracles.krippendorff_alpha(idx(first), idx(second))
        assert value == pytest.approx(oracle, abs=1e-12)

    def test_threshold_suppresses(self):
        frame = make_frame(
            {
                "a1": {"s1": "0", "s2": "1", "s3": "0"},
                "re_a1": {"s1": "0", "s2": "1"},
            }
        )
        mapping = LabelMapping.from_values(["0", "1"])
        assert (
            agreement.intra_agreement(
                frame, "a1", "krippendorff_nominal", mapping, overlap_threshold=3
            )
            is None
        )


class TestBuildGraph:
    def _ring_frame(self, shared: int):
        cells = {"a1": {}, "a2": {}, "a3": {}}
        rng = np.random.default_rng(0)
        names = ["a1", "a2", "a3"]
        sid = 0
        for i in range(3):
            left, right = names[i], names[(i + 1) % 3]
            for _ in range(shared):
                label = str(rng.integers(0, 2))
                cells[left][f"s{sid}"] = label
                cells[right][f"s{sid}"] = label if rng.random() < 0.8 else str(
                    1 - int(label)
                )
                sid += 1
        return make_frame(cells)

    def test_threshold_gate(self):
        frame = self._ring_frame(shared=25)
        config = ProjectConfig(
            annotators=["a1", "a2", "a3"],
            metric="krippendorff_nominal",
            overlap_threshold=30,
        )
        with pytest.warns(DisconnectedAnnotatorWarning):
            graph = agreement.build_graph(frame, config)
        assert len(graph.edges) == 0
        config = ProjectConfig(
            annotators=["a1", "a2", "a3"],
            metric="krippendorff_nominal",
            overlap_threshold=10,
        )
        graph = agreement.build_graph(frame, config)
        assert len(graph.edges) == 3
        assert graph.edge("a1", "a2")["overlap"] == 25

    def test_reliability_initialized_to_one(self):
        frame = self._ring_frame(shared=10)
        config = ProjectConfig(annotators=["a1", "a2", "a3"], metric="krippendorff_nominal")
        graph = agreement.build_graph(frame, config)
        assert all(graph.reliability(a) == 1.0 for a in graph.annotators)

    def test_edge_values_match_pairwise(self):
        frame = self._ring_frame(shared=12)
        config = ProjectConfig(annotators=["a1", "a2", "a3"], metric="krippendorff_nominal")
        mapping = model.infer_label_mapping(frame, config.annotators)
        graph = agreement.build_graph(frame, config)
        a, b = agreement.pair_values(frame, "a1", "a2", "krippendorff_nominal", mapping)
        expected = agreement.krippendorff_alpha(a, b, "nominal")
        assert graph.edge("a1", "a2")["agreement"] == pytest.approx(expected, abs=1e-12)

    def test_json_round_trip(self):
        frame = self._ring_frame(shared=10)
        config = ProjectConfig(annotators=["a1", "a2", "a3"], metric="krippendorff_nominal")
        graph = agreement.build_graph(frame, config)
        payload = graph.to_json()
        assert set(payload) == {"nodes", "edges"}
        assert {n["id"] for n in payload["nodes"]} == {"a1", "a2", "a3"}
        for edge in payload["edges"]:
            assert set(edge) == {"a", "b", "agreement", "overlap"}
        back = agreement.AnnotatorGraph.from_json(payload)
        assert back.to_json() == payload
