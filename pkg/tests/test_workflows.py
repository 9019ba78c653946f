import numpy as np
import pytest

from annokit import workflows
from annokit.errors import AnnokitError
from conftest import make_frame


class TestRunReliability:
    def test_effi_cells_reduce_to_first_choice_for_hard_metrics(self):
        cells = {
            "a1": {f"s{i}": v for i, v in enumerate(["x,y", "y", "x", "y,x"])},
            "a2": {f"s{i}": v for i, v in enumerate(["x", "y", "x", "y"])},
        }
        frame = make_frame(cells)
        payload = workflows.run_reliability(
            frame,
            metric="krippendorff_nominal",
            label_generator="effi",
            overlap_threshold=2,
            outputs=["reliability"],
        )
        # first choices agree everywhere, so the pair is a perfect edge
        edge = payload["graph"]["edges"][0]
        assert edge["agreement"] == pytest.approx(1.0)

    def test_topic_with_hard_metric_rejected(self):
        frame = make_frame({"a1": {"s1": "x,y"}, "a2": {"s1": "x"}})
        with pytest.raises(AnnokitError, match="cosine|multi"):
            workflows.run_reliability(
                frame,
                metric="cohen_kappa",
                label_generator="topic",
                outputs=["reliability"],
            )

    def test_topic_with_cosine_works(self):
        cells = {
            "a1": {f"s{i}": v for i, v in enumerate(["x,y", "y", "x,z"])},
            "a2": {f"s{i}": v for i, v in enumerate(["x", "y,z", "z"])},
        }
        frame = make_frame(cells)
        payload = workflows.run_reliability(
            frame,
            metric="cosine",
            label_generator="topic",
            overlap_threshold=2,
            outputs=["reliability"],
        )
        assert payload["converged"] is True

    def test_unknown_output_rejected(self):
        frame = make_frame({"a1": {"s1": "x"}, "a2": {"s1": "x"}})
        with pytest.raises(AnnokitError, match="pie"):
            workflows.run_reliability(frame, outputs=["pie"])

    def test_reliability_files_mirror_outputs(self):
        cells = {
            "a1": {f"s{i}": str(i % 2) for i in range(6)},
            "a2": {f"s{i}": str(i % 2) for i in range(6)},
            "a3": {f"s{i}": str((i + 1) % 2) for i in range(6)},
        }
        frame = make_frame(cells)
        payload = workflows.run_reliability(
            frame, overlap_threshold=2, outputs=list(workflows.RELIABILITY_OUTPUTS)
        )
        files = workflows.reliability_files(payload)
        assert set(files) == {
            "report.json", "graph.json", "graph2d.svg", "scene3d.json",
            "heatmap.json", "heatmap.svg",
        }
        for payload_bytes in files.values():
            assert isinstance(payload_bytes, bytes)


class TestRunLabels:
    def test_pipeline_columns(self):
        frame = make_frame(
            {"a1": {"s1": "x", "s2": "y"}, "a2": {"s1": "x", "s2": "x"}}
        )
        out = workflows.run_labels(frame)
        for col in ("a1_prob", "a2_prob", "sample_prob", "sample_hard"):
            assert col in out.columns
        assert np.allclose(np.sum(list(out["sample_prob"]), axis=1), 1.0)

    def test_reliability_weighting_changes_soft_labels(self):
        frame = make_frame({"a1": {"s1": "x"}, "a2": {"s1": "y"}})
        flat = workflows.run_labels(frame)
        tilted = workflows.run_labels(frame, reliabilities={"a1": 3.0, "a2": 1.0})
        assert not np.allclose(
            flat["sample_prob"].iloc[0], tilted["sample_prob"].iloc[0]
        )
