"""End-to-end compositions shared by the CLI and the HTTP service.

Both frontends produce their outputs through these functions so a given
input yields byte-identical files whichever way it is processed.
"""

from __future__ import annotations

import json
from typing import Optional, Sequence

import pandas as pd

from . import distribution, labels, model, viz
from .agreement import PROB_METRICS, build_graph, normalize_metric
from .errors import AnnokitError
from .model import ProjectConfig
from .reliability import ReliabilityConfig, compute_reliability

RELIABILITY_OUTPUTS = ("reliability", "graph2d", "graph3d", "heatmap")


def run_distribute(
    frame: pd.DataFrame,
    spec: distribution.ResourceSpec,
    seed: int = 0,
    annotator_names: Optional[Sequence[str]] = None,
    ring_span: int = 1,
):
    """Solve the spec, distribute the frame, render the output files.

    Returns (solved_spec, allocation, files) where files maps file name to
    bytes: one task CSV per annotator, leftover.csv, spec.json and
    allocation.json.
    """
    solved = distribution.solve_resources(spec)
    alloc = distribution.distribute(
        frame, solved, seed=seed, annotator_names=annotator_names, ring_span=ring_span
    )
    files = distribution.allocation_files(alloc, frame, solved)
    return solved, alloc, files


def run_redistribute(
    frame: pd.DataFrame,
    spec: distribution.ResourceSpec,
    seed: int = 0,
    annotator_names: Optional[Sequence[str]] = None,
    data_columns: Sequence[str] = (),
):
    """Reassign stuck samples; returns (solved_spec, allocation, files)."""
    solved = distribution.solve_resources(spec)
    alloc = distribution.redistribute(
        frame,
        solved,
        seed=seed,
        annotator_names=annotator_names,
        data_columns=data_columns,
    )
    keep = [model.SAMPLE_ID] + [
        c
        for c in frame.columns
        if c in data_columns
        or (
            c != model.SAMPLE_ID
            and c not in alloc.assignments
            and not c.startswith(model.RE_PREFIX)
            and not c.endswith(model.PROB_SUFFIX)
            and c not in model.RESERVED_COLUMNS
        )
    ]
    files = distribution.allocation_files(alloc, frame[keep], solved)
    return solved, alloc, files


def _effi_first_choice(frame: pd.DataFrame, annotators: Sequence[str]) -> pd.DataFrame:
    """Reduce effi cells to their first choice for hard-label metrics."""
    out = frame.copy()
    columns = []
    for name in annotators:
        if name in frame.columns:
            columns.append(name)
        if model.RE_PREFIX + name in frame.columns:
            columns.append(model.RE_PREFIX + name)
    for col in columns:
        out[col] = frame[col].map(
            lambda c: c if model.is_missing(c) else str(c).split(",")[0].strip()
        )
    return out


def run_reliability(
    frame: pd.DataFrame,
    *,
    metric: str = "krippendorff_nominal",
    alpha: float = 0.5,
    overlap_threshold: int = 0,
    label_generator: str = "default",
    mapping: Optional[model.LabelMapping] = None,
    annotators: Optional[Sequence[str]] = None,
    data_columns: Sequence[str] = (),
    outputs: Sequence[str] = RELIABILITY_OUTPUTS,
    heatmap_annotators: Optional[Sequence[str]] = None,
    heatmap_others: Optional[Sequence[str]] = None,
    tolerance: float = 1e-6,
    max_iterations: int = 100,
) -> dict:
    """Agreement graph, reliability fixed point, and requested exports.

    The returned payload always carries the reliability report and graph
    JSON; image/scene/matrix entries appear per the outputs selection.
    """
    outputs = list(outputs)
    for entry in outputs:
        if entry not in RELIABILITY_OUTPUTS:
            raise AnnokitError(
                f"unknown output {entry!r}; expected any of {', '.join(RELIABILITY_OUTPUTS)}"
            )
    metric = normalize_metric(metric)
    if annotators is None:
        annotators = model.detect_annotators(frame, data_columns=data_columns)
    annotators = list(annotators)

    gen = labels.from_annotations(
        frame, annotators, variant=label_generator, mapping=mapping
    )
    work = frame
    if metric in PROB_METRICS:
        work = labels.annotation_prob_labels(frame, gen)
    elif label_generator == "effi":
        work = _effi_first_choice(frame, annotators)
    elif label_generator == "topic":
        raise AnnokitError(
            "topic annotations need a probability metric (cosine or "
            "krippendorff_multi)"
        )

    config = ProjectConfig(
        annotators=annotators,
        metric=metric,
        reliability_alpha=alpha,
        overlap_threshold=overlap_threshold,
    )
    graph = build_graph(work, config, mapping=gen.mapping)
    report = compute_reliability(
        graph, ReliabilityConfig(alpha=alpha, tolerance=tolerance, max_iterations=max_iterations)
    )

    payload = {
        "reliability": report.reliability,
        "iterations": report.iterations,
        "converged": report.converged,
        "alpha": alpha,
        "metric": metric,
        "overlap_threshold": overlap_threshold,
        "graph": graph.to_json(),
        "outputs": outputs,
    }
    images = {}
    if "graph2d" in outputs:
        images["graph2d"] = viz.export_graph_2d(graph)
    if "heatmap" in outputs:
        payload["heatmap_matrix"] = viz.heatmap_matrix(
            graph, heatmap_annotators, heatmap_others
        )
        images["heatmap"] = viz.export_heatmap(graph, heatmap_annotators, heatmap_others)
    if "graph3d" in outputs:
        payload["scene3d"] = viz.export_graph_3d(graph)
    if images:
        payload["images"] = images
    return payload


def reliability_files(payload: dict) -> dict:
    """Render a run_reliability payload to files, honoring its outputs list."""
    files = {}
    outputs = payload["outputs"]
    if "reliability" in outputs:
        report = {
            key: payload[key]
            for key in (
                "reliability",
                "iterations",
                "converged",
                "alpha",
                "metric",
                "overlap_threshold",
            )
        }
        files["report.json"] = _json_bytes(report)
    if "graph2d" in outputs:
        files["graph.json"] = _json_bytes(payload["graph"])
        files["graph2d.svg"] = payload["images"]["graph2d"].encode()
    if "graph3d" in outputs:
        files["scene3d.json"] = _json_bytes(payload["scene3d"])
    if "heatmap" in outputs:
        files["heatmap.json"] = _json_bytes(payload["heatmap_matrix"])
        files["heatmap.svg"] = payload["images"]["heatmap"].encode()
    return files


def run_labels(
    frame: pd.DataFrame,
    *,
    label_generator: str = "default",
    mapping: Optional[model.LabelMapping] = None,
    annotators: Optional[Sequence[str]] = None,
    data_columns: Sequence[str] = (),
    reliabilities: Optional[dict] = None,
    hard_mode: str = "argmax",
) -> pd.DataFrame:
    """Full label generation: per-annotator probs, sample probs, hard labels."""
    if annotators is None:
        annotators = model.detect_annotators(frame, data_columns=data_columns)
    gen = labels.from_annotations(
        frame, annotators, variant=label_generator, mapping=mapping
    )
    out = labels.annotation_prob_labels(frame, gen)
    out = labels.sample_prob_labels(out, gen, reliabilities=reliabilities)
    out = labels.sample_hard_labels(out, gen, mode=hard_mode)
    return out


def _json_bytes(data) -> bytes:
    return (json.dumps(data, indent=2, sort_keys=True) + "\n").encode()
