"""Pairwise agreement metrics, intra-annotator agreement, annotator graph.

All metrics share one shape: two aligned sequences over the samples both
raters labelled. Hard metrics (kappa, alpha) take class-index sequences;
cosine and multi-label alpha take probability-vector sequences from the
generated ``_prob`` columns.

Chance-corrected metrics hit a 0/0 when the data has no variance (every
pooled label identical). Those cases return 1.0 if observed agreement is
also perfect, else 0.0, and emit a DegenerateMetricWarning.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Sequence

import numpy as np
import pandas as pd

from . import model
from .errors import (
    AnnokitError,
    DegenerateMetricWarning,
    DisconnectedAnnotatorWarning,
    InsufficientOverlapError,
    UnmappedValueError,
)
from .model import LabelMapping, ProjectConfig, is_missing

_EPS = 1e-12


class AgreementMetric(str, Enum):
    KRIPPENDORFF_NOMINAL = "krippendorff_nominal"
    KRIPPENDORFF_INTERVAL = "krippendorff_interval"
    COHEN_KAPPA = "cohen_kappa"
    FLEISS_KAPPA = "fleiss_kappa"
    COSINE = "cosine"
    MULTI_KRIPPENDORFF = "multi_krippendorff"


_ALIASES = {
    "krippendorff": AgreementMetric.KRIPPENDORFF_NOMINAL,
    "alpha": AgreementMetric.KRIPPENDORFF_NOMINAL,
    "nominal": AgreementMetric.KRIPPENDORFF_NOMINAL,
    "interval": AgreementMetric.KRIPPENDORFF_INTERVAL,
    "cohen": AgreementMetric.COHEN_KAPPA,
    "kappa": AgreementMetric.COHEN_KAPPA,
    "fleiss": AgreementMetric.FLEISS_KAPPA,
    "multi": AgreementMetric.MULTI_KRIPPENDORFF,
    "multi_label": AgreementMetric.MULTI_KRIPPENDORFF,
}

#: every accepted metric spelling, canonical names first (CLI choices)
METRIC_CHOICES = tuple(m.value for m in AgreementMetric) + tuple(sorted(_ALIASES))

#: metrics computed on probability-vector labels rather than hard labels
PROB_METRICS = {AgreementMetric.COSINE, AgreementMetric.MULTI_KRIPPENDORFF}

#: metrics that correct for chance and therefore need >= 2 shared samples
CHANCE_CORRECTED = {
    AgreementMetric.KRIPPENDORFF_NOMINAL,
    AgreementMetric.KRIPPENDORFF_INTERVAL,
    AgreementMetric.COHEN_KAPPA,
    AgreementMetric.FLEISS_KAPPA,
    AgreementMetric.MULTI_KRIPPENDORFF,
}


def normalize_metric(metric) -> AgreementMetric:
    if isinstance(metric, AgreementMetric):
        return metric
    key = str(metric).lower()
    if key in _ALIASES:
        return _ALIASES[key]
    try:
        return AgreementMetric(key)
    except ValueError:
        raise AnnokitError(
            f"unknown agreement metric {metric!r}; choose one of "
            f"{[m.value for m in AgreementMetric]}"
        ) from None


def min_overlap(metric) -> int:
    """Smallest shared-sample count on which the metric is defined."""
    return 2 if normalize_metric(metric) in CHANCE_CORRECTED else 1


def _degenerate(observed_perfect: bool, metric_name: str) -> float:
    warnings.warn(
        f"{metric_name}: zero variance in the pooled labels; "
        f"returning {'1.0' if observed_perfect else '0.0'}",
        DegenerateMetricWarning,
        stacklevel=3,
    )
    return 1.0 if observed_perfect else 0.0


def _as_index_arrays(a, b):
    a = np.asarray(a, dtype=int)
    b = np.asarray(b, dtype=int)
    if a.shape != b.shape or a.ndim != 1:
        raise AnnokitError(f"sequences must be equal-length 1-D, got {a.shape} and {b.shape}")
    return a, b


def cohen_kappa(a: Sequence, b: Sequence) -> float:
    """Cohen's kappa: (p_o - p_e) / (1 - p_e), p_e from per-rater marginals."""
    a, b = _as_index_arrays(a, b)
    if len(a) < 2:
        raise InsufficientOverlapError(f"cohen_kappa needs >= 2 shared samples, got {len(a)}")
    n = len(a)
    k = int(max(a.max(), b.max())) + 1
    p_a = np.bincount(a, minlength=k) / n
    p_b = np.bincount(b, minlength=k) / n
    p_o = float(np.mean(a == b))
    p_e = float(p_a @ p_b)
    if p_e >= 1.0 - _EPS:
        return _degenerate(p_o >= 1.0 - _EPS, "cohen_kappa")
    return (p_o - p_e) / (1.0 - p_e)


def fleiss_kappa(a: Sequence, b: Sequence) -> float:
    """Two-rater Fleiss' kappa (pooled marginals; equals Scott's pi)."""
    a, b = _as_index_arrays(a, b)
    if len(a) < 2:
        raise InsufficientOverlapError(f"fleiss_kappa needs >= 2 shared samples, got {len(a)}")
    n = len(a)
    k = int(max(a.max(), b.max())) + 1
    pooled = (np.bincount(a, minlength=k) + np.bincount(b, minlength=k)) / (2 * n)
    p_o = float(np.mean(a == b))
    p_e = float(pooled @ pooled)
    if p_e >= 1.0 - _EPS:
        return _degenerate(p_o >= 1.0 - _EPS, "fleiss_kappa")
    return (p_o - p_e) / (1.0 - p_e)


def krippendorff_alpha(a: Sequence, b: Sequence, distance: str = "nominal") -> float:
    """Two-rater Krippendorff's alpha from the coincidence matrix.

    alpha = 1 - D_o / D_e where D_o is the observed and D_e the expected
    pairwise disagreement. distance is "nominal" (delta = [c != k]) or
    "interval" (delta = (c - k)^2 over the class indices).
    """
    a, b = _as_index_arrays(a, b)
    if len(a) < 2:
        raise InsufficientOverlapError(f"krippendorff_alpha needs >= 2 shared samples, got {len(a)}")
    k = int(max(a.max(), b.max())) + 1
    coincidence = np.zeros((k, k))
    np.add.at(coincidence, (a, b), 1.0)
    np.add.at(coincidence, (b, a), 1.0)
    n_c = coincidence.sum(axis=1)
    n = n_c.sum()  # 2 * number of units

    if distance == "nominal":
        delta = 1.0 - np.eye(k)
    elif distance == "interval":
        idx = np.arange(k, dtype=float)
        delta = (idx[:, None] - idx[None, :]) ** 2
    else:
        raise AnnokitError(f"unknown alpha distance {distance!r}")

    d_o = float((coincidence * delta).sum()) / n
    d_e = float((np.outer(n_c, n_c) * delta).sum()) / (n * (n - 1))
    if d_e < _EPS:
        return _degenerate(d_o < _EPS, "krippendorff_alpha")
    return 1.0 - d_o / d_e


def cosine_agreement(probs_a: Sequence, probs_b: Sequence) -> float:
    """Mean cosine similarity between paired probability vectors.

    A zero-vector operand makes that sample contribute 0.
    """
    A = np.asarray([np.asarray(p, dtype=float) for p in probs_a])
    B = np.asarray([np.asarray(p, dtype=float) for p in probs_b])
    if A.shape != B.shape or A.ndim != 2:
        raise AnnokitError(f"probability sequences must align, got {A.shape} and {B.shape}")
    if len(A) < 1:
        raise InsufficientOverlapError("cosine_agreement needs >= 1 shared sample")
    norms = np.linalg.norm(A, axis=1) * np.linalg.norm(B, axis=1)
    dots = (A * B).sum(axis=1)
    cos = np.divide(dots, norms, out=np.zeros_like(dots), where=norms > 0)
    return float(cos.mean())


def multi_label_agreement(probs_a: Sequence, probs_b: Sequence) -> float:
    """Per-class nominal alpha over binarized indicators, averaged.

    Classes whose pooled indicator is constant across both raters carry no
    signal and are skipped; if every class is constant the observed
    agreement is perfect and the zero-variance rule applies.
    """
    A = (np.asarray([np.asarray(p, dtype=float) for p in probs_a]) >= 0.5).astype(int)
    B = (np.asarray([np.asarray(p, dtype=float) for p in probs_b]) >= 0.5).astype(int)
    if A.shape != B.shape or A.ndim != 2:
        raise AnnokitError(f"probability sequences must align, got {A.shape} and {B.shape}")
    if len(A) < 2:
        raise InsufficientOverlapError(f"multi_label_agreement needs >= 2 shared samples, got {len(A)}")
    alphas = []
    for k in range(A.shape[1]):
        pooled = np.concatenate([A[:, k], B[:, k]])
        if np.all(pooled == pooled[0]):
            continue
        alphas.append(krippendorff_alpha(A[:, k], B[:, k], "nominal"))
    if not alphas:
        # every class constant in both raters: observed agreement is perfect
        return _degenerate(True, "multi_label_agreement")
    return float(np.mean(alphas))


def pairwise_agreement(labels_a: Sequence, labels_b: Sequence, metric) -> float:
    """Common interface: dispatch two aligned label sequences to a metric."""
    metric = normalize_metric(metric)
    if metric is AgreementMetric.COHEN_KAPPA:
        return cohen_kappa(labels_a, labels_b)
    if metric is AgreementMetric.FLEISS_KAPPA:
        return fleiss_kappa(labels_a, labels_b)
    if metric is AgreementMetric.KRIPPENDORFF_NOMINAL:
        return krippendorff_alpha(labels_a, labels_b, "nominal")
    if metric is AgreementMetric.KRIPPENDORFF_INTERVAL:
        return krippendorff_alpha(labels_a, labels_b, "interval")
    if metric is AgreementMetric.COSINE:
        return cosine_agreement(labels_a, labels_b)
    return multi_label_agreement(labels_a, labels_b)


def _mapped(frame: pd.DataFrame, column: str, rows, mapping: LabelMapping) -> np.ndarray:
    out = np.empty(len(rows), dtype=int)
    for i, row in enumerate(rows):
        raw = frame.at[row, column]
        try:
            out[i] = mapping.index_of(raw)
        except KeyError:
            raise UnmappedValueError(
                f"value {raw!r} in column {column!r} is not in the label mapping",
                row=str(frame.at[row, model.SAMPLE_ID]) if model.SAMPLE_ID in frame.columns else str(row),
            ) from None
    return out


def _pair_rows(frame: pd.DataFrame, col_a: str, col_b: str):
    present_a = ~frame[col_a].map(is_missing) if col_a in frame.columns else pd.Series(False, index=frame.index)
    present_b = ~frame[col_b].map(is_missing) if col_b in frame.columns else pd.Series(False, index=frame.index)
    return frame.index[present_a & present_b]


def pair_values(
    frame: pd.DataFrame,
    col_a: str,
    col_b: str,
    metric,
    mapping: Optional[LabelMapping] = None,
):
    """Aligned value sequences for the rows both columns filled.

    Hard metrics read the raw columns through the mapping; probability
    metrics read the corresponding ``_prob`` columns over the same rows.
    """
    metric = normalize_metric(metric)
    rows = _pair_rows(frame, col_a, col_b)
    if metric in PROB_METRICS:
        pa, pb = col_a + model.PROB_SUFFIX, col_b + model.PROB_SUFFIX
        if pa not in frame.columns or pb not in frame.columns:
            raise AnnokitError(
                f"metric {metric.value} needs generated probability columns "
                f"{pa!r} and {pb!r}; run annotation_prob_labels first"
            )
        return list(frame.loc[rows, pa]), list(frame.loc[rows, pb])
    if mapping is None:
        raise AnnokitError(f"metric {metric.value} needs a label mapping")
    return _mapped(frame, col_a, rows, mapping), _mapped(frame, col_b, rows, mapping)


def overlap_count(frame: pd.DataFrame, annotator_a: str, annotator_b: str) -> int:
    """Number of samples annotated by both (first-pass columns)."""
    return len(_pair_rows(frame, annotator_a, annotator_b))


def intra_agreement(
    frame: pd.DataFrame,
    annotator: str,
    metric,
    mapping: Optional[LabelMapping] = None,
    overlap_threshold: int = 0,
) -> Optional[float]:
    """Agreement between an annotator's first pass and their re-annotations.

    Returns None (absent) when the annotator re-annotated fewer rows than
    the overlap threshold or than the metric's minimum.
    """
    metric = normalize_metric(metric)
    re_col = model.RE_PREFIX + annotator
    if re_col not in frame.columns:
        return None
    rows = _pair_rows(frame, annotator, re_col)
    if len(rows) < max(overlap_threshold, min_overlap(metric)):
        return None
    seq_a, seq_b = pair_values(frame, annotator, re_col, metric, mapping)
    return pairwise_agreement(seq_a, seq_b, metric)


@dataclass
class AnnotatorGraph:
    """Undirected weighted graph over annotators.

    nodes: name -> {"intra": float | None, "reliability": float}
    edges: (a, b) sorted tuple -> {"agreement": float, "overlap": int}
    """

    nodes: dict = field(default_factory=dict)
    edges: dict = field(default_factory=dict)

    @property
    def annotators(self) -> list:
        return list(self.nodes)

    def add_node(self, name: str, intra: Optional[float] = None, reliability: float = 1.0):
        self.nodes[name] = {"intra": intra, "reliability": reliability}

    def add_edge(self, a: str, b: str, agreement: float, overlap: int):
        self.edges[tuple(sorted((a, b)))] = {"agreement": float(agreement), "overlap": int(overlap)}

    def edge(self, a: str, b: str) -> Optional[dict]:
        return self.edges.get(tuple(sorted((a, b))))

    def neighbors(self, name: str) -> list:
        out = []
        for (a, b), data in self.edges.items():
            if a == name:
                out.append((b, data))
            elif b == name:
                out.append((a, data))
        return out

    def reliability(self, name: str) -> float:
        return self.nodes[name]["reliability"]

    def intra(self, name: str) -> Optional[float]:
        return self.nodes[name]["intra"]

    def to_json(self) -> dict:
        return {
            "nodes": [
                {"id": name, "intra": data["intra"], "reliability": data["reliability"]}
                for name, data in self.nodes.items()
            ],
            "edges": [
                {"a": a, "b": b, "agreement": d["agreement"], "overlap": d["overlap"]}
                for (a, b), d in sorted(self.edges.items())
            ],
        }

    @classmethod
    def from_json(cls, payload: dict) -> "AnnotatorGraph":
        graph = cls()
        for node in payload["nodes"]:
            graph.add_node(node["id"], node.get("intra"), node.get("reliability", 1.0))
        for edge in payload["edges"]:
            graph.add_edge(edge["a"], edge["b"], edge["agreement"], edge["overlap"])
        return graph


def build_graph(
    frame: pd.DataFrame,
    config: ProjectConfig,
    mapping: Optional[LabelMapping] = None,
) -> AnnotatorGraph:
    """Build the annotator graph: intra values on nodes, one edge per pair
    with sufficient overlap, every reliability initialized to 1.

    An edge needs overlap >= max(config.overlap_threshold, metric minimum);
    the metric minimum only matters for thresholds below 2.
    """
    metric = normalize_metric(config.metric)
    if metric not in PROB_METRICS and mapping is None:
        mapping = model.infer_label_mapping(frame, config.annotators)

    graph = AnnotatorGraph()
    for name in config.annotators:
        intra = intra_agreement(
            frame, name, metric, mapping, overlap_threshold=config.overlap_threshold
        )
        graph.add_node(name, intra=intra, reliability=1.0)

    names = list(config.annotators)
    needed = max(config.overlap_threshold, min_overlap(metric))
    for i, a in enumerate(names):
        for b in names[i + 1:]:
            count = overlap_count(frame, a, b)
            if count < needed:
                continue
            seq_a, seq_b = pair_values(frame, a, b, metric, mapping)
            graph.add_edge(a, b, pairwise_agreement(seq_a, seq_b, metric), count)

    for name in names:
        if not graph.neighbors(name):
            warnings.warn(
                f"annotator {name!r} has no agreement edges "
                f"(overlap threshold {config.overlap_threshold})",
                DisconnectedAnnotatorWarning,
                stacklevel=2,
            )
    return graph
